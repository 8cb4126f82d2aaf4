#include "ftdtw/synthetic.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ftdtw/error.hpp"
#include "ftdtw/rng.hpp"

namespace ftdtw {

namespace {

struct Bump {
  double centre, width, amplitude;
};

using Curve = std::vector<Bump>;

double eval(const Curve& c, double u) {
  double v = 0.0;
  for (const auto& b : c) {
    const double z = (u - b.centre) / b.width;
    v += b.amplitude * std::exp(-0.5 * z * z);
  }
  return v;
}

// Knots of a monotone piecewise-linear map with warp(0)=0, warp(1)=1.
std::vector<double> random_warp(PortableRng& rng, std::size_t segments, double strength) {
  std::vector<double> knots(segments + 1, 0.0);
  for (std::size_t k = 1; k <= segments; ++k) knots[k] = knots[k - 1] + std::exp(strength * rng.normal());
  for (auto& k : knots) k /= knots.back();
  return knots;
}

double apply_warp(const std::vector<double>& knots, double u) {
  const std::size_t segments = knots.size() - 1;
  const double pos = u * static_cast<double>(segments);
  const auto k = std::min(static_cast<std::size_t>(pos), segments - 1);
  const double frac = pos - static_cast<double>(k);
  return knots[k] + frac * (knots[k + 1] - knots[k]);
}

}  // namespace

LabeledDataset make_warped_dataset(const SyntheticSpec& spec) {
  if (spec.classes == 0 || spec.per_class == 0 || spec.dims == 0 || spec.pool == 0 ||
      spec.min_length == 0 || spec.min_length > spec.max_length || spec.warp_segments == 0) {
    throw Error(ErrorCode::InvalidConfig, "synthetic spec has an empty or inverted range");
  }
  PortableRng rng(spec.seed);

  // pool[l][s]: prototype curve s of dimension l.
  std::vector<std::vector<Curve>> pool(spec.dims, std::vector<Curve>(spec.pool));
  for (auto& per_dim : pool) {
    for (auto& curve : per_dim) {
      for (std::size_t b = 0; b < spec.bumps; ++b) {
        curve.push_back({rng.uniform(0.1, 0.9), rng.uniform(0.05, 0.12), rng.uniform(-3.0, 3.0)});
      }
    }
  }
  auto shape_of = [&](std::size_t c, std::size_t l) {
    if (l == 0) return c % spec.pool;
    return (c / spec.pool + (l + 1) * c) % spec.pool;
  };

  LabeledDataset out;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t member = 0; member < spec.per_class; ++member) {
      const std::size_t len =
          spec.min_length + static_cast<std::size_t>(rng.below(spec.max_length - spec.min_length + 1));
      std::vector<Frame> frames(len, Frame(spec.dims));
      for (std::size_t l = 0; l < spec.dims; ++l) {
        const auto warp = random_warp(rng, spec.warp_segments, spec.warp_strength);
        const auto& curve = pool[l][shape_of(c, l)];
        for (std::size_t t = 0; t < len; ++t) {
          const double u = len == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(len - 1);
          frames[t][l] = eval(curve, apply_warp(warp, u)) + spec.noise * rng.normal();
        }
      }
      out.sequences.emplace_back(fmt::format("c{}_n{:03}", c, member), std::move(frames));
      out.labels.push_back(fmt::format("c{}", c));
    }
  }
  return out;
}

}  // namespace ftdtw
