#include "ftdtw/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ftdtw/error.hpp"

namespace ftdtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Step { Diagonal, Up, Left };

// Shared by the backtrack and the forward path-length tracking; the two must
// agree for dtw_score and dtw_align to report the same K.
inline Step choose_predecessor(double diag, double up, double left) {
  if (diag <= up && diag <= left) return Step::Diagonal;
  if (up <= left) return Step::Up;
  return Step::Left;
}

void check_inputs(std::size_t tx, std::size_t ty, const AlignOptions& opts) {
  if (tx == 0 || ty == 0) throw Error(ErrorCode::EmptySequence, "cannot align an empty sequence");
  if (opts.band) {
    const std::size_t diff = tx > ty ? tx - ty : ty - tx;
    if (diff > *opts.band) {
      throw Error(ErrorCode::BandInfeasible,
                  fmt::format("lengths {} and {} differ by more than band width {}", tx, ty,
                              *opts.band));
    }
  }
}

inline bool in_band(std::size_t p, std::size_t q, const AlignOptions& opts) {
  if (!opts.band) return true;
  return (p > q ? p - q : q - p) <= *opts.band;
}

void check_dims(const FeatureSequence& x, const FeatureSequence& y) {
  if (x.length() == 0 || y.length() == 0) {
    throw Error(ErrorCode::EmptySequence,
                fmt::format("'{}' or '{}' has no frames", x.id(), y.id()));
  }
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("'{}' has m={}, '{}' has m={}", x.id(), x.dim(), y.id(), y.dim()));
  }
}

// Rolling two-row DP; `local(p, q)` yields the frame distance.
template <typename Local>
AlignmentScore rolling_dp(std::size_t tx, std::size_t ty, const AlignOptions& opts,
                          Local&& local) {
  check_inputs(tx, ty, opts);
  std::vector<double> prev(ty, kInf), cur(ty, kInf);
  std::vector<std::size_t> prev_k(ty, 0), cur_k(ty, 0);

  for (std::size_t p = 0; p < tx; ++p) {
    std::fill(cur.begin(), cur.end(), kInf);
    std::size_t q_lo = 0, q_hi = ty - 1;
    if (opts.band) {
      q_lo = p > *opts.band ? p - *opts.band : 0;
      q_hi = std::min(ty - 1, p + *opts.band);
    }
    for (std::size_t q = q_lo; q <= q_hi; ++q) {
      const double d = local(p, q);
      if (p == 0 && q == 0) {
        cur[q] = d;
        cur_k[q] = 1;
        continue;
      }
      const double diag = (p > 0 && q > 0) ? prev[q - 1] : kInf;
      const double up = p > 0 ? prev[q] : kInf;
      const double left = q > 0 ? cur[q - 1] : kInf;
      switch (choose_predecessor(diag, up, left)) {
        case Step::Diagonal:
          cur[q] = d + diag;
          cur_k[q] = prev_k[q - 1] + 1;
          break;
        case Step::Up:
          cur[q] = d + up;
          cur_k[q] = prev_k[q] + 1;
          break;
        case Step::Left:
          cur[q] = d + left;
          cur_k[q] = cur_k[q - 1] + 1;
          break;
      }
    }
    std::swap(prev, cur);
    std::swap(prev_k, cur_k);
  }
  return AlignmentScore{prev[ty - 1], prev_k[ty - 1]};
}

}  // namespace

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::Euclidean ? "euclidean" : "manhattan";
}

DistanceKind parse_distance_kind(std::string_view name) {
  if (name == "euclidean") return DistanceKind::Euclidean;
  if (name == "manhattan") return DistanceKind::Manhattan;
  throw Error(ErrorCode::InvalidConfig, fmt::format("unknown distance kind '{}'", name));
}

double frame_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("frame dimensions {} and {}", a.size(), b.size()));
  }
  double acc = 0.0;
  if (kind == DistanceKind::Euclidean) {
    for (std::size_t l = 0; l < a.size(); ++l) {
      const double diff = a[l] - b[l];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  }
  for (std::size_t l = 0; l < a.size(); ++l) acc += std::abs(a[l] - b[l]);
  return acc;
}

AlignmentResult dtw_align(const FeatureSequence& x, const FeatureSequence& y, DistanceKind kind,
                          const AlignOptions& opts) {
  check_dims(x, y);
  const std::size_t tx = x.length(), ty = y.length();
  check_inputs(tx, ty, opts);

  std::vector<double> gamma(tx * ty, kInf);
  auto at = [&](std::size_t p, std::size_t q) -> double& { return gamma[p * ty + q]; };

  for (std::size_t p = 0; p < tx; ++p) {
    for (std::size_t q = 0; q < ty; ++q) {
      if (!in_band(p, q, opts)) continue;
      const double d = frame_distance(x.frame(p), y.frame(q), kind);
      if (p == 0 && q == 0) {
        at(p, q) = d;
        continue;
      }
      const double diag = (p > 0 && q > 0) ? at(p - 1, q - 1) : kInf;
      const double up = p > 0 ? at(p - 1, q) : kInf;
      const double left = q > 0 ? at(p, q - 1) : kInf;
      switch (choose_predecessor(diag, up, left)) {
        case Step::Diagonal: at(p, q) = d + diag; break;
        case Step::Up: at(p, q) = d + up; break;
        case Step::Left: at(p, q) = d + left; break;
      }
    }
  }

  AlignmentResult r;
  std::size_t p = tx - 1, q = ty - 1;
  r.path.push_back({p, q});
  while (p != 0 || q != 0) {
    const double diag = (p > 0 && q > 0) ? at(p - 1, q - 1) : kInf;
    const double up = p > 0 ? at(p - 1, q) : kInf;
    const double left = q > 0 ? at(p, q - 1) : kInf;
    switch (choose_predecessor(diag, up, left)) {
      case Step::Diagonal: --p; --q; break;
      case Step::Up: --p; break;
      case Step::Left: --q; break;
    }
    r.path.push_back({p, q});
  }
  std::reverse(r.path.begin(), r.path.end());
  r.cumulative.reserve(r.path.size());
  for (const auto& c : r.path) r.cumulative.push_back(at(c.p, c.q));
  r.cost = at(tx - 1, ty - 1);
  r.path_length = r.path.size();
  r.normalised = r.cost / static_cast<double>(r.path_length);
  return r;
}

AlignmentScore dtw_score(const FeatureSequence& x, const FeatureSequence& y, DistanceKind kind,
                         const AlignOptions& opts) {
  check_dims(x, y);
  return rolling_dp(x.length(), y.length(), opts, [&](std::size_t p, std::size_t q) {
    return frame_distance(x.frames()[p], y.frames()[q], kind);
  });
}

AlignmentScore dtw_score_1d(std::span<const double> x, std::span<const double> y,
                            const AlignOptions& opts) {
  return rolling_dp(x.size(), y.size(), opts,
                    [&](std::size_t p, std::size_t q) { return std::abs(x[p] - y[q]); });
}

double dtw_similarity(const FeatureSequence& x, const FeatureSequence& y, DistanceKind kind,
                      const AlignOptions& opts) {
  return dtw_score(x, y, kind, opts).normalised();
}

FtdtwResult ftdtw_align(std::span<const FeatureTrajectory> x, std::span<const FeatureTrajectory> y,
                        const AlignOptions& opts) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("trajectory counts {} and {}", x.size(), y.size()));
  }
  if (x.empty()) throw Error(ErrorCode::EmptySequence, "no trajectories to align");
  FtdtwResult r;
  r.costs.reserve(x.size());
  r.path_lengths.reserve(x.size());
  double cost_sum = 0.0;
  double k_sq_sum = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    const auto s = dtw_score_1d(x[l].values, y[l].values, opts);
    r.costs.push_back(s.cost);
    r.path_lengths.push_back(s.path_length);
    cost_sum += s.cost;
    const auto k = static_cast<double>(s.path_length);
    k_sq_sum += k * k;
  }
  r.beta = std::sqrt(k_sq_sum);
  r.value = cost_sum / r.beta;
  return r;
}

FtdtwResult ftdtw_align(const FeatureSequence& x, const FeatureSequence& y,
                        const AlignOptions& opts) {
  check_dims(x, y);
  const auto tx = trajectories(x);
  const auto ty = trajectories(y);
  return ftdtw_align(tx, ty, opts);
}

double ftdtw_similarity(const FeatureSequence& x, const FeatureSequence& y,
                        const AlignOptions& opts) {
  return ftdtw_align(x, y, opts).value;
}

namespace {

struct OracleSearch {
  const std::vector<double>& local;  // Tx*Ty distances
  std::size_t tx, ty;
  std::vector<PathCell> current;
  double best_cost = kInf;
  std::vector<PathCell> best_path;

  void visit(std::size_t p, std::size_t q, double acc) {
    acc += local[p * ty + q];
    current.push_back({p, q});
    if (p == tx - 1 && q == ty - 1) {
      // Paths arrive in lexicographic order, so strict < keeps the smallest on ties.
      if (acc < best_cost) {
        best_cost = acc;
        best_path = current;
      }
    } else {
      if (q + 1 < ty) visit(p, q + 1, acc);
      if (p + 1 < tx) visit(p + 1, q, acc);
      if (p + 1 < tx && q + 1 < ty) visit(p + 1, q + 1, acc);
    }
    current.pop_back();
  }
};

}  // namespace

AlignmentResult oracle_align(const FeatureSequence& x, const FeatureSequence& y,
                             DistanceKind kind) {
  check_dims(x, y);
  const std::size_t tx = x.length(), ty = y.length();
  if (tx + ty > kOracleMaxCells) {
    throw Error(ErrorCode::InstanceTooLarge,
                fmt::format("Tx+Ty={} exceeds oracle limit {}", tx + ty, kOracleMaxCells));
  }
  std::vector<double> local(tx * ty);
  for (std::size_t p = 0; p < tx; ++p)
    for (std::size_t q = 0; q < ty; ++q) local[p * ty + q] = frame_distance(x.frame(p), y.frame(q), kind);

  OracleSearch search{local, tx, ty, {}, kInf, {}};
  search.visit(0, 0, 0.0);

  AlignmentResult r;
  r.cost = search.best_cost;
  r.path = std::move(search.best_path);
  r.path_length = r.path.size();
  r.normalised = r.cost / static_cast<double>(r.path_length);
  return r;
}

bool is_valid_path(const AlignmentResult& r, std::size_t tx, std::size_t ty) {
  if (r.path.empty() || r.path.size() != r.path_length) return false;
  if (r.path.front() != PathCell{0, 0}) return false;
  if (r.path.back() != PathCell{tx - 1, ty - 1}) return false;
  for (std::size_t i = 1; i < r.path.size(); ++i) {
    const auto dp = r.path[i].p - r.path[i - 1].p;
    const auto dq = r.path[i].q - r.path[i - 1].q;
    const bool ok = (dp == 1 && dq == 1) || (dp == 1 && dq == 0) || (dp == 0 && dq == 1);
    if (!ok || r.path[i].p < r.path[i - 1].p || r.path[i].q < r.path[i - 1].q) return false;
  }
  return r.path_length >= std::max(tx, ty) && r.path_length <= tx + ty - 1;
}

void write_path_dump(std::ostream& os, const AlignmentResult& r) {
  fmt::print(os, "# K={} cost={} normalised={}\n", r.path_length, r.cost, r.normalised);
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    const double c = i < r.cumulative.size() ? r.cumulative[i] : std::nan("");
    fmt::print(os, "{}\t{}\t{}\n", r.path[i].p + 1, r.path[i].q + 1, c);
  }
}

}  // namespace ftdtw
