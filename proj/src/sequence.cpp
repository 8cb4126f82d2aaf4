#include "ftdtw/sequence.hpp"

#include <cmath>
#include <unordered_set>

#include "ftdtw/error.hpp"

namespace ftdtw {

FeatureTrajectory trajectory(const FeatureSequence& seq, std::size_t dim) {
  if (dim >= seq.dim()) {
    throw Error(ErrorCode::DimensionOutOfRange,
                "dimension " + std::to_string(dim) + " of sequence '" + seq.id() +
                    "' with m=" + std::to_string(seq.dim()));
  }
  FeatureTrajectory out;
  out.values.reserve(seq.length());
  for (const auto& f : seq.frames()) out.values.push_back(f.at(dim));
  return out;
}

std::vector<FeatureTrajectory> trajectories(const FeatureSequence& seq) {
  std::vector<FeatureTrajectory> out(seq.dim());
  for (auto& tr : out) tr.values.reserve(seq.length());
  for (const auto& f : seq.frames()) {
    for (std::size_t l = 0; l < out.size(); ++l) out[l].values.push_back(f.at(l));
  }
  return out;
}

FeatureSequence assemble(std::string id, std::span<const FeatureTrajectory> trajs) {
  if (trajs.empty()) throw Error(ErrorCode::EmptySequence, "no trajectories for '" + id + "'");
  const std::size_t t_len = trajs.front().values.size();
  std::vector<Frame> frames(t_len, Frame(trajs.size()));
  for (std::size_t l = 0; l < trajs.size(); ++l) {
    if (trajs[l].values.size() != t_len) {
      throw Error(ErrorCode::LengthMismatch, "trajectory lengths differ in '" + id + "'");
    }
    for (std::size_t t = 0; t < t_len; ++t) frames[t][l] = trajs[l].values[t];
  }
  return FeatureSequence(std::move(id), std::move(frames));
}

std::vector<std::string> LabeledDataset::classes() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (seen.insert(l).second) out.push_back(l);
  }
  return out;
}

const LabeledDataset& validate_dataset(const LabeledDataset& raw) {
  std::vector<Violation> found;
  if (raw.sequences.size() < 2) {
    found.push_back({ErrorCode::EmptyDataset, "",
                     "N=" + std::to_string(raw.sequences.size()) + ", at least 2 required"});
  }
  if (raw.labels.size() != raw.sequences.size()) {
    found.push_back({ErrorCode::LengthMismatch, "",
                     std::to_string(raw.labels.size()) + " labels for " +
                         std::to_string(raw.sequences.size()) + " sequences"});
  }

  // The dataset-wide m is taken from the first non-empty sequence.
  std::size_t m = 0;
  for (const auto& s : raw.sequences) {
    if (s.length() > 0 && s.dim() > 0) {
      m = s.dim();
      break;
    }
  }

  std::unordered_set<std::string> ids;
  for (const auto& s : raw.sequences) {
    if (!ids.insert(s.id()).second) found.push_back({ErrorCode::DuplicateId, s.id(), ""});
    if (s.length() == 0) {
      found.push_back({ErrorCode::EmptySequence, s.id(), ""});
      continue;
    }
    for (std::size_t t = 0; t < s.length(); ++t) {
      const auto& f = s.frames()[t];
      if (f.size() != m || m == 0) {
        found.push_back({ErrorCode::DimensionMismatch, s.id(),
                         "frame " + std::to_string(t) + ": expected m=" + std::to_string(m) +
                             ", found " + std::to_string(f.size())});
        continue;
      }
      for (std::size_t l = 0; l < f.size(); ++l) {
        if (!std::isfinite(f[l])) {
          found.push_back({ErrorCode::NonFiniteValue, s.id(),
                           "frame " + std::to_string(t) + " dim " + std::to_string(l)});
        }
      }
    }
  }
  if (!found.empty()) throw ValidationError(std::move(found));
  return raw;
}

}  // namespace ftdtw
