#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ftdtw {

using Frame = std::vector<double>;

/// One segment: T ordered frames, each an m-dimensional feature vector.
///
/// The type does not enforce its invariants on construction so that raw,
/// possibly malformed input can be carried into validate_dataset(), which
/// reports every violation at once. Everything downstream of validation may
/// assume T >= 1, a uniform dimension m >= 1, and finite values.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(std::string id, std::vector<Frame> frames)
      : id_(std::move(id)), frames_(std::move(frames)) {}

  const std::string& id() const noexcept { return id_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  std::size_t length() const noexcept { return frames_.size(); }
  /// Dimension of the first frame, 0 for an empty sequence.
  std::size_t dim() const noexcept { return frames_.empty() ? 0 : frames_.front().size(); }
  std::span<const double> frame(std::size_t t) const { return frames_.at(t); }

  bool operator==(const FeatureSequence&) const = default;

 private:
  std::string id_;
  std::vector<Frame> frames_;
};

/// The scalar series formed by one coordinate of every frame.
struct FeatureTrajectory {
  std::vector<double> values;

  bool operator==(const FeatureTrajectory&) const = default;
};

/// Extracts coordinate `dim` (0-based) of every frame. Throws
/// Error(DimensionOutOfRange) when dim >= seq.dim().
FeatureTrajectory trajectory(const FeatureSequence& seq, std::size_t dim);

/// All m trajectories of a sequence, in dimension order.
std::vector<FeatureTrajectory> trajectories(const FeatureSequence& seq);

/// Inverse of trajectories(): rebuilds frames from m equal-length trajectories.
FeatureSequence assemble(std::string id, std::span<const FeatureTrajectory> trajs);

struct LabeledDataset {
  std::vector<FeatureSequence> sequences;
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return sequences.size(); }
  std::size_t dim() const noexcept { return sequences.empty() ? 0 : sequences.front().dim(); }
  /// Distinct class labels in order of first appearance.
  std::vector<std::string> classes() const;

  bool operator==(const LabeledDataset&) const = default;
};

/// Checks every invariant of the dataset and its sequences. Returns the input
/// unchanged when all hold, otherwise throws ValidationError listing each
/// violation with the offending segment id.
const LabeledDataset& validate_dataset(const LabeledDataset& raw);

}  // namespace ftdtw
