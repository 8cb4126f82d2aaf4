#pragma once

#include <cstddef>
#include <cstdint>

#include "ftdtw/sequence.hpp"

namespace ftdtw {

/// Labelled sequences whose feature trajectories are time-warped
/// independently of one another.
///
/// Every class owns one prototype curve per dimension, a sum of Gaussian
/// bumps on [0, 1]. Prototype curves come from a small per-dimension pool, so
/// a single dimension alone does not identify the class. A member samples
/// each dimension's prototype through its own random monotone warp, then
/// adds white noise.
struct SyntheticSpec {
  std::size_t classes = 10;
  std::size_t per_class = 40;
  std::size_t dims = 2;
  std::size_t min_length = 20;
  std::size_t max_length = 40;
  std::size_t bumps = 3;
  std::size_t pool = 5;             ///< prototype curves per dimension
  std::size_t warp_segments = 4;    ///< pieces of the piecewise-linear warp
  double warp_strength = 0.6;       ///< log-normal spread of piece slopes
  double noise = 0.15;
  std::uint64_t seed = 1;
};

/// Ids are "c<class>_n<member>", labels "c<class>"; classes are contiguous.
LabeledDataset make_warped_dataset(const SyntheticSpec& spec);

}  // namespace ftdtw
