#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftdtw/sequence.hpp"

namespace ftdtw {

enum class DistanceKind { Euclidean, Manhattan };

std::string_view to_string(DistanceKind kind);
/// Accepts "euclidean" / "manhattan"; throws Error(InvalidConfig) otherwise.
DistanceKind parse_distance_kind(std::string_view name);

/// Local frame distance d(a, b). Throws Error(DimensionMismatch) on unequal sizes.
double frame_distance(std::span<const double> a, std::span<const double> b, DistanceKind kind);

/// Optional global constraint. With a band of width w only cells with
/// |p - q| <= w are admissible; an alignment whose end cell falls outside the
/// band is an error (BandInfeasible), never silently relaxed.
struct AlignOptions {
  std::optional<std::size_t> band;
};

/// Cell index on the alignment grid, 0-based.
struct PathCell {
  std::size_t p = 0;
  std::size_t q = 0;

  auto operator<=>(const PathCell&) const = default;
};

struct AlignmentResult {
  double cost = 0.0;              ///< accumulated, non-normalised cost at the end cell
  std::vector<PathCell> path;     ///< (0,0) .. (Tx-1, Ty-1)
  std::size_t path_length = 0;    ///< K, number of cells on the path
  double normalised = 0.0;        ///< cost / K
  /// Accumulated cost at each path cell; only filled by dtw_align.
  std::vector<double> cumulative;
};

/// Cost and path length only; what proximity builds need.
struct AlignmentScore {
  double cost = 0.0;
  std::size_t path_length = 0;

  double normalised() const { return cost / static_cast<double>(path_length); }
};

/// Full classical DTW with backtracking. Ties in the backtrack prefer the
/// diagonal predecessor, then (p-1, q), then (p, q-1).
AlignmentResult dtw_align(const FeatureSequence& x, const FeatureSequence& y,
                          DistanceKind kind = DistanceKind::Euclidean,
                          const AlignOptions& opts = {});

/// Two-row variant of dtw_align. Tracks K forward using the same predecessor
/// rule as the backtrack, so the result matches dtw_align exactly.
AlignmentScore dtw_score(const FeatureSequence& x, const FeatureSequence& y,
                         DistanceKind kind = DistanceKind::Euclidean,
                         const AlignOptions& opts = {});

/// 1-D DTW with |a - b| local cost.
AlignmentScore dtw_score_1d(std::span<const double> x, std::span<const double> y,
                            const AlignOptions& opts = {});

/// Path-length normalised classical DTW dissimilarity.
double dtw_similarity(const FeatureSequence& x, const FeatureSequence& y,
                      DistanceKind kind = DistanceKind::Euclidean,
                      const AlignOptions& opts = {});

struct FtdtwResult {
  std::vector<double> costs;              ///< non-normalised cost per dimension
  std::vector<std::size_t> path_lengths;  ///< K_l per dimension
  double beta = 0.0;                      ///< sqrt(sum K_l^2)
  double value = 0.0;                     ///< sum(costs) / beta
};

/// Feature-trajectory DTW: every dimension's trajectory pair is aligned on its
/// own; the per-dimension costs are summed and divided by beta.
FtdtwResult ftdtw_align(const FeatureSequence& x, const FeatureSequence& y,
                        const AlignOptions& opts = {});

/// Same, from trajectories extracted beforehand.
FtdtwResult ftdtw_align(std::span<const FeatureTrajectory> x, std::span<const FeatureTrajectory> y,
                        const AlignOptions& opts = {});

double ftdtw_similarity(const FeatureSequence& x, const FeatureSequence& y,
                        const AlignOptions& opts = {});

/// Largest Tx + Ty the exhaustive oracle accepts.
inline constexpr std::size_t kOracleMaxCells = 14;

/// Exhaustive search over every monotone path. Ties go to the
/// lexicographically smallest path. Throws Error(InstanceTooLarge) when
/// Tx + Ty exceeds kOracleMaxCells.
AlignmentResult oracle_align(const FeatureSequence& x, const FeatureSequence& y,
                             DistanceKind kind = DistanceKind::Euclidean);

/// Checks the endpoint, step, and length invariants of a result.
bool is_valid_path(const AlignmentResult& r, std::size_t tx, std::size_t ty);

/// Writes "# K=<int> cost=<float> normalised=<float>" then one
/// "p<TAB>q<TAB>cumulative_cost" line per path cell (1-based indices).
void write_path_dump(std::ostream& os, const AlignmentResult& r);

}  // namespace ftdtw
