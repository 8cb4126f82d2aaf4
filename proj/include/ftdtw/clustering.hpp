#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ftdtw/proximity.hpp"

namespace ftdtw {

/// One agglomeration step. Leaves are 0..N-1; the node created by merge k
/// gets id N+k. `left` is always the smaller of the two child ids.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;

  bool operator==(const Merge&) const = default;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  ///< N-1 records in merge order

  bool operator==(const Dendrogram&) const = default;
};

/// Cluster id per segment; ids are 0..clusters-1 with none empty.
struct Partition {
  std::vector<std::size_t> assignment;
  std::size_t clusters = 0;

  bool operator==(const Partition&) const = default;
};

/// Ward distance between cluster (i u j) and k from the pre-merge distances,
/// via the Lance-Williams recurrence on squared values. Inputs and result are
/// non-squared.
double ward_update(double d_ik, double d_jk, double d_ij, std::size_t n_i, std::size_t n_j,
                   std::size_t n_k);

/// Agglomerative clustering with Ward linkage. Each step merges the pair with
/// the smallest linkage; exact ties go to the lexicographically smallest
/// (min node id, max node id). Nearest neighbours are cached per cluster so a
/// typical run costs O(N^2).
Dendrogram ahc_ward(const ProximityMatrix& pm);

/// Undoes the last R-1 merges. Cluster ids follow the first segment (by index)
/// of each cluster. Throws Error(ROutOfRange) unless 1 <= R <= N.
Partition cut(const Dendrogram& d, std::size_t clusters);

/// Structural checks: child uniqueness, size consistency, root covers all leaves.
bool is_well_formed(const Dendrogram& d);

void write_dendrogram(std::ostream& os, const Dendrogram& d);
Dendrogram read_dendrogram(std::istream& is);

void write_partition(std::ostream& os, const std::vector<std::string>& ids, const Partition& p);

struct LabeledPartition {
  std::vector<std::string> ids;
  Partition partition;
};

/// Reads "segment_id<TAB>cluster_id" lines; rejects gaps in cluster ids.
LabeledPartition read_partition(std::istream& is);

}  // namespace ftdtw
