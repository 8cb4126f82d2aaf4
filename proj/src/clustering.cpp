#include "ftdtw/clustering.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ftdtw/error.hpp"
#include "text_util.hpp"

namespace ftdtw {

double ward_update(double d_ik, double d_jk, double d_ij, std::size_t n_i, std::size_t n_j,
                   std::size_t n_k) {
  const double ni = static_cast<double>(n_i);
  const double nj = static_cast<double>(n_j);
  const double nk = static_cast<double>(n_k);
  const double sq = ((ni + nk) * d_ik * d_ik + (nj + nk) * d_jk * d_jk - nk * d_ij * d_ij) /
                    (ni + nj + nk);
  return std::sqrt(std::max(sq, 0.0));
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Working state over slots 0..n-1. A slot keeps its index for its lifetime;
// a merge reuses the lower slot and retires the other.
class WardWorkspace {
 public:
  explicit WardWorkspace(const ProximityMatrix& pm)
      : n_(pm.size()), dist_(pm.condensed()), node_(n_), size_(n_, 1), active_(n_, true),
        nn_(n_, kNone), nn_dist_(n_, kInf) {
    std::iota(node_.begin(), node_.end(), 0);
    for (std::size_t i = 0; i < n_; ++i) refresh(i);
  }

  Dendrogram run() {
    Dendrogram out;
    out.leaves = n_;
    out.merges.reserve(n_ > 0 ? n_ - 1 : 0);
    std::size_t next_node = n_;
    for (std::size_t step = 0; step + 1 < n_; ++step) {
      const std::size_t a = best_slot();
      const std::size_t b = nn_[a];
      const double h = d(a, b);

      for (std::size_t k = 0; k < n_; ++k) {
        if (!active_[k] || k == a || k == b) continue;
        d(a, k) = ward_update(d(a, k), d(b, k), h, size_[a], size_[b], size_[k]);
      }
      out.merges.push_back({std::min(node_[a], node_[b]), std::max(node_[a], node_[b]), h,
                            size_[a] + size_[b]});
      active_[b] = false;
      size_[a] += size_[b];
      node_[a] = next_node++;
      // The new node has the largest id, so it owns no candidate pairs itself.
      nn_[a] = kNone;
      nn_dist_[a] = kInf;
      nn_[b] = kNone;
      nn_dist_[b] = kInf;

      for (std::size_t k = 0; k < n_; ++k) {
        if (!active_[k] || k == a) continue;
        if (nn_[k] == a || nn_[k] == b) {
          refresh(k);
        } else if (d(k, a) < nn_dist_[k]) {
          // Equal distance keeps the old neighbour: its node id is smaller.
          nn_[k] = a;
          nn_dist_[k] = d(k, a);
        }
      }
    }
    return out;
  }

 private:
  double& d(std::size_t i, std::size_t j) {
    return dist_[ProximityMatrix::condensed_index(n_, i, j)];
  }

  // Nearest neighbour of slot i among clusters with a larger node id.
  void refresh(std::size_t i) {
    nn_[i] = kNone;
    nn_dist_[i] = kInf;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i || !active_[j] || node_[j] < node_[i]) continue;
      const double v = d(i, j);
      if (nn_[i] == kNone || v < nn_dist_[i] || (v == nn_dist_[i] && node_[j] < node_[nn_[i]])) {
        nn_[i] = j;
        nn_dist_[i] = v;
      }
    }
  }

  std::size_t best_slot() const {
    std::size_t best = kNone;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!active_[i] || nn_[i] == kNone) continue;
      if (best == kNone || nn_dist_[i] < nn_dist_[best] ||
          (nn_dist_[i] == nn_dist_[best] &&
           (node_[i] < node_[best] ||
            (node_[i] == node_[best] && node_[nn_[i]] < node_[nn_[best]])))) {
        best = i;
      }
    }
    return best;
  }

  std::size_t n_;
  std::vector<double> dist_;
  std::vector<std::size_t> node_;
  std::vector<std::size_t> size_;
  std::vector<bool> active_;
  std::vector<std::size_t> nn_;
  std::vector<double> nn_dist_;
};

}  // namespace

Dendrogram ahc_ward(const ProximityMatrix& pm) {
  if (pm.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, "clustering needs at least 2 segments");
  }
  return WardWorkspace(pm).run();
}

Partition cut(const Dendrogram& d, std::size_t clusters) {
  const std::size_t n = d.leaves;
  if (clusters < 1 || clusters > n) {
    throw Error(ErrorCode::ROutOfRange, fmt::format("R={} outside [1, {}]", clusters, n));
  }
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < n - clusters; ++k) {
    const auto& m = d.merges[k];
    parent[find(m.left)] = n + k;
    parent[find(m.right)] = n + k;
  }

  Partition p;
  p.assignment.resize(n);
  std::vector<std::size_t> label(2 * n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (label[root] == kNone) label[root] = p.clusters++;
    p.assignment[i] = label[root];
  }
  return p;
}

bool is_well_formed(const Dendrogram& d) {
  const std::size_t n = d.leaves;
  if (n == 0 || d.merges.size() != n - 1) return false;
  std::vector<std::size_t> size(2 * n - 1, 0);
  std::vector<bool> used(2 * n - 1, false);
  for (std::size_t i = 0; i < n; ++i) size[i] = 1;
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const auto& m = d.merges[k];
    const std::size_t id = n + k;
    if (m.left >= id || m.right >= id || m.left == m.right) return false;
    if (used[m.left] || used[m.right]) return false;
    used[m.left] = used[m.right] = true;
    size[id] = size[m.left] + size[m.right];
    if (size[id] != m.size || !(m.height >= 0.0)) return false;
  }
  return size[2 * n - 2] == n;
}

void write_dendrogram(std::ostream& os, const Dendrogram& d) {
  fmt::print(os, "# left\tright\theight\tsize\n");
  for (const auto& m : d.merges) fmt::print(os, "{}\t{}\t{}\t{}\n", m.left, m.right, m.height, m.size);
}

Dendrogram read_dendrogram(std::istream& is) {
  Dendrogram d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::is_blank(line) || line.front() == '#') continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 4) throw Error(ErrorCode::MalformedLine, fmt::format("dendrogram line {}", lineno));
    Merge m;
    m.left = detail::parse_size(f[0], lineno);
    m.right = detail::parse_size(f[1], lineno);
    m.height = detail::parse_double(f[2], lineno);
    m.size = detail::parse_size(f[3], lineno);
    d.merges.push_back(m);
  }
  d.leaves = d.merges.size() + 1;
  if (!is_well_formed(d)) throw Error(ErrorCode::BadFormat, "dendrogram is not a valid merge tree");
  return d;
}

void write_partition(std::ostream& os, const std::vector<std::string>& ids, const Partition& p) {
  if (ids.size() != p.assignment.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} ids for {} assignments", ids.size(), p.assignment.size()));
  }
  fmt::print(os, "# segment_id\tcluster_id\n");
  for (std::size_t i = 0; i < ids.size(); ++i) fmt::print(os, "{}\t{}\n", ids[i], p.assignment[i]);
}

LabeledPartition read_partition(std::istream& is) {
  LabeledPartition out;
  std::string line;
  std::size_t lineno = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::is_blank(line) || line.front() == '#') continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 2) throw Error(ErrorCode::MalformedLine, fmt::format("partition line {}", lineno));
    std::string id(detail::trim(f[0]));
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, "segment id '" + id + "'");
    out.ids.push_back(std::move(id));
    out.partition.assignment.push_back(detail::parse_size(f[1], lineno));
  }
  std::vector<bool> present;
  for (auto c : out.partition.assignment) {
    if (c >= present.size()) present.resize(c + 1, false);
    present[c] = true;
  }
  for (std::size_t c = 0; c < present.size(); ++c) {
    if (!present[c]) throw Error(ErrorCode::BadFormat, fmt::format("cluster id {} is empty", c));
  }
  out.partition.clusters = present.size();
  return out;
}

}  // namespace ftdtw
