#pragma once

// Independent reference computations used only by the tests.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ftdtw/clustering.hpp"
#include "ftdtw/proximity.hpp"
#include "ftdtw/sequence.hpp"

namespace ftdtw::testing {

/// Textbook agglomerative Ward clustering: every step scans all active pairs
/// for the minimum (distance, min node id, max node id) and applies the
/// Lance-Williams update. O(N^3); for n <= 50.
Dendrogram naive_ward(const ProximityMatrix& pm);

using Rational = boost::rational<std::int64_t>;

/// Overall F in exact rational arithmetic, straight from the precision and
/// recall definitions and the class-weighted best-match aggregation.
Rational rational_f_measure(const std::vector<std::vector<std::uint64_t>>& counts);

struct HighPrecisionInfo {
  std::string nmi;  ///< decimal string with 40 significant digits
  double nmi_double = 0.0;
  double mutual_information = 0.0;
  double cluster_entropy = 0.0;
  double class_entropy = 0.0;
};

/// I, H(G), H(C) and NMI in 50-digit decimal floating point, natural log.
HighPrecisionInfo high_precision_nmi(const std::vector<std::vector<std::uint64_t>>& counts);

/// Plain DP over all paths with no tie rule or band, for 1-D costs, computed
/// with long double. Used as a second route for per-trajectory costs.
long double reference_1d_cost(const std::vector<double>& x, const std::vector<double>& y);

/// Random sequence of length t and dimension m with values in [lo, hi].
FeatureSequence random_sequence(std::uint64_t& state, std::size_t t, std::size_t m, double lo,
                                double hi, std::string id = "r");

}  // namespace ftdtw::testing
