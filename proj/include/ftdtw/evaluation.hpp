#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ftdtw/clustering.hpp"

namespace ftdtw {

/// R x V counts n_rv of class v inside cluster r, with marginals.
struct ContingencyTable {
  std::vector<std::vector<std::uint64_t>> counts;  ///< [cluster][class]
  std::vector<std::uint64_t> cluster_sizes;        ///< n_r
  std::vector<std::uint64_t> class_sizes;          ///< n_v
  std::vector<std::string> class_names;            ///< in first-appearance order
  std::uint64_t total = 0;

  std::size_t clusters() const noexcept { return cluster_sizes.size(); }
  std::size_t classes() const noexcept { return class_sizes.size(); }
};

ContingencyTable contingency(const Partition& part, const std::vector<std::string>& labels);

/// Builds a table straight from counts (tests, fuzzing). Throws on an
/// all-zero row or column.
ContingencyTable table_from_counts(std::vector<std::vector<std::uint64_t>> counts);

double precision(const ContingencyTable& ct, std::size_t r, std::size_t v);
double recall(const ContingencyTable& ct, std::size_t r, std::size_t v);
/// Harmonic mean of precision and recall; 0 when n_rv = 0.
double f_value(const ContingencyTable& ct, std::size_t r, std::size_t v);

struct FMeasure {
  double overall = 0.0;                  ///< sum_v (n_v / n) * max_r F(r, v)
  std::vector<double> best_per_class;    ///< max_r F(r, v)
  std::vector<std::size_t> best_cluster; ///< argmax_r, smallest r on ties
};

FMeasure f_measure(const ContingencyTable& ct);

/// How the mutual-information terms are weighted. Joint is the standard
/// definition, sum P(G_r n C_v) log[P(G_r n C_v) / (P(G_r) P(C_v))].
/// AsPrinted weights each term by P(G_r) P(C_v) instead; it is kept only for
/// comparison and does not have the 0..1 range or the independence zero.
enum class MiWeighting { Joint, AsPrinted };

struct NmiResult {
  double nmi = 0.0;
  double mutual_information = 0.0;  ///< I(G, C)
  double cluster_entropy = 0.0;     ///< H(G)
  double class_entropy = 0.0;       ///< H(C)
};

/// NMI = 2 I / (H(G) + H(C)), natural log, 0 log 0 := 0. When both entropies
/// are zero (one cluster, one class) NMI is defined as 1. `log_base` only
/// changes the units of I and H, never the ratio.
NmiResult nmi(const ContingencyTable& ct, MiWeighting weighting = MiWeighting::Joint,
              double log_base = 0.0);

struct EvaluationReport {
  std::size_t clusters = 0;  ///< R
  std::size_t classes = 0;   ///< V
  std::uint64_t segments = 0;
  double overall_f = 0.0;
  double nmi = 0.0;
  double mutual_information = 0.0;
  double cluster_entropy = 0.0;
  double class_entropy = 0.0;
  std::vector<std::string> class_names;
  std::vector<double> best_f_per_class;
  MiWeighting weighting = MiWeighting::Joint;
};

EvaluationReport evaluate(const ContingencyTable& ct, MiWeighting weighting = MiWeighting::Joint);

/// One-line JSON object; carries the aggregation and log-base metadata.
std::string to_json(const EvaluationReport& r);
/// Flat "key = value" block, one key per line.
std::string to_key_value(const EvaluationReport& r);

}  // namespace ftdtw
