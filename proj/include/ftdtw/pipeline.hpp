#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftdtw/clustering.hpp"
#include "ftdtw/evaluation.hpp"
#include "ftdtw/ingest.hpp"
#include "ftdtw/proximity.hpp"

namespace ftdtw {

/// Requested cluster counts, ascending and unique.
struct ClusterCounts {
  std::vector<std::size_t> values;

  static ClusterCounts single(std::size_t r);
  /// "min:max:step"; max is included when the step lands on it.
  static ClusterCounts parse_sweep(std::string_view text);
  /// Throws Error(ROutOfRange) unless every value lies in [1, n].
  void check(std::size_t n) const;
};

struct RunConfig {
  DatasetManifest data;
  MeasureSpec measure;
  ClusterCounts counts;
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
  std::string subset_name;  ///< optional prefix for output names
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Output file stem for a run: measure, subsample and seed, e.g.
/// "ftdtw_per-class-88_seed1".
std::string run_key(const RunConfig& cfg);

/// Subdirectories of the output directory.
std::filesystem::path proximity_dir(const std::filesystem::path& out);
std::filesystem::path dendrogram_dir(const std::filesystem::path& out);
std::filesystem::path partitions_dir(const std::filesystem::path& out);
std::filesystem::path reports_dir(const std::filesystem::path& out);

void write_labels(const std::filesystem::path& path, const LabeledDataset& data);
/// Reads "segment_id<TAB>class" lines into (ids, classes).
std::pair<std::vector<std::string>, std::vector<std::string>> read_labels(
    const std::filesystem::path& path);

struct ProximityOutcome {
  std::filesystem::path matrix_file;
  std::filesystem::path labels_file;
  std::size_t segments = 0;
  std::string measure_tag;
  double seconds = 0.0;
  double pairs_per_second = 0.0;
};

/// Loads the dataset, builds the matrix and writes
/// proximity/<key>.ftpm plus proximity/<key>.labels.tsv.
ProximityOutcome run_proximity(const RunConfig& cfg);

struct ClusterOutcome {
  std::filesystem::path dendrogram_file;
  std::vector<std::pair<std::size_t, std::filesystem::path>> partitions;  ///< (R, file)
};

/// Clusters once and writes one partition per requested R. Output names use
/// the stem of the proximity file.
ClusterOutcome run_cluster(const std::filesystem::path& proximity_file, const ClusterCounts& counts,
                           const std::filesystem::path& out_dir);

struct SweepRow {
  std::size_t clusters = 0;
  double f_measure = 0.0;
  double nmi = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct Peak {
  std::size_t clusters = 0;
  double value = 0.0;
};

/// Strict argmax; the smallest R wins ties.
Peak peak_f(const std::vector<SweepRow>& rows);
Peak peak_nmi(const std::vector<SweepRow>& rows);

struct EvaluateOutcome {
  std::vector<EvaluationReport> reports;  ///< sorted by R
  std::vector<SweepRow> table;
  Peak best_f;
  Peak best_nmi;
  std::filesystem::path sweep_file;
};

/// Scores every partition against the labels and writes reports/<name>.jsonl,
/// reports/<name>.txt, reports/<name>_sweep.tsv and reports/<name>_peaks.tsv.
EvaluateOutcome run_evaluate(const std::vector<std::filesystem::path>& partition_files,
                             const std::filesystem::path& labels_file,
                             const std::filesystem::path& out_dir, const std::string& name);

/// Proximity, clustering and evaluation in one go.
EvaluateOutcome run_sweep(const RunConfig& cfg);

struct CompareSubset {
  std::string name;
  DatasetManifest data;
};

struct CompareRow {
  std::string subset;
  double f_dtw = 0.0, f_ftdtw = 0.0, nmi_dtw = 0.0, nmi_ftdtw = 0.0;
  std::size_t r_f_dtw = 0, r_f_ftdtw = 0, r_nmi_dtw = 0, r_nmi_ftdtw = 0;
};

/// Runs classical DTW (cfg.measure's distance and band) and FTDTW on every
/// subset with independent proximity files. Scores are the peaks over
/// cfg.counts, which for a single R is just that R. Writes reports/compare.tsv.
std::vector<CompareRow> run_compare(const RunConfig& cfg, const std::vector<CompareSubset>& subsets);

void write_compare_table(std::ostream& os, const std::vector<CompareRow>& rows);
void write_sweep_table(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace ftdtw
