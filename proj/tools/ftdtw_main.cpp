// ftdtw: DTW / feature-trajectory DTW clustering pipeline.
//
// Subcommands
//   proximity  dataset -> proximity/<key>.ftpm (+ labels)
//   cluster    proximity file -> dendrogram + one partition per R
//   evaluate   partitions + labels -> reports (F, NMI) and sweep table
//   sweep      proximity + cluster + evaluate in one run
//   compare    classical DTW vs FTDTW over one or more subsets
//   generate   synthetic warped-trajectory dataset as a CSV directory
//   align      path dump for one pair of CSV segments
//
// Exit codes: 0 ok, 1 internal error, 2 usage/config error, 3 data error,
// 4 file/IO error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ftdtw/alignment.hpp"
#include "ftdtw/error.hpp"
#include "ftdtw/ingest.hpp"
#include "ftdtw/pipeline.hpp"
#include "ftdtw/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ftdtw;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

struct DataArgs {
  std::string format = "csv-dir";
  std::vector<std::string> data;
  std::vector<std::string> labels;
  std::string subsample;
  std::uint64_t seed = 1;
};

struct MeasureArgs {
  std::string measure = "ftdtw";
  std::string distance = "euclidean";
  std::size_t band = 0;
  bool has_band = false;
};

struct CountArgs {
  std::size_t clusters = 0;
  std::string sweep;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--format", a.format, "Dataset layout")
      ->check(CLI::IsMember({"sadd", "csv-dir"}))
      ->capture_default_str();
  cmd->add_option("--data", a.data, "SADD file(s), or a CSV segment directory")->required();
  cmd->add_option("--labels", a.labels, "Labels file (filename<TAB>class), csv-dir only");
  cmd->add_option("--subsample", a.subsample, "per-class:<cap> | count:<n> | fold:<k>/<K>");
  cmd->add_option("--seed", a.seed, "Subsample seed")->capture_default_str();
}

void add_measure_options(CLI::App* cmd, MeasureArgs& a, bool with_measure) {
  if (with_measure) {
    cmd->add_option("--measure", a.measure, "Similarity measure")
        ->check(CLI::IsMember({"classical", "ftdtw"}))
        ->capture_default_str();
  }
  cmd->add_option("--distance", a.distance, "Frame distance for classical DTW")
      ->check(CLI::IsMember({"euclidean", "manhattan"}))
      ->capture_default_str();
  cmd->add_option("--band", a.band, "Sakoe-Chiba band width (off when omitted)");
}

void add_count_options(CLI::App* cmd, CountArgs& a) {
  auto* g = cmd->add_option_group("clusters");
  g->add_option("--clusters", a.clusters, "Single cluster count R");
  g->add_option("--sweep", a.sweep, "Cluster-count sweep min:max:step");
  g->require_option(1);
}

DatasetManifest manifest_from(const DataArgs& a, std::size_t data_index) {
  DatasetManifest m;
  m.format = parse_dataset_format(a.format);
  if (m.format == DatasetFormat::Sadd) {
    for (const auto& d : a.data) m.sources.emplace_back(d);
  } else {
    m.sources.emplace_back(a.data.at(data_index));
    if (a.labels.size() <= data_index) {
      throw Error(ErrorCode::InvalidConfig, "csv-dir needs a --labels file per --data directory");
    }
    m.labels = a.labels.at(data_index);
  }
  if (!a.subsample.empty()) m.subsample = SubsampleSpec::parse(a.subsample);
  m.seed = a.seed;
  return m;
}

MeasureSpec measure_from(const MeasureArgs& a) {
  MeasureSpec s;
  s.kind = a.measure == "classical" ? MeasureKind::Classical : MeasureKind::Ftdtw;
  s.distance = parse_distance_kind(a.distance);
  if (a.has_band) s.band = a.band;
  return s;
}

ClusterCounts counts_from(const CountArgs& a) {
  return a.sweep.empty() ? ClusterCounts::single(a.clusters) : ClusterCounts::parse_sweep(a.sweep);
}

// Writes the options given to the subcommand that ran (the rest are fixed
// defaults). The file can be passed back through --config.
void echo_config(const CLI::App& cmd, const fs::path& out) {
  fs::create_directories(out);
  std::ofstream os(out / "config.toml");
  os << "[" << cmd.get_name() << "]\n" << cmd.config_to_str(false, false);
}

std::function<void(std::uint64_t, std::uint64_t)> progress_printer(bool verbose) {
  if (!verbose) return {};
  return [last = std::uint64_t{0}](std::uint64_t done, std::uint64_t total) mutable {
    const auto pct = total ? done * 100 / total : 100;
    if (pct / 10 != last / 10 || done == total) {
      fmt::print(stderr, "proximity: {}/{} pairs ({}%)\n", done, total, pct);
      last = pct;
    }
  };
}

std::string evaluate_name(const std::vector<std::string>& partitions) {
  const auto stem = fs::path(partitions.front()).stem().string();
  static const std::regex suffix("_R[0-9]+$");
  return std::regex_replace(stem, suffix, "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical DTW and feature-trajectory DTW clustering pipeline"};
  app.set_config("--config", "", "TOML config file with the same keys as the flags");
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Progress on stderr");

  DataArgs data;
  MeasureArgs measure;
  CountArgs counts;
  std::string out = "out";
  std::size_t workers = 1;

  auto* prox = app.add_subcommand("proximity", "Build and save the proximity matrix");
  add_data_options(prox, data);
  add_measure_options(prox, measure, true);
  prox->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  prox->add_option("--out", out, "Output directory")->capture_default_str();

  std::string prox_file;
  auto* clus = app.add_subcommand("cluster", "Ward clustering and dendrogram cuts");
  clus->add_option("--proximity", prox_file, "Proximity file (.ftpm)")->required();
  add_count_options(clus, counts);
  clus->add_option("--out", out, "Output directory")->capture_default_str();

  std::vector<std::string> partition_files;
  std::string eval_labels, eval_name;
  auto* eval = app.add_subcommand("evaluate", "F-measure and NMI against ground truth");
  eval->add_option("--partitions", partition_files, "Partition files")->required();
  eval->add_option("--labels", eval_labels, "Labels file (segment_id<TAB>class)")->required();
  eval->add_option("--name", eval_name, "Report name (default: partition stem without _R<r>)");
  eval->add_option("--out", out, "Output directory")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "proximity + cluster + evaluate");
  add_data_options(sweep, data);
  add_measure_options(sweep, measure, true);
  add_count_options(sweep, counts);
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "Output directory")->capture_default_str();

  std::vector<std::uint64_t> seeds;
  std::size_t folds = 0;
  auto* comp = app.add_subcommand("compare", "Paired classical DTW vs FTDTW comparison");
  add_data_options(comp, data);
  add_measure_options(comp, measure, false);
  add_count_options(comp, counts);
  comp->add_option("--seeds", seeds, "One subset per seed (uses --subsample)")->delimiter(',');
  comp->add_option("--folds", folds, "Split into K disjoint random folds (uses --seed)");
  comp->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  comp->add_option("--out", out, "Output directory")->capture_default_str();

  SyntheticSpec synth;
  std::string gen_dir, gen_labels;
  auto* gen = app.add_subcommand("generate", "Write a synthetic warped-trajectory dataset");
  gen->add_option("--dir", gen_dir, "Output CSV directory")->required();
  gen->add_option("--labels", gen_labels, "Labels file to write (default <dir>/labels.tsv)");
  gen->add_option("--classes", synth.classes)->capture_default_str();
  gen->add_option("--per-class", synth.per_class)->capture_default_str();
  gen->add_option("--dims", synth.dims)->capture_default_str();
  gen->add_option("--min-length", synth.min_length)->capture_default_str();
  gen->add_option("--max-length", synth.max_length)->capture_default_str();
  gen->add_option("--warp-strength", synth.warp_strength)->capture_default_str();
  gen->add_option("--noise", synth.noise)->capture_default_str();
  gen->add_option("--seed", synth.seed)->capture_default_str();

  std::string x_file, y_file;
  auto* align = app.add_subcommand("align", "Alignment path dump for two CSV segments");
  align->add_option("--x", x_file, "First segment CSV")->required();
  align->add_option("--y", y_file, "Second segment CSV")->required();
  add_measure_options(align, measure, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  for (auto* cmd : {prox, sweep, comp, align}) {
    if (cmd->parsed() && cmd->count("--band") > 0) measure.has_band = true;
  }

  try {
    if (prox->parsed()) {
      RunConfig cfg;
      cfg.data = manifest_from(data, 0);
      cfg.measure = measure_from(measure);
      cfg.out_dir = out;
      cfg.workers = workers;
      cfg.progress = progress_printer(verbose);
      const auto r = run_proximity(cfg);
      echo_config(*prox, out);
      fmt::print("# N\tmeasure\tseconds\tpairs_per_second\tfile\n");
      fmt::print("{}\t{}\t{:.3f}\t{:.1f}\t{}\n", r.segments, r.measure_tag, r.seconds,
                 r.pairs_per_second, r.matrix_file.string());
    } else if (clus->parsed()) {
      const auto r = run_cluster(prox_file, counts_from(counts), out);
      fmt::print("# R\tpartition\n");
      for (const auto& [k, path] : r.partitions) fmt::print("{}\t{}\n", k, path.string());
    } else if (eval->parsed()) {
      std::vector<fs::path> files(partition_files.begin(), partition_files.end());
      const auto name = eval_name.empty() ? evaluate_name(partition_files) : eval_name;
      const auto r = run_evaluate(files, eval_labels, out, name);
      write_sweep_table(std::cout, r.table);
    } else if (sweep->parsed()) {
      RunConfig cfg;
      cfg.data = manifest_from(data, 0);
      cfg.measure = measure_from(measure);
      cfg.counts = counts_from(counts);
      cfg.out_dir = out;
      cfg.workers = workers;
      cfg.progress = progress_printer(verbose);
      const auto r = run_sweep(cfg);
      echo_config(*sweep, out);
      write_sweep_table(std::cout, r.table);
    } else if (comp->parsed()) {
      RunConfig cfg;
      cfg.measure = measure_from(measure);
      cfg.counts = counts_from(counts);
      cfg.out_dir = out;
      cfg.workers = workers;
      cfg.progress = progress_printer(verbose);
      std::vector<CompareSubset> subsets;
      if (!seeds.empty() && folds > 0) {
        throw Error(ErrorCode::InvalidConfig, "use either --seeds or --folds, not both");
      }
      const std::size_t n_sources = data.format == "sadd" ? 1 : data.data.size();
      if (n_sources > 1) {
        if (!seeds.empty() || folds > 0) {
          throw Error(ErrorCode::InvalidConfig, "several --data subsets exclude --seeds/--folds");
        }
        for (std::size_t i = 0; i < n_sources; ++i) {
          subsets.push_back({fmt::format("subset{}", i + 1), manifest_from(data, i)});
        }
      } else if (!seeds.empty()) {
        if (data.subsample.empty()) throw Error(ErrorCode::InvalidConfig, "--seeds needs --subsample");
        for (auto s : seeds) {
          auto m = manifest_from(data, 0);
          m.seed = s;
          subsets.push_back({fmt::format("seed{}", s), m});
        }
      } else if (folds > 0) {
        for (std::size_t k = 0; k < folds; ++k) {
          auto m = manifest_from(data, 0);
          m.subsample = SubsampleSpec{SubsampleKind::Fold, 0, k, folds};
          subsets.push_back({fmt::format("fold{}", k + 1), m});
        }
      } else {
        subsets.push_back({"all", manifest_from(data, 0)});
      }
      const auto rows = run_compare(cfg, subsets);
      echo_config(*comp, out);
      write_compare_table(std::cout, rows);
    } else if (gen->parsed()) {
      const auto ds = make_warped_dataset(synth);
      const fs::path labels = gen_labels.empty() ? fs::path(gen_dir) / "labels.tsv" : fs::path(gen_labels);
      write_csv_dir(ds, gen_dir, labels);
      fmt::print("# segments\tclasses\tdir\tlabels\n");
      fmt::print("{}\t{}\t{}\t{}\n", ds.size(), ds.classes().size(), gen_dir, labels.string());
    } else if (align->parsed()) {
      std::ifstream xs(x_file), ys(y_file);
      if (!xs) throw Error(ErrorCode::MissingFile, "cannot open '" + x_file + "'");
      if (!ys) throw Error(ErrorCode::MissingFile, "cannot open '" + y_file + "'");
      const auto x = parse_csv_sequence(xs, fs::path(x_file).stem().string());
      const auto y = parse_csv_sequence(ys, fs::path(y_file).stem().string());
      const auto spec = measure_from(measure);
      const AlignOptions opts{spec.band};
      if (spec.kind == MeasureKind::Classical) {
        write_path_dump(std::cout, dtw_align(x, y, spec.distance, opts));
      } else {
        const auto r = ftdtw_align(x, y, opts);
        fmt::print("# ftdtw value={} beta={}\n", r.value, r.beta);
        fmt::print("# dim\tcost\tK\n");
        for (std::size_t l = 0; l < r.costs.size(); ++l) {
          fmt::print("{}\t{}\t{}\n", l + 1, r.costs[l], r.path_lengths[l]);
        }
      }
    }
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    switch (e.category()) {
      case ErrorCategory::Config: return kExitConfig;
      case ErrorCategory::Data: return kExitData;
      case ErrorCategory::Io: return kExitIo;
    }
    return kExitInternal;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return 0;
}
