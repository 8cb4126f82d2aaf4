#include "ftdtw/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ftdtw/error.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace ftdtw {

ClusterCounts ClusterCounts::single(std::size_t r) { return ClusterCounts{{r}}; }

ClusterCounts ClusterCounts::parse_sweep(std::string_view text) {
  const auto parts = detail::split(text, ':');
  auto bad = [&] {
    return Error(ErrorCode::InvalidConfig, fmt::format("sweep '{}' (use min:max:step)", text));
  };
  if (parts.size() != 3) throw bad();
  std::size_t lo, hi, step;
  try {
    lo = detail::parse_size(parts[0], 0);
    hi = detail::parse_size(parts[1], 0);
    step = detail::parse_size(parts[2], 0);
  } catch (const Error&) {
    throw bad();
  }
  if (lo < 1 || lo > hi || step < 1) throw bad();
  ClusterCounts c;
  for (std::size_t r = lo; r <= hi; r += step) c.values.push_back(r);
  return c;
}

void ClusterCounts::check(std::size_t n) const {
  if (values.empty()) throw Error(ErrorCode::InvalidConfig, "no cluster counts requested");
  for (auto r : values) {
    if (r < 1 || r > n) throw Error(ErrorCode::ROutOfRange, fmt::format("R={} outside [1, {}]", r, n));
  }
}

namespace {

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case ':': out += '-'; break;
      case ';': out += '_'; break;
      case '=': break;
      case '/': out += "of"; break;
      default: out += c;
    }
  }
  return out;
}

fs::path ensure(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create '" + p.string() + "': " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw Error(ErrorCode::Io, "cannot write '" + p.string() + "'");
  return os;
}

}  // namespace

std::string run_key(const RunConfig& cfg) {
  std::string key = cfg.subset_name.empty() ? "" : slug(cfg.subset_name) + "_";
  key += slug(cfg.measure.tag());
  key += cfg.data.subsample ? "_" + slug(cfg.data.subsample->to_string()) : std::string("_full");
  key += fmt::format("_seed{}", cfg.data.seed);
  return key;
}

fs::path proximity_dir(const fs::path& out) { return out / "proximity"; }
fs::path dendrogram_dir(const fs::path& out) { return out / "dendrogram"; }
fs::path partitions_dir(const fs::path& out) { return out / "partitions"; }
fs::path reports_dir(const fs::path& out) { return out / "reports"; }

void write_labels(const fs::path& path, const LabeledDataset& data) {
  auto os = open_out(path);
  fmt::print(os, "# segment_id\tclass\n");
  for (std::size_t i = 0; i < data.size(); ++i) {
    fmt::print(os, "{}\t{}\n", data.sequences[i].id(), data.labels[i]);
  }
}

std::pair<std::vector<std::string>, std::vector<std::string>> read_labels(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::is_blank(line) || line.front() == '#') continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 2) throw Error(ErrorCode::MalformedLine, fmt::format("labels line {}", lineno));
    out.first.emplace_back(detail::trim(f[0]));
    out.second.emplace_back(detail::trim(f[1]));
  }
  return out;
}

ProximityOutcome run_proximity(const RunConfig& cfg) {
  const auto data = load_dataset(cfg.data);
  const auto key = run_key(cfg);
  const auto dir = ensure(proximity_dir(cfg.out_dir));

  const auto start = std::chrono::steady_clock::now();
  const auto pm = build_proximity(data, cfg.measure, BuildOptions{cfg.workers, cfg.progress});
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  ProximityOutcome out;
  out.matrix_file = dir / (key + ".ftpm");
  out.labels_file = dir / (key + ".labels.tsv");
  save_proximity(pm, out.matrix_file);
  write_labels(out.labels_file, data);
  out.segments = pm.size();
  out.measure_tag = pm.measure_tag();
  out.seconds = elapsed.count();
  out.pairs_per_second =
      out.seconds > 0 ? static_cast<double>(pm.condensed().size()) / out.seconds : 0.0;
  return out;
}

ClusterOutcome run_cluster(const fs::path& proximity_file, const ClusterCounts& counts,
                           const fs::path& out_dir) {
  const auto pm = load_proximity(proximity_file);
  counts.check(pm.size());
  const auto tree = ahc_ward(pm);
  const auto stem = proximity_file.stem().string();

  ClusterOutcome out;
  out.dendrogram_file = ensure(dendrogram_dir(out_dir)) / (stem + ".tsv");
  {
    auto os = open_out(out.dendrogram_file);
    write_dendrogram(os, tree);
  }
  const auto pdir = ensure(partitions_dir(out_dir));
  for (auto r : counts.values) {
    const auto path = pdir / fmt::format("{}_R{}.tsv", stem, r);
    auto os = open_out(path);
    write_partition(os, pm.ids(), cut(tree, r));
    out.partitions.emplace_back(r, path);
  }
  return out;
}

Peak peak_f(const std::vector<SweepRow>& rows) {
  Peak p;
  bool first = true;
  for (const auto& r : rows) {
    if (first || r.f_measure > p.value) p = {r.clusters, r.f_measure};
    first = false;
  }
  return p;
}

Peak peak_nmi(const std::vector<SweepRow>& rows) {
  Peak p;
  bool first = true;
  for (const auto& r : rows) {
    if (first || r.nmi > p.value) p = {r.clusters, r.nmi};
    first = false;
  }
  return p;
}

void write_sweep_table(std::ostream& os, const std::vector<SweepRow>& rows) {
  fmt::print(os, "# R\tF\tNMI\n");
  for (const auto& r : rows) fmt::print(os, "{}\t{}\t{}\n", r.clusters, r.f_measure, r.nmi);
}

EvaluateOutcome run_evaluate(const std::vector<fs::path>& partition_files, const fs::path& labels_file,
                             const fs::path& out_dir, const std::string& name) {
  if (partition_files.empty()) throw Error(ErrorCode::InvalidConfig, "no partition files given");
  const auto [label_ids, label_classes] = read_labels(labels_file);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < label_ids.size(); ++i) {
    if (!index.emplace(label_ids[i], i).second) {
      throw Error(ErrorCode::DuplicateId, "labels list '" + label_ids[i] + "' twice");
    }
  }

  EvaluateOutcome out;
  std::set<std::size_t> seen_r;
  for (const auto& path : partition_files) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
    const auto lp = read_partition(is);
    if (lp.ids.size() != label_ids.size()) {
      throw Error(ErrorCode::LengthMismatch,
                  fmt::format("'{}' has {} segments, labels have {}", path.string(), lp.ids.size(),
                              label_ids.size()));
    }
    std::vector<std::string> labels;
    labels.reserve(lp.ids.size());
    for (const auto& id : lp.ids) {
      const auto it = index.find(id);
      if (it == index.end()) throw Error(ErrorCode::UnknownSegment, "'" + id + "' has no label");
      labels.push_back(label_classes[it->second]);
    }
    if (!seen_r.insert(lp.partition.clusters).second) {
      throw Error(ErrorCode::InvalidConfig,
                  fmt::format("two partitions with R={}", lp.partition.clusters));
    }
    out.reports.push_back(evaluate(contingency(lp.partition, labels)));
  }
  std::sort(out.reports.begin(), out.reports.end(),
            [](const auto& a, const auto& b) { return a.clusters < b.clusters; });
  for (const auto& r : out.reports) out.table.push_back({r.clusters, r.overall_f, r.nmi});
  out.best_f = peak_f(out.table);
  out.best_nmi = peak_nmi(out.table);

  const auto rdir = ensure(reports_dir(out_dir));
  {
    auto os = open_out(rdir / (name + ".jsonl"));
    for (const auto& r : out.reports) fmt::print(os, "{}\n", to_json(r));
  }
  {
    auto os = open_out(rdir / (name + ".txt"));
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
      if (i > 0) os << '\n';
      os << to_key_value(out.reports[i]);
    }
  }
  out.sweep_file = rdir / (name + "_sweep.tsv");
  {
    auto os = open_out(out.sweep_file);
    write_sweep_table(os, out.table);
  }
  {
    auto os = open_out(rdir / (name + "_peaks.tsv"));
    fmt::print(os, "# metric\tR\tvalue\n");
    fmt::print(os, "F\t{}\t{}\n", out.best_f.clusters, out.best_f.value);
    fmt::print(os, "NMI\t{}\t{}\n", out.best_nmi.clusters, out.best_nmi.value);
  }
  return out;
}

EvaluateOutcome run_sweep(const RunConfig& cfg) {
  const auto prox = run_proximity(cfg);
  const auto clusters = run_cluster(prox.matrix_file, cfg.counts, cfg.out_dir);
  std::vector<fs::path> files;
  for (const auto& [r, path] : clusters.partitions) files.push_back(path);
  return run_evaluate(files, prox.labels_file, cfg.out_dir, prox.matrix_file.stem().string());
}

void write_compare_table(std::ostream& os, const std::vector<CompareRow>& rows) {
  fmt::print(os,
             "# subset\tF_dtw\tF_ftdtw\tNMI_dtw\tNMI_ftdtw\tR_F_dtw\tR_F_ftdtw\tR_NMI_dtw\tR_NMI_ftdtw\n");
  for (const auto& r : rows) {
    fmt::print(os, "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.subset, r.f_dtw, r.f_ftdtw, r.nmi_dtw,
               r.nmi_ftdtw, r.r_f_dtw, r.r_f_ftdtw, r.r_nmi_dtw, r.r_nmi_ftdtw);
  }
}

std::vector<CompareRow> run_compare(const RunConfig& cfg, const std::vector<CompareSubset>& subsets) {
  if (subsets.empty()) throw Error(ErrorCode::InvalidConfig, "compare needs at least one subset");
  std::vector<CompareRow> rows;
  for (const auto& subset : subsets) {
    CompareRow row;
    row.subset = subset.name;
    for (const auto kind : {MeasureKind::Classical, MeasureKind::Ftdtw}) {
      RunConfig run = cfg;
      run.data = subset.data;
      run.subset_name = subset.name;
      run.measure.kind = kind;
      const auto result = run_sweep(run);
      if (kind == MeasureKind::Classical) {
        row.f_dtw = result.best_f.value;
        row.r_f_dtw = result.best_f.clusters;
        row.nmi_dtw = result.best_nmi.value;
        row.r_nmi_dtw = result.best_nmi.clusters;
      } else {
        row.f_ftdtw = result.best_f.value;
        row.r_f_ftdtw = result.best_f.clusters;
        row.nmi_ftdtw = result.best_nmi.value;
        row.r_nmi_ftdtw = result.best_nmi.clusters;
      }
    }
    rows.push_back(std::move(row));
  }
  auto os = open_out(ensure(reports_dir(cfg.out_dir)) / "compare.tsv");
  write_compare_table(os, rows);
  return rows;
}

}  // namespace ftdtw
