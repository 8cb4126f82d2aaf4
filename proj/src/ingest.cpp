#include "ftdtw/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ftdtw/error.hpp"
#include "ftdtw/rng.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace ftdtw {

LabeledDataset parse_sadd(std::istream& is, const SaddOptions& opts) {
  std::vector<std::vector<Frame>> blocks;
  std::vector<Frame> current;
  bool seen_any = false;
  std::size_t blank_run = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::is_blank(line)) {
      if (!current.empty()) {
        blocks.push_back(std::move(current));
        current.clear();
      }
      ++blank_run;
      continue;
    }
    // Two separators in a row between utterances leave an empty block.
    if (seen_any && blank_run >= 2) {
      throw Error(ErrorCode::EmptyBlock,
                  fmt::format("block {} (before line {}) has no frames", blocks.size() + 1, lineno));
    }
    seen_any = true;
    blank_run = 0;
    const auto toks = detail::tokens(line);
    Frame f;
    f.reserve(toks.size());
    for (auto t : toks) {
      double v;
      if (!detail::try_parse_double(t, v)) {
        throw Error(ErrorCode::MalformedLine, fmt::format("line {}: '{}' is not a number", lineno, t));
      }
      f.push_back(v);
    }
    if (f.size() != kSaddDim) {
      throw Error(ErrorCode::WrongDimension,
                  fmt::format("line {}: {} values, expected {}", lineno, f.size(), kSaddDim));
    }
    current.push_back(std::move(f));
  }
  if (!current.empty()) blocks.push_back(std::move(current));

  if (!opts.check_layout) {
    LabeledDataset out;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      out.sequences.emplace_back(fmt::format("blk{:04}", b + 1), std::move(blocks[b]));
      out.labels.emplace_back("unknown");
    }
    return out;
  }

  const std::size_t per_speaker_digit = kSaddDigits * kSaddRepetitions;
  if (blocks.empty() || blocks.size() % per_speaker_digit != 0) {
    throw Error(ErrorCode::BlockCountMismatch,
                fmt::format("expected a positive multiple of {} blocks, found {}", per_speaker_digit,
                            blocks.size()));
  }
  const std::size_t per_digit = blocks.size() / kSaddDigits;

  LabeledDataset out;
  out.sequences.reserve(blocks.size());
  out.labels.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t digit = b / per_digit;
    const std::size_t within = b % per_digit;
    const std::size_t speaker = within / kSaddRepetitions + opts.speaker_offset + 1;
    const std::size_t rep = within % kSaddRepetitions + 1;
    out.sequences.emplace_back(fmt::format("spk{:02}_d{}_r{:02}", speaker, digit, rep),
                               std::move(blocks[b]));
    out.labels.push_back(std::to_string(digit));
  }
  return out;
}

LabeledDataset parse_sadd(const fs::path& path, const SaddOptions& opts) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  return parse_sadd(is, opts);
}

LabeledDataset parse_sadd_files(const std::vector<fs::path>& paths) {
  LabeledDataset out;
  std::size_t speakers = 0;
  for (const auto& p : paths) {
    auto part = parse_sadd(p, SaddOptions{speakers, true});
    speakers += part.size() / (kSaddDigits * kSaddRepetitions);
    for (auto& s : part.sequences) out.sequences.push_back(std::move(s));
    for (auto& l : part.labels) out.labels.push_back(std::move(l));
  }
  return out;
}

FeatureSequence parse_csv_sequence(std::istream& is, std::string id) {
  std::vector<Frame> frames;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    const auto cells = detail::split(detail::trim(line), ',');
    Frame f;
    f.reserve(cells.size());
    bool numeric = true;
    for (auto c : cells) {
      double v;
      if (!detail::try_parse_double(c, v)) {
        numeric = false;
        break;
      }
      f.push_back(v);
    }
    if (!numeric) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      throw Error(ErrorCode::MalformedLine, fmt::format("'{}' line {}: non-numeric cell", id, lineno));
    }
    first_content = false;
    if (!frames.empty() && f.size() != frames.front().size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("'{}' line {}: {} columns, expected {}", id, lineno, f.size(),
                              frames.front().size()));
    }
    frames.push_back(std::move(f));
  }
  if (frames.empty()) throw Error(ErrorCode::EmptySequence, "'" + id + "' has no frames");
  return FeatureSequence(std::move(id), std::move(frames));
}

LabeledDataset parse_csv_dir(const fs::path& dir, const fs::path& labels_file) {
  std::ifstream ls(labels_file);
  if (!ls) throw Error(ErrorCode::MissingFile, "cannot open labels file '" + labels_file.string() + "'");

  std::map<std::string, std::string> labelled;  // filename -> class, sorted by filename
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ls, line)) {
    ++lineno;
    if (detail::is_blank(line) || detail::trim(line).front() == '#') continue;
    const auto f = detail::split(line, '\t');
    if (f.size() != 2 || detail::trim(f[0]).empty() || detail::trim(f[1]).empty()) {
      throw Error(ErrorCode::MalformedLine, fmt::format("labels line {}: expected filename<TAB>class", lineno));
    }
    std::string name(detail::trim(f[0]));
    if (!labelled.emplace(name, std::string(detail::trim(f[1]))).second) {
      throw Error(ErrorCode::DuplicateId, fmt::format("labels line {}: '{}' listed twice", lineno, name));
    }
  }

  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::MissingFile, "no directory '" + dir.string() + "'");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const auto name = entry.path().filename().string();
    if (!labelled.contains(name)) {
      throw Error(ErrorCode::UnlabeledSegment, "'" + name + "' has no entry in the labels file");
    }
  }

  LabeledDataset out;
  std::set<std::string> ids;
  std::size_t m = 0;
  for (const auto& [name, cls] : labelled) {
    const fs::path p = dir / name;
    std::ifstream is(p);
    if (!is) throw Error(ErrorCode::MissingFile, "labels file references missing '" + p.string() + "'");
    std::string id = fs::path(name).stem().string();
    if (!ids.insert(id).second) throw Error(ErrorCode::DuplicateId, "segment id '" + id + "'");
    auto seq = parse_csv_sequence(is, id);
    if (m == 0) m = seq.dim();
    if (seq.dim() != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("'{}' has {} columns, expected {}", name, seq.dim(), m));
    }
    out.sequences.push_back(std::move(seq));
    out.labels.push_back(cls);
  }
  return out;
}

void write_csv_dir(const LabeledDataset& data, const fs::path& dir, const fs::path& labels_file) {
  fs::create_directories(dir);
  std::ofstream ls(labels_file);
  if (!ls) throw Error(ErrorCode::Io, "cannot write '" + labels_file.string() + "'");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.sequences[i];
    const auto name = s.id() + ".csv";
    std::ofstream os(dir / name);
    if (!os) throw Error(ErrorCode::Io, "cannot write '" + (dir / name).string() + "'");
    for (const auto& f : s.frames()) fmt::print(os, "{}\n", fmt::join(f, ","));
    fmt::print(ls, "{}\t{}\n", name, data.labels[i]);
  }
}

SubsampleSpec SubsampleSpec::parse(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorCode::InvalidConfig,
                 fmt::format("subsample spec '{}' (use per-class:<cap>, count:<n>, fold:<k>/<K>)", text));
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw bad();
  const auto kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  SubsampleSpec s;
  try {
    if (kind == "per-class" || kind == "count") {
      s.kind = kind == "count" ? SubsampleKind::GlobalCount : SubsampleKind::PerClassCap;
      s.count = detail::parse_size(rest, 0);
      if (s.count == 0) throw bad();
    } else if (kind == "fold") {
      const auto slash = rest.find('/');
      if (slash == std::string_view::npos) throw bad();
      s.kind = SubsampleKind::Fold;
      const auto k = detail::parse_size(rest.substr(0, slash), 0);
      s.fold_count = detail::parse_size(rest.substr(slash + 1), 0);
      if (k < 1 || k > s.fold_count) throw bad();
      s.fold_index = k - 1;
    } else {
      throw bad();
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw bad();
  }
  return s;
}

std::string SubsampleSpec::to_string() const {
  switch (kind) {
    case SubsampleKind::PerClassCap: return fmt::format("per-class:{}", count);
    case SubsampleKind::GlobalCount: return fmt::format("count:{}", count);
    case SubsampleKind::Fold: return fmt::format("fold:{}/{}", fold_index + 1, fold_count);
  }
  return {};
}

LabeledDataset subsample(const LabeledDataset& data, const SubsampleSpec& spec, std::uint64_t seed) {
  PortableRng rng(seed);
  std::vector<std::size_t> chosen;
  const std::size_t n = data.size();

  switch (spec.kind) {
    case SubsampleKind::PerClassCap: {
      std::unordered_map<std::string, std::vector<std::size_t>> members;
      for (std::size_t i = 0; i < n; ++i) members[data.labels[i]].push_back(i);
      for (const auto& cls : data.classes()) {
        auto& idx = members[cls];
        if (spec.count > idx.size()) {
          throw Error(ErrorCode::CapExceedsClassSize,
                      fmt::format("cap {} exceeds class '{}' of size {}", spec.count, cls, idx.size()));
        }
        rng.shuffle(idx);
        chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.count));
      }
      break;
    }
    case SubsampleKind::GlobalCount: {
      if (spec.count > n) {
        throw Error(ErrorCode::CapExceedsClassSize,
                    fmt::format("count {} exceeds dataset size {}", spec.count, n));
      }
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      rng.shuffle(idx);
      chosen.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.count));
      break;
    }
    case SubsampleKind::Fold: {
      if (spec.fold_count == 0 || spec.fold_count > n || spec.fold_index >= spec.fold_count) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("cannot take {} of {} segments",
                                                          spec.to_string(), n));
      }
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      rng.shuffle(idx);
      const std::size_t lo = spec.fold_index * n / spec.fold_count;
      const std::size_t hi = (spec.fold_index + 1) * n / spec.fold_count;
      chosen.assign(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                    idx.begin() + static_cast<std::ptrdiff_t>(hi));
      break;
    }
  }

  std::sort(chosen.begin(), chosen.end());
  LabeledDataset out;
  out.sequences.reserve(chosen.size());
  out.labels.reserve(chosen.size());
  for (auto i : chosen) {
    out.sequences.push_back(data.sequences[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "sadd") return DatasetFormat::Sadd;
  if (name == "csv-dir") return DatasetFormat::CsvDir;
  throw Error(ErrorCode::InvalidConfig, fmt::format("unknown dataset format '{}'", name));
}

LabeledDataset load_dataset(const DatasetManifest& manifest) {
  if (manifest.sources.empty()) throw Error(ErrorCode::InvalidConfig, "no data source given");
  LabeledDataset data;
  if (manifest.format == DatasetFormat::Sadd) {
    data = parse_sadd_files(manifest.sources);
  } else {
    if (manifest.sources.size() != 1) {
      throw Error(ErrorCode::InvalidConfig, "csv-dir takes exactly one directory");
    }
    data = parse_csv_dir(manifest.sources.front(), manifest.labels);
  }
  if (manifest.subsample) data = subsample(data, *manifest.subsample, manifest.seed);
  validate_dataset(data);
  return data;
}

}  // namespace ftdtw
