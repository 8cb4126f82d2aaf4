#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftdtw/sequence.hpp"

namespace ftdtw {

/// Feature dimension of the spoken Arabic digit corpus.
inline constexpr std::size_t kSaddDim = 13;
inline constexpr std::size_t kSaddDigits = 10;
inline constexpr std::size_t kSaddRepetitions = 10;

struct SaddOptions {
  /// Added to speaker numbers, so a test file can follow a training file.
  std::size_t speaker_offset = 0;
  /// When false, any block count is accepted; ids become "blk<index>" and
  /// every label is "unknown", since digits cannot be derived from position.
  bool check_layout = true;
};

/// Parses the corpus text layout: utterances are runs of non-blank lines
/// separated by blank (or whitespace-only) lines; each line is one frame of 13
/// reals. Blocks are digit-major: the first 1/10 of the blocks are digit 0,
/// and so on; within a digit, each speaker contributes 10 consecutive
/// repetitions. Ids are "spk<k>_d<digit>_r<rep>" and labels are the digit.
LabeledDataset parse_sadd(std::istream& is, const SaddOptions& opts = {});
LabeledDataset parse_sadd(const std::filesystem::path& path, const SaddOptions& opts = {});

/// Concatenates several corpus files (e.g. training then test), continuing
/// speaker numbering across files.
LabeledDataset parse_sadd_files(const std::vector<std::filesystem::path>& paths);

/// Per-segment CSV files (one frame per row, optional header) plus a labels
/// file of "filename<TAB>class" lines. Segments are assembled in filename
/// order; the id is the filename without its extension.
LabeledDataset parse_csv_dir(const std::filesystem::path& dir, const std::filesystem::path& labels_file);

/// Parses one CSV segment file.
FeatureSequence parse_csv_sequence(std::istream& is, std::string id);

/// Writes a dataset as a CSV directory plus labels file; parse_csv_dir reads it back.
void write_csv_dir(const LabeledDataset& data, const std::filesystem::path& dir,
                   const std::filesystem::path& labels_file);

enum class SubsampleKind { PerClassCap, GlobalCount, Fold };

struct SubsampleSpec {
  SubsampleKind kind = SubsampleKind::PerClassCap;
  std::size_t count = 0;       ///< cap per class, or global count
  std::size_t fold_index = 0;  ///< Fold: which fold (0-based)
  std::size_t fold_count = 0;  ///< Fold: number of disjoint folds

  /// "per-class:<cap>", "count:<n>" or "fold:<k>/<K>" (k 1-based).
  static SubsampleSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Deterministic selection for a given seed using PortableRng. Selected
/// segments keep their original relative order and their frames untouched.
/// Folds shuffle once and split into K near-equal disjoint parts.
LabeledDataset subsample(const LabeledDataset& data, const SubsampleSpec& spec, std::uint64_t seed);

enum class DatasetFormat { Sadd, CsvDir };

DatasetFormat parse_dataset_format(std::string_view name);

struct DatasetManifest {
  DatasetFormat format = DatasetFormat::CsvDir;
  std::vector<std::filesystem::path> sources;  ///< SADD files, or one CSV directory
  std::filesystem::path labels;                ///< CSV layout only
  std::optional<SubsampleSpec> subsample;
  std::uint64_t seed = 1;
};

/// Parses, subsamples when requested, and validates.
LabeledDataset load_dataset(const DatasetManifest& manifest);

}  // namespace ftdtw
