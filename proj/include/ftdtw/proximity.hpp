#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftdtw/alignment.hpp"
#include "ftdtw/sequence.hpp"

namespace ftdtw {

enum class MeasureKind { Classical, Ftdtw };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::Ftdtw;
  DistanceKind distance = DistanceKind::Euclidean;  // ignored for FTDTW
  std::optional<std::size_t> band;

  /// "classical-dtw:euclidean", "classical-dtw:manhattan" or "ftdtw", with
  /// ";band=<w>" appended when a band is set.
  std::string tag() const;
  double operator()(const FeatureSequence& x, const FeatureSequence& y) const;
};

/// Symmetric N x N dissimilarity matrix with zero diagonal, stored as the
/// row-major upper triangle (N(N-1)/2 values).
class ProximityMatrix {
 public:
  ProximityMatrix() = default;
  ProximityMatrix(std::vector<std::string> ids, std::string measure_tag);
  ProximityMatrix(std::vector<std::string> ids, std::string measure_tag,
                  std::vector<double> condensed);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& measure_tag() const noexcept { return measure_tag_; }
  const std::vector<double>& condensed() const noexcept { return values_; }

  static std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j);

  /// Symmetric access; at(i, i) == 0.
  double at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double v);

  bool operator==(const ProximityMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::string measure_tag_;
  std::vector<double> values_;
};

struct BuildOptions {
  std::size_t workers = 1;
  /// Called with (completed pairs, total pairs) from worker threads, serialised.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Computes every pairwise dissimilarity. Rows are handed to workers from a
/// shared counter and each pair is written to its own slot, so the result
/// does not depend on the worker count or scheduling.
ProximityMatrix build_proximity(const LabeledDataset& data, const MeasureSpec& measure,
                                const BuildOptions& opts = {});

inline constexpr std::uint32_t kProximityFormatVersion = 1;

void save_proximity(const ProximityMatrix& pm, const std::filesystem::path& path);
ProximityMatrix load_proximity(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_proximity(const ProximityMatrix& pm);
ProximityMatrix decode_proximity(const std::vector<std::uint8_t>& bytes);

/// Square CSV with an id header row; for inspection only.
void export_proximity_csv(const ProximityMatrix& pm, std::ostream& os);

}  // namespace ftdtw
