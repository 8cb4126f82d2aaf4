#include "ftdtw/proximity.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <zlib.h>

#include "ftdtw/error.hpp"

namespace ftdtw {

std::string MeasureSpec::tag() const {
  std::string t = kind == MeasureKind::Ftdtw
                      ? std::string("ftdtw")
                      : "classical-dtw:" + std::string(to_string(distance));
  if (band) t += fmt::format(";band={}", *band);
  return t;
}

double MeasureSpec::operator()(const FeatureSequence& x, const FeatureSequence& y) const {
  const AlignOptions opts{band};
  return kind == MeasureKind::Ftdtw ? ftdtw_similarity(x, y, opts)
                                    : dtw_similarity(x, y, distance, opts);
}

ProximityMatrix::ProximityMatrix(std::vector<std::string> ids, std::string measure_tag)
    : ids_(std::move(ids)), measure_tag_(std::move(measure_tag)) {
  const std::size_t n = ids_.size();
  values_.assign(n < 2 ? 0 : n * (n - 1) / 2, 0.0);
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, "segment id '" + id + "'");
  }
}

ProximityMatrix::ProximityMatrix(std::vector<std::string> ids, std::string measure_tag,
                                 std::vector<double> condensed)
    : ProximityMatrix(std::move(ids), std::move(measure_tag)) {
  if (condensed.size() != values_.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} values for n={}", condensed.size(), ids_.size()));
  }
  for (double v : condensed) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::NonFiniteValue, fmt::format("proximity value {}", v));
    }
  }
  values_ = std::move(condensed);
}

std::size_t ProximityMatrix::condensed_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

double ProximityMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw std::out_of_range("proximity index");
  if (i == j) return 0.0;
  return values_[condensed_index(size(), i, j)];
}

void ProximityMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i >= size() || j >= size() || i == j) throw std::out_of_range("proximity index");
  values_[condensed_index(size(), i, j)] = v;
}

ProximityMatrix build_proximity(const LabeledDataset& data, const MeasureSpec& measure,
                                const BuildOptions& opts) {
  const std::size_t n = data.size();
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& s : data.sequences) ids.push_back(s.id());
  ProximityMatrix pm(std::move(ids), measure.tag());
  if (n < 2) return pm;

  // FTDTW works on trajectories; extract them once per sequence.
  std::vector<std::vector<FeatureTrajectory>> trajs;
  if (measure.kind == MeasureKind::Ftdtw) {
    trajs.reserve(n);
    for (const auto& s : data.sequences) trajs.push_back(trajectories(s));
  }
  const AlignOptions align{measure.band};
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;

  std::atomic<std::size_t> next_row{0};
  std::atomic<bool> failed{false};
  std::uint64_t done = 0;
  std::mutex progress_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next_row.fetch_add(1);
      if (i + 1 >= n || failed.load()) return;
      std::size_t j = i + 1;
      try {
        for (; j < n; ++j) {
          double v;
          if (measure.kind == MeasureKind::Ftdtw) {
            if (data.sequences[i].dim() != data.sequences[j].dim()) {
              throw Error(ErrorCode::DimensionMismatch, "trajectory counts differ");
            }
            v = ftdtw_align(trajs[i], trajs[j], align).value;
          } else {
            v = dtw_similarity(data.sequences[i], data.sequences[j], measure.distance, align);
          }
          pm.set(i, j, v);
        }
      } catch (const Error& e) {
        std::lock_guard lock(progress_mu);
        if (!first_error) {
          first_error = std::make_exception_ptr(
              Error(e.code(), fmt::format("pair ('{}', '{}'): {}", data.sequences[i].id(),
                                          data.sequences[j].id(), e.message())));
        }
        failed = true;
        return;
      }
      if (opts.progress) {
        std::lock_guard lock(progress_mu);
        done += n - i - 1;
        opts.progress(done, total);
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return pm;
}

// ---------------------------------------------------------------------------
// Binary format: "FTPM" | u32 version | payload | u32 crc32(payload)
// payload = u64 n | u32 len + tag | n * (u32 len + id) | n(n-1)/2 f64
// All integers and floats little-endian.

namespace {

constexpr char kMagic[4] = {'F', 'T', 'P', 'M'};
constexpr std::size_t kPreamble = 8;  // magic + version

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<T>(data_[pos_ + b]) << (8 * b);
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string() {
    const auto len = get<std::uint32_t>();
    need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }

  bool at_end() const { return pos_ == size_; }

 private:
  void need(std::size_t k) const {
    if (size_ - pos_ < k) throw Error(ErrorCode::BadFormat, "proximity payload ends early");
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in pieces.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_proximity(const ProximityMatrix& pm) {
  std::vector<std::uint8_t> out;
  out.reserve(kPreamble + 16 + pm.condensed().size() * 8);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kProximityFormatVersion);
  put_le<std::uint64_t>(out, pm.size());
  put_string(out, pm.measure_tag());
  for (const auto& id : pm.ids()) put_string(out, id);
  for (double v : pm.condensed()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  put_le<std::uint32_t>(out, crc_of(out.data() + kPreamble, out.size() - kPreamble));
  return out;
}

ProximityMatrix decode_proximity(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadFormat, "not a proximity file (bad magic)");
  }
  if (bytes.size() < kPreamble + 4) {
    throw Error(ErrorCode::ChecksumMismatch, "proximity file truncated");
  }
  Reader pre(bytes.data() + 4, 4);
  const auto version = pre.get<std::uint32_t>();
  if (version != kProximityFormatVersion) {
    throw Error(ErrorCode::FormatVersionMismatch,
                fmt::format("version {} (supported: {})", version, kProximityFormatVersion));
  }
  const std::size_t payload_size = bytes.size() - kPreamble - 4;
  Reader crc_reader(bytes.data() + bytes.size() - 4, 4);
  const auto stored = crc_reader.get<std::uint32_t>();
  if (crc_of(bytes.data() + kPreamble, payload_size) != stored) {
    throw Error(ErrorCode::ChecksumMismatch, "proximity payload CRC-32 does not match");
  }

  Reader r(bytes.data() + kPreamble, payload_size);
  const auto n = r.get<std::uint64_t>();
  std::string tag = r.get_string();
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(r.get_string());
  std::vector<double> values(n < 2 ? 0 : n * (n - 1) / 2);
  for (auto& v : values) v = std::bit_cast<double>(r.get<std::uint64_t>());
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in proximity payload");
  return ProximityMatrix(std::move(ids), std::move(tag), std::move(values));
}

void save_proximity(const ProximityMatrix& pm, const std::filesystem::path& path) {
  const auto bytes = encode_proximity(pm);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

ProximityMatrix load_proximity(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_proximity(bytes);
}

void export_proximity_csv(const ProximityMatrix& pm, std::ostream& os) {
  os << "id";
  for (const auto& id : pm.ids()) os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < pm.size(); ++i) {
    os << pm.ids()[i];
    for (std::size_t j = 0; j < pm.size(); ++j) fmt::print(os, ",{:.9g}", pm.at(i, j));
    os << '\n';
  }
}

}  // namespace ftdtw
