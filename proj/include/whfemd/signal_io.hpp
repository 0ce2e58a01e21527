// Audio and manifest I/O: WAV loading, dataset manifests, amplitude
// normalization.
//
// The WAV reader handles RIFF/PCM files with 8/16/24-bit integer or 32-bit
// float samples, mono or multichannel (channels are averaged). Integer
// samples are mapped to +-1.0 full scale. Manifests are `path,label` CSV.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "whfemd/errors.hpp"

namespace whfemd {

struct Signal {
  Eigen::VectorXd samples;  // full scale +-1.0
  int sample_rate = 0;      // Hz
  std::string source_id;
};

struct ManifestEntry {
  std::string path;
  std::string label;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> label_set;  // first-appearance order
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32le(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void write_u16le(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

/// Loads a PCM or IEEE-float WAV file, averaging channels to mono and
/// scaling integer samples to +-1.0 full scale.
inline Signal load_wav(const std::string& path) {
  using detail::read_u16le;
  using detail::read_u32le;

  const std::vector<unsigned char> bytes = detail::read_file_bytes(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("not a RIFF/WAVE file: " + path);

  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_len = read_u32le(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      throw ParseError("truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw ParseError("fmt chunk too short in " + path);
      format_tag = read_u16le(bytes.data() + body);
      channels = read_u16le(bytes.data() + body + 2);
      sample_rate = read_u32le(bytes.data() + body + 4);
      bits = read_u16le(bytes.data() + body + 14);
      if (format_tag == 0xFFFE) {
        // WAVE_FORMAT_EXTENSIBLE: the real tag leads the SubFormat GUID.
        if (chunk_len < 40) throw ParseError("extensible fmt chunk too short in " + path);
        format_tag = read_u16le(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr) throw ParseError("missing fmt or data chunk in " + path);
  if (channels == 0 || sample_rate == 0) throw ParseError("invalid fmt fields in " + path);

  const bool is_pcm = format_tag == 1;
  const bool is_float = format_tag == 3;
  if (!((is_pcm && (bits == 8 || bits == 16 || bits == 24)) || (is_float && bits == 32)))
    throw UnsupportedFormat("unsupported WAV encoding (format " + std::to_string(format_tag) +
                            ", " + std::to_string(bits) + " bit) in " + path);

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = data_len / frame_size;
  if (frames == 0) throw EmptySignal("no audio frames in " + path);

  Signal sig;
  sig.sample_rate = static_cast<int>(sample_rate);
  sig.source_id = path;
  sig.samples.resize(static_cast<Eigen::Index>(frames));

  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame_size + c * bytes_per_sample;
      double v = 0.0;
      if (is_float) {
        float fv;
        std::memcpy(&fv, p, 4);
        v = static_cast<double>(fv);
      } else if (bits == 8) {
        v = (static_cast<double>(*p) - 128.0) / 128.0;
      } else if (bits == 16) {
        const std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        v = static_cast<double>(s) / 32768.0;
      } else {  // 24
        std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
        if (s & 0x800000) s |= ~0xFFFFFF;  // sign extend
        v = static_cast<double>(s) / 8388608.0;
      }
      acc += v;
    }
    sig.samples[static_cast<Eigen::Index>(f)] = acc / channels;
  }

  for (Eigen::Index i = 0; i < sig.samples.size(); ++i)
    if (!std::isfinite(sig.samples[i]))
      throw ParseError("non-finite sample in " + path);
  return sig;
}

namespace detail {

inline void write_wav_header(std::ostream& os, std::uint16_t format_tag, std::uint16_t bits,
                             std::uint32_t sample_rate, std::uint32_t n_samples) {
  const std::uint16_t channels = 1;
  const std::uint32_t byte_rate = sample_rate * channels * bits / 8;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_len = n_samples * block_align;
  os.write("RIFF", 4);
  write_u32le(os, 36 + data_len);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32le(os, 16);
  write_u16le(os, format_tag);
  write_u16le(os, channels);
  write_u32le(os, sample_rate);
  write_u32le(os, byte_rate);
  write_u16le(os, block_align);
  write_u16le(os, bits);
  os.write("data", 4);
  write_u32le(os, data_len);
}

}  // namespace detail

/// Writes a mono 16-bit PCM WAV. Samples are clamped to [-1, 1).
inline void write_wav_pcm16(const std::string& path, const Signal& sig) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write file: " + path);
  detail::write_wav_header(os, 1, 16, static_cast<std::uint32_t>(sig.sample_rate),
                           static_cast<std::uint32_t>(sig.samples.size()));
  for (Eigen::Index i = 0; i < sig.samples.size(); ++i) {
    const double scaled = std::clamp(sig.samples[i] * 32768.0, -32768.0, 32767.0);
    detail::write_u16le(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lrint(scaled))));
  }
  if (!os) throw IoError("write failed: " + path);
}

/// Writes a mono 32-bit float WAV; float-representable samples round trip
/// exactly through load_wav.
inline void write_wav_float32(const std::string& path, const Signal& sig) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write file: " + path);
  detail::write_wav_header(os, 3, 32, static_cast<std::uint32_t>(sig.sample_rate),
                           static_cast<std::uint32_t>(sig.samples.size()));
  for (Eigen::Index i = 0; i < sig.samples.size(); ++i) {
    const float f = static_cast<float>(sig.samples[i]);
    char b[4];
    std::memcpy(b, &f, 4);
    os.write(b, 4);
  }
  if (!os) throw IoError("write failed: " + path);
}

/// Loads a `path,label` CSV manifest. Entries keep file order; the label set
/// keeps first-appearance order.
inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty manifest file: " + path);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != "path,label")
    throw ParseError("manifest header must be 'path,label', got '" + line + "' in " + path);

  Manifest m;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("manifest row missing label column: '" + line + "' in " + path);
    ManifestEntry e{line.substr(0, comma), line.substr(comma + 1)};
    if (e.path.empty() || e.label.empty())
      throw ParseError("manifest row with empty field: '" + line + "' in " + path);
    if (std::find(seen.begin(), seen.end(), e.path) != seen.end())
      throw DuplicateEntry("duplicate manifest path: " + e.path);
    seen.push_back(e.path);
    if (std::find(m.label_set.begin(), m.label_set.end(), e.label) == m.label_set.end())
      m.label_set.push_back(e.label);
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write manifest: " + path);
  os << "path,label\n";
  for (const auto& e : m.entries) os << e.path << ',' << e.label << '\n';
  if (!os) throw IoError("write failed: " + path);
}

template <typename Scalar>
struct ZscoreResult {
  Eigen::VectorX<Scalar> values;
  bool degenerate = false;  // constant input, mapped to zeros
};

/// (x - mean)/SD elementwise with sample SD (n-1). Constant input maps to
/// zeros and sets the degenerate flag instead of erroring, so degenerate
/// sequences cannot abort a batch run.
template <typename Scalar>
ZscoreResult<Scalar> zscore_normalize(const Eigen::VectorX<Scalar>& values) {
  if (values.size() < 2) throw InsufficientData("zscore_normalize: need at least 2 values");
  const Scalar mean = values.mean();
  const Scalar var = (values.array() - mean).square().sum() / static_cast<Scalar>(values.size() - 1);
  ZscoreResult<Scalar> out;
  if (var <= Scalar{0}) {
    out.values = Eigen::VectorX<Scalar>::Zero(values.size());
    out.degenerate = true;
    return out;
  }
  const Scalar sd = std::sqrt(var);
  out.values = (values.array() - mean) / sd;
  return out;
}

/// Column statistics for corpus-level z-scoring of a feature matrix.
struct ColumnStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;                  // sample SD; 0 marks a degenerate column
  std::vector<Eigen::Index> degenerate_columns;
};

/// Computes per-column mean and sample SD over the given rows (all rows when
/// `rows` is empty).
inline ColumnStats column_stats(const Eigen::MatrixXd& data,
                                const std::vector<Eigen::Index>& rows = {}) {
  const Eigen::Index d = data.cols();
  Eigen::Index n = rows.empty() ? data.rows() : static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw InsufficientData("column_stats: need at least 2 rows");
  ColumnStats st;
  st.mean = Eigen::VectorXd::Zero(d);
  st.sd = Eigen::VectorXd::Zero(d);
  auto row_at = [&](Eigen::Index i) -> Eigen::Index { return rows.empty() ? i : rows[static_cast<std::size_t>(i)]; };
  for (Eigen::Index i = 0; i < n; ++i) st.mean += data.row(row_at(i)).transpose();
  st.mean /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd dev = data.row(row_at(i)).transpose() - st.mean;
    st.sd += dev.cwiseProduct(dev);
  }
  st.sd = (st.sd / static_cast<double>(n - 1)).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j)
    if (st.sd[j] <= 0.0) st.degenerate_columns.push_back(j);
  return st;
}

/// Applies (x - mean)/sd per column; degenerate columns map to zero.
inline Eigen::MatrixXd apply_column_zscore(const Eigen::MatrixXd& data, const ColumnStats& st) {
  Eigen::MatrixXd out(data.rows(), data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (st.sd[j] <= 0.0)
      out.col(j).setZero();
    else
      out.col(j) = (data.col(j).array() - st.mean[j]) / st.sd[j];
  }
  return out;
}

}  // namespace whfemd
