#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "whfemd/rng.hpp"
#include "whfemd/signal_io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "whfemd_io_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(p, std::ios::binary);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
  v.push_back((x >> 16) & 0xff);
  v.push_back((x >> 24) & 0xff);
}

void push_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
}

void push_tag(std::vector<std::uint8_t>& v, const char* tag) {
  v.insert(v.end(), tag, tag + 4);
}

// Hand-built WAV bytes, independent of the library writer.
std::vector<std::uint8_t> make_wav(std::uint16_t format, std::uint16_t channels,
                                   std::uint16_t bits, std::uint32_t rate,
                                   const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> v;
  push_tag(v, "RIFF");
  push_u32(v, 36 + static_cast<std::uint32_t>(data.size()));
  push_tag(v, "WAVE");
  push_tag(v, "fmt ");
  push_u32(v, 16);
  push_u16(v, format);
  push_u16(v, channels);
  push_u32(v, rate);
  push_u32(v, rate * channels * bits / 8);
  push_u16(v, static_cast<std::uint16_t>(channels * bits / 8));
  push_u16(v, bits);
  push_tag(v, "data");
  push_u32(v, static_cast<std::uint32_t>(data.size()));
  v.insert(v.end(), data.begin(), data.end());
  return v;
}

}  // namespace

TEST_CASE("16-bit full-scale integer mapping") {
  std::vector<std::uint8_t> data;
  for (std::int16_t s : {std::int16_t{0}, std::int16_t{32767}, std::int16_t{-32768}}) {
    data.push_back(static_cast<std::uint8_t>(s & 0xff));
    data.push_back(static_cast<std::uint8_t>((s >> 8) & 0xff));
  }
  auto p = temp_file("pcm16.wav");
  write_bytes(p, make_wav(1, 1, 16, 8000, data));
  auto sig = whfemd::load_wav(p.string());
  REQUIRE(sig.samples.size() == 3);
  CHECK(sig.sample_rate == 8000);
  CHECK(sig.samples[0] == doctest::Approx(0.0));
  CHECK(sig.samples[1] == doctest::Approx(32767.0 / 32768.0));
  CHECK(sig.samples[2] == doctest::Approx(-1.0));
}

TEST_CASE("stereo channels are averaged") {
  // float32 stereo: left all 1.0, right all 0.0
  std::vector<std::uint8_t> data;
  const float left = 1.0f, right = 0.0f;
  for (int i = 0; i < 4; ++i) {
    const std::uint8_t* lb = reinterpret_cast<const std::uint8_t*>(&left);
    const std::uint8_t* rb = reinterpret_cast<const std::uint8_t*>(&right);
    data.insert(data.end(), lb, lb + 4);
    data.insert(data.end(), rb, rb + 4);
  }
  auto p = temp_file("stereo.wav");
  write_bytes(p, make_wav(3, 2, 32, 16000, data));
  auto sig = whfemd::load_wav(p.string());
  REQUIRE(sig.samples.size() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(sig.samples[i] == doctest::Approx(0.5));
}

TEST_CASE("malformed and unsupported WAVs") {
  auto p = temp_file("trunc.wav");
  write_bytes(p, {'R', 'I', 'F', 'F', 0, 0});
  CHECK_THROWS_AS(whfemd::load_wav(p.string()), whfemd::ParseError);

  auto p12 = temp_file("12bit.wav");
  write_bytes(p12, make_wav(1, 1, 12, 8000, std::vector<std::uint8_t>(12, 0)));
  CHECK_THROWS_AS(whfemd::load_wav(p12.string()), whfemd::UnsupportedFormat);

  auto pe = temp_file("empty.wav");
  write_bytes(pe, make_wav(1, 1, 16, 8000, {}));
  CHECK_THROWS_AS(whfemd::load_wav(pe.string()), whfemd::EmptySignal);

  CHECK_THROWS_AS(whfemd::load_wav("/nonexistent/file.wav"), whfemd::IoError);
}

TEST_CASE("8 and 24 bit decoding") {
  {
    auto p = temp_file("pcm8.wav");
    write_bytes(p, make_wav(1, 1, 8, 8000, {128, 255, 0}));
    auto sig = whfemd::load_wav(p.string());
    CHECK(sig.samples[0] == doctest::Approx(0.0));
    CHECK(sig.samples[1] == doctest::Approx(127.0 / 128.0));
    CHECK(sig.samples[2] == doctest::Approx(-1.0));
  }
  {
    std::vector<std::uint8_t> data = {0x00, 0x00, 0x40,   // +2^22 -> 0.5
                                      0x00, 0x00, 0x80};  // -2^23 -> -1.0
    auto p = temp_file("pcm24.wav");
    write_bytes(p, make_wav(1, 1, 24, 8000, data));
    auto sig = whfemd::load_wav(p.string());
    CHECK(sig.samples[0] == doctest::Approx(0.5));
    CHECK(sig.samples[1] == doctest::Approx(-1.0));
  }
}

TEST_CASE("float32 write/load round trip is exact for representable samples") {
  whfemd::Signal sig;
  sig.sample_rate = 16000;
  sig.samples.resize(64);
  for (Eigen::Index i = 0; i < 64; ++i)
    sig.samples[i] = static_cast<double>(static_cast<float>(std::sin(0.37 * static_cast<double>(i))));
  auto p = temp_file("roundtrip.wav");
  whfemd::write_wav_float32(p.string(), sig);
  auto back = whfemd::load_wav(p.string());
  REQUIRE(back.samples.size() == sig.samples.size());
  CHECK((back.samples - sig.samples).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(back.sample_rate == 16000);

  // determinism: same bytes in, identical Signal out
  auto again = whfemd::load_wav(p.string());
  CHECK((again.samples - back.samples).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("pcm16 writer round trips within one quantization step") {
  whfemd::Signal sig;
  sig.sample_rate = 8000;
  sig.samples.resize(32);
  whfemd::Rng rng(5);
  for (Eigen::Index i = 0; i < 32; ++i) sig.samples[i] = 0.9 * rng.symmetric();
  auto p = temp_file("pcm16_rt.wav");
  whfemd::write_wav_pcm16(p.string(), sig);
  auto back = whfemd::load_wav(p.string());
  CHECK((back.samples - sig.samples).lpNorm<Eigen::Infinity>() <= 1.0 / 32768.0);
}

TEST_CASE("manifest parsing") {
  auto p = temp_file("manifest.csv");
  {
    std::ofstream os(p);
    os << "path,label\r\n"
       << "a.wav,Severe\n"
       << "b.wav,Normal\r\n"
       << "c.wav,Severe\n";
  }
  auto m = whfemd::load_manifest(p.string());
  REQUIRE(m.entries.size() == 3);
  CHECK(m.entries[0].path == "a.wav");
  CHECK(m.entries[0].label == "Severe");
  CHECK(m.entries[1].label == "Normal");
  REQUIRE(m.label_set.size() == 2);
  CHECK(m.label_set[0] == "Severe");
  CHECK(m.label_set[1] == "Normal");
}

TEST_CASE("manifest edge cases") {
  {
    auto p = temp_file("empty_manifest.csv");
    std::ofstream(p) << "path,label\n";
    auto m = whfemd::load_manifest(p.string());
    CHECK(m.entries.empty());
    CHECK(m.label_set.empty());
  }
  {
    auto p = temp_file("dup_manifest.csv");
    std::ofstream(p) << "path,label\na.wav,X\na.wav,Y\n";
    CHECK_THROWS_AS(whfemd::load_manifest(p.string()), whfemd::DuplicateEntry);
  }
  {
    auto p = temp_file("bad_header.csv");
    std::ofstream(p) << "file,severity\na.wav,X\n";
    CHECK_THROWS_AS(whfemd::load_manifest(p.string()), whfemd::ParseError);
  }
  {
    auto p = temp_file("missing_col.csv");
    std::ofstream(p) << "path,label\njustapath\n";
    CHECK_THROWS_AS(whfemd::load_manifest(p.string()), whfemd::ParseError);
  }
}

TEST_CASE("manifest write/load round trip") {
  whfemd::Manifest m;
  m.entries = {{"x/one.wav", "High"}, {"x/two.wav", "Low"}};
  m.label_set = {"High", "Low"};
  auto p = temp_file("written_manifest.csv");
  whfemd::write_manifest(p.string(), m);
  auto back = whfemd::load_manifest(p.string());
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[1].path == "x/two.wav");
  CHECK(back.label_set == m.label_set);
}

TEST_CASE("zscore examples") {
  {
    Eigen::VectorXd v(3);
    v << 1, 2, 3;
    auto r = whfemd::zscore_normalize<double>(v);
    CHECK_FALSE(r.degenerate);
    CHECK(r.values[0] == doctest::Approx(-1.0));
    CHECK(r.values[1] == doctest::Approx(0.0));
    CHECK(r.values[2] == doctest::Approx(1.0));
  }
  {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(3, 5.0);
    auto r = whfemd::zscore_normalize<double>(v);
    CHECK(r.degenerate);
    CHECK(r.values.isZero(0.0));
  }
  {
    Eigen::VectorXd v(2);
    v << 0, 10;
    auto r = whfemd::zscore_normalize<double>(v);
    CHECK(r.values[0] == doctest::Approx(-0.70710678).epsilon(1e-6));
    CHECK(r.values[1] == doctest::Approx(0.70710678).epsilon(1e-6));
  }
  {
    Eigen::VectorXd v(1);
    v << 1;
    CHECK_THROWS_AS(whfemd::zscore_normalize<double>(v), whfemd::InsufficientData);
  }
}

TEST_CASE("zscore property: mean 0 and sample SD 1") {
  whfemd::Rng rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(200));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 10.0 * rng.symmetric() + 3.0;
    if (n >= 2) v[0] += 1.0;  // ensure non-constant
    auto r = whfemd::zscore_normalize<double>(v);
    REQUIRE_FALSE(r.degenerate);
    CHECK(std::abs(r.values.mean()) < 1e-12);
    const double sd = std::sqrt((r.values.array() - r.values.mean()).square().sum() /
                                static_cast<double>(n - 1));
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("column zscore with train statistics") {
  Eigen::MatrixXd data(4, 2);
  data << 1, 7, 3, 7, 2, 7, 100, 7;
  auto st = whfemd::column_stats(data, {0, 1, 2});  // train rows only
  CHECK(st.mean[0] == doctest::Approx(2.0));
  REQUIRE(st.degenerate_columns.size() == 1);
  CHECK(st.degenerate_columns[0] == 1);
  auto z = whfemd::apply_column_zscore(data, st);
  CHECK(z(1, 0) == doctest::Approx(1.0));   // (3-2)/1
  CHECK(z(3, 1) == doctest::Approx(0.0));   // degenerate column maps to 0
  CHECK(z(3, 0) == doctest::Approx(98.0));  // test row scaled by train stats
}
