#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "doctest.h"

#include "excerptlab/audio.hpp"
#include "excerptlab/errors.hpp"
#include "excerptlab/repetition.hpp"
#include "excerptlab/rng.hpp"

using namespace excerptlab;

namespace {

// LSB-first variable-width packer, the reference for the LZW bit layout.
std::vector<std::uint8_t> pack_codes(const std::vector<unsigned>& codes,
                                     const std::vector<int>& widths) {
  std::vector<std::uint8_t> out;
  std::uint64_t acc = 0;
  int bits = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    acc |= static_cast<std::uint64_t>(codes[i]) << bits;
    bits += widths[i];
    while (bits >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc & 0xff));
      acc >>= 8;
      bits -= 8;
    }
  }
  if (bits > 0) out.push_back(static_cast<std::uint8_t>(acc & 0xff));
  return out;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

AudioClip tone_clip(double seconds, int rate, double freq, double amp) {
  AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] =
        amp * std::sin(2.0 * 3.14159265358979323846 * freq *
                       static_cast<double>(i) / rate);
  return clip;
}

AudioClip noise_clip(double seconds, int rate, std::uint64_t seed) {
  auto eng = make_engine(seed);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (auto& s : clip.samples) s = uni(eng);
  return clip;
}

}  // namespace

TEST_CASE("text run-length worked examples") {
  CHECK(rle_encode_pedagogical("aaaaabbbbb") == "5a5b");
  CHECK(rle_encode_pedagogical("aabbabbaba") == "2a2ba2baba");
  CHECK(rle_encode_pedagogical("aaaaaaaaaaaa") == "9a3a");  // 12, chunked
  CHECK(rle_encode_pedagogical("abc") == "abc");
  CHECK(rle_encode_pedagogical("") == "");
  CHECK(rle_decode_pedagogical("5a5b") == "aaaaabbbbb");
  CHECK(rle_decode_pedagogical("9a3a") == "aaaaaaaaaaaa");
  for (const std::string s :
       {"hello world", "aaaab", "xyzzy", "mississippi"})
    CHECK(rle_decode_pedagogical(rle_encode_pedagogical(s)) == s);
}

TEST_CASE("text run-length rejects ambiguous input and bad codes") {
  CHECK_THROWS_AS((void)rle_encode_pedagogical("abc123"), DataError);
  CHECK_THROWS_AS((void)rle_decode_pedagogical("3"), DataError);
  CHECK_THROWS_AS((void)rle_decode_pedagogical("1a"), DataError);
  CHECK_THROWS_AS((void)rle_decode_pedagogical("0a"), DataError);
  CHECK_THROWS_AS((void)rle_decode_pedagogical("33a"), DataError);
}

TEST_CASE("binary run-length format and round trips") {
  const std::vector<std::uint8_t> run(300, 0x41);
  const std::vector<std::uint8_t> enc = rle_encode_binary(run);
  REQUIRE(enc == std::vector<std::uint8_t>{255, 0x41, 45, 0x41});
  CHECK(rle_decode_binary(enc) == run);

  auto eng = make_engine(9);
  std::uniform_int_distribution<int> byte(0, 4);  // runs are likely
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> data(
        static_cast<std::size_t>(trial * 7 % 200));
    for (auto& b : data) b = static_cast<std::uint8_t>(byte(eng));
    CHECK(rle_decode_binary(rle_encode_binary(data)) == data);
  }
  CHECK(rle_encode_binary({}).empty());
  CHECK(rle_decode_binary({}).empty());
}

TEST_CASE("binary run-length decode validation") {
  CHECK_THROWS_AS((void)rle_decode_binary(std::vector<std::uint8_t>{5}),
                  DataError);
  CHECK_THROWS_AS(
      (void)rle_decode_binary(std::vector<std::uint8_t>{0, 0x41}),
      DataError);
}

TEST_CASE("LZW emits the classic code sequence") {
  // T O B E O R N O T | TO BE OR TOB EO RN OT
  const std::vector<unsigned> codes = {84,  79,  66,  69,  79,  82,
                                       78,  79,  84,  256, 258, 260,
                                       265, 259, 261, 263};
  const std::vector<int> widths(codes.size(), 9);
  const auto expected = pack_codes(codes, widths);
  const auto data = bytes_of("TOBEORNOTTOBEORTOBEORNOT");
  CHECK(lzw_encode(data) == expected);
  CHECK(lzw_decode(expected) == data);
}

TEST_CASE("LZW handles the self-referential code") {
  // "aaaa" encodes to 97, 256, 97 where 256 is defined mid-decode.
  const auto data = bytes_of("aaaa");
  const auto expected = pack_codes({97, 256, 97}, {9, 9, 9});
  CHECK(lzw_encode(data) == expected);
  CHECK(lzw_decode(expected) == data);
}

TEST_CASE("LZW round trips across sizes and contents") {
  CHECK(lzw_encode({}).empty());
  CHECK(lzw_decode({}).empty());
  for (int b = 0; b < 256; b += 51) {
    const std::vector<std::uint8_t> one{static_cast<std::uint8_t>(b)};
    CHECK(lzw_decode(lzw_encode(one)) == one);
  }
  std::vector<std::uint8_t> all(256);
  for (int i = 0; i < 256; ++i) all[static_cast<std::size_t>(i)] =
      static_cast<std::uint8_t>(i);
  CHECK(lzw_decode(lzw_encode(all)) == all);

  auto eng = make_engine(17);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    // Incompressible noise grows the code width past 9 bits.
    std::vector<std::uint8_t> noise(2000 + 113 * trial);
    for (auto& b : noise) b = static_cast<std::uint8_t>(byte(eng));
    CHECK(lzw_decode(lzw_encode(noise)) == noise);
    // Structured data exercises long dictionary matches.
    std::vector<std::uint8_t> structured(3000);
    for (std::size_t i = 0; i < structured.size(); ++i)
      structured[i] = static_cast<std::uint8_t>(small(eng) + (i % 7));
    CHECK(lzw_decode(lzw_encode(structured)) == structured);
    CHECK(lzw_encode(structured).size() < structured.size());
  }
}

TEST_CASE("LZW survives a dictionary-freeze sized input") {
  // Enough distinct material to push the dictionary to its 65536 cap.
  auto eng = make_engine(23);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> big(300000);
  for (auto& b : big) b = static_cast<std::uint8_t>(byte(eng));
  CHECK(lzw_decode(lzw_encode(big)) == big);
}

TEST_CASE("LZW decode rejects corrupt streams") {
  // A code referencing an entry that cannot exist yet.
  const auto bogus = pack_codes({97, 300}, {9, 9});
  CHECK_THROWS_AS((void)lzw_decode(bogus), DataError);
  // A stream that opens with a dictionary code instead of a literal.
  const auto headless = pack_codes({256}, {9});
  CHECK_THROWS_AS((void)lzw_decode(headless), DataError);
  // Sub-width trailing bits are padding: they can drop a final code but
  // never invent one.
  const auto ok = pack_codes({97, 98, 99}, {9, 9, 9});
  const std::vector<std::uint8_t> cut(ok.begin(), ok.begin() + 3);
  CHECK(lzw_decode(cut) == bytes_of("ab"));
}

TEST_CASE("codec objects round trip and are named") {
  const Codec lzw = lzw_codec();
  const Codec rle = rle_binary_codec();
  CHECK(lzw.name == "lzw");
  CHECK(rle.name == "rle");
  const auto data = bytes_of("abracadabra abracadabra");
  for (const Codec* c : {&lzw, &rle}) {
    const auto enc = c->encode(data);
    const auto dec = c->decode(enc);
    CHECK(dec == data);
  }
}

TEST_CASE("encoded length separates silence from noise") {
  const Codec lzw = lzw_codec();
  AudioClip silence;
  silence.sample_rate_hz = 8000;
  silence.samples.assign(16000, 0.0);
  const AudioClip noise = noise_clip(2.0, 8000, 31);

  const EncodedLengthReport quiet = encoded_length(silence, lzw, "quiet");
  const EncodedLengthReport busy = encoded_length(noise, lzw, "busy");
  CHECK(quiet.unit_id == "quiet");
  CHECK(quiet.codec == "lzw");
  CHECK(quiet.duration_s == doctest::Approx(2.0));
  CHECK(quiet.normalized ==
        doctest::Approx(quiet.payload_bytes / 2.0).epsilon(1e-12));
  CHECK(quiet.decile == 0);
  CHECK(quiet.payload_bytes * 10 < busy.payload_bytes);

  // Concatenating a clip with itself compresses better than double.
  AudioClip doubled = noise;
  doubled.samples.insert(doubled.samples.end(), noise.samples.begin(),
                         noise.samples.end());
  const EncodedLengthReport twice = encoded_length(doubled, lzw, "twice");
  CHECK(twice.payload_bytes < 2 * busy.payload_bytes);

  // Deterministic: the same input always yields the same report.
  const EncodedLengthReport again = encoded_length(noise, lzw, "busy");
  CHECK(again.payload_bytes == busy.payload_bytes);

  AudioClip empty;
  empty.sample_rate_hz = 8000;
  CHECK_THROWS_AS((void)encoded_length(empty, lzw, "x"), DataError);
}

TEST_CASE("decile bins follow the empirical quantiles") {
  std::vector<double> values;
  for (int i = 100; i >= 1; --i) values.push_back(i);
  const DecileBinning bins = decile_bin(values);
  REQUIRE(bins.labels.size() == 100);
  REQUIRE(bins.boundaries.size() == 9);
  CHECK_FALSE(bins.degenerate);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int expect = (static_cast<int>(values[i]) + 9) / 10;
    CHECK(bins.labels[i] == expect);
  }
  for (int k = 1; k <= 9; ++k)
    CHECK(bins.boundaries[static_cast<std::size_t>(k - 1)] == 10.0 * k);
}

TEST_CASE("a value exactly on a boundary goes to the lower bin") {
  std::vector<double> values;
  for (int i = 1; i <= 20; ++i) values.push_back(i);
  const DecileBinning bins = decile_bin(values);
  // Boundaries are 2, 4, ..., 18; the value 2 stays in bin 1.
  CHECK(bins.boundaries.front() == 2.0);
  CHECK(bins.labels[1] == 1);  // value 2
  CHECK(bins.labels[2] == 2);  // value 3
}

TEST_CASE("decile labels are invariant to increasing transforms") {
  auto eng = make_engine(41);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> x(250);
  for (auto& v : x) v = n01(eng);
  std::vector<double> fx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fx[i] = std::exp(0.3 * x[i]);
  CHECK(decile_bin(x).labels == decile_bin(fx).labels);
}

TEST_CASE("ten distinct values get one bin each") {
  const std::vector<double> values = {3, 1, 4, 1.5, 9, 2.6, 5.3, 5.8, 9.7, 0.2};
  const DecileBinning bins = decile_bin(values);
  std::vector<int> seen(bins.labels);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}

TEST_CASE("constant values collapse to a degenerate single bin") {
  const std::vector<double> values(25, 7.5);
  const DecileBinning bins = decile_bin(values);
  CHECK(bins.degenerate);
  for (int label : bins.labels) CHECK(label == 1);
}

TEST_CASE("decile binning validation") {
  std::vector<double> five = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS((void)decile_bin(five), DataError);        // < n_bins values
  CHECK_THROWS_AS((void)decile_bin(five, 1), ConfigError);   // degenerate bins
  CHECK(decile_bin(five, 5).labels == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("repetition-sales correlation hits the exact endpoints") {
  std::vector<EncodedLengthReport> reports;
  std::unordered_map<std::string, double> aligned, inverted;
  for (int i = 0; i < 8; ++i) {
    EncodedLengthReport r;
    r.unit_id = "u" + std::to_string(i);
    r.normalized = 100.0 + 3.0 * i;
    reports.push_back(r);
    aligned[r.unit_id] = 5.0 + 2.0 * r.normalized;
    inverted[r.unit_id] = 5.0 - 2.0 * r.normalized;
  }
  CHECK(repetition_sales_correlation(reports, aligned) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(repetition_sales_correlation(reports, inverted) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  aligned.erase("u3");
  CHECK_THROWS_AS((void)repetition_sales_correlation(reports, aligned),
                  DataError);
}

TEST_CASE("standard preview durations are matched within tolerance") {
  CHECK(is_standard_preview_duration(30.0));
  CHECK(is_standard_preview_duration(30.5));
  CHECK(is_standard_preview_duration(29.5));
  CHECK(is_standard_preview_duration(90.3));
  CHECK_FALSE(is_standard_preview_duration(29.4));
  CHECK_FALSE(is_standard_preview_duration(60.0));
  CHECK_FALSE(is_standard_preview_duration(91.0));
  CHECK(is_standard_preview_duration(28.0, 2.0));
}
