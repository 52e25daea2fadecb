#include "excerptlab/repetition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "excerptlab/errors.hpp"
#include "excerptlab/stats.hpp"

namespace excerptlab {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Accumulates variable-width codes into a little-endian bit stream:
// bit 0 of each code lands in the lowest unfilled bit of the current
// byte.
class BitWriter {
 public:
  void put(std::uint32_t code, int width) {
    acc_ |= static_cast<std::uint64_t>(code) << filled_;
    filled_ += width;
    while (filled_ >= 8) {
      bytes_.push_back(static_cast<std::uint8_t>(acc_ & 0xffu));
      acc_ >>= 8;
      filled_ -= 8;
    }
  }

  std::vector<std::uint8_t> finish() {
    if (filled_ > 0) {
      bytes_.push_back(static_cast<std::uint8_t>(acc_ & 0xffu));
      acc_ = 0;
      filled_ = 0;
    }
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t acc_{0};
  int filled_{0};
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // False once fewer than `width` bits remain; the up-to-7 zero pad
  // bits at the end of the stream can never form a full code because
  // widths start at 9.
  bool get(int width, std::uint32_t& code) {
    while (filled_ < width) {
      if (pos_ == bytes_.size()) return false;
      acc_ |= static_cast<std::uint64_t>(bytes_[pos_++]) << filled_;
      filled_ += 8;
    }
    code = static_cast<std::uint32_t>(acc_ & ((1ull << width) - 1));
    acc_ >>= width;
    filled_ -= width;
    return true;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_{0};
  std::uint64_t acc_{0};
  int filled_{0};
};

constexpr std::uint32_t kLzwDictLimit = 1u << 16;
constexpr int kLzwMaxWidth = 16;

}  // namespace

std::string rle_encode_pedagogical(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_digit(c))
      throw DataError("run-length text input may not contain digits, found '" +
                      std::string(1, c) + "'");
    std::size_t run = 1;
    while (i + run < text.size() && text[i + run] == c) ++run;
    i += run;
    while (run > 0) {
      const std::size_t chunk = std::min<std::size_t>(run, 9);
      if (chunk >= 2) out.push_back(static_cast<char>('0' + chunk));
      out.push_back(c);
      run -= chunk;
    }
  }
  return out;
}

std::string rle_decode_pedagogical(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  std::size_t i = 0;
  while (i < code.size()) {
    const char c = code[i];
    if (is_digit(c)) {
      const int count = c - '0';
      if (count < 2)
        throw DataError("run-length count digit must be 2..9, found '" +
                        std::string(1, c) + "'");
      if (i + 1 == code.size())
        throw DataError("run-length code ends with a dangling count digit");
      const char sym = code[i + 1];
      if (is_digit(sym))
        throw DataError("run-length count digit must be followed by a symbol");
      out.append(static_cast<std::size_t>(count), sym);
      i += 2;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::vector<std::uint8_t> rle_encode_binary(std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out;
  std::size_t i = 0;
  while (i < data.size()) {
    const std::uint8_t v = data[i];
    std::size_t run = 1;
    while (i + run < data.size() && data[i + run] == v && run < 255) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.push_back(v);
    i += run;
  }
  return out;
}

std::vector<std::uint8_t> rle_decode_binary(std::span<const std::uint8_t> data) {
  if (data.size() % 2 != 0)
    throw DataError("binary run-length stream must be (count, value) pairs, "
                    "got odd length " +
                    std::to_string(data.size()));
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const std::uint8_t count = data[i];
    if (count == 0)
      throw DataError("binary run-length count must be 1..255, found 0");
    out.insert(out.end(), count, data[i + 1]);
  }
  return out;
}

std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> data) {
  if (data.empty()) return {};
  // Dictionary as a trie keyed by (prefix code, next byte); the 256
  // single-byte entries are implicit.
  std::unordered_map<std::uint64_t, std::uint32_t> dict;
  dict.reserve(1 << 12);
  const auto key = [](std::uint32_t prefix, std::uint8_t byte) {
    return (static_cast<std::uint64_t>(prefix) << 8) | byte;
  };
  std::uint32_t next_code = 256;
  int width = 9;
  BitWriter bits;
  std::uint32_t cur = data[0];
  for (std::size_t i = 1; i < data.size(); ++i) {
    const std::uint8_t b = data[i];
    const auto it = dict.find(key(cur, b));
    if (it != dict.end()) {
      cur = it->second;
      continue;
    }
    bits.put(cur, width);
    if (next_code < kLzwDictLimit) {
      dict.emplace(key(cur, b), next_code++);
      if (next_code == (1u << width) && width < kLzwMaxWidth) ++width;
    }
    cur = b;
  }
  bits.put(cur, width);
  return bits.finish();
}

std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> data) {
  if (data.empty()) return {};
  // Entries above 255 store (prefix code, appended byte); strings are
  // materialized by walking prefixes.
  std::vector<std::pair<std::uint32_t, std::uint8_t>> entries;
  entries.reserve(1 << 12);
  std::uint32_t next_code = 256;
  int width = 9;
  BitReader bits(data);

  const auto first_byte = [&](std::uint32_t code) {
    while (code >= 256) code = entries[code - 256].first;
    return static_cast<std::uint8_t>(code);
  };
  std::vector<std::uint8_t> out;
  const auto append_string = [&](std::uint32_t code) {
    std::size_t start = out.size();
    while (code >= 256) {
      out.push_back(entries[code - 256].second);
      code = entries[code - 256].first;
    }
    out.push_back(static_cast<std::uint8_t>(code));
    std::reverse(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
  };

  std::uint32_t code = 0;
  if (!bits.get(width, code))
    throw DataError("compressed stream too short for a first code");
  if (code >= 256)
    throw DataError("first compressed code " + std::to_string(code) +
                    " is not a literal byte");
  out.push_back(static_cast<std::uint8_t>(code));
  std::uint32_t prev = code;
  for (;;) {
    // The encoder grew its dictionary (and possibly its code width)
    // before emitting the code we are about to read, while our own
    // pending entry is only completed below -- hence the +1.
    if (next_code < kLzwDictLimit && next_code + 1 == (1u << width) &&
        width < kLzwMaxWidth)
      ++width;
    if (!bits.get(width, code)) break;
    if (code > next_code || code >= kLzwDictLimit)
      throw DataError("compressed code " + std::to_string(code) +
                      " references a dictionary entry that does not exist");
    std::uint8_t new_suffix;
    if (code == next_code) {
      // The code the encoder just defined: prev string + its own first
      // byte.
      new_suffix = first_byte(prev);
      if (next_code >= kLzwDictLimit)
        throw DataError("compressed stream extends a frozen dictionary");
      entries.emplace_back(prev, new_suffix);
      ++next_code;
      append_string(code);
    } else {
      new_suffix = first_byte(code);
      if (next_code < kLzwDictLimit) {
        entries.emplace_back(prev, new_suffix);
        ++next_code;
      }
      append_string(code);
    }
    prev = code;
  }
  return out;
}

Codec lzw_codec() {
  return Codec{
      "lzw",
      [](std::span<const std::uint8_t> d) { return lzw_encode(d); },
      [](std::span<const std::uint8_t> d) { return lzw_decode(d); },
  };
}

Codec rle_binary_codec() {
  return Codec{
      "rle",
      [](std::span<const std::uint8_t> d) { return rle_encode_binary(d); },
      [](std::span<const std::uint8_t> d) { return rle_decode_binary(d); },
  };
}

EncodedLengthReport encoded_length(const AudioClip& clip, const Codec& codec,
                                   std::string unit_id) {
  if (clip.samples.empty())
    throw DataError("cannot measure repetition of an empty clip" +
                    (unit_id.empty() ? "" : " (unit " + unit_id + ")"));
  const std::vector<std::uint8_t> pcm = pcm16_bytes(clip);
  const std::vector<std::uint8_t> encoded =
      codec.encode(std::span<const std::uint8_t>(pcm));
  const std::vector<std::uint8_t> decoded =
      codec.decode(std::span<const std::uint8_t>(encoded));
  if (decoded != pcm)
    throw DataError("codec '" + codec.name +
                    "' failed to round-trip the clip" +
                    (unit_id.empty() ? "" : " (unit " + unit_id + ")"));
  EncodedLengthReport report;
  report.unit_id = std::move(unit_id);
  report.codec = codec.name;
  report.payload_bytes = encoded.size();
  report.duration_s = clip.duration_s();
  report.normalized = static_cast<double>(encoded.size()) / report.duration_s;
  return report;
}

DecileBinning decile_bin(std::span<const double> values, int n_bins) {
  if (n_bins < 2)
    throw ConfigError("quantile binning needs at least 2 bins, got " +
                      std::to_string(n_bins));
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(n_bins))
    throw DataError("cannot split " + std::to_string(n) + " values into " +
                    std::to_string(n_bins) + " quantile bins");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  DecileBinning out;
  out.boundaries.reserve(static_cast<std::size_t>(n_bins) - 1);
  for (int k = 1; k < n_bins; ++k) {
    // Upper edge of bin k: the ceil(k*n/n_bins)-th order statistic.
    const std::size_t rank =
        (static_cast<std::size_t>(k) * n + static_cast<std::size_t>(n_bins) -
         1) /
        static_cast<std::size_t>(n_bins);
    out.boundaries.push_back(sorted[rank - 1]);
  }
  for (std::size_t i = 0; i + 1 < out.boundaries.size(); ++i)
    if (out.boundaries[i] == out.boundaries[i + 1]) out.degenerate = true;

  out.labels.reserve(n);
  for (const double v : values) {
    // Exactly-on-boundary values fall in the lower bin, so the label is
    // one past the boundaries strictly below v.
    const auto below = std::lower_bound(out.boundaries.begin(),
                                        out.boundaries.end(), v) -
                       out.boundaries.begin();
    out.labels.push_back(1 + static_cast<int>(below));
  }
  return out;
}

double repetition_sales_correlation(
    const std::vector<EncodedLengthReport>& reports,
    const std::unordered_map<std::string, double>& sales) {
  std::vector<double> x, y;
  x.reserve(reports.size());
  y.reserve(reports.size());
  for (const auto& r : reports) {
    const auto it = sales.find(r.unit_id);
    if (it == sales.end())
      throw DataError("no sales record for unit '" + r.unit_id + "'");
    x.push_back(r.normalized);
    y.push_back(it->second);
  }
  return pearson_correlation(x, y);
}

bool is_standard_preview_duration(double duration_s, double tol_s) {
  return std::abs(duration_s - 30.0) <= tol_s ||
         std::abs(duration_s - 90.0) <= tol_s;
}

}  // namespace excerptlab
