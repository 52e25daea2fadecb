// Repetition measures: how small does an excerpt compress?
//
// The working measure is the encoded length of the excerpt's 16-bit PCM
// bytes under a lossless dictionary codec (LZW by default); more
// repetitive audio yields shorter codes.  A pedagogical text RLE
// illustrates the idea on strings, a binary RLE serves as an alternative
// codec, and encoded lengths are duration-normalized and binned into
// deciles for the dose-response analysis.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "excerptlab/audio.hpp"

namespace excerptlab {

// Stateless value type: a named pair of inverse byte transforms.
struct Codec {
  std::string name;
  std::function<std::vector<std::uint8_t>(std::span<const std::uint8_t>)>
      encode;
  std::function<std::vector<std::uint8_t>(std::span<const std::uint8_t>)>
      decode;
};

Codec lzw_codec();
Codec rle_binary_codec();

// Text run-length code over non-digit characters: runs of length 2..9
// become a count digit plus the character, single characters pass
// through, longer runs are chunked ("aaaaabbbbb" -> "5a5b").  Digits in
// the input would be ambiguous and raise DataError.
std::string rle_encode_pedagogical(std::string_view text);
std::string rle_decode_pedagogical(std::string_view code);

// Byte run-length code as (count 1..255, value) pairs; lossless for any
// input.
std::vector<std::uint8_t> rle_encode_binary(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> rle_decode_binary(std::span<const std::uint8_t> data);

// Byte-oriented LZW with a 256-entry initial dictionary, code widths
// growing 9 to 16 bits, and the dictionary frozen at 65536 entries.
// Output length in bytes is ceil(total code bits / 8).
std::vector<std::uint8_t> lzw_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> data);

struct EncodedLengthReport {
  std::string unit_id;
  std::string codec;
  std::size_t payload_bytes{0};
  double duration_s{0.0};
  double normalized{0.0};  // bytes per second of audio
  int decile{0};           // 1..10 once binned, 0 before
};

// Encodes the clip's PCM bytes, verifies the codec round-trips on this
// input, and reports raw and duration-normalized lengths.
EncodedLengthReport encoded_length(const AudioClip& clip, const Codec& codec,
                                   std::string unit_id = "");

struct DecileBinning {
  std::vector<double> boundaries;  // n_bins - 1 upper edges, ascending
  std::vector<int> labels;         // 1..n_bins per input value
  bool degenerate{false};          // collapsed boundaries, e.g. constant input
};

// Empirical quantile bins; a value exactly on a boundary goes to the
// lower bin.  Labels are invariant to strictly increasing transforms of
// the values.  Requires at least n_bins values.
DecileBinning decile_bin(std::span<const double> values, int n_bins = 10);

// Pearson correlation between duration-normalized encoded length and a
// per-unit sales measure; every report's unit must appear in `sales`.
double repetition_sales_correlation(
    const std::vector<EncodedLengthReport>& reports,
    const std::unordered_map<std::string, double>& sales);

// Excerpts are sold at two standard lengths; anything else (teasers,
// truncated uploads) is excluded from dose construction.
bool is_standard_preview_duration(double duration_s, double tol_s = 0.5);

}  // namespace excerptlab
