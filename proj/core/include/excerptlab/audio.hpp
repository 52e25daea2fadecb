// Audio clip loading and framing.
//
// Clips are mono double-precision sample buffers in [-1, 1].  The WAV
// reader accepts 8/16/24-bit integer and 32-bit float RIFF files with one
// or two channels, downmixing stereo by the channel mean; unknown chunks
// are skipped.  The writer emits 16-bit PCM mono, and a 16-bit round trip
// through write and load is bit exact.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace excerptlab {

struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz{0};
  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

// Throws WavParseError with a machine-checkable kind on malformed input.
AudioClip load_wav(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip);

// The clip's samples as little-endian 16-bit PCM, the byte stream the
// compression measures run on.  Quantization matches write_wav.
std::vector<std::uint8_t> pcm16_bytes(const AudioClip& clip);

// Non-overlapping fixed-size windows; a trailing partial window is
// dropped.  hop_s must convert to a whole number of samples.
struct FrameSequence {
  std::vector<double> samples;
  int sample_rate_hz{0};
  std::size_t frame_len{0};
  double hop_s{0.0};

  std::size_t count() const {
    return frame_len == 0 ? 0 : samples.size() / frame_len;
  }
  std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>(samples).subspan(i * frame_len, frame_len);
  }
};

FrameSequence frame(const AudioClip& clip, double hop_s = 0.02);

}  // namespace excerptlab
