#include "excerptlab/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "excerptlab/csv.hpp"
#include "excerptlab/errors.hpp"

namespace excerptlab {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    static_cast<std::uint16_t>(p[1]) << 8);
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  const std::vector<unsigned char> bytes = read_file_bytes(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavParseError(WavErrorKind::BadHeader,
                        "'" + path + "' is not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  bool have_data = false;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + off);
    const std::uint32_t len = read_u32(bytes.data() + off + 4);
    const std::size_t body = off + 8;
    if (body + len > bytes.size())
      throw WavParseError(WavErrorKind::TruncatedData,
                          "'" + path + "' chunk '" + std::string(id, 4) +
                              "' runs past the end of the file");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16)
        throw WavParseError(WavErrorKind::BadHeader,
                            "'" + path + "' fmt chunk too short");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && len >= 40)
        format = read_u16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
      have_data = true;
    }
    off = body + len + (len & 1);  // chunks are word aligned
  }
  if (!have_fmt)
    throw WavParseError(WavErrorKind::BadHeader,
                        "'" + path + "' has no fmt chunk");
  if (!have_data)
    throw WavParseError(WavErrorKind::BadHeader,
                        "'" + path + "' has no data chunk");
  if (rate == 0)
    throw WavParseError(WavErrorKind::BadHeader,
                        "'" + path + "' declares a zero sample rate");
  if (channels < 1 || channels > 2)
    throw WavParseError(WavErrorKind::UnsupportedFormat,
                        "'" + path + "' has " + std::to_string(channels) +
                            " channels, only mono and stereo are supported");
  const bool is_float = format == kFormatFloat;
  if (format != kFormatPcm && !is_float)
    throw WavParseError(WavErrorKind::UnsupportedFormat,
                        "'" + path + "' uses codec tag " +
                            std::to_string(format) +
                            ", only PCM and IEEE float are supported");
  if ((is_float && bits != 32) ||
      (!is_float && bits != 8 && bits != 16 && bits != 24))
    throw WavParseError(WavErrorKind::UnsupportedFormat,
                        "'" + path + "' has unsupported bit depth " +
                            std::to_string(bits));

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t block = bytes_per_sample * channels;
  if (data_len % block != 0)
    throw WavParseError(WavErrorKind::TruncatedData,
                        "'" + path + "' data chunk is not a whole number of "
                            "sample frames");
  const std::size_t n_frames = data_len / block;

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.samples.resize(n_frames);
  const unsigned char* p = bytes.data() + data_off;
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* s = p + i * block + c * bytes_per_sample;
      double v;
      switch (bits) {
        case 8:
          v = (static_cast<int>(s[0]) - 128) / 128.0;
          break;
        case 16: {
          const std::int16_t raw =
              static_cast<std::int16_t>(read_u16(s));
          v = raw / 32768.0;
          break;
        }
        case 24: {
          std::int32_t raw = s[0] | s[1] << 8 | s[2] << 16;
          if (raw & 0x800000) raw -= 0x1000000;
          v = raw / 8388608.0;
          break;
        }
        default: {  // 32-bit float
          float f;
          std::uint32_t u = read_u32(s);
          std::memcpy(&f, &u, 4);
          v = std::clamp(static_cast<double>(f), -1.0, 1.0);
          break;
        }
      }
      acc += v;
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

namespace {

std::int16_t quantize16(double x) {
  const double scaled = std::lround(std::clamp(x, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(
      std::clamp(scaled, -32768.0, 32767.0));
}

void push_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void push_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 24));
}

}  // namespace

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.sample_rate_hz <= 0)
    throw DataError("write_wav: clip has no sample rate");
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  push_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  push_u32(out, 16);
  push_u16(out, kFormatPcm);
  push_u16(out, 1);  // mono
  push_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  push_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  push_u16(out, 2);   // block align
  push_u16(out, 16);  // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  push_u32(out, data_len);
  for (double x : clip.samples)
    push_u16(out, static_cast<std::uint16_t>(quantize16(x)));
  write_file_bytes_atomic(path, out);
}

std::vector<std::uint8_t> pcm16_bytes(const AudioClip& clip) {
  std::vector<std::uint8_t> out;
  out.reserve(clip.samples.size() * 2);
  for (double x : clip.samples) {
    const std::uint16_t v = static_cast<std::uint16_t>(quantize16(x));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  return out;
}

FrameSequence frame(const AudioClip& clip, double hop_s) {
  if (clip.sample_rate_hz <= 0)
    throw DataError("frame: clip has no sample rate");
  if (!(hop_s > 0.0)) throw ConfigError("frame: hop must be positive");
  const double exact = hop_s * clip.sample_rate_hz;
  const double rounded = std::round(exact);
  if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact))
    throw ConfigError("frame: hop of " + std::to_string(hop_s) +
                      " s is not a whole number of samples at " +
                      std::to_string(clip.sample_rate_hz) + " Hz");
  FrameSequence fs;
  fs.sample_rate_hz = clip.sample_rate_hz;
  fs.frame_len = static_cast<std::size_t>(rounded);
  fs.hop_s = hop_s;
  const std::size_t n_frames = clip.samples.size() / fs.frame_len;
  fs.samples.assign(clip.samples.begin(),
                    clip.samples.begin() +
                        static_cast<std::ptrdiff_t>(n_frames * fs.frame_len));
  return fs;
}

}  // namespace excerptlab
