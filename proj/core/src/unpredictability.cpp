#include "excerptlab/unpredictability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <random>
#include <utility>

#include <unsupported/Eigen/FFT>

#include "excerptlab/csv.hpp"
#include "excerptlab/errors.hpp"
#include "excerptlab/rng.hpp"
#include "excerptlab/stats.hpp"

namespace excerptlab {

namespace {

double sq_dist(const BandVector& a, const BandVector& b) {
  double d = 0.0;
  for (int i = 0; i < kNumBands; ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// Nearest centroid by squared distance, lowest index on ties.
int nearest(const std::vector<BandVector>& centroids, const BandVector& p) {
  int best = 0;
  double best_d = sq_dist(centroids[0], p);
  for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
    const double d = sq_dist(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<BandVector> kmeans(const std::vector<BandVector>& points, int k,
                               std::uint64_t seed, int max_iterations,
                               double inertia_tol) {
  const std::size_t n = points.size();
  auto engine = make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding; with duplicated points all remaining distances
  // can hit zero, in which case we fall back to cycling the data.
  std::vector<BandVector> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centroids.push_back(points[pick(engine)]);
  std::vector<double> d2(n);
  for (std::size_t p = 0; p < n; ++p) d2[p] = sq_dist(points[p], centroids[0]);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (const double d : d2) total += d;
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = centroids.size() % n;
    } else {
      const double u = unit(engine) * total;
      double cum = 0.0;
      chosen = n - 1;
      for (std::size_t p = 0; p < n; ++p) {
        cum += d2[p];
        if (cum > u) {
          chosen = p;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
    for (std::size_t p = 0; p < n; ++p)
      d2[p] = std::min(d2[p], sq_dist(points[p], centroids.back()));
  }

  std::vector<int> assign(n, 0);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  double prev_inertia = -1.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      assign[p] = nearest(centroids, points[p]);
      ++sizes[static_cast<std::size_t>(assign[p])];
    }
    // Repair empty clusters by stealing the point farthest from its
    // centroid, never emptying another cluster in the process.
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] != 0) continue;
      std::size_t worst = n;
      double worst_d = -1.0;
      for (std::size_t p = 0; p < n; ++p) {
        if (sizes[static_cast<std::size_t>(assign[p])] < 2) continue;
        const double d =
            sq_dist(points[p], centroids[static_cast<std::size_t>(assign[p])]);
        if (d > worst_d) {
          worst_d = d;
          worst = p;
        }
      }
      if (worst == n) continue;  // k > n; some clusters must stay empty
      --sizes[static_cast<std::size_t>(assign[worst])];
      assign[worst] = c;
      ++sizes[static_cast<std::size_t>(c)];
      centroids[static_cast<std::size_t>(c)] = points[worst];
    }
    // Means, keeping the previous centroid for clusters left empty.
    std::vector<BandVector> sums(static_cast<std::size_t>(k),
                                 BandVector{0.0, 0.0, 0.0, 0.0});
    for (std::size_t p = 0; p < n; ++p)
      for (int i = 0; i < kNumBands; ++i)
        sums[static_cast<std::size_t>(assign[p])][i] += points[p][i];
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0)
        for (int i = 0; i < kNumBands; ++i)
          centroids[static_cast<std::size_t>(c)][i] =
              sums[static_cast<std::size_t>(c)][i] /
              static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    double inertia = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      inertia +=
          sq_dist(points[p], centroids[static_cast<std::size_t>(assign[p])]);
    if (prev_inertia >= 0.0) {
      if (prev_inertia == 0.0) break;
      if (std::abs(prev_inertia - inertia) / prev_inertia < inertia_tol) break;
    }
    prev_inertia = inertia;
  }
  std::sort(centroids.begin(), centroids.end());
  return centroids;
}

// Little-endian scalar append / bounds-checked read for model files.
template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes)
      : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size())
      throw DataError("model file is truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void expect_magic(const char* magic, std::size_t len) {
    if (pos_ + len > bytes_.size() ||
        std::memcmp(bytes_.data() + pos_, magic, len) != 0)
      throw DataError("not an XLAB-ARM v1 model file");
    pos_ += len;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_{0};
};

constexpr char kModelMagic[] = "XLAB-ARM v1\n";
constexpr std::size_t kModelMagicLen = 12;

int bits_for_vocab(int vocab_size) {
  int bits = 1;
  while ((1 << bits) < vocab_size) ++bits;
  return bits;
}

void validate_model_params(int vocab_size, int order, double alpha) {
  if (vocab_size < 2 || vocab_size > (1 << 16))
    throw ConfigError("vocab size must be in [2, 65536], got " +
                      std::to_string(vocab_size));
  if (order < 1)
    throw ConfigError("model order must be at least 1, got " +
                      std::to_string(order));
  if (!(alpha > 0.0))
    throw ConfigError("smoothing alpha must be positive, got " +
                      std::to_string(alpha));
  const int bits = bits_for_vocab(vocab_size);
  if ((order + 1) * bits > 64)
    throw ConfigError("context of order " + std::to_string(order) + " over " +
                      std::to_string(vocab_size) +
                      " tokens does not fit a 64-bit key (" +
                      std::to_string((order + 1) * bits) + " bits)");
}

}  // namespace

std::vector<BandVector> band_log_energy_features(const AudioClip& clip,
                                                 double hop_s) {
  const FrameSequence frames = frame(clip, hop_s);
  std::vector<BandVector> features;
  features.reserve(frames.count());
  if (frames.count() == 0) return features;

  const double nyquist = clip.sample_rate_hz / 2.0;
  const double edges[5] = {0.0, nyquist / 8.0, nyquist / 4.0, nyquist / 2.0,
                           nyquist};
  const std::size_t len = frames.frame_len;
  const double bin_hz = static_cast<double>(clip.sample_rate_hz) /
                        static_cast<double>(len);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(len), spectrum(len);
  for (std::size_t f = 0; f < frames.count(); ++f) {
    const auto window = frames[f];
    for (std::size_t i = 0; i < len; ++i) in[i] = window[i];
    fft.fwd(spectrum, in);
    BandVector energy{0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k <= len / 2; ++k) {
      const double freq = bin_hz * static_cast<double>(k);
      int band = kNumBands - 1;
      for (int b = 0; b < kNumBands - 1; ++b) {
        if (freq < edges[b + 1]) {
          band = b;
          break;
        }
      }
      energy[band] += std::norm(spectrum[k]);
    }
    BandVector feature;
    for (int b = 0; b < kNumBands; ++b)
      feature[b] = std::log(energy[b] + 1e-12);
    features.push_back(feature);
  }
  return features;
}

Quantizer train_quantizer(std::span<const AudioClip> corpus,
                          const QuantizerTrainingOptions& opts) {
  if (opts.vocab_size < 2 || opts.vocab_size > (1 << 16))
    throw ConfigError("vocab size must be in [2, 65536], got " +
                      std::to_string(opts.vocab_size));
  double total_s = 0.0;
  int rate = 0;
  for (const AudioClip& clip : corpus) {
    if (rate == 0) rate = clip.sample_rate_hz;
    if (clip.sample_rate_hz != rate)
      throw DataError("quantizer corpus mixes sample rates " +
                      std::to_string(rate) + " and " +
                      std::to_string(clip.sample_rate_hz));
    total_s += clip.duration_s();
  }
  if (total_s < opts.min_corpus_s)
    throw DataError("quantizer corpus holds " + std::to_string(total_s) +
                    " s of audio, need at least " +
                    std::to_string(opts.min_corpus_s) + " s");

  std::vector<BandVector> residuals;
  for (const AudioClip& clip : corpus) {
    auto features = band_log_energy_features(clip, opts.hop_s);
    residuals.insert(residuals.end(), features.begin(), features.end());
  }
  if (residuals.size() < static_cast<std::size_t>(opts.vocab_size))
    throw DataError("quantizer corpus yields " +
                    std::to_string(residuals.size()) +
                    " frames, fewer than the " +
                    std::to_string(opts.vocab_size) + " codewords requested");
  const bool all_equal =
      std::all_of(residuals.begin(), residuals.end(),
                  [&](const BandVector& v) { return v == residuals.front(); });
  if (all_equal)
    throw DataError(
        "quantizer corpus has zero feature variance, nothing to quantize");

  Quantizer q;
  q.vocab_size = opts.vocab_size;
  q.sample_rate_hz = rate;
  q.hop_s = opts.hop_s;
  for (int stage = 0; stage < kNumStreams; ++stage) {
    q.codebooks[static_cast<std::size_t>(stage)] =
        kmeans(residuals, opts.vocab_size,
               derive_seed(opts.seed, static_cast<std::uint64_t>(stage)),
               opts.max_iterations, opts.inertia_tol);
    const auto& book = q.codebooks[static_cast<std::size_t>(stage)];
    for (BandVector& r : residuals) {
      const int c = nearest(book, r);
      for (int i = 0; i < kNumBands; ++i)
        r[i] -= book[static_cast<std::size_t>(c)][i];
    }
  }
  return q;
}

TokenStreams tokenize(const Quantizer& quantizer, const AudioClip& clip) {
  if (quantizer.vocab_size < 2)
    throw ConfigError("quantizer is untrained (vocab size " +
                      std::to_string(quantizer.vocab_size) + ")");
  if (clip.sample_rate_hz != quantizer.sample_rate_hz)
    throw DataError("clip sample rate " + std::to_string(clip.sample_rate_hz) +
                    " does not match the quantizer's " +
                    std::to_string(quantizer.sample_rate_hz));
  const auto features = band_log_energy_features(clip, quantizer.hop_s);
  TokenStreams tokens;
  for (auto& s : tokens.streams) s.reserve(features.size());
  for (BandVector residual : features) {
    for (int stage = 0; stage < kNumStreams; ++stage) {
      const auto& book = quantizer.codebooks[static_cast<std::size_t>(stage)];
      const int c = nearest(book, residual);
      tokens.streams[static_cast<std::size_t>(stage)].push_back(
          static_cast<std::uint16_t>(c));
      for (int i = 0; i < kNumBands; ++i)
        residual[i] -= book[static_cast<std::size_t>(c)][i];
    }
  }
  return tokens;
}

int ArModel::token_bits() const { return bits_for_vocab(quantizer.vocab_size); }

double ArModel::prob(int stream, std::span<const std::uint16_t> context,
                     std::uint16_t token) const {
  const int v = quantizer.vocab_size;
  const double uniform = 1.0 / static_cast<double>(v);
  if (context.size() < static_cast<std::size_t>(order)) return uniform;
  const int bits = token_bits();
  std::uint64_t ctx_key = 0;
  for (std::size_t i = context.size() - static_cast<std::size_t>(order);
       i < context.size(); ++i)
    ctx_key = (ctx_key << bits) | context[i];
  const auto& total_map = totals[static_cast<std::size_t>(stream)];
  const auto total_it = total_map.find(ctx_key);
  if (total_it == total_map.end()) return uniform;
  const auto& count_map = counts[static_cast<std::size_t>(stream)];
  const std::uint64_t full_key = (ctx_key << bits) | token;
  const auto count_it = count_map.find(full_key);
  const double c =
      count_it == count_map.end() ? 0.0
                                  : static_cast<double>(count_it->second);
  return (c + alpha) /
         (static_cast<double>(total_it->second) + alpha * static_cast<double>(v));
}

ArModel train_ar_model(Quantizer quantizer, std::span<const AudioClip> corpus,
                       int order, double alpha) {
  validate_model_params(quantizer.vocab_size, order, alpha);
  ArModel model;
  model.quantizer = std::move(quantizer);
  model.order = order;
  model.alpha = alpha;
  const int bits = model.token_bits();
  const std::uint64_t ctx_mask =
      (order * bits == 64) ? ~0ull : ((1ull << (order * bits)) - 1);
  for (const AudioClip& clip : corpus) {
    const TokenStreams tokens = tokenize(model.quantizer, clip);
    const std::size_t len = tokens.length();
    for (int s = 0; s < kNumStreams; ++s) {
      const auto& stream = tokens.streams[static_cast<std::size_t>(s)];
      if (len <= static_cast<std::size_t>(order)) continue;
      std::uint64_t ctx_key = 0;
      for (int i = 0; i < order; ++i)
        ctx_key = (ctx_key << bits) | stream[static_cast<std::size_t>(i)];
      for (std::size_t t = static_cast<std::size_t>(order); t < len; ++t) {
        const std::uint64_t full_key =
            (ctx_key << bits) | stream[t];
        ++model.counts[static_cast<std::size_t>(s)][full_key];
        ++model.totals[static_cast<std::size_t>(s)][ctx_key];
        ctx_key = ((ctx_key << bits) | stream[t]) & ctx_mask;
      }
    }
  }
  return model;
}

PerplexityReport score_tokens(const ArModel& model, const TokenStreams& tokens,
                              std::string unit_id) {
  const std::size_t len = tokens.length();
  if (len == 0)
    throw DataError("clip is shorter than one frame, nothing to score" +
                    (unit_id.empty() ? "" : " (unit " + unit_id + ")"));
  double total = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    double p = 0.0;
    for (int s = 0; s < kNumStreams; ++s) {
      const auto& stream = tokens.streams[static_cast<std::size_t>(s)];
      const std::span<const std::uint16_t> context(stream.data(), t);
      p += model.prob(s, context, stream[t]);
    }
    p /= static_cast<double>(kNumStreams);
    total -= std::log(p);
  }
  PerplexityReport report;
  report.unit_id = std::move(unit_id);
  report.log_perplexity = total;
  report.tokens_scored = len;
  report.per_token_mean = total / static_cast<double>(len);
  return report;
}

PerplexityReport log_perplexity(const ArModel& model, const AudioClip& clip,
                                std::string unit_id) {
  return score_tokens(model, tokenize(model.quantizer, clip),
                      std::move(unit_id));
}

double perplexity_repetition_correlation(
    const std::vector<PerplexityReport>& perplexities,
    const std::vector<EncodedLengthReport>& encodings) {
  std::unordered_map<std::string, double> normalized;
  normalized.reserve(encodings.size());
  for (const auto& e : encodings) normalized.emplace(e.unit_id, e.normalized);
  std::vector<double> x, y;
  x.reserve(perplexities.size());
  y.reserve(perplexities.size());
  for (const auto& p : perplexities) {
    const auto it = normalized.find(p.unit_id);
    if (it == normalized.end())
      throw DataError("no encoded-length record for unit '" + p.unit_id + "'");
    x.push_back(p.log_perplexity);
    y.push_back(it->second);
  }
  return pearson_correlation(x, y);
}

void save_model(const ArModel& model, const std::string& path) {
  validate_model_params(model.quantizer.vocab_size, model.order, model.alpha);
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kModelMagic, kModelMagic + kModelMagicLen);
  put_le(out, static_cast<std::uint32_t>(model.quantizer.vocab_size));
  put_le(out, static_cast<std::uint32_t>(model.order));
  put_le(out, model.alpha);
  put_le(out, static_cast<std::uint32_t>(model.quantizer.sample_rate_hz));
  put_le(out, model.quantizer.hop_s);
  for (const auto& book : model.quantizer.codebooks) {
    if (book.size() != static_cast<std::size_t>(model.quantizer.vocab_size))
      throw DataError("quantizer codebook holds " +
                      std::to_string(book.size()) + " centroids, expected " +
                      std::to_string(model.quantizer.vocab_size));
    for (const BandVector& centroid : book)
      for (const double v : centroid) put_le(out, v);
  }
  for (int s = 0; s < kNumStreams; ++s) {
    const auto& count_map = model.counts[static_cast<std::size_t>(s)];
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(
        count_map.begin(), count_map.end());
    std::sort(pairs.begin(), pairs.end());
    put_le(out, static_cast<std::uint64_t>(pairs.size()));
    for (const auto& [key, count] : pairs) {
      put_le(out, key);
      put_le(out, count);
    }
  }
  write_file_bytes_atomic(path, out);
}

ArModel load_model(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  ByteReader in(bytes);
  in.expect_magic(kModelMagic, kModelMagicLen);
  ArModel model;
  const auto vocab = in.get<std::uint32_t>();
  const auto order = in.get<std::uint32_t>();
  model.alpha = in.get<double>();
  const auto rate = in.get<std::uint32_t>();
  model.quantizer.hop_s = in.get<double>();
  if (vocab < 2 || vocab > (1u << 16) || order < 1 || order > 64 ||
      !(model.alpha > 0.0) || rate == 0 ||
      !(model.quantizer.hop_s > 0.0))
    throw DataError("model file header is corrupt");
  model.quantizer.vocab_size = static_cast<int>(vocab);
  model.order = static_cast<int>(order);
  model.quantizer.sample_rate_hz = static_cast<int>(rate);
  const int bits = bits_for_vocab(static_cast<int>(vocab));
  if ((model.order + 1) * bits > 64)
    throw DataError("model file header is corrupt: order " +
                    std::to_string(model.order) + " over " +
                    std::to_string(vocab) + " tokens cannot be keyed");
  for (auto& book : model.quantizer.codebooks) {
    book.resize(vocab);
    for (BandVector& centroid : book)
      for (double& v : centroid) v = in.get<double>();
  }
  const std::uint64_t key_limit =
      ((model.order + 1) * bits == 64)
          ? ~0ull
          : ((1ull << ((model.order + 1) * bits)) - 1);
  for (int s = 0; s < kNumStreams; ++s) {
    const auto n_pairs = in.get<std::uint64_t>();
    std::uint64_t prev_key = 0;
    bool first = true;
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
      const auto key = in.get<std::uint64_t>();
      const auto count = in.get<std::uint64_t>();
      if (!first && key <= prev_key)
        throw DataError("model file count keys are not strictly increasing");
      if (key > key_limit)
        throw DataError("model file count key out of range");
      if (count == 0)
        throw DataError("model file stores a zero count");
      model.counts[static_cast<std::size_t>(s)].emplace(key, count);
      model.totals[static_cast<std::size_t>(s)][key >> bits] += count;
      prev_key = key;
      first = false;
    }
  }
  if (!in.exhausted())
    throw DataError("model file has trailing bytes after the count tables");
  return model;
}

}  // namespace excerptlab
