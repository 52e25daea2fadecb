// Unpredictability measures: how hard is the next moment of audio to
// guess from what came before?
//
// Pipeline: 0.02 s frames are reduced to 4 octave-band log energies,
// vector-quantized by a 4-stage residual quantizer (one token stream per
// stage), and scored by per-stream order-n count models with add-alpha
// smoothing.  The score of a clip is its total negative log probability
// in nats ("log-perplexity"); a model trained on nothing scores every
// token at the uniform 1/V, so an N-step clip scores exactly N*ln(V).
// Models persist in the XLAB-ARM v1 binary format.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "excerptlab/audio.hpp"
#include "excerptlab/repetition.hpp"

namespace excerptlab {

inline constexpr int kNumBands = 4;
inline constexpr int kNumStreams = 4;  // residual quantizer stages

using BandVector = std::array<double, kNumBands>;

// One feature vector per non-overlapping frame: log(band energy + 1e-12)
// over the four octave bands with edges {0, fN/8, fN/4, fN/2, fN}, where
// fN is the Nyquist frequency.  A bin exactly on an interior edge
// belongs to the upper band; the Nyquist bin belongs to the top band.
std::vector<BandVector> band_log_energy_features(const AudioClip& clip,
                                                 double hop_s = 0.02);

// Residual vector quantizer: stage s encodes what stages 0..s-1 left
// unexplained.  Each codebook holds vocab_size centroids sorted
// lexicographically so the trained quantizer is canonical.
struct Quantizer {
  int vocab_size{0};
  int sample_rate_hz{0};
  double hop_s{0.02};
  std::array<std::vector<BandVector>, kNumStreams> codebooks;
};

struct QuantizerTrainingOptions {
  int vocab_size{64};
  std::uint64_t seed{7};
  double hop_s{0.02};
  double min_corpus_s{60.0};  // refuse to train on less audio than this
  int max_iterations{50};
  double inertia_tol{1e-6};  // stop when relative inertia change is below
};

// K-means (k-means++ seeding, ties to the lowest index, empty clusters
// repaired from the farthest point) per stage on the stage residuals.
// Deterministic for a fixed corpus and options.
Quantizer train_quantizer(std::span<const AudioClip> corpus,
                          const QuantizerTrainingOptions& opts = {});

// Four parallel token streams of equal length, one per quantizer stage.
struct TokenStreams {
  std::array<std::vector<std::uint16_t>, kNumStreams> streams;
  std::size_t length() const { return streams[0].size(); }
};

TokenStreams tokenize(const Quantizer& quantizer, const AudioClip& clip);

// Count-based order-n sequence model over one token stream per stage.
// Contexts are packed into 64-bit keys, ceil(log2(V)) bits per token,
// which bounds (order + 1) * bits to 64.  A context never seen in
// training, or shorter than `order`, scores uniformly at 1/V.
struct ArModel {
  Quantizer quantizer;
  int order{3};
  double alpha{0.1};
  // (context, token) key -> count, and context key -> total, per stream.
  std::array<std::unordered_map<std::uint64_t, std::uint64_t>, kNumStreams>
      counts;
  std::array<std::unordered_map<std::uint64_t, std::uint64_t>, kNumStreams>
      totals;

  int token_bits() const;  // ceil(log2(vocab_size))
  // P(token | context) for one stream with add-alpha smoothing; uses the
  // last `order` entries of `context`.
  double prob(int stream, std::span<const std::uint16_t> context,
              std::uint16_t token) const;
};

// Accumulates counts from every full-context position of every clip in
// the corpus; an empty corpus is allowed and yields the uniform model.
ArModel train_ar_model(Quantizer quantizer, std::span<const AudioClip> corpus,
                       int order = 3, double alpha = 0.1);

struct PerplexityReport {
  std::string unit_id;
  double log_perplexity{0.0};  // -sum log P, nats
  std::size_t tokens_scored{0};
  double per_token_mean{0.0};  // nats per step
  int decile{0};               // 1..10 once binned, 0 before
};

// Scores every step of the token streams; the per-step probability is
// the mean of the four stream probabilities, and the terms are summed in
// the log domain.
PerplexityReport score_tokens(const ArModel& model, const TokenStreams& tokens,
                              std::string unit_id = "");

// Tokenizes the clip and scores it.
PerplexityReport log_perplexity(const ArModel& model, const AudioClip& clip,
                                std::string unit_id = "");

// Pearson correlation between log-perplexity and duration-normalized
// encoded length, matched by unit id.
double perplexity_repetition_correlation(
    const std::vector<PerplexityReport>& perplexities,
    const std::vector<EncodedLengthReport>& encodings);

// XLAB-ARM v1: magic "XLAB-ARM v1\n", little-endian header (vocab size,
// order, alpha, sample rate, hop), codebooks, then per stream the sparse
// (key, count) pairs in ascending key order.
void save_model(const ArModel& model, const std::string& path);
ArModel load_model(const std::string& path);

}  // namespace excerptlab
