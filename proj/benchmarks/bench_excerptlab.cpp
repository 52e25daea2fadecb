// Microbenchmarks for the hot paths: fixed-effect regression, the LZW
// codec, FFT alignment, and perplexity scoring.
#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "excerptlab/align.hpp"
#include "excerptlab/audio.hpp"
#include "excerptlab/estimators.hpp"
#include "excerptlab/repetition.hpp"
#include "excerptlab/rng.hpp"
#include "excerptlab/theory.hpp"
#include "excerptlab/unpredictability.hpp"

namespace {

using excerptlab::AudioClip;

excerptlab::PanelDataset make_panel(int units_per_arm) {
  excerptlab::SimPanelSpec spec;
  spec.n_treated = units_per_arm;
  spec.n_control = units_per_arm;
  spec.periods = 18;
  spec.policy_period = 9;
  spec.seed = 42;
  return excerptlab::simulate_panel(spec).panel;
}

void bm_twfe_did(benchmark::State& state) {
  const auto panel = make_panel(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::twfe_did(panel));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(panel.observations.size()));
}

void bm_event_study(benchmark::State& state) {
  const auto panel = make_panel(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::event_study(panel));
  }
}

std::vector<std::uint8_t> noise_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng = excerptlab::make_engine(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> out(n);
  for (auto& v : out) v = static_cast<std::uint8_t>(byte(rng));
  return out;
}

void bm_lzw_encode_noise(benchmark::State& state) {
  const auto payload = noise_bytes(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::lzw_encode(payload));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(payload.size()));
}

void bm_lzw_encode_tiled(benchmark::State& state) {
  const auto block = noise_bytes(1024, 7);
  std::vector<std::uint8_t> payload(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < payload.size(); ++i)
    payload[i] = block[i % block.size()];
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::lzw_encode(payload));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(payload.size()));
}

void bm_cross_correlate(benchmark::State& state) {
  std::mt19937_64 rng = excerptlab::make_engine(11);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  AudioClip recording;
  recording.sample_rate_hz = 44100;
  recording.samples.resize(static_cast<std::size_t>(state.range(0)));
  for (auto& s : recording.samples) s = amp(rng);
  AudioClip excerpt;
  excerpt.sample_rate_hz = 44100;
  excerpt.samples.assign(recording.samples.begin() + 1000,
                         recording.samples.begin() + 1000 + 44100 / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::cross_correlate(excerpt, recording));
  }
}

const excerptlab::ArModel& scoring_model() {
  static const excerptlab::ArModel model = [] {
    std::vector<AudioClip> corpus;
    std::mt19937_64 rng = excerptlab::make_engine(3);
    std::uniform_real_distribution<double> amp(-0.5, 0.5);
    for (int i = 0; i < 4; ++i) {
      AudioClip clip;
      clip.sample_rate_hz = 8000;
      clip.samples.resize(8000 * 5);
      for (auto& s : clip.samples) s = amp(rng);
      corpus.push_back(std::move(clip));
    }
    excerptlab::QuantizerTrainingOptions opts;
    opts.vocab_size = 32;
    opts.min_corpus_s = 10.0;
    return excerptlab::train_ar_model(
        excerptlab::train_quantizer(corpus, opts), corpus, 3, 0.1);
  }();
  return model;
}

void bm_log_perplexity(benchmark::State& state) {
  const auto& model = scoring_model();
  std::mt19937_64 rng = excerptlab::make_engine(5);
  std::uniform_real_distribution<double> amp(-0.5, 0.5);
  AudioClip clip;
  clip.sample_rate_hz = 8000;
  clip.samples.resize(static_cast<std::size_t>(state.range(0)));
  for (auto& s : clip.samples) s = amp(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(excerptlab::log_perplexity(model, clip));
  }
}

}  // namespace

BENCHMARK(bm_twfe_did)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_event_study)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_lzw_encode_noise)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_lzw_encode_tiled)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(bm_cross_correlate)->Arg(44100)->Arg(44100 * 4);
BENCHMARK(bm_log_perplexity)->Arg(8000 * 5)->Arg(8000 * 30);

BENCHMARK_MAIN();
