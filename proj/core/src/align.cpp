#include "excerptlab/align.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "excerptlab/errors.hpp"

namespace excerptlab {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

AlignmentResult cross_correlate(const AudioClip& excerpt,
                                const AudioClip& recording) {
  if (excerpt.sample_rate_hz != recording.sample_rate_hz)
    throw DataError("cross_correlate: sample rates differ (" +
                    std::to_string(excerpt.sample_rate_hz) + " vs " +
                    std::to_string(recording.sample_rate_hz) + ")");
  const std::size_t n = excerpt.samples.size();
  const std::size_t big = recording.samples.size();
  if (n == 0) throw DataError("cross_correlate: empty excerpt");
  if (n > big)
    throw DataError("cross_correlate: excerpt (" + std::to_string(n) +
                    " samples) is longer than the recording (" +
                    std::to_string(big) + ")");

  // Zero-mean excerpt; with it, subtracting window means from the
  // numerator is unnecessary because the excerpt sums to zero.
  double e_mean = 0.0;
  for (double v : excerpt.samples) e_mean += v;
  e_mean /= static_cast<double>(n);
  std::vector<double> e(n);
  double e_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = excerpt.samples[i] - e_mean;
    e_energy += e[i] * e[i];
  }
  if (!(e_energy > 0.0))
    throw DataError("cross_correlate: excerpt has no variation");
  const double e_norm = std::sqrt(e_energy);

  // Correlation numerators for every lag via one FFT product.
  const std::size_t m = next_pow2(big + n);
  std::vector<double> ra(m, 0.0), eb(m, 0.0);
  std::copy(recording.samples.begin(), recording.samples.end(), ra.begin());
  // Time-reversed excerpt turns convolution into correlation.
  for (std::size_t i = 0; i < n; ++i) eb[i] = e[n - 1 - i];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, ra);
  fft.fwd(fb, eb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> conv;
  fft.inv(conv, fa);
  // conv[l + n - 1] = sum_i e[i] * recording[l + i]

  // Window mean and energy from prefix sums; extended precision keeps the
  // differences accurate for long quiet stretches.
  std::vector<long double> s1(big + 1, 0.0L), s2(big + 1, 0.0L);
  for (std::size_t i = 0; i < big; ++i) {
    s1[i + 1] = s1[i] + recording.samples[i];
    s2[i + 1] = s2[i] + static_cast<long double>(recording.samples[i]) *
                            recording.samples[i];
  }

  const std::size_t n_lags = big - n + 1;
  std::vector<double> corr(n_lags);
  for (std::size_t l = 0; l < n_lags; ++l) {
    const long double sum = s1[l + n] - s1[l];
    const long double sumsq = s2[l + n] - s2[l];
    const long double wvar = sumsq - sum * sum / static_cast<long double>(n);
    if (wvar <= 0.0L) {
      corr[l] = 0.0;  // constant window carries no signal
      continue;
    }
    corr[l] = conv[l + n - 1] /
              (e_norm * std::sqrt(static_cast<double>(wvar)));
  }

  double peak = corr[0];
  for (double v : corr) peak = std::max(peak, v);
  // Earliest lag within a whisker of the global maximum wins.
  const double tie_tol = 1e-9 * std::max(1.0, std::abs(peak));
  std::size_t best = 0;
  for (std::size_t l = 0; l < n_lags; ++l) {
    if (corr[l] >= peak - tie_tol) {
      best = l;
      break;
    }
  }
  double runner_up = -2.0;
  for (std::size_t l = 0; l < n_lags; ++l)
    if (l != best) runner_up = std::max(runner_up, corr[l]);

  AlignmentResult res;
  res.offset_samples = best;
  res.offset_s = static_cast<double>(best) / excerpt.sample_rate_hz;
  res.peak_corr = peak;
  res.runner_up_corr = n_lags > 1 ? runner_up : peak;
  return res;
}

}  // namespace excerptlab
