// Excerpt-to-recording alignment.
//
// Slides the excerpt across the recording and scores each lag with the
// normalized correlation between the excerpt and the recording window
// (both zero-mean, unit-energy), so a clean planted copy scores exactly 1.
// The reported offset is the earliest lag attaining the global maximum,
// with ties resolved within a small relative tolerance.  The numerator
// sweep runs through an FFT, O(N log N) over all lags.
#pragma once

#include <cstddef>

#include "excerptlab/audio.hpp"

namespace excerptlab {

struct AlignmentResult {
  double offset_s{0.0};
  std::size_t offset_samples{0};
  double peak_corr{0.0};
  double runner_up_corr{0.0};  // best correlation at any other lag
};

// Throws DataError when the sample rates differ, the excerpt is longer
// than the recording, or the excerpt has no variation.
AlignmentResult cross_correlate(const AudioClip& excerpt,
                                const AudioClip& recording);

}  // namespace excerptlab
