#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace wii {

inline constexpr int kSnapshotLen = 128;
inline constexpr double kSampleRateHz = 10e6;  // 10 MHz sensing sub-band
inline constexpr double kSnapshotDurationS = kSnapshotLen / kSampleRateHz;  // 12.8 us

template <class S>
using IqVec = Eigen::Matrix<std::complex<S>, kSnapshotLen, 1>;

// Synthesis and analysis run in double; dataset records store float32,
// matching the on-disk sample format bit for bit.
using Iq128 = IqVec<double>;
using Iq128f = IqVec<float>;

// Mean of |s[k]|^2 over the 128 samples.
template <class S>
double measure_power(const IqVec<S>& snapshot) {
  double acc = 0.0;
  for (int k = 0; k < kSnapshotLen; ++k) acc += std::norm(std::complex<double>(snapshot[k]));
  return acc / kSnapshotLen;
}

// Multiplies sample k by exp(i*2*pi*offset*k/fs). Unit-modulus, so power is
// preserved exactly.
inline Iq128 frequency_shift(const Iq128& snapshot, double offset_hz) {
  Iq128 out;
  const double step = 2.0 * std::numbers::pi * offset_hz / kSampleRateHz;
  for (int k = 0; k < kSnapshotLen; ++k)
    out[k] = snapshot[k] * std::polar(1.0, step * k);
  return out;
}

}  // namespace wii
