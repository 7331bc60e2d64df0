#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "wii/snapshot.hpp"

namespace wii {

// 128 x 2 network input: column 0 holds the real parts of the frequency
// bins, column 1 the imaginary parts.
template <class S>
using FeatureMatrix = Eigen::Matrix<S, kSnapshotLen, 2>;

namespace detail {

// Twiddle tables are computed once in double and cast per instantiation.
template <class S>
const std::array<std::complex<S>, kSnapshotLen / 2>& fft_twiddles() {
  static const auto table = [] {
    std::array<std::complex<S>, kSnapshotLen / 2> t;
    for (int k = 0; k < kSnapshotLen / 2; ++k) {
      const double ang = -2.0 * std::numbers::pi * k / kSnapshotLen;
      t[static_cast<std::size_t>(k)] =
          std::complex<S>(static_cast<S>(std::cos(ang)), static_cast<S>(std::sin(ang)));
    }
    return t;
  }();
  return table;
}

inline int bit_reverse7(int x) {
  int r = 0;
  for (int b = 0; b < 7; ++b) r |= ((x >> b) & 1) << (6 - b);
  return r;
}

}  // namespace detail

// Radix-2 decimation-in-time transform of the 128-sample snapshot:
//   X[m] = sum_k s[k] * exp(-i*2*pi*k*m/128)
// With centered = true (the default) the bins are reordered so that DC sits
// at row 64 and row index maps linearly to frequency.
template <class S>
IqVec<S> dft_128(const IqVec<S>& snapshot, bool centered = true) {
  constexpr int n = kSnapshotLen;
  IqVec<S> x;
  for (int k = 0; k < n; ++k) x[detail::bit_reverse7(k)] = snapshot[k];

  const auto& tw = detail::fft_twiddles<S>();
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int stride = n / len;
    for (int start = 0; start < n; start += len) {
      for (int k = 0; k < half; ++k) {
        const std::complex<S> w = tw[static_cast<std::size_t>(k * stride)];
        const std::complex<S> a = x[start + k];
        const std::complex<S> b = x[start + k + half] * w;
        x[start + k] = a + b;
        x[start + k + half] = a - b;
      }
    }
  }

  if (!centered) return x;
  IqVec<S> shifted;
  for (int m = 0; m < n; ++m) shifted[m] = x[(m + n / 2) % n];
  return shifted;
}

// Frequency in Hz of centered bin row m (row 64 = DC).
inline double bin_frequency_hz(int row) {
  return (row - kSnapshotLen / 2) * kSampleRateHz / kSnapshotLen;
}

// DFT, then real parts into column 0 and imaginary parts into column 1.
// With normalize set the matrix is scaled to unit root-mean-square
// (all-zero input stays all-zero).
template <class S>
FeatureMatrix<S> to_feature_matrix(const IqVec<S>& snapshot,
                                   bool normalize = true,
                                   bool centered = true) {
  const IqVec<S> spectrum = dft_128<S>(snapshot, centered);
  FeatureMatrix<S> f;
  for (int m = 0; m < kSnapshotLen; ++m) {
    f(m, 0) = spectrum[m].real();
    f(m, 1) = spectrum[m].imag();
  }
  if (normalize) {
    const S rms = std::sqrt(f.squaredNorm() / static_cast<S>(2 * kSnapshotLen));
    if (rms > S(0)) f /= rms;
  }
  return f;
}

}  // namespace wii
