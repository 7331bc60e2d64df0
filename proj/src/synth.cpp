#include "wii/synth.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wii/rng.hpp"

namespace wii {
namespace {

using std::numbers::pi;
using CVec = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>;

// Internal synthesis rate: 11 x 10 MHz. Integer samples per chip for all
// three chip rates in the catalog (11 MHz -> 10, 2 MHz -> 55, 1 MHz -> 110).
constexpr int kDecim = 11;
constexpr double kInternalRateHz = kSampleRateHz * kDecim;

// ---------------------------------------------------------------------------
// Sensing front-end: Kaiser-windowed lowpass, passband to ~5 MHz with the
// transition centered at 5.6 MHz, ~60 dB stopband. Applied polyphase at the
// 128 decimated output points only.

double bessel_i0(double x) {
  const double half = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

constexpr int kFirTaps = 333;
constexpr int kFirHalf = (kFirTaps - 1) / 2;

const std::vector<double>& sensing_fir() {
  static const std::vector<double> taps = [] {
    std::vector<double> h(kFirTaps);
    const double fc = 5.6e6 / kInternalRateHz;  // transition-center cutoff
    const double beta = 5.65326;                // Kaiser beta for ~60 dB
    const double i0b = bessel_i0(beta);
    double sum = 0.0;
    for (int n = 0; n < kFirTaps; ++n) {
      const double m = n - kFirHalf;
      const double sinc = (m == 0.0) ? 2.0 * fc
                                     : std::sin(2.0 * pi * fc * m) / (pi * m);
      const double r = 2.0 * m / (kFirTaps - 1);
      const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
      h[static_cast<std::size_t>(n)] = sinc * w;
      sum += h[static_cast<std::size_t>(n)];
    }
    for (double& t : h) t /= sum;  // unit DC gain
    return h;
  }();
  return taps;
}

// Internal samples required so every tap of every output sample is covered.
constexpr int kInternalLen = 2 * kFirHalf + kDecim * (kSnapshotLen - 1) + 1;

// ---------------------------------------------------------------------------
// Modulators. Each returns >= kInternalLen samples at the internal rate with
// the random symbol-clock offset already consumed, amplitude arbitrary
// (normalization happens after decimation).

// GFSK: NRZ symbols -> Gaussian frequency pulse -> phase accumulation.
// Pulse = rect(T) convolved with a Gaussian, truncated to 4 symbol spans.
CVec modulate_gfsk(const ModulationVariant& v, Rng& rng, int clock_offset) {
  const int sps = static_cast<int>(kInternalRateHz / v.symbol_rate_hz);
  const int span = 4 * sps;
  // sigma of the Gaussian in internal samples, from the BT product.
  const double bw = v.gauss_bt * v.symbol_rate_hz;
  const double sigma = std::sqrt(std::numbers::ln2_v<double>) /
                       (2.0 * pi * bw) * kInternalRateHz;
  std::vector<double> pulse(static_cast<std::size_t>(span));
  double psum = 0.0;
  for (int n = 0; n < span; ++n) {
    const double t = n - span / 2.0;
    const double a = (t + sps / 2.0) / (sigma * std::sqrt(2.0));
    const double b = (t - sps / 2.0) / (sigma * std::sqrt(2.0));
    pulse[static_cast<std::size_t>(n)] = 0.5 * (std::erf(a) - std::erf(b));
    psum += pulse[static_cast<std::size_t>(n)];
  }
  for (double& p : pulse) p /= psum;  // full pulse advances phase by pi*h

  const int warmup = span;
  const int total = warmup + kInternalLen + sps;
  const int n_sym = total / sps + 5;
  std::vector<double> dphi(static_cast<std::size_t>(total), 0.0);
  for (int i = 0; i < n_sym; ++i) {
    const double a = rng.bit() ? 1.0 : -1.0;
    const int base = i * sps;
    for (int n = 0; n < span; ++n) {
      const int idx = base + n;
      if (idx >= total) break;
      dphi[static_cast<std::size_t>(idx)] += a * pulse[static_cast<std::size_t>(n)];
    }
  }
  CVec out(kInternalLen);
  double phase = 0.0;
  const int start = warmup + clock_offset;
  for (int n = 0; n < start; ++n) phase += pi * v.mod_index * dphi[static_cast<std::size_t>(n)];
  for (int n = 0; n < kInternalLen; ++n) {
    phase += pi * v.mod_index * dphi[static_cast<std::size_t>(start + n)];
    out[n] = std::polar(1.0, phase);
  }
  return out;
}

// Rectangular chips at the internal rate from a chip phasor sequence.
CVec chips_to_samples(const std::vector<std::complex<double>>& chips,
                      int sps_chip, int clock_offset) {
  CVec out(kInternalLen);
  for (int n = 0; n < kInternalLen; ++n) {
    const int chip = (n + clock_offset) / sps_chip;
    out[n] = chips[static_cast<std::size_t>(chip)];
  }
  return out;
}

// 802.11 Barker-11 spreading sequence.
constexpr double kBarker[11] = {1, -1, 1, 1, -1, 1, 1, 1, -1, -1, -1};

// DQPSK dibit encoding used by 802.11b (Gray): 00->0, 01->pi/2, 11->pi,
// 10->3pi/2.
double dqpsk_phase(bool d0, bool d1) {
  if (!d0 && !d1) return 0.0;
  if (!d0 && d1) return pi / 2.0;
  if (d0 && d1) return pi;
  return 3.0 * pi / 2.0;
}

// DBPSK / DQPSK with Barker-11 spreading at 11 Mchip/s.
CVec modulate_barker(const ModulationVariant& v, Rng& rng, int clock_offset,
                     bool quadrature) {
  const int sps_chip = static_cast<int>(kInternalRateHz / v.chip_rate_hz);
  const int chips_per_symbol = 11;
  const int n_sym = (kInternalLen + clock_offset) / (sps_chip * chips_per_symbol) + 2;
  std::vector<std::complex<double>> chips;
  chips.reserve(static_cast<std::size_t>(n_sym * chips_per_symbol));
  double phase = 0.0;
  for (int i = 0; i < n_sym; ++i) {
    phase += quadrature ? dqpsk_phase(rng.bit(), rng.bit())
                        : (rng.bit() ? pi : 0.0);
    const std::complex<double> sym = std::polar(1.0, phase);
    for (double b : kBarker) chips.push_back(sym * b);
  }
  return chips_to_samples(chips, sps_chip, clock_offset);
}

// CCK codeword from the four phases.
void cck_codeword(double p1, double p2, double p3, double p4,
                  std::vector<std::complex<double>>& chips) {
  chips.push_back(std::polar(1.0, p1 + p2 + p3 + p4));
  chips.push_back(std::polar(1.0, p1 + p3 + p4));
  chips.push_back(std::polar(1.0, p1 + p2 + p4));
  chips.push_back(-std::polar(1.0, p1 + p4));
  chips.push_back(std::polar(1.0, p1 + p2 + p3));
  chips.push_back(std::polar(1.0, p1 + p3));
  chips.push_back(-std::polar(1.0, p1 + p2));
  chips.push_back(std::polar(1.0, p1));
}

// CCK at 11 Mchip/s, 8 chips per symbol; 4 data bits per symbol at
// 5.5 Mb/s, 8 at 11 Mb/s. phi1 is DQPSK with the even/odd pi rotation.
CVec modulate_cck(const ModulationVariant& v, Rng& rng, int clock_offset,
                  bool full_rate) {
  const int sps_chip = static_cast<int>(kInternalRateHz / v.chip_rate_hz);
  const int n_sym = (kInternalLen + clock_offset) / (sps_chip * 8) + 2;
  std::vector<std::complex<double>> chips;
  chips.reserve(static_cast<std::size_t>(n_sym * 8));
  double phi1 = 0.0;
  for (int i = 0; i < n_sym; ++i) {
    phi1 += dqpsk_phase(rng.bit(), rng.bit());
    if (i % 2 == 1) phi1 += pi;
    double p2, p3, p4;
    if (full_rate) {
      p2 = dqpsk_phase(rng.bit(), rng.bit());
      p3 = dqpsk_phase(rng.bit(), rng.bit());
      p4 = dqpsk_phase(rng.bit(), rng.bit());
    } else {
      p2 = (rng.bit() ? pi : 0.0) + pi / 2.0;
      p3 = 0.0;
      p4 = rng.bit() ? pi : 0.0;
    }
    cck_codeword(phi1, p2, p3, p4, chips);
  }
  return chips_to_samples(chips, sps_chip, clock_offset);
}

// 802.15.4 2.4 GHz chip map: symbol 0 sequence; symbols 1-7 are cyclic
// shifts by 4k chips, symbols 8-15 the same with odd-indexed chips inverted.
constexpr int kZbChips[32] = {1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 1,
                              0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1, 0};

// O-QPSK DSSS: even chips on I, odd chips on Q delayed by one chip period,
// each chip a half-sine spanning two chip periods (MSK-like envelope).
CVec modulate_oqpsk(const ModulationVariant& v, Rng& rng, int clock_offset) {
  const int sps_chip = static_cast<int>(kInternalRateHz / v.chip_rate_hz);
  const int chip_span = 2 * sps_chip;
  const int chips_needed = (kInternalLen + clock_offset) / sps_chip + 4;
  const int n_sym = chips_needed / 32 + 2;

  std::vector<double> chipvals;
  chipvals.reserve(static_cast<std::size_t>(n_sym) * 32);
  for (int i = 0; i < n_sym; ++i) {
    const int sym = static_cast<int>(rng.uniform_int(16));
    const int shift = 4 * (sym % 8);
    const bool conj = sym >= 8;
    for (int c = 0; c < 32; ++c) {
      int bit = kZbChips[(c + shift) % 32];
      if (conj && (c % 2 == 1)) bit ^= 1;
      chipvals.push_back(bit ? 1.0 : -1.0);
    }
  }

  const int total = kInternalLen + clock_offset;
  std::vector<double> re(static_cast<std::size_t>(total), 0.0);
  std::vector<double> im(static_cast<std::size_t>(total), 0.0);
  for (std::size_t k = 0; k < chipvals.size(); ++k) {
    const int base = static_cast<int>(k) * sps_chip;
    if (base >= total) break;
    auto& branch = (k % 2 == 0) ? re : im;
    for (int n = 0; n < chip_span; ++n) {
      const int idx = base + n;
      if (idx >= total) break;
      branch[static_cast<std::size_t>(idx)] +=
          chipvals[k] * std::sin(pi * n / chip_span);
    }
  }
  CVec out(kInternalLen);
  for (int n = 0; n < kInternalLen; ++n)
    out[n] = {re[static_cast<std::size_t>(n + clock_offset)],
              im[static_cast<std::size_t>(n + clock_offset)]};
  return out;
}

CVec modulate(const ModulationVariant& v, Rng& rng, int clock_offset) {
  switch (v.scheme) {
    case Scheme::kGfsk: return modulate_gfsk(v, rng, clock_offset);
    case Scheme::kDbpskBarker: return modulate_barker(v, rng, clock_offset, false);
    case Scheme::kDqpskBarker: return modulate_barker(v, rng, clock_offset, true);
    case Scheme::kCck5_5: return modulate_cck(v, rng, clock_offset, false);
    case Scheme::kCck11: return modulate_cck(v, rng, clock_offset, true);
    case Scheme::kOqpskDsss: return modulate_oqpsk(v, rng, clock_offset);
  }
  throw std::logic_error("unhandled modulation scheme");
}

int samples_per_symbol(const ModulationVariant& v) {
  return static_cast<int>(kInternalRateHz / v.symbol_rate_hz);
}

}  // namespace

Iq128 synthesize_burst(int class_id, const ModulationVariant& variant,
                       std::uint64_t seed) {
  const ClassSpec& spec = class_spec(class_id);

  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(class_id),
                      fnv1a(variant.name)));
  const double phase0 = 2.0 * pi * rng.uniform();
  const int sps_sym = samples_per_symbol(variant);
  const int clock_offset = static_cast<int>(rng.uniform_int(
      static_cast<std::uint64_t>(sps_sym)));

  CVec x = modulate(variant, rng, clock_offset);

  // Shift to the class center at the internal rate, then band-limit and
  // decimate down to the 10 MHz snapshot.
  const std::complex<double> step =
      std::polar(1.0, 2.0 * pi * spec.center_offset_hz / kInternalRateHz);
  std::complex<double> rot = std::polar(1.0, phase0);
  for (int n = 0; n < kInternalLen; ++n) {
    x[n] *= rot;
    rot *= step;
  }

  const std::vector<double>& h = sensing_fir();
  Iq128 out;
  for (int m = 0; m < kSnapshotLen; ++m) {
    std::complex<double> acc(0.0, 0.0);
    const int base = 2 * kFirHalf + kDecim * m;
    for (int t = 0; t < kFirTaps; ++t) acc += h[static_cast<std::size_t>(t)] * x[base - t];
    out[m] = acc;
  }

  const double power = measure_power(out);
  if (power <= 0.0)
    throw std::runtime_error("synthesized burst has zero power");
  out *= 1.0 / std::sqrt(power);
  return out;
}

Iq128 synthesize_burst(int class_id, const std::string& variant_name,
                       std::uint64_t seed) {
  return synthesize_burst(class_id, find_variant(class_id, variant_name), seed);
}

}  // namespace wii
