// Spectral estimation: one-sided FFT magnitude spectra and Welch power
// spectral density.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <string>
#include <vector>

#include "whfemd/errors.hpp"
#include "whfemd/fwht.hpp"  // next_pow2 / is_pow2
#include "whfemd/signal_io.hpp"

namespace whfemd {

/// Sentinel: choose n_fft as the next power of two >= the signal length.
inline constexpr Eigen::Index kAutoNfft = 0;

struct MagnitudeSpectrum {
  Eigen::VectorXd magnitudes;  // length n_fft/2 + 1, one-sided
  double bin_hz = 0.0;
  Eigen::Index n_fft = 0;
};

struct PsdEstimate {
  Eigen::VectorXd power;  // amplitude^2 / Hz, one-sided
  Eigen::VectorXd freqs;  // Hz, strictly increasing from 0
  Eigen::Index segment_len = 0;
  double overlap = 0.0;
  std::string window = "hann";
  Eigen::Index n_segments = 0;
  bool fallback = false;  // input was shorter than the requested segment
};

namespace detail {

inline Eigen::VectorXcd fft_complex(const Eigen::VectorXd& padded) {
  std::vector<double> time(padded.data(), padded.data() + padded.size());
  std::vector<std::complex<double>> freq;
  Eigen::FFT<double> fft;
  fft.fwd(freq, time);
  return Eigen::Map<Eigen::VectorXcd>(freq.data(), static_cast<Eigen::Index>(freq.size()));
}

/// Periodic Hann window (matches 50%-overlap COLA behavior).
inline Eigen::VectorXd hann_periodic(Eigen::Index n) {
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

}  // namespace detail

/// One-sided FFT magnitude spectrum of a zero-padded signal.
inline MagnitudeSpectrum fft_magnitude(const Eigen::VectorXd& values, double sample_rate,
                                       Eigen::Index n_fft = kAutoNfft) {
  if (values.size() == 0) throw EmptySignal("fft_magnitude: empty input");
  if (n_fft == kAutoNfft) n_fft = next_pow2(values.size());
  if (n_fft < 2 || !is_pow2(n_fft))
    throw ArgumentError("fft_magnitude: n_fft must be a power of two >= 2");
  if (n_fft < values.size())
    throw LengthError("fft_magnitude: n_fft shorter than the signal");

  Eigen::VectorXd padded = Eigen::VectorXd::Zero(n_fft);
  padded.head(values.size()) = values;
  const Eigen::VectorXcd spectrum = detail::fft_complex(padded);

  MagnitudeSpectrum out;
  out.n_fft = n_fft;
  out.bin_hz = sample_rate / static_cast<double>(n_fft);
  out.magnitudes = spectrum.head(n_fft / 2 + 1).cwiseAbs();
  return out;
}

inline MagnitudeSpectrum fft_magnitude(const Signal& sig, Eigen::Index n_fft = kAutoNfft) {
  return fft_magnitude(sig.samples, static_cast<double>(sig.sample_rate), n_fft);
}

enum class WelchShortInput {
  error,   // throw InsufficientData (the default contract)
  shrink,  // single segment of the input length rounded down to a power of two
};

/// Welch PSD: averaged modified periodograms over overlapping Hann-windowed
/// segments, density-scaled so a unit-variance white input integrates to ~1.
inline PsdEstimate welch_psd(const Eigen::VectorXd& values, double sample_rate,
                             Eigen::Index segment_len = 256, double overlap = 0.5,
                             WelchShortInput short_input = WelchShortInput::error) {
  if (segment_len < 2) throw ArgumentError("welch_psd: segment_len must be >= 2");
  if (overlap < 0.0 || overlap >= 1.0) throw ArgumentError("welch_psd: overlap must be in [0,1)");
  if (sample_rate <= 0.0) throw ArgumentError("welch_psd: sample_rate must be positive");

  PsdEstimate out;
  out.overlap = overlap;

  if (values.size() < segment_len) {
    if (short_input == WelchShortInput::error)
      throw InsufficientData("welch_psd: input shorter than segment_len");
    Eigen::Index shrunk = 2;
    while (shrunk * 2 <= values.size()) shrunk *= 2;
    if (values.size() < 2) throw InsufficientData("welch_psd: input too short for any segment");
    segment_len = shrunk;
    out.fallback = true;
  }

  const Eigen::Index noverlap = static_cast<Eigen::Index>(
      std::floor(static_cast<double>(segment_len) * overlap));
  const Eigen::Index step = out.fallback ? segment_len : segment_len - noverlap;
  const Eigen::Index n_segments = 1 + (values.size() - segment_len) / step;

  const Eigen::VectorXd window = detail::hann_periodic(segment_len);
  const double window_power = window.squaredNorm();  // sum w^2
  const double scale = 1.0 / (sample_rate * window_power);

  const Eigen::Index n_bins = segment_len / 2 + 1;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_bins);
  for (Eigen::Index s = 0; s < (out.fallback ? 1 : n_segments); ++s) {
    const Eigen::VectorXd seg = values.segment(s * step, segment_len).cwiseProduct(window);
    const Eigen::VectorXcd spec = detail::fft_complex(seg);
    for (Eigen::Index k = 0; k < n_bins; ++k) {
      double p = std::norm(spec[k]) * scale;
      const bool interior = k != 0 && !(segment_len % 2 == 0 && k == segment_len / 2);
      if (interior) p *= 2.0;  // one-sided convention
      acc[k] += p;
    }
  }

  out.n_segments = out.fallback ? 1 : n_segments;
  out.power = acc / static_cast<double>(out.n_segments);
  out.segment_len = segment_len;
  out.freqs.resize(n_bins);
  for (Eigen::Index k = 0; k < n_bins; ++k)
    out.freqs[k] = static_cast<double>(k) * sample_rate / static_cast<double>(segment_len);
  return out;
}

}  // namespace whfemd
