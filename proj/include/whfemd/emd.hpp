// Empirical Mode Decomposition by iterative sifting.
//
// Envelopes are natural cubic splines through the local extrema, with the
// two nearest extrema mirrored beyond each boundary. Sifting stops on the
// classic Cauchy SD criterion (threshold 0.2), or when the extrema and
// zero-crossing counts differ by at most one and the mean envelope is small,
// or after max_sift_iters. Decomposition stops when the residual is
// monotone/constant or max_imfs have been extracted.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "whfemd/errors.hpp"

namespace whfemd {

struct EmdConfig {
  int max_imfs = 5;
  int max_sift_iters = 100;
  double sd_threshold = 0.2;
  enum class Boundary { mirror };
  Boundary boundary = Boundary::mirror;
};

struct Extrema {
  std::vector<Eigen::Index> maxima;
  std::vector<Eigen::Index> minima;
};

template <typename Scalar>
struct ImfDecomposition {
  std::vector<Eigen::VectorX<Scalar>> imfs;  // highest to lowest characteristic frequency
  Eigen::VectorX<Scalar> residual;
  std::vector<int> sift_counts;
  std::vector<bool> converged;
};

template <typename Scalar>
struct SiftResult {
  Eigen::VectorX<Scalar> imf;
  bool converged = false;
  int iterations = 0;
};

/// Strict local extrema by three-point comparison; a plateau counts once, at
/// its left edge. Inputs shorter than 3 have no extrema.
template <typename Scalar>
Extrema find_extrema(const Eigen::VectorX<Scalar>& values) {
  Extrema out;
  const Eigen::Index n = values.size();
  if (n < 3) return out;

  // Collapse runs of equal values; interior runs are compared to both
  // neighboring runs.
  std::vector<Eigen::Index> run_start;
  run_start.push_back(0);
  for (Eigen::Index i = 1; i < n; ++i)
    if (values[i] != values[i - 1]) run_start.push_back(i);

  for (std::size_t r = 1; r + 1 < run_start.size(); ++r) {
    const Scalar prev = values[run_start[r - 1]];
    const Scalar cur = values[run_start[r]];
    const Scalar next = values[run_start[r + 1]];
    if (cur > prev && cur > next) out.maxima.push_back(run_start[r]);
    if (cur < prev && cur < next) out.minima.push_back(run_start[r]);
  }
  return out;
}

/// Zero crossings, counting a run of zeros between opposite signs once.
template <typename Scalar>
int count_zero_crossings(const Eigen::VectorX<Scalar>& values) {
  int crossings = 0;
  int last_sign = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const int s = (values[i] > Scalar{0}) - (values[i] < Scalar{0});
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++crossings;
    last_sign = s;
  }
  return crossings;
}

namespace detail {

// Natural cubic spline through (x, y) knots, evaluated on 0..n-1.
template <typename Scalar>
Eigen::VectorX<Scalar> natural_spline_eval(const std::vector<double>& x,
                                           const std::vector<Scalar>& y, Eigen::Index n) {
  const std::size_t m = x.size();
  Eigen::VectorX<Scalar> out(n);

  if (m == 2) {  // two knots: linear
    const double slope = static_cast<double>(y[1] - y[0]) / (x[1] - x[0]);
    for (Eigen::Index t = 0; t < n; ++t)
      out[t] = y[0] + static_cast<Scalar>(slope * (static_cast<double>(t) - x[0]));
    return out;
  }

  // Second derivatives with natural end conditions, Thomas algorithm.
  std::vector<double> h(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = x[i + 1] - x[i];

  std::vector<double> diag(m, 2.0), upper(m, 0.0), rhs(m, 0.0);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    diag[i] = 2.0 * (h[i - 1] + h[i]);
    rhs[i] = 6.0 * (static_cast<double>(y[i + 1] - y[i]) / h[i] -
                    static_cast<double>(y[i] - y[i - 1]) / h[i - 1]);
  }
  std::vector<double> m2(m, 0.0);  // natural: m2[0] = m2[m-1] = 0
  if (m > 2) {
    std::vector<double> c(m, 0.0), d(m, 0.0);
    // interior system i = 1..m-2 with sub/super diagonals h[i-1], h[i]
    c[1] = h[1] / diag[1];
    d[1] = rhs[1] / diag[1];
    for (std::size_t i = 2; i + 1 < m; ++i) {
      const double denom = diag[i] - h[i - 1] * c[i - 1];
      c[i] = h[i] / denom;
      d[i] = (rhs[i] - h[i - 1] * d[i - 1]) / denom;
    }
    for (std::size_t i = m - 2; i >= 1; --i) {
      m2[i] = d[i] - c[i] * (i + 2 <= m - 1 ? m2[i + 1] : 0.0);
      if (i == 1) break;
    }
  }

  std::size_t seg = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double xt = static_cast<double>(t);
    while (seg + 2 < m && xt > x[seg + 1]) ++seg;
    const double a = x[seg], b = x[seg + 1], hh = b - a;
    const double u = (b - xt) / hh, v = (xt - a) / hh;
    const double val = u * static_cast<double>(y[seg]) + v * static_cast<double>(y[seg + 1]) +
                       ((u * u * u - u) * m2[seg] + (v * v * v - v) * m2[seg + 1]) * hh * hh / 6.0;
    out[t] = static_cast<Scalar>(val);
  }
  return out;
}

}  // namespace detail

/// Envelope through the given extrema, with the two nearest extrema mirrored
/// beyond each boundary. Throws TooFewExtrema below 2 extrema.
template <typename Scalar>
Eigen::VectorX<Scalar> envelope(const Eigen::VectorX<Scalar>& values,
                                const std::vector<Eigen::Index>& extrema) {
  const Eigen::Index n = values.size();
  if (extrema.size() < 2) throw TooFewExtrema("envelope: need at least 2 extrema");

  std::vector<std::pair<double, Scalar>> knots;
  knots.reserve(extrema.size() + 4);

  // Mirror across index 0; skip an extremum already on the boundary.
  for (std::size_t k = std::min<std::size_t>(2, extrema.size()); k-- > 0;) {
    const Eigen::Index e = extrema[k];
    if (e != 0) knots.emplace_back(-static_cast<double>(e), values[e]);
  }
  std::sort(knots.begin(), knots.end());
  for (const Eigen::Index e : extrema) knots.emplace_back(static_cast<double>(e), values[e]);
  // Mirror across index n-1.
  const std::size_t count = extrema.size();
  for (std::size_t k = (count >= 2 ? count - 2 : 0); k < count; ++k) {
    const Eigen::Index e = extrema[count - 1 - (k - (count - 2))];
    (void)e;
  }
  for (std::size_t off = 0; off < std::min<std::size_t>(2, count); ++off) {
    const Eigen::Index e = extrema[count - 1 - off];
    if (e != n - 1) knots.emplace_back(2.0 * static_cast<double>(n - 1) - static_cast<double>(e),
                                       values[e]);
  }
  std::sort(knots.begin() + static_cast<std::ptrdiff_t>(knots.size() - std::min<std::size_t>(2, count)),
            knots.end());

  std::vector<double> x;
  std::vector<Scalar> y;
  x.reserve(knots.size());
  y.reserve(knots.size());
  for (const auto& [kx, ky] : knots) {
    if (!x.empty() && kx <= x.back()) continue;  // drop exact duplicates
    x.push_back(kx);
    y.push_back(ky);
  }
  if (x.size() < 2) throw TooFewExtrema("envelope: degenerate knot set");
  return detail::natural_spline_eval<Scalar>(x, y, n);
}

namespace detail {

/// IMF count criterion |#extrema - #zero-crossings| <= 1 evaluated on the
/// interior of the sequence (boundary_frac trimmed from each end).
template <typename Scalar>
bool imf_count_criterion(const Eigen::VectorX<Scalar>& values, double boundary_frac) {
  const Eigen::Index n = values.size();
  const Eigen::Index trim = static_cast<Eigen::Index>(std::floor(boundary_frac * static_cast<double>(n)));
  if (n - 2 * trim < 3) return false;
  const Eigen::VectorX<Scalar> interior = values.segment(trim, n - 2 * trim);
  const Extrema ext = find_extrema(interior);
  const int n_ext = static_cast<int>(ext.maxima.size() + ext.minima.size());
  const int n_zc = count_zero_crossings(interior);
  return std::abs(n_ext - n_zc) <= 1;
}

}  // namespace detail

/// One sifting pass: repeatedly subtracts the mean envelope until a stop
/// criterion fires. Throws NotOscillatory when the input has too few extrema
/// to sift at all.
template <typename Scalar>
SiftResult<Scalar> sift(const Eigen::VectorX<Scalar>& values, const EmdConfig& config = {}) {
  const Eigen::Index n = values.size();
  if (n < 4) throw NotOscillatory("sift: input too short");

  Eigen::VectorX<Scalar> h = values;
  SiftResult<Scalar> result;
  bool stopped = false;

  for (int iter = 1; iter <= config.max_sift_iters; ++iter) {
    const Extrema ext = find_extrema(h);
    if (ext.maxima.size() < 2 || ext.minima.size() < 2) {
      if (iter == 1) throw NotOscillatory("sift: too few extrema");
      break;  // lost oscillation mid-sift; stop with the current h
    }

    const Eigen::VectorX<Scalar> upper = envelope(h, ext.maxima);
    const Eigen::VectorX<Scalar> lower = envelope(h, ext.minima);
    const Eigen::VectorX<Scalar> mean_env = (upper + lower) / Scalar{2};
    const Eigen::VectorX<Scalar> next = h - mean_env;

    const Scalar denom = h.squaredNorm();
    result.iterations = iter;
    if (denom == Scalar{0}) {
      h = next;
      break;
    }
    const Scalar sd = mean_env.squaredNorm() / denom;

    const Extrema next_ext = find_extrema(next);
    const int n_ext = static_cast<int>(next_ext.maxima.size() + next_ext.minima.size());
    const int n_zc = count_zero_crossings(next);
    const bool counts_ok = std::abs(n_ext - n_zc) <= 1;
    const bool env_small =
        mean_env.norm() <= Scalar{1e-3} * (next.norm() + Scalar{1e-300});

    h = next;
    if (sd < static_cast<Scalar>(config.sd_threshold) || (counts_ok && env_small)) {
      stopped = true;
      break;
    }
  }

  result.imf = std::move(h);
  result.converged = stopped && detail::imf_count_criterion(result.imf, 0.05);
  return result;
}

/// Full decomposition. The residual is the input minus the sum of IMFs by
/// construction, so reconstruction is exact up to rounding.
template <typename Scalar>
ImfDecomposition<Scalar> decompose(const Eigen::VectorX<Scalar>& values,
                                   const EmdConfig& config = {}) {
  ImfDecomposition<Scalar> out;
  Eigen::VectorX<Scalar> current = values;

  while (static_cast<int>(out.imfs.size()) < config.max_imfs) {
    const Extrema ext = find_extrema(current);
    if (ext.maxima.empty() && ext.minima.empty()) break;  // monotone or constant
    SiftResult<Scalar> s;
    try {
      s = sift(current, config);
    } catch (const NotOscillatory&) {
      break;
    }
    current -= s.imf;
    out.imfs.push_back(std::move(s.imf));
    out.sift_counts.push_back(s.iterations);
    out.converged.push_back(s.converged);
  }

  out.residual = std::move(current);
  return out;
}

}  // namespace whfemd
