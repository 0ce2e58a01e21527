// Fast Walsh-Hadamard transform.
//
// The forward transform zero-pads to the next power of two, runs the
// addition/subtraction butterfly in natural (Hadamard) order, and optionally
// permutes to sequency (Walsh) order, where coefficients are sorted by the
// number of sign changes of the underlying basis function. Sequency with the
// 1/N normalization is the default used by the feature pipeline.
#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "whfemd/errors.hpp"

namespace whfemd {

enum class WalshOrdering { natural, sequency };
enum class WalshNormalization { one_over_n, none };

template <typename Scalar>
struct WalshCoefficients {
  Eigen::VectorX<Scalar> coeffs;  // length == padded_len
  WalshOrdering ordering = WalshOrdering::sequency;
  WalshNormalization normalization = WalshNormalization::one_over_n;
  Eigen::Index original_len = 0;
  Eigen::Index padded_len = 0;
};

inline Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// In-place butterfly; output in natural (Hadamard) order. Inner loop is
// additions and subtractions only.
template <typename Scalar>
void fwht_butterfly(Eigen::VectorX<Scalar>& v) {
  const Eigen::Index n = v.size();
  for (Eigen::Index len = 1; len < n; len <<= 1) {
    for (Eigen::Index block = 0; block < n; block += 2 * len) {
      for (Eigen::Index i = block; i < block + len; ++i) {
        const Scalar a = v[i];
        const Scalar b = v[i + len];
        v[i] = a + b;
        v[i + len] = a - b;
      }
    }
  }
}

inline std::uint64_t reverse_bits(std::uint64_t x, int bits) {
  std::uint64_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

inline int log2_exact(Eigen::Index n) {
  int b = 0;
  while ((Eigen::Index{1} << b) < n) ++b;
  return b;
}

// Natural-order index holding the coefficient of sequency s:
// bit-reverse the Gray code of s.
inline Eigen::Index sequency_source_index(Eigen::Index s, int bits) {
  const std::uint64_t gray = static_cast<std::uint64_t>(s) ^ (static_cast<std::uint64_t>(s) >> 1);
  return static_cast<Eigen::Index>(reverse_bits(gray, bits));
}

}  // namespace detail

/// Forward FWHT of an arbitrary-length real sequence.
template <typename Scalar>
WalshCoefficients<Scalar> fwht(const Eigen::VectorX<Scalar>& values,
                               WalshOrdering ordering = WalshOrdering::sequency,
                               WalshNormalization normalization = WalshNormalization::one_over_n) {
  if (values.size() == 0) throw ArgumentError("fwht: empty input");
  const Eigen::Index n = next_pow2(values.size());

  Eigen::VectorX<Scalar> work = Eigen::VectorX<Scalar>::Zero(n);
  work.head(values.size()) = values;
  detail::fwht_butterfly(work);

  WalshCoefficients<Scalar> out;
  out.ordering = ordering;
  out.normalization = normalization;
  out.original_len = values.size();
  out.padded_len = n;

  if (ordering == WalshOrdering::sequency) {
    const int bits = detail::log2_exact(n);
    out.coeffs.resize(n);
    for (Eigen::Index s = 0; s < n; ++s)
      out.coeffs[s] = work[detail::sequency_source_index(s, bits)];
  } else {
    out.coeffs = std::move(work);
  }

  if (normalization == WalshNormalization::one_over_n)
    out.coeffs /= static_cast<Scalar>(n);
  return out;
}

/// Inverse FWHT; recovers the zero-padded input exactly up to rounding.
template <typename Scalar>
Eigen::VectorX<Scalar> ifwht(const WalshCoefficients<Scalar>& wc) {
  const Eigen::Index n = wc.padded_len;
  if (n == 0 || wc.coeffs.size() != n || !is_pow2(n))
    throw ArgumentError("ifwht: invalid WalshCoefficients");

  Eigen::VectorX<Scalar> work(n);
  if (wc.ordering == WalshOrdering::sequency) {
    const int bits = detail::log2_exact(n);
    for (Eigen::Index s = 0; s < n; ++s)
      work[detail::sequency_source_index(s, bits)] = wc.coeffs[s];
  } else {
    work = wc.coeffs;
  }

  detail::fwht_butterfly(work);
  // H*H = N*I, so the round trip needs one net factor of 1/N.
  if (wc.normalization == WalshNormalization::none)
    work /= static_cast<Scalar>(n);
  return work;
}

/// Fraction of squared-coefficient energy held by the first coefficient.
template <typename Scalar>
Scalar energy_compaction(const WalshCoefficients<Scalar>& wc) {
  const Scalar total = wc.coeffs.squaredNorm();
  if (total == Scalar{0}) throw DegenerateInput("energy_compaction: all-zero coefficients");
  return wc.coeffs[0] * wc.coeffs[0] / total;
}

/// Walsh-Hadamard matrix with rows in the requested ordering. O(N^2) memory;
/// reference path for the runtime benchmark, not for feature extraction.
template <typename Scalar>
Eigen::MatrixX<Scalar> walsh_matrix(Eigen::Index n, WalshOrdering ordering) {
  if (!is_pow2(n)) throw ArgumentError("walsh_matrix: size must be a power of two");
  Eigen::MatrixX<Scalar> h(1, 1);
  h(0, 0) = Scalar{1};
  while (h.rows() < n) {
    const Eigen::Index m = h.rows();
    Eigen::MatrixX<Scalar> next(2 * m, 2 * m);
    next.topLeftCorner(m, m) = h;
    next.topRightCorner(m, m) = h;
    next.bottomLeftCorner(m, m) = h;
    next.bottomRightCorner(m, m) = -h;
    h = std::move(next);
  }
  if (ordering == WalshOrdering::sequency) {
    const int bits = detail::log2_exact(n);
    Eigen::MatrixX<Scalar> perm(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
      perm.row(s) = h.row(detail::sequency_source_index(s, bits));
    return perm;
  }
  return h;
}

/// Direct matrix-product Walsh transform (the O(N^2) baseline in benchmarks).
template <typename Scalar>
WalshCoefficients<Scalar> naive_walsh(const Eigen::VectorX<Scalar>& values,
                                      WalshOrdering ordering = WalshOrdering::sequency,
                                      WalshNormalization normalization = WalshNormalization::one_over_n) {
  if (values.size() == 0) throw ArgumentError("naive_walsh: empty input");
  const Eigen::Index n = next_pow2(values.size());
  Eigen::VectorX<Scalar> padded = Eigen::VectorX<Scalar>::Zero(n);
  padded.head(values.size()) = values;

  WalshCoefficients<Scalar> out;
  out.ordering = ordering;
  out.normalization = normalization;
  out.original_len = values.size();
  out.padded_len = n;
  out.coeffs = walsh_matrix<Scalar>(n, ordering) * padded;
  if (normalization == WalshNormalization::one_over_n)
    out.coeffs /= static_cast<Scalar>(n);
  return out;
}

}  // namespace whfemd
