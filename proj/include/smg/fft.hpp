#pragma once

// Discrete Fourier transform of arbitrary length: iterative radix-2 for powers
// of two, Bluestein's chirp-z reduction otherwise.

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace smg::fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2 * std::numbers::pi / double(len) * (inverse ? 1 : -1);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * double(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline void bluestein(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t size = 1;
  while (size < 2 * n - 1) size <<= 1;

  // chirp[k] = exp(-/+ i pi k^2 / n); k^2 reduced mod 2n keeps the angle small.
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, (inverse ? 1 : -1) * std::numbers::pi * double(k2) / double(n));
  }
  std::vector<cplx> x(size), y(size);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[size - k] = std::conj(chirp[k]);

  radix2(x, false);
  radix2(y, false);
  for (std::size_t k = 0; k < size; ++k) x[k] *= y[k];
  radix2(x, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] / double(size) * chirp[k];
}

}  // namespace detail

/// Unnormalized forward transform, X[k] = sum_n x[n] exp(-2 pi i k n / N).
inline void forward(std::vector<cplx>& a) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size())) detail::radix2(a, false);
  else detail::bluestein(a, false);
}

/// Inverse transform including the 1/N factor.
inline void inverse(std::vector<cplx>& a) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size())) detail::radix2(a, true);
  else detail::bluestein(a, true);
  for (auto& v : a) v /= double(a.size());
}

}  // namespace smg::fft
