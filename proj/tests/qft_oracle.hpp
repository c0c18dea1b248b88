#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace qdsl::testing {

inline std::size_t reverse_bits(std::size_t x, std::size_t n) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < n; ++k) r |= ((x >> k) & 1u) << (n - 1 - k);
  return r;
}

/// Dense DFT on a big-endian register: qs[0] is the most significant bit of
/// the encoded integer but bit 0 of the amplitude index, so both sides of
/// the textbook matrix exp(2 pi i x y / N) / sqrt(N) are bit-reversed.
/// Column-major, like Harness::unitary.
inline std::vector<std::vector<std::complex<double>>> dft_big_endian(std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::vector<std::complex<double>>> m(dim, std::vector<std::complex<double>>(dim));
  for (std::size_t in = 0; in < dim; ++in) {
    std::size_t x = reverse_bits(in, n);
    for (std::size_t out = 0; out < dim; ++out) {
      std::size_t y = reverse_bits(out, n);
      double angle = 2 * std::numbers::pi * static_cast<double>((x * y) % dim) / static_cast<double>(dim);
      m[in][out] = std::polar(scale, angle);
    }
  }
  return m;
}

/// Operator-norm bound on the distance between the approximate and the exact
/// transform: each dropped rotation by pi / 2^d moves a state by at most
/// |1 - e^{i pi / 2^d}| = 2 sin(pi / 2^(d+1)), and n - d rotations use distance d.
inline double aqft_error_bound(std::size_t n, std::size_t a) {
  double bound = 0;
  for (std::size_t d = a; d < n; ++d) {
    bound += static_cast<double>(n - d) * 2 * std::sin(std::numbers::pi / std::pow(2.0, static_cast<double>(d + 1)));
  }
  return bound;
}

}  // namespace qdsl::testing
