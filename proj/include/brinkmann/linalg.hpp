#pragma once

// Small dense helpers that work for double and for dual numbers.

#include <cmath>
#include <span>
#include <vector>

#include "brinkmann/dual.hpp"
#include "brinkmann/errors.hpp"

namespace brinkmann::linalg {

/// Gauss-Jordan inverse of a row-major n x n matrix, pivoting on the value part.
template <class T>
std::vector<T> inverse(std::span<const T> a, int n) {
  std::vector<T> m(a.begin(), a.end());
  std::vector<T> inv(static_cast<std::size_t>(n * n), T(0.0));
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = T(1.0);
  auto at = [n](std::vector<T>& x, int r, int c) -> T& { return x[static_cast<std::size_t>(r * n + c)]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value_of(at(m, col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(at(m, r, col)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw DegeneracyError("singular matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(at(m, col, c), at(m, piv, c));
        std::swap(at(inv, col, c), at(inv, piv, c));
      }
    }
    const T p = T(1.0) / at(m, col, col);
    for (int c = 0; c < n; ++c) {
      at(m, col, c) = at(m, col, c) * p;
      at(inv, col, c) = at(inv, col, c) * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = at(m, r, col);
      for (int c = 0; c < n; ++c) {
        at(m, r, c) = at(m, r, c) - f * at(m, col, c);
        at(inv, r, c) = at(inv, r, c) - f * at(inv, col, c);
      }
    }
  }
  return inv;
}

/// Determinant of a row-major n x n matrix of doubles (partial pivoting LU).
double determinant(std::span<const double> a, int n);

}  // namespace brinkmann::linalg
