#include "brinkmann/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace brinkmann::linalg {

double determinant(std::span<const double> a, int n) {
  std::vector<double> m(a.begin(), a.end());
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[static_cast<std::size_t>(r * n + col)]) > std::abs(m[static_cast<std::size_t>(piv * n + col)])) piv = r;
    }
    const double p = m[static_cast<std::size_t>(piv * n + col)];
    if (p == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m[static_cast<std::size_t>(col * n + c)], m[static_cast<std::size_t>(piv * n + c)]);
      det = -det;
    }
    det *= p;
    for (int r = col + 1; r < n; ++r) {
      const double f = m[static_cast<std::size_t>(r * n + col)] / p;
      for (int c = col; c < n; ++c) m[static_cast<std::size_t>(r * n + c)] -= f * m[static_cast<std::size_t>(col * n + c)];
    }
  }
  return det;
}

}  // namespace brinkmann::linalg
