#pragma once

// Test-only reference routines, deliberately independent of the library.

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace testing_support {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Gaussian elimination with partial pivoting.
inline Vec3 solve3(Mat3 a, Vec3 b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec3 x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Probabilities of three L^2 levels with mean L2 and mean L^4 equal to F.
inline Vec3 level_probabilities(int l1, int l2, int l3, double L2, double F) {
  const double a = l1 * (l1 + 1.0), b = l2 * (l2 + 1.0), c = l3 * (l3 + 1.0);
  return solve3({{{1.0, 1.0, 1.0}, {a, b, c}, {a * a, b * b, c * c}}}, {1.0, L2, F});
}

/// sum p_i (l_i + 3/2): the product of a superposition of (0, l_i, 0) states.
inline double level_product(int l1, int l2, int l3, const Vec3& p) {
  return p[0] * (l1 + 1.5) + p[1] * (l2 + 1.5) + p[2] * (l3 + 1.5);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing_support
