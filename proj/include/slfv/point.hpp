#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace slfv {

inline constexpr int kMaxDim = 3;

// Points live in R^3; coordinates beyond the working dimension stay zero,
// so distances computed over all three axes are correct in every dimension.
struct Point {
  std::array<double, kMaxDim> x{0.0, 0.0, 0.0};

  constexpr double& operator[](std::size_t i) { return x[i]; }
  constexpr double operator[](std::size_t i) const { return x[i]; }

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

constexpr Point operator+(const Point& a, const Point& b) {
  return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}

constexpr Point operator-(const Point& a, const Point& b) {
  return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}};
}

constexpr Point operator*(double s, const Point& a) {
  return {{s * a[0], s * a[1], s * a[2]}};
}

constexpr double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

constexpr double dist2(const Point& a, const Point& b) {
  const Point d = a - b;
  return dot(d, d);
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline void require_dimension(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("unsupported dimension " + std::to_string(d) +
                                " (expected 1, 2 or 3)");
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  require_dimension(d);
  constexpr double pi = 3.14159265358979323846;
  switch (d) {
    case 1: return 2.0;
    case 2: return pi;
    default: return 4.0 * pi / 3.0;
  }
}

inline double ball_volume(int d, double r) {
  return unit_ball_volume(d) * std::pow(r, d);
}

}  // namespace slfv
