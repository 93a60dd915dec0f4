#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "slfv/point.hpp"

namespace slfv {

// a_d such that the explicit placement below covers the boundary of a
// radius-n sphere with at most a_d * n^(d-1) unit balls, for every n >= 1.
// These are certified upper bounds, not the minimal covering numbers.
struct CoveringConstant {
  int dim = 1;
  int a_d = 2;

  // Ball budget for tier n.
  long long budget(int n) const {
    long long b = a_d;
    for (int i = 1; i < dim; ++i) b *= n;
    return b;
  }
};

inline CoveringConstant covering_constant(int d) {
  require_dimension(d);
  switch (d) {
    case 1: return {1, 2};
    case 2: return {2, 4};
    // Latitude bands with geodesic cell diameter <= 0.95: at most
    // (pi n/0.95 + 1)(2 pi n/0.95 + 1) <= 32.8 n^2 caps.
    default: return {3, 33};
  }
}

// Smallest n >= 1 with radius <= n * ball_radius. Exact multiples map to the
// lower tier.
inline int covering_tier(double radius, double ball_radius) {
  const double q = radius / ball_radius;
  const double n = std::ceil(q);
  return std::max(1, static_cast<int>(n));
}

// Centers of balls of radius `ball_radius` whose union contains the sphere
// of radius `radius` around `center`. At most budget(covering_tier(...)).
inline std::vector<Point> cover_sphere(const Point& center, double radius, double ball_radius,
                                       int d) {
  require_dimension(d);
  constexpr double pi = 3.14159265358979323846;
  std::vector<Point> out;
  const int n = covering_tier(radius, ball_radius);
  if (d == 1) {
    Point a = center, b = center;
    a[0] -= radius;
    b[0] += radius;
    out = {a, b};
    return out;
  }
  if (d == 2) {
    // 4n points: half the angular step subtends a chord of at most
    // 2 r sin(pi/(8n)) < pi/4 * ball_radius.
    const int m = 4 * n;
    out.reserve(m);
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * pi * j / m;
      Point p = center;
      p[0] += radius * std::cos(phi);
      p[1] += radius * std::sin(phi);
      out.push_back(p);
    }
    return out;
  }
  const double step = 0.95 * ball_radius;
  const int bands = std::max(1, static_cast<int>(std::ceil(pi * radius / step)));
  const double dtheta = pi / bands;
  for (int i = 0; i < bands; ++i) {
    const double lo = i * dtheta, hi = (i + 1) * dtheta;
    const double sin_max = (lo <= pi / 2 && hi >= pi / 2) ? 1.0
                                                          : std::max(std::sin(lo), std::sin(hi));
    const int m = std::max(1, static_cast<int>(std::ceil(2.0 * pi * radius * sin_max / step)));
    const double theta = lo + 0.5 * dtheta;
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / m;
      Point p = center;
      p[0] += radius * std::sin(theta) * std::cos(phi);
      p[1] += radius * std::sin(theta) * std::sin(phi);
      p[2] += radius * std::cos(theta);
      out.push_back(p);
    }
  }
  return out;
}

// Deterministic, roughly even points on the sphere of `radius` around
// `center` (Fibonacci lattice in 3D, equal angles in 2D, both poles in 1D).
inline std::vector<Point> sphere_samples(const Point& center, double radius, int d, int count) {
  constexpr double pi = 3.14159265358979323846;
  std::vector<Point> out;
  if (d == 1) {
    Point a = center, b = center;
    a[0] -= radius;
    b[0] += radius;
    return {a, b};
  }
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Point p = center;
    if (d == 2) {
      const double phi = 2.0 * pi * (i + 0.5) / count;
      p[0] += radius * std::cos(phi);
      p[1] += radius * std::sin(phi);
    } else {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = pi * (3.0 - std::sqrt(5.0)) * i;
      p[0] += radius * s * std::cos(phi);
      p[1] += radius * s * std::sin(phi);
      p[2] += radius * z;
    }
    out.push_back(p);
  }
  return out;
}

struct CoveringCertificate {
  CoveringConstant constant;
  int n_check = 0;
  std::vector<long long> counts;  // balls used for n = 1..n_check
  bool valid = true;
};

// Enumerates the construction for n = 1..n_check and checks budget and
// coverage of dense boundary samples.
inline CoveringCertificate certify_covering(int d, int n_check, int samples_per_unit = 400) {
  CoveringCertificate cert{covering_constant(d), n_check, {}, true};
  const Point origin{};
  for (int n = 1; n <= n_check; ++n) {
    const auto centers = cover_sphere(origin, n, 1.0, d);
    cert.counts.push_back(static_cast<long long>(centers.size()));
    if (static_cast<long long>(centers.size()) > cert.constant.budget(n)) cert.valid = false;
    const int count = d == 3 ? samples_per_unit * 10 * n * n : samples_per_unit * n;
    for (const auto& p : sphere_samples(origin, n, d, count)) {
      const bool covered = std::any_of(centers.begin(), centers.end(),
                                       [&](const Point& c) { return dist2(p, c) <= 1.0; });
      if (!covered) {
        cert.valid = false;
        break;
      }
    }
  }
  return cert;
}

}  // namespace slfv
