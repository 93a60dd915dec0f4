#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "slfv/format.hpp"
#include "slfv/point.hpp"
#include "slfv/rng.hpp"

namespace slfv {

struct Ball {
  Point center;
  double radius = 1.0;

  bool contains(const Point& p) const { return dist2(p, center) <= radius * radius; }
  friend bool operator==(const Ball&, const Ball&) = default;
};

// {x : <normal, x> <= offset}, with a unit normal.
struct HalfSpace {
  Point normal{{1.0, 0.0, 0.0}};
  double offset = 0.0;

  bool contains(const Point& p) const { return dot(normal, p) <= offset; }
  friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
};

using Shape = std::variant<Ball, HalfSpace>;

inline Ball make_ball(const Point& c, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("ball radius must be > 0");
  return {c, r};
}

inline HalfSpace make_half_space(Point normal, double offset) {
  const double n = norm(normal);
  if (!(n > 0.0)) throw std::invalid_argument("half-space normal must be nonzero");
  return {(1.0 / n) * normal, offset / n};
}

inline bool shape_contains(const Shape& s, const Point& p) {
  return std::visit([&](const auto& v) { return v.contains(p); }, s);
}

// Finite union of shapes; empty means the empty set.
struct RegionSet {
  std::vector<Shape> shapes;

  bool empty() const { return shapes.empty(); }
  std::size_t size() const { return shapes.size(); }

  bool contains(const Point& p) const {
    return std::any_of(shapes.begin(), shapes.end(),
                       [&](const Shape& s) { return shape_contains(s, p); });
  }

  bool balls_only() const {
    return std::all_of(shapes.begin(), shapes.end(),
                       [](const Shape& s) { return std::holds_alternative<Ball>(s); });
  }

  std::vector<Ball> balls() const {
    std::vector<Ball> out;
    for (const auto& s : shapes)
      if (const auto* b = std::get_if<Ball>(&s)) out.push_back(*b);
    return out;
  }

  friend bool operator==(const RegionSet&, const RegionSet&) = default;
};

// Positive-measure overlap, decided exactly. Tangent contact is empty.
inline bool balls_overlap(const Ball& a, const Ball& b) {
  const double r = a.radius + b.radius;
  return dist2(a.center, b.center) < r * r;
}

inline bool ball_overlaps_half_space(const Ball& b, const HalfSpace& h) {
  return dot(h.normal, b.center) - h.offset < b.radius;
}

inline bool half_spaces_overlap(const HalfSpace& a, const HalfSpace& b) {
  // Only antiparallel half-spaces can meet in a null set.
  const Point s = a.normal + b.normal;
  if (dot(s, s) > 1e-24) return true;
  return a.offset + b.offset > 0.0;
}

inline bool shapes_overlap(const Shape& a, const Shape& b) {
  return std::visit(
      [](const auto& x, const auto& y) -> bool {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<X, Ball> && std::is_same_v<Y, Ball>)
          return balls_overlap(x, y);
        else if constexpr (std::is_same_v<X, Ball>)
          return ball_overlaps_half_space(x, y);
        else if constexpr (std::is_same_v<Y, Ball>)
          return ball_overlaps_half_space(y, x);
        else
          return half_spaces_overlap(x, y);
      },
      a, b);
}

// Vol(b n E) > 0.
inline bool ball_hits_region(const Ball& b, const RegionSet& e) {
  for (const auto& s : e.shapes) {
    if (const auto* other = std::get_if<Ball>(&s)) {
      if (balls_overlap(b, *other)) return true;
    } else if (ball_overlaps_half_space(b, std::get<HalfSpace>(s))) {
      return true;
    }
  }
  return false;
}

// Vol(E n F) > 0.
inline bool regions_overlap(const RegionSet& e, const RegionSet& f) {
  for (const auto& a : e.shapes)
    for (const auto& b : f.shapes)
      if (shapes_overlap(a, b)) return true;
  return false;
}

// Points within distance r of E.
inline RegionSet region_expand(const RegionSet& e, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("expansion radius must be > 0");
  RegionSet out;
  out.shapes.reserve(e.shapes.size());
  for (const auto& s : e.shapes) {
    if (const auto* b = std::get_if<Ball>(&s))
      out.shapes.emplace_back(Ball{b->center, b->radius + r});
    else {
      auto h = std::get<HalfSpace>(s);
      h.offset += r;
      out.shapes.emplace_back(h);
    }
  }
  return out;
}

// Axis-aligned box [lo, hi] in the first `dim` coordinates.
struct Window {
  int dim = 1;
  Point lo, hi;

  static Window cube(int d, double half_width) {
    Window w;
    w.dim = d;
    for (int a = 0; a < d; ++a) {
      w.lo[a] = -half_width;
      w.hi[a] = half_width;
    }
    return w;
  }

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= hi[a] - lo[a];
    return v;
  }

  Point sample(CounterRng& rng) const {
    Point p;
    for (int a = 0; a < dim; ++a) p[a] = uniform(rng, lo[a], hi[a]);
    return p;
  }
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Hit-or-miss Monte Carlo volume of E n window. Reporting only.
inline Estimate volume_estimate(const RegionSet& e, const Window& window, std::uint64_t n_samples,
                                std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("volume_estimate needs n_samples > 0");
  if (e.empty()) return {};
  CounterRng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n_samples; ++i)
    if (e.contains(window.sample(rng))) ++hits;
  const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
  const double vol = window.volume();
  return {vol * p, vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

// Region literals:
//   region := "empty" | shape ( "|" shape )*
//   shape  := "ball(" coords ";" radius ")" | "halfspace(" coords ";" offset ")"
//   coords := number ( "," number )*        (exactly d numbers)
// A half-space literal lists its normal (normalized on parse) and describes
// {x : <n, x> <= offset}.
inline RegionSet parse_region(const std::string& text, int d) {
  require_dimension(d);
  RegionSet out;
  const auto body = trim(text);
  if (body.empty() || body == "empty") return out;
  for (const auto& item : split(body, '|')) {
    const auto open = item.find('(');
    const auto close = item.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open ||
        close + 1 != item.size())
      throw std::invalid_argument("malformed shape '" + item + "'");
    const std::string kind(trim(std::string_view(item).substr(0, open)));
    const auto args = split(std::string_view(item).substr(open + 1, close - open - 1), ';');
    if (args.size() != 2) throw std::invalid_argument("shape '" + item + "' needs 'coords;value'");
    const auto coords = parse_double_list(args[0]);
    if (static_cast<int>(coords.size()) != d)
      throw std::invalid_argument("shape '" + item + "' needs " + std::to_string(d) +
                                  " coordinates");
    Point p;
    for (int a = 0; a < d; ++a) p[a] = coords[a];
    const double v = parse_double(args[1]);
    if (kind == "ball")
      out.shapes.emplace_back(make_ball(p, v));
    else if (kind == "halfspace")
      out.shapes.emplace_back(make_half_space(p, v));
    else
      throw std::invalid_argument("unknown shape kind '" + kind + "'");
  }
  return out;
}

inline std::string format_point(const Point& p, int d, char sep = ',') {
  std::string s;
  for (int a = 0; a < d; ++a) {
    if (a) s += sep;
    s += format_double(p[a]);
  }
  return s;
}

inline std::string format_region(const RegionSet& e, int d) {
  if (e.empty()) return "empty";
  std::string s;
  for (const auto& shape : e.shapes) {
    if (!s.empty()) s += " | ";
    if (const auto* b = std::get_if<Ball>(&shape))
      s += "ball(" + format_point(b->center, d) + ';' + format_double(b->radius) + ')';
    else {
      const auto& h = std::get<HalfSpace>(shape);
      s += "halfspace(" + format_point(h.normal, d) + ';' + format_double(h.offset) + ')';
    }
  }
  return s;
}

inline Point parse_point(const std::string& text, int d) {
  const auto v = parse_double_list(text);
  if (static_cast<int>(v.size()) != d)
    throw std::invalid_argument("point '" + text + "' needs " + std::to_string(d) +
                                " coordinates");
  Point p;
  for (int a = 0; a < d; ++a) p[a] = v[a];
  return p;
}

}  // namespace slfv
