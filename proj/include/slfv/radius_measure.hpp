#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "slfv/covering.hpp"
#include "slfv/format.hpp"
#include "slfv/point.hpp"
#include "slfv/rng.hpp"

namespace slfv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct FixedRadius {
  double radius = 1.0;
};

struct RadiusAtom {
  double radius = 1.0;
  double weight = 1.0;
};

struct DiscreteMixture {
  std::vector<RadiusAtom> atoms;
};

// alpha (1+r)^(-3 dim - 1) dr on (0, r_max]. r_max = inf is accepted for
// analysis (moments, condition checks) but cannot drive a simulation.
struct TruncatedPowerLaw {
  double alpha = 1.0;
  int dim = 1;
  double r_max = 10.0;
};

// alpha r^(-exponent) dr on (0, r_max]. Used for counterexamples: with
// exponent >= 1 the total mass is infinite.
struct SingularPowerLaw {
  double alpha = 1.0;
  double exponent = 2.0;
  double r_max = 1.0;
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Antiderivative of u^e, with u^e / e -> 0 at infinity when e < 0.
inline double power_antiderivative(double u, double e) {
  if (e == 0.0) return std::log(u);
  if (std::isinf(u)) return e < 0.0 ? 0.0 : kInf;
  return std::pow(u, e) / e;
}

}  // namespace detail

class RadiusMeasure {
 public:
  using Variant = std::variant<FixedRadius, DiscreteMixture, TruncatedPowerLaw, SingularPowerLaw>;

  RadiusMeasure() : RadiusMeasure(FixedRadius{1.0}) {}
  RadiusMeasure(Variant v) : v_(std::move(v)) { validate(); }

  static RadiusMeasure fixed(double r) { return RadiusMeasure(FixedRadius{r}); }
  static RadiusMeasure mixture(std::vector<RadiusAtom> atoms) {
    return RadiusMeasure(DiscreteMixture{std::move(atoms)});
  }
  static RadiusMeasure power_law(double alpha, int dim, double r_max) {
    return RadiusMeasure(TruncatedPowerLaw{alpha, dim, r_max});
  }
  static RadiusMeasure singular(double alpha, double exponent, double r_max) {
    return RadiusMeasure(SingularPowerLaw{alpha, exponent, r_max});
  }

  const Variant& variant() const { return v_; }

  double total_mass() const { return weighted_mass(0.0, 0, 0.0, kInf); }

  double sup_support() const {
    return std::visit(
        [](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, FixedRadius>) {
            return m.radius;
          } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
            double s = 0.0;
            for (const auto& a : m.atoms) s = std::max(s, a.radius);
            return s;
          } else {
            return m.r_max;
          }
        },
        v_);
  }

  bool has_bounded_support() const { return std::isfinite(sup_support()); }

  // Finite, positive mass on a bounded support: can drive simulations.
  bool is_samplable() const {
    const double m = total_mass();
    return has_bounded_support() && std::isfinite(m) && m > 0.0;
  }

  // Integral of (c + R)^p over R in (lo, hi] against mu. Closed form for
  // every variant; +inf when it diverges.
  double weighted_mass(double c, int p, double lo, double hi) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, FixedRadius>) {
            return (m.radius > lo && m.radius <= hi) ? std::pow(c + m.radius, p) : 0.0;
          } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
            double s = 0.0;
            for (const auto& a : m.atoms)
              if (a.radius > lo && a.radius <= hi) s += a.weight * std::pow(c + a.radius, p);
            return s;
          } else if constexpr (std::is_same_v<T, TruncatedPowerLaw>) {
            return power_law_mass(m, c, p, lo, hi);
          } else {
            return singular_mass(m, c, p, lo, hi);
          }
        },
        v_);
  }

  // Integral of R^p against mu.
  double moment(int p) const { return weighted_mass(0.0, p, 0.0, kInf); }

  // R distributed as mu / total mass.
  double sample(CounterRng& rng) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, FixedRadius>) {
            return m.radius;
          } else if constexpr (std::is_same_v<T, TruncatedPowerLaw>) {
            const double e = 3.0 * m.dim;
            const double tail = std::pow(1.0 + m.r_max, -e);
            const double u = uniform01_open_low(rng);
            const double r = std::pow(1.0 - u * (1.0 - tail), -1.0 / e) - 1.0;
            return std::clamp(r, std::numeric_limits<double>::min(), m.r_max);
          } else if constexpr (std::is_same_v<T, SingularPowerLaw>) {
            const double u = uniform01_open_low(rng);
            return m.r_max * std::pow(u, 1.0 / (1.0 - m.exponent));
          } else {
            return sample_weighted(0.0, 0, rng);
          }
        },
        v_);
  }

  // R with density proportional to (c + R)^p mu(dR).
  double sample_weighted(double c, int p, CounterRng& rng) const {
    if (const auto* f = std::get_if<FixedRadius>(&v_)) return f->radius;
    if (const auto* mix = std::get_if<DiscreteMixture>(&v_)) {
      const double total = weighted_mass(c, p, 0.0, kInf);
      double target = uniform01(rng) * total;
      for (const auto& a : mix->atoms) {
        target -= a.weight * std::pow(c + a.radius, p);
        if (target < 0.0) return a.radius;
      }
      return mix->atoms.back().radius;
    }
    // Continuous variants: invert the closed-form CDF by bisection. A fixed
    // iteration count keeps the result independent of convergence tests.
    const double r_max = sup_support();
    const double total = weighted_mass(c, p, 0.0, r_max);
    const double target = uniform01_open_low(rng) * total;
    double lo = 0.0, hi = r_max;
    for (int it = 0; it < 128; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (weighted_mass(c, p, 0.0, mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    return std::max(hi, std::numeric_limits<double>::min());
  }

  // mu.* config entries, parseable by from_entries.
  Entries entries() const {
    Entries e;
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, FixedRadius>) {
            e["mu.kind"] = "fixed";
            e["mu.R"] = format_double(m.radius);
          } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
            e["mu.kind"] = "mixture";
            std::string s;
            for (const auto& a : m.atoms) {
              if (!s.empty()) s += ',';
              s += format_double(a.radius) + ':' + format_double(a.weight);
            }
            e["mu.atoms"] = s;
          } else if constexpr (std::is_same_v<T, TruncatedPowerLaw>) {
            e["mu.kind"] = "powerlaw";
            e["mu.alpha"] = format_double(m.alpha);
            e["mu.dim"] = std::to_string(m.dim);
            e["mu.R_max"] = std::isinf(m.r_max) ? "inf" : format_double(m.r_max);
          } else {
            e["mu.kind"] = "singular";
            e["mu.alpha"] = format_double(m.alpha);
            e["mu.exponent"] = format_double(m.exponent);
            e["mu.R_max"] = format_double(m.r_max);
          }
        },
        v_);
    return e;
  }

  std::string describe() const {
    std::string s;
    for (const auto& [k, v] : entries()) {
      if (!s.empty()) s += ' ';
      s += k + '=' + v;
    }
    return s;
  }

  // `default_dim` fills mu.dim for the power law when absent.
  static RadiusMeasure from_entries(const Entries& e, int default_dim = 1) {
    auto get = [&](const std::string& key) -> const std::string& {
      const auto it = e.find(key);
      if (it == e.end()) throw std::invalid_argument("missing radius measure key '" + key + "'");
      return it->second;
    };
    const auto kind_it = e.find("mu.kind");
    const std::string kind = kind_it == e.end() ? "fixed" : kind_it->second;
    if (kind == "fixed") {
      const auto it = e.find("mu.R");
      return fixed(it == e.end() ? 1.0 : parse_double(it->second));
    }
    if (kind == "mixture") {
      std::vector<RadiusAtom> atoms;
      for (const auto& item : split(get("mu.atoms"), ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2)
          throw std::invalid_argument("mu.atoms entries must look like R:w, got '" + item + "'");
        atoms.push_back({parse_double(parts[0]), parse_double(parts[1])});
      }
      return mixture(std::move(atoms));
    }
    if (kind == "powerlaw") {
      const auto dim_it = e.find("mu.dim");
      const int dim = dim_it == e.end() ? default_dim : static_cast<int>(parse_int(dim_it->second));
      return power_law(parse_double(get("mu.alpha")), dim, parse_double(get("mu.R_max")));
    }
    if (kind == "singular")
      return singular(parse_double(get("mu.alpha")), parse_double(get("mu.exponent")),
                      parse_double(get("mu.R_max")));
    throw std::invalid_argument("unknown mu.kind '" + kind +
                                "' (expected fixed, mixture, powerlaw or singular)");
  }

 private:
  void validate() const {
    std::visit(
        [](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, FixedRadius>) {
            if (!(m.radius > 0.0) || !std::isfinite(m.radius))
              throw std::invalid_argument("fixed radius must be finite and > 0");
          } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
            if (m.atoms.empty()) throw std::invalid_argument("mixture needs at least one atom");
            for (const auto& a : m.atoms)
              if (!(a.radius > 0.0) || !(a.weight > 0.0) || !std::isfinite(a.radius) ||
                  !std::isfinite(a.weight))
                throw std::invalid_argument("mixture atoms need finite R > 0 and w > 0");
          } else if constexpr (std::is_same_v<T, TruncatedPowerLaw>) {
            if (!(m.alpha > 0.0)) throw std::invalid_argument("power law alpha must be > 0");
            require_dimension(m.dim);
            if (!(m.r_max > 0.0)) throw std::invalid_argument("power law R_max must be > 0");
          } else {
            if (!(m.alpha > 0.0)) throw std::invalid_argument("singular alpha must be > 0");
            if (!(m.r_max > 0.0) || !std::isfinite(m.r_max))
              throw std::invalid_argument("singular R_max must be finite and > 0");
          }
        },
        v_);
  }

  // u = 1 + r turns (c + r)^p (1 + r)^(-q) into a finite sum of powers of u.
  static double power_law_mass(const TruncatedPowerLaw& m, double c, int p, double lo,
                               double hi) {
    const double a = std::max(lo, 0.0);
    const double b = std::min(hi, m.r_max);
    if (!(b > a)) return 0.0;
    const double q = 3.0 * m.dim + 1.0;
    double s = 0.0;
    for (int j = 0; j <= p; ++j) {
      const double coeff = detail::binomial(p, j) * std::pow(c - 1.0, p - j);
      if (coeff == 0.0) continue;
      const double e = j - q + 1.0;
      const double upper = detail::power_antiderivative(1.0 + b, e);
      if (std::isinf(upper)) return kInf;
      s += coeff * (upper - detail::power_antiderivative(1.0 + a, e));
    }
    return m.alpha * s;
  }

  static double singular_mass(const SingularPowerLaw& m, double c, int p, double lo, double hi) {
    const double a = std::max(lo, 0.0);
    const double b = std::min(hi, m.r_max);
    if (!(b > a)) return 0.0;
    double s = 0.0;
    for (int j = 0; j <= p; ++j) {
      const double coeff = detail::binomial(p, j) * std::pow(c, p - j);
      if (coeff == 0.0) continue;
      const double e = j - m.exponent + 1.0;
      if (a == 0.0 && e <= 0.0) return kInf;
      const double lower = a == 0.0 ? 0.0 : detail::power_antiderivative(a, e);
      s += coeff * (detail::power_antiderivative(b, e) - lower);
    }
    return m.alpha * s;
  }

  Variant v_;
};

// Rate at which a fixed point of R^d is covered by a reproduction event:
// the integral of V_R against mu.
inline double event_rate_point(const RadiusMeasure& mu, int d) {
  return unit_ball_volume(d) * mu.moment(d);
}

// Rate at which events of mu overlap a fixed ball of radius r.
inline double enlarged_ball_rate(const RadiusMeasure& mu, int d, double r) {
  return unit_ball_volume(d) * mu.weighted_mass(r, d, 0.0, kInf);
}

// Intensity of events with R > R_max, i.e. what a truncation at R_max drops
// from the point-cover rate.
inline double truncation_bias(const TruncatedPowerLaw& m, int d) {
  if (std::isinf(m.r_max)) return 0.0;
  const RadiusMeasure full = RadiusMeasure::power_law(m.alpha, m.dim, kInf);
  return unit_ball_volume(d) * full.weighted_mass(0.0, d, m.r_max, kInf);
}

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
  }
}

struct ConditionReport {
  Verdict verdict = Verdict::inconclusive;
  double r_tilde = 0.0;
  CoveringConstant covering;
  std::vector<double> partial_sums;  // n = 1..n_max
  double moment_d = 0.0;
  double tail_bound = kInf;  // bound on the series beyond n_max
  std::string reason;
};

// Partial sums of sum_n (int_{((n-1)R~, nR~]} (R~ + r)^d mu(dr)) (a_d n^(d-1) + 1),
// with a per-variant tail certificate.
inline ConditionReport check_condition_strong(const RadiusMeasure& mu, int d, double r_tilde,
                                              int n_max, double tail_tol) {
  if (!(r_tilde > 0.0)) throw std::invalid_argument("R~ must be > 0");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  ConditionReport rep;
  rep.r_tilde = r_tilde;
  rep.covering = covering_constant(d);
  rep.moment_d = mu.moment(d);
  if (!std::isfinite(rep.moment_d)) {
    rep.verdict = Verdict::fails;
    rep.reason = "integral of R^d mu(dR) diverges";
    return rep;
  }
  auto term = [&](int n) {
    return mu.weighted_mass(r_tilde, d, (n - 1) * r_tilde, n * r_tilde) *
           static_cast<double>(rep.covering.budget(n) + 1);
  };
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double t = term(n);
    if (!std::isfinite(t)) {
      rep.verdict = Verdict::fails;
      rep.reason = "series term " + std::to_string(n) + " diverges";
      return rep;
    }
    sum += t;
    rep.partial_sums.push_back(sum);
  }
  if (mu.has_bounded_support()) {
    // Finitely many nonzero terms: sum the remainder exactly.
    const int last = covering_tier(mu.sup_support(), r_tilde);
    double rest = 0.0;
    for (int n = n_max + 1; n <= last; ++n) rest += term(n);
    rep.tail_bound = rest;
    rep.verdict = Verdict::holds;
    rep.reason = "bounded support: " + std::to_string(last) + " nonzero terms";
    return rep;
  }
  if (const auto* pl = std::get_if<TruncatedPowerLaw>(&mu.variant())) {
    // For r > (n-1)R~: n <= C2 (1 + r) and R~ + r <= C1 (1 + r).
    const double q = 3.0 * pl->dim + 1.0;
    if (q > 2.0 * d && q > d + 1.0) {
      const double c1 = std::max(r_tilde, 1.0);
      const double c2 = std::max(1.0 / r_tilde, 1.0);
      const double a = 1.0 + n_max * r_tilde;
      rep.tail_bound =
          pl->alpha * std::pow(c1, d) *
          (rep.covering.a_d * std::pow(c2, d - 1) * std::pow(a, 2.0 * d - q) / (q - 2.0 * d) +
           std::pow(a, d + 1.0 - q) / (q - d - 1.0));
      if (rep.tail_bound < tail_tol) {
        rep.verdict = Verdict::holds;
        rep.reason = "power-law tail bound below tolerance";
      } else {
        rep.reason = "power-law tail bound above tolerance; increase n_max";
      }
      return rep;
    }
  }
  rep.reason = "no tail certificate for this measure";
  return rep;
}

// First radius in `grid` for which the condition holds.
inline std::optional<ConditionReport> find_condition_radius(const RadiusMeasure& mu, int d,
                                                            const std::vector<double>& grid,
                                                            int n_max = 1000,
                                                            double tail_tol = 1e-6) {
  for (double r : grid) {
    auto rep = check_condition_strong(mu, d, r, n_max, tail_tol);
    if (rep.verdict == Verdict::holds) return rep;
    if (rep.verdict == Verdict::fails) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace slfv
