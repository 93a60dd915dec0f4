#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace slfv {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  r.n = v.size();
  if (v.empty()) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return r;
}

// Proportion with the binomial standard error sqrt(p(1-p)/n).
inline MeanSe proportion(std::uint64_t hits, std::uint64_t n) {
  MeanSe r;
  r.n = n;
  if (n == 0) return r;
  r.mean = static_cast<double>(hits) / static_cast<double>(n);
  r.se = std::sqrt(r.mean * (1.0 - r.mean) / static_cast<double>(n));
  return r;
}

// Two-sided normal tail probability of |z|.
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Kolmogorov distribution tail Q(lambda) = P(K > lambda).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample KS against a continuous CDF (Stephens' small-n correction).
inline KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  KsResult r;
  const std::size_t n = sample.size();
  if (n == 0) return r;
  std::sort(sample.begin(), sample.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sample[i]);
    r.statistic = std::max({r.statistic, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(static_cast<double>(n));
  r.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * r.statistic);
  return r;
}

inline KsResult ks_test_exponential(std::vector<double> sample, double rate) {
  return ks_test(std::move(sample), [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
}

// Two-sample KS. Ties are handled by advancing both samples together.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  KsResult r;
  if (a.empty() || b.empty()) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    r.statistic = std::max(r.statistic, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * r.statistic);
  return r;
}

// Worker count: SLFV_THREADS if set and positive, else the hardware count.
inline unsigned replica_threads() {
  if (const char* env = std::getenv("SLFV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, n) over contiguous chunks. fn must only write
// state owned by index i. If any call throws, the exception of the smallest
// failing index is rethrown, so failures do not depend on the thread count.
template <class Fn>
void parallel_for_replicas(std::size_t n, Fn&& fn, unsigned threads = replica_threads()) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads, n);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const auto first = std::min_element(error_index.begin(), error_index.end()) - error_index.begin();
  if (errors[first]) std::rethrow_exception(errors[first]);
}

}  // namespace slfv
