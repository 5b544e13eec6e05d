// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_ANALYTIC_HPP
#define SPCACHE_ANALYTIC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace spcache {

// ---------------------------------------------------------------------------
// Incomplete gamma machinery.
//
// Integer order goes through the exact Poisson partial-sum identity
//   Gamma(n, x) / Gamma(n) = sum_{i<n} exp(-x + i ln x - ln i!),
// with every term evaluated in log space so large x cannot overflow.
// Real order uses the classic split: power series below x = s+1, continued
// fraction (modified Lentz) above it.
// ---------------------------------------------------------------------------

/// Regularized upper incomplete gamma of integer order: Gamma(n,x)/Gamma(n).
inline double gamma_q_int(std::int64_t n, double x) {
  if (n < 1) throw std::domain_error("gamma_q_int: n must be >= 1");
  if (!(x >= 0.0)) throw std::domain_error("gamma_q_int: x must be >= 0");
  if (x == 0.0) return 1.0;
  const double lx = std::log(x);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = -x + static_cast<double>(i) * lx -
                     std::lgamma(static_cast<double>(i) + 1.0);
    sum += std::exp(t);
  }
  return sum < 1.0 ? sum : 1.0;
}

namespace detail {

inline constexpr double kGammaEps = 1e-15;
inline constexpr int kGammaMaxIter = 10000;

// Series for the regularized lower incomplete gamma, x < s+1.
inline double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Continued fraction for the regularized upper incomplete gamma, x >= s+1.
inline double gamma_q_contfrac(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kGammaEps) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s), real s>0.
inline double gamma_p(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("gamma_p: s must be positive");
  if (!(x >= 0.0)) throw std::domain_error("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return detail::gamma_p_series(s, x);
  return 1.0 - detail::gamma_q_contfrac(s, x);
}

/// Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s), real s>0.
inline double gamma_q(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("gamma_q: s must be positive");
  if (!(x >= 0.0)) throw std::domain_error("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
  return detail::gamma_q_contfrac(s, x);
}

/// Upper incomplete gamma Gamma(s,x), unregularized.
inline double gamma_upper(double s, double x) {
  return gamma_q(s, x) * std::tgamma(s);
}

/// Lower incomplete gamma gamma(s,x), unregularized.
inline double gamma_lower(double s, double x) {
  return gamma_p(s, x) * std::tgamma(s);
}

// ---------------------------------------------------------------------------
// Model parameters and closed-form expected costs / miss probabilities.
// ---------------------------------------------------------------------------

/// Parameters of the planar caching model. Distances are meters; `intensity`
/// is caches per square meter.
struct ModelParams {
  double intensity = 1.8324e-5;  // lambda
  std::int64_t parts = 1;        // k
  double exponent = 2.0;         // a
  double cap_distance = 700.0;   // delta_max
  double range = 700.0;          // r
  double field_size = 256.0;     // q, real-valued so q -> infinity is expressible
  std::optional<double> cost_bound;  // Gmax override for the cost measure

  void validate() const {
    if (!(intensity > 0.0))
      throw std::domain_error("ModelParams: intensity must be positive");
    if (parts < 1) throw std::domain_error("ModelParams: parts must be >= 1");
    if (!(exponent > 0.0))
      throw std::domain_error("ModelParams: exponent must be positive");
    if (!(cap_distance > 0.0))
      throw std::domain_error("ModelParams: cap distance must be positive");
    if (!(range > 0.0)) throw std::domain_error("ModelParams: range must be positive");
    if (!(field_size >= 2.0))
      throw std::domain_error("ModelParams: field size must be >= 2");
  }

  double lambda_pi() const noexcept { return intensity * std::numbers::pi; }
  double b() const noexcept { return exponent / 2.0 + 1.0; }
  double d() const noexcept { return lambda_pi() * cap_distance * cap_distance; }

  /// Uniform bound on the cost measure; the capped power-law supremum unless
  /// overridden.
  double cost_bound_value() const {
    return cost_bound.value_or(static_cast<double>(parts) *
                               std::pow(cap_distance, exponent));
  }
};

/// Expected cost of the uncoded (partitioning) strategy over an HPP field.
inline double expected_cost_uncoded(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double b = p.b();
  const double d = p.d();
  const double cap = std::pow(p.cap_distance, p.exponent);
  return k * std::pow(k / p.lambda_pi(), p.exponent / 2.0) *
             gamma_lower(b, d / k) +
         k * cap * std::exp(-d / k);
}

/// Expected cost of contacting the k nearest caches over an HPP field: the
/// coded strategy's lower bound.
inline double expected_cost_coded_min(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double b = p.b();
  const double d = p.d();
  const double cap = std::pow(p.cap_distance, p.exponent);
  // The d^(b-1) / (lambda pi)^(b-1) factors collapse to cap_distance^a, which
  // keeps the expression finite as d -> 0.
  const double t1 = gamma_p(k + b, d) *
                    std::exp(std::lgamma(k + b) - std::lgamma(k)) /
                    (std::pow(p.lambda_pi(), b - 1.0) * b);
  const double t2 = cap * k * gamma_q_int(p.parts + 1, d);
  const double t3 = cap * ((b - 1.0) / b) * d * gamma_q_int(p.parts, d);
  return t1 + t2 - t3;
}

/// cap_distance -> infinity limit of expected_cost_uncoded.
inline double expected_cost_uncoded_limit(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  return k * std::pow(k / p.lambda_pi(), p.exponent / 2.0) *
         std::tgamma(1.0 + p.exponent / 2.0);
}

/// cap_distance -> infinity limit of expected_cost_coded_min.
inline double expected_cost_coded_min_limit(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double half_a = p.exponent / 2.0;
  return std::exp(std::lgamma(k + 1.0 + half_a) - std::lgamma(k)) /
         ((1.0 + half_a) * std::pow(p.lambda_pi(), half_a));
}

/// Cost ratio uncoded/coded in the uncapped limit:
/// (1 + a/2) k^(1+a/2) B(k, 1 + a/2). Equals 1 at k = 1, increases in k.
inline double benefit_ratio(std::int64_t k, double exponent) {
  if (k < 1) throw std::domain_error("benefit_ratio: k must be >= 1");
  if (!(exponent > 0.0))
    throw std::domain_error("benefit_ratio: exponent must be positive");
  if (k == 1) return 1.0;
  const double b = 1.0 + exponent / 2.0;
  const double kd = static_cast<double>(k);
  return b * std::exp(b * std::log(kd) + std::lgamma(kd) + std::lgamma(b) -
                      std::lgamma(kd + b));
}

/// k -> infinity limit of benefit_ratio: (a/2 + 1) Gamma(a/2 + 1).
inline double benefit_limit(double exponent) {
  if (!(exponent > 0.0))
    throw std::domain_error("benefit_limit: exponent must be positive");
  const double b = exponent / 2.0 + 1.0;
  return b * std::tgamma(b);
}

/// Rank-deficiency penalty: Gmax * (1 - (1 - 1/q)^k).
inline double rank_deficiency_penalty(const ModelParams& p) {
  p.validate();
  return p.cost_bound_value() *
         -std::expm1(static_cast<double>(p.parts) * std::log1p(-1.0 / p.field_size));
}

/// Upper bound on the coded strategy's expected cost:
/// expected_cost_coded_min + Gmax (1 - (1 - 1/q)^k).
inline double coded_cost_upper(const ModelParams& p) {
  return expected_cost_coded_min(p) + rank_deficiency_penalty(p);
}

namespace detail {

// log(1 - exp(-mu)) without cancellation on either side of mu = 1.
inline double log_one_minus_exp_neg(double mu) {
  return mu < 1.0 ? std::log(-std::expm1(-mu)) : std::log1p(-std::exp(-mu));
}

}  // namespace detail

/// Miss probability of the uncoded strategy: 1 - (1 - e^(-lpr^2/k))^k.
inline double miss_uncoded(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double mu = p.lambda_pi() * p.range * p.range / k;
  return -std::expm1(k * detail::log_one_minus_exp_neg(mu));
}

/// Miss probability of the coded lower bound: Gamma(k, lpr^2)/Gamma(k).
inline double miss_coded_min(const ModelParams& p) {
  p.validate();
  return gamma_q_int(p.parts, p.lambda_pi() * p.range * p.range);
}

/// Large-k approximation 1 - (lpr^2)^k / k^k. No accuracy contract; exposed
/// for comparison plots.
inline double miss_asymptotic_uncoded(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double x = p.lambda_pi() * p.range * p.range;
  if (x == 0.0) return 1.0;
  return 1.0 - std::exp(k * (std::log(x) - std::log(k)));
}

/// Large-k approximation 1 - e^(-lpr^2) (lpr^2)^k / k!.
inline double miss_asymptotic_coded(const ModelParams& p) {
  p.validate();
  const double k = static_cast<double>(p.parts);
  const double x = p.lambda_pi() * p.range * p.range;
  if (x == 0.0) return 1.0;
  return 1.0 - std::exp(-x + k * std::log(x) - std::lgamma(k + 1.0));
}

enum class MissLaw { uncoded, coded };

/// Largest k (up to the scan cap) whose exact miss probability stays within
/// `epsilon`; 0 if even k = 1 exceeds it. Miss probabilities increase in k
/// for both laws, so an increasing scan is exact.
inline std::int64_t max_parts_for_miss(const ModelParams& p, double epsilon,
                                       MissLaw law,
                                       std::int64_t scan_cap = 10000) {
  p.validate();
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("max_parts_for_miss: epsilon must be in (0, 1)");
  const double x = p.lambda_pi() * p.range * p.range;
  const double lx = std::log(x);
  double log_term = -x;   // log of e^-x x^i / i! at i = 0
  double cdf = 0.0;       // coded law: P(Poisson(x) <= k-1), built incrementally
  std::int64_t best = 0;
  for (std::int64_t k = 1; k <= scan_cap; ++k) {
    double miss;
    if (law == MissLaw::coded) {
      cdf += std::exp(log_term);
      log_term += lx - std::log(static_cast<double>(k));
      miss = cdf < 1.0 ? cdf : 1.0;
    } else {
      const double kd = static_cast<double>(k);
      miss = -std::expm1(kd * detail::log_one_minus_exp_neg(x / kd));
    }
    if (miss > epsilon) return best;
    best = k;
  }
  return best;
}

}  // namespace spcache

#endif  // SPCACHE_ANALYTIC_HPP
