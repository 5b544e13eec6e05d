// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_MONTECARLO_HPP
#define SPCACHE_MONTECARLO_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "spcache/analytic.hpp"
#include "spcache/cost.hpp"
#include "spcache/field.hpp"
#include "spcache/geometry.hpp"
#include "spcache/rng.hpp"
#include "spcache/strategies.hpp"

namespace spcache {

enum class Measure { cost, miss };

inline const char* measure_name(Measure m) {
  return m == Measure::cost ? "cost" : "miss";
}

// Stream tags keep the per-purpose random streams of one experiment disjoint.
inline constexpr std::uint64_t kStreamGeometry = 0;
inline constexpr std::uint64_t kStreamUncoded = 1;
inline constexpr std::uint64_t kStreamCoded = 2;
inline constexpr std::uint64_t kStreamIncrements = 3;

/// A reproducible replicated experiment.
///
/// Fields come either from a fresh HPP draw per process replication (the
/// truncation region is a disk around the client of radius cap_distance for
/// the cost measure, `range` for the miss measure; parts the delivery cannot
/// recover inside it are charged the cap / counted as misses, which matches
/// the unbounded-plane expectation exactly) or from a fixed imported station
/// field over which the client position is redrawn per process replication.
struct SimPlan {
  std::optional<double> intensity;      // HPP source: lambda per m^2
  std::optional<CacheField> stations;   // imported source
  BorderPolicy client_policy = BorderPolicy::centered(0.5);  // stations only

  std::size_t parts = 1;  // k
  Strategy strategy = Strategy::uncoded;
  Measure measure = Measure::cost;
  CostSpec cost{};
  MissSpec miss{};
  std::uint32_t field_size = 256;  // q, coded strategies

  std::size_t n_process = 500;
  std::size_t n_alloc = 100;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency; never affects results

  void validate() const {
    if (intensity.has_value() == stations.has_value())
      throw std::domain_error("SimPlan: exactly one field source required");
    if (intensity && !(*intensity > 0.0))
      throw std::domain_error("SimPlan: intensity must be positive");
    if (stations && stations->empty())
      throw std::domain_error("SimPlan: station field is empty");
    if (parts < 1) throw std::domain_error("SimPlan: parts must be >= 1");
    if (n_process < 1 || n_alloc < 1)
      throw std::domain_error("SimPlan: replication counts must be >= 1");
    if (measure == Measure::cost) cost.validate();
    else miss.validate();
    if ((strategy == Strategy::coded || strategy == Strategy::coded_fast) &&
        field_size < 2)
      throw std::domain_error("SimPlan: field size must be >= 2");
  }
};

/// Mean and standard error of a replicated experiment.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
  Strategy strategy = Strategy::uncoded;
  Measure measure = Measure::cost;
  double seconds = 0.0;  // wall clock; informational only
};

namespace detail {

// Fixed-tree pairwise summation: bit-identical regardless of thread count.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double sample_std_error(std::span<const double> v, double mean) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    sq[i] = d * d;
  }
  const double ss = pairwise_sum(sq);
  return std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
}

// Standard error of the grand mean under the replicated design: samples
// within one process replication share a field, so the estimator's error is
// the spread of the n_process independent process means, not the naive
// i.i.d. formula over all n_process * n_alloc samples.
inline double clustered_std_error(std::span<const double> samples,
                                  std::size_t n_process, std::size_t n_alloc,
                                  double mean) {
  if (n_process < 2) return sample_std_error(samples, mean);
  if (n_alloc == 1) return sample_std_error(samples, mean);
  std::vector<double> process_means(n_process);
  for (std::size_t p = 0; p < n_process; ++p)
    process_means[p] =
        pairwise_sum(samples.subspan(p * n_alloc, n_alloc)) /
        static_cast<double>(n_alloc);
  return sample_std_error(process_means, mean);
}

inline double binomial_std_error(double p_hat, std::uint64_t n) {
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

inline DeliveryResult delivery_from_ranks(const std::vector<std::uint64_t>& ranks,
                                          const DistanceOrder& order,
                                          std::size_t k) {
  DeliveryResult res;
  for (std::uint64_t r : ranks) {
    if (r > order.count()) break;  // ranks are increasing
    res.ranks.push_back(static_cast<std::size_t>(r));
    res.distances.push_back(order.distance(static_cast<std::size_t>(r)));
  }
  res.complete = res.ranks.size() == k;
  return res;
}

inline DeliveryResult deliver_nearest_k(const DistanceOrder& order,
                                        std::size_t k) {
  DeliveryResult res;
  const std::size_t m = order.count() < k ? order.count() : k;
  for (std::size_t rank = 1; rank <= m; ++rank) {
    res.ranks.push_back(rank);
    res.distances.push_back(order.distance(rank));
  }
  res.complete = order.count() >= k;
  return res;
}

// One process replication: draw the field (or client), then fill the
// per-allocation measure samples for the requested strategies.
struct ProcessContext {
  const SimPlan* plan;
  const Field* gf;  // built once; null unless a coded strategy is involved
};

inline void run_process_replication(const ProcessContext& ctx, std::size_t p,
                                    std::span<const Strategy> strategies,
                                    std::span<double* const> out) {
  const SimPlan& plan = *ctx.plan;
  RngStream geo(plan.seed, kStreamGeometry, p, 0);
  const CacheField* field = nullptr;
  CacheField drawn;
  Point client{0.0, 0.0};
  if (plan.stations) {
    field = &*plan.stations;
    client = sample_client(field->region, plan.client_policy, geo);
  } else {
    const double radius = plan.measure == Measure::cost
                              ? plan.cost.cap_distance
                              : plan.miss.range;
    drawn = sample_hpp(*plan.intensity, Region::disk(client, radius), geo);
    field = &drawn;
  }
  std::optional<DistanceOrder> order;
  if (!field->empty()) order = order_by_distance(*field, client);

  const std::size_t k = plan.parts;
  for (std::size_t a = 0; a < plan.n_alloc; ++a) {
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const Strategy strategy = strategies[s];
      DeliveryResult dr;  // field exhausted / empty: incomplete, no parts
      if (order) {
        switch (strategy) {
          case Strategy::uncoded: {
            RngStream al(plan.seed, kStreamUncoded, p, a);
            dr = deliver_uncoded(allocate_uncoded(field->size(), k, al), *order);
            break;
          }
          case Strategy::coded: {
            RngStream al(plan.seed, kStreamCoded, p, a);
            dr = deliver_coded(allocate_coded(field->size(), k, *ctx.gf, al),
                               *order);
            break;
          }
          case Strategy::coded_fast: {
            RngStream al(plan.seed, kStreamCoded, p, a);
            dr = delivery_from_ranks(
                sample_contact_ranks(Strategy::coded, k, plan.field_size, al),
                *order, k);
            break;
          }
          case Strategy::nearest_k:
            dr = deliver_nearest_k(*order, k);
            break;
        }
      }
      const double value = plan.measure == Measure::cost
                               ? delivery_cost(dr, k, plan.cost)
                               : static_cast<double>(miss_indicator(dr, k, plan.miss));
      out[s][p * plan.n_alloc + a] = value;
    }
  }
}

inline void run_all_replications(const ProcessContext& ctx,
                                 std::span<const Strategy> strategies,
                                 std::span<double* const> out) {
  const SimPlan& plan = *ctx.plan;
  const unsigned workers =
      plan.workers ? plan.workers
                   : std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || plan.n_process == 1) {
    for (std::size_t p = 0; p < plan.n_process; ++p)
      run_process_replication(ctx, p, strategies, out);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t p = next.fetch_add(1, std::memory_order_relaxed);
      if (p >= plan.n_process) return;
      run_process_replication(ctx, p, strategies, out);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

inline Estimate summarize(const SimPlan& plan, Strategy strategy,
                          std::span<const double> samples, double seconds) {
  Estimate e;
  e.count = samples.size();
  e.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  e.std_error =
      plan.measure == Measure::miss
          ? binomial_std_error(e.mean, e.count)
          : clustered_std_error(samples, plan.n_process, plan.n_alloc, e.mean);
  e.strategy = strategy;
  e.measure = plan.measure;
  e.seconds = seconds;
  return e;
}

}  // namespace detail

/// Runs the plan. Identical plan + seed gives bit-identical mean/std_error
/// for any worker count: every replication owns a stream keyed by
/// (seed, stream tag, process index, allocation index) and accumulation uses
/// a fixed-order pairwise tree.
inline Estimate run_estimate(const SimPlan& plan) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Field> gf;
  if (plan.strategy == Strategy::coded)
    gf = Field::of_size(plan.field_size);
  std::vector<double> samples(plan.n_process * plan.n_alloc);
  const Strategy strategies[1] = {plan.strategy};
  double* outs[1] = {samples.data()};
  detail::ProcessContext ctx{&plan, gf ? &*gf : nullptr};
  detail::run_all_replications(ctx, strategies, outs);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return detail::summarize(plan, plan.strategy, samples, secs);
}

/// run_estimate restricted to the miss measure.
inline Estimate run_miss_estimate(const SimPlan& plan) {
  if (plan.measure != Measure::miss)
    throw std::domain_error("run_miss_estimate: plan measure must be miss");
  return run_estimate(plan);
}

/// Paired comparison: uncoded and coded evaluated on the same fields and
/// clients with independent allocation draws. diff_* summarize the
/// per-sample (uncoded - coded) differences.
struct PairedCost {
  Estimate uncoded;
  Estimate coded;
  double diff_mean = 0.0;
  double diff_std_error = 0.0;
};

inline PairedCost run_paired_cost(const SimPlan& plan) {
  plan.validate();
  if (plan.measure != Measure::cost)
    throw std::domain_error("run_paired_cost: plan measure must be cost");
  const auto t0 = std::chrono::steady_clock::now();
  const Field gf = Field::of_size(plan.field_size);
  const std::size_t n = plan.n_process * plan.n_alloc;
  std::vector<double> uncoded(n), coded(n);
  const Strategy strategies[2] = {Strategy::uncoded, Strategy::coded};
  double* outs[2] = {uncoded.data(), coded.data()};
  detail::ProcessContext ctx{&plan, &gf};
  detail::run_all_replications(ctx, strategies, outs);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  PairedCost pc;
  pc.uncoded = detail::summarize(plan, Strategy::uncoded, uncoded, secs);
  pc.coded = detail::summarize(plan, Strategy::coded, coded, secs);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = uncoded[i] - coded[i];
  pc.diff_mean = detail::pairwise_sum(diff) / static_cast<double>(n);
  pc.diff_std_error = detail::clustered_std_error(diff, plan.n_process,
                                                  plan.n_alloc, pc.diff_mean);
  return pc;
}

/// Pearson chi-square of observed increment counts against the geometric law
/// with failure parameter g. Bins with expected count below `min_expected`
/// are pooled into the tail.
struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

inline ChiSquareResult geometric_chi_square(
    const std::vector<std::uint64_t>& counts, double g, std::uint64_t n,
    double min_expected = 5.0) {
  if (!(g > 0.0) || g >= 1.0)
    throw std::domain_error("geometric_chi_square: g must be in (0, 1)");
  if (n == 0) throw std::domain_error("geometric_chi_square: no samples");
  const double nd = static_cast<double>(n);
  // Individual bins j = 1..cut-1, then one tail bin for j >= cut. Choose the
  // largest cut whose every bin (tail included) has expected >= min_expected.
  std::size_t cut = 1;
  double head_p = 0.0;  // P(N < cut)
  for (;;) {
    const double p_j = (1.0 - g) * std::pow(g, static_cast<double>(cut) - 1.0);
    const double tail_after = std::pow(g, static_cast<double>(cut));  // P(N > cut)
    if (nd * p_j < min_expected || nd * tail_after < min_expected) break;
    head_p += p_j;
    ++cut;
  }
  std::uint64_t tail_observed = n;
  double stat = 0.0;
  for (std::size_t j = 1; j < cut; ++j) {
    const double expect = nd * (1.0 - g) * std::pow(g, static_cast<double>(j) - 1.0);
    const std::uint64_t obs = j <= counts.size() ? counts[j - 1] : 0;
    tail_observed -= obs;
    const double d = static_cast<double>(obs) - expect;
    stat += d * d / expect;
  }
  const double tail_expect = nd * (1.0 - head_p);
  const double d = static_cast<double>(tail_observed) - tail_expect;
  stat += d * d / tail_expect;
  ChiSquareResult r;
  r.statistic = stat;
  r.dof = static_cast<int>(cut) - 1;
  if (r.dof < 1) r.dof = 1;
  r.p_value = gamma_q(static_cast<double>(r.dof) / 2.0, stat / 2.0);
  return r;
}

/// Empirical distribution of the step-i rank increment I_i - I_{i-1} from
/// the explicit delivery path, with its goodness of fit to the geometric law.
struct StepHistogram {
  std::size_t step = 0;          // i, 2..k
  double failure_param = 0.0;    // g_i
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> counts;  // counts[j] = occurrences of increment j+1
  ChiSquareResult gof;

  double mean_increment() const {
    double s = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      s += static_cast<double>(counts[j]) * static_cast<double>(j + 1);
    return s / static_cast<double>(samples);
  }
};

/// Runs the explicit delivery scan (real label draws / real GF(q) rank
/// checks, caches materialized lazily in rank order) over a field large
/// enough that exhaustion is negligible, and histograms the rank increments
/// of steps 2..k.
inline std::vector<StepHistogram> run_increment_histogram(
    Strategy strategy, std::size_t k, std::uint32_t q, std::size_t n_samples,
    std::uint64_t seed) {
  if (k < 2) throw std::domain_error("run_increment_histogram: k must be >= 2");
  if (n_samples < 1)
    throw std::domain_error("run_increment_histogram: need samples");
  if (strategy != Strategy::uncoded && strategy != Strategy::coded)
    throw std::domain_error(
        "run_increment_histogram: strategy must be uncoded or coded");
  std::optional<Field> gf;
  if (strategy == Strategy::coded) gf = Field::of_size(q);
  const std::uint64_t scan_cap =
      static_cast<std::uint64_t>(k) +
      50ull * static_cast<std::uint64_t>(k) * std::max<std::uint64_t>(q, k);

  std::vector<std::vector<std::uint64_t>> counts(k + 1);
  for (std::size_t s = 0; s < n_samples; ++s) {
    RngStream rng(seed, kStreamIncrements, s, 0);
    std::size_t found = 0;
    std::uint64_t prev_rank = 0;
    if (strategy == Strategy::coded) {
      EchelonBasis basis(*gf, k);
      for (std::uint64_t rank = 1; rank <= scan_cap && found < k; ++rank) {
        if (!basis.insert(random_coef_vector(*gf, k, rng))) continue;
        ++found;
        if (found >= 2) {
          const std::uint64_t inc = rank - prev_rank;
          auto& c = counts[found];
          if (inc > c.size()) c.resize(inc, 0);
          ++c[inc - 1];
        }
        prev_rank = rank;
      }
    } else {
      std::vector<char> seen(k + 1, 0);
      for (std::uint64_t rank = 1; rank <= scan_cap && found < k; ++rank) {
        const std::size_t label = 1 + rng.uniform_below(k);
        if (seen[label]) continue;
        seen[label] = 1;
        ++found;
        if (found >= 2) {
          const std::uint64_t inc = rank - prev_rank;
          auto& c = counts[found];
          if (inc > c.size()) c.resize(inc, 0);
          ++c[inc - 1];
        }
        prev_rank = rank;
      }
    }
  }

  std::vector<StepHistogram> result;
  result.reserve(k - 1);
  for (std::size_t i = 2; i <= k; ++i) {
    StepHistogram h;
    h.step = i;
    h.failure_param = increment_failure_param(strategy, k, q, i);
    h.counts = std::move(counts[i]);
    std::uint64_t total = 0;
    for (std::uint64_t c : h.counts) total += c;
    h.samples = total;
    h.gof = geometric_chi_square(h.counts, h.failure_param, total);
    result.push_back(std::move(h));
  }
  return result;
}

}  // namespace spcache

#endif  // SPCACHE_MONTECARLO_HPP
