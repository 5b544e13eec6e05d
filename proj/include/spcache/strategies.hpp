// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_STRATEGIES_HPP
#define SPCACHE_STRATEGIES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spcache/field.hpp"
#include "spcache/geometry.hpp"
#include "spcache/rng.hpp"

namespace spcache {

enum class Strategy { uncoded, coded, coded_fast, nearest_k };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::uncoded: return "uncoded";
    case Strategy::coded: return "coded";
    case Strategy::coded_fast: return "coded-fast";
    case Strategy::nearest_k: return "nearest-k";
  }
  return "?";
}

/// Per-cache stored content: a part label in {1..k} (uncoded) or a length-k
/// coefficient vector over GF(q) (coded). The coded variant borrows the
/// Field, which must outlive the allocation.
struct Allocation {
  enum class Kind { uncoded, coded };

  Kind kind = Kind::uncoded;
  std::size_t k = 0;
  std::vector<std::uint32_t> labels;  // uncoded
  std::vector<CoefVector> vectors;    // coded
  const Field* field = nullptr;       // coded

  std::size_t size() const noexcept {
    return kind == Kind::uncoded ? labels.size() : vectors.size();
  }
};

/// Ranks (1-based, strictly increasing) of the caches a client contacts, the
/// distances at those ranks, and whether all k parts were recovered.
struct DeliveryResult {
  std::vector<std::size_t> ranks;
  std::vector<double> distances;
  bool complete = false;

  std::size_t parts() const noexcept { return ranks.size(); }
};

inline Allocation allocate_uncoded(std::size_t n_caches, std::size_t k,
                                   RngStream& rng) {
  if (k == 0) throw std::domain_error("allocate_uncoded: k must be >= 1");
  Allocation a;
  a.kind = Allocation::Kind::uncoded;
  a.k = k;
  a.labels.resize(n_caches);
  for (auto& label : a.labels)
    label = 1 + static_cast<std::uint32_t>(rng.uniform_below(k));
  return a;
}

inline Allocation allocate_coded(std::size_t n_caches, std::size_t k,
                                 const Field& field, RngStream& rng) {
  if (k == 0) throw std::domain_error("allocate_coded: k must be >= 1");
  Allocation a;
  a.kind = Allocation::Kind::coded;
  a.k = k;
  a.field = &field;
  a.vectors.reserve(n_caches);
  for (std::size_t i = 0; i < n_caches; ++i)
    a.vectors.push_back(random_coef_vector(field, k, rng));
  return a;
}

/// Uncoded delivery: for each label the nearest cache holding it.
inline DeliveryResult deliver_uncoded(const Allocation& alloc,
                                      const DistanceOrder& order) {
  if (alloc.kind != Allocation::Kind::uncoded)
    throw std::domain_error("deliver_uncoded: allocation is not uncoded");
  if (alloc.size() != order.count())
    throw std::domain_error("deliver_uncoded: allocation/field size mismatch");
  const std::size_t k = alloc.k;
  DeliveryResult res;
  std::vector<char> seen(k + 1, 0);
  std::size_t found = 0;
  for (std::size_t rank = 1; rank <= order.count() && found < k; ++rank) {
    const std::uint32_t label = alloc.labels[order.cache_index(rank)];
    if (seen[label]) continue;
    seen[label] = 1;
    ++found;
    res.ranks.push_back(rank);
    res.distances.push_back(order.distance(rank));
  }
  res.complete = (found == k);
  return res;
}

/// Coded delivery: scan caches by rank, keeping exactly those whose vectors
/// are linearly independent of everything collected so far; stop at rank k.
inline DeliveryResult deliver_coded(const Allocation& alloc,
                                    const DistanceOrder& order) {
  if (alloc.kind != Allocation::Kind::coded)
    throw std::domain_error("deliver_coded: allocation is not coded");
  if (alloc.size() != order.count())
    throw std::domain_error("deliver_coded: allocation/field size mismatch");
  const std::size_t k = alloc.k;
  DeliveryResult res;
  EchelonBasis basis(*alloc.field, k);
  for (std::size_t rank = 1; rank <= order.count() && basis.rank() < k;
       ++rank) {
    if (basis.insert(alloc.vectors[order.cache_index(rank)])) {
      res.ranks.push_back(rank);
      res.distances.push_back(order.distance(rank));
    }
  }
  res.complete = basis.full_rank();
  return res;
}

/// Samples the contacted-rank vector (I_1, ..., I_k) directly from the
/// geometric-increment law that delivery over an unbounded field obeys:
/// I_1 = 1 and I_i - I_{i-1} is geometric on {1,2,...} with failure
/// parameter q^(i-1-k) (coded) or (i-1)/k (uncoded).
inline std::vector<std::uint64_t> sample_contact_ranks(Strategy strategy,
                                                       std::size_t k,
                                                       std::uint32_t q,
                                                       RngStream& rng) {
  if (k == 0) throw std::domain_error("sample_contact_ranks: k must be >= 1");
  if (strategy != Strategy::uncoded && strategy != Strategy::coded)
    throw std::domain_error(
        "sample_contact_ranks: strategy must be uncoded or coded");
  if (strategy == Strategy::coded && q < 2)
    throw std::domain_error("sample_contact_ranks: q must be >= 2");
  std::vector<std::uint64_t> ranks;
  ranks.reserve(k);
  std::uint64_t current = 1;
  ranks.push_back(current);
  for (std::size_t i = 2; i <= k; ++i) {
    const double g =
        strategy == Strategy::coded
            ? std::pow(static_cast<double>(q),
                       static_cast<double>(i) - 1.0 - static_cast<double>(k))
            : (static_cast<double>(i) - 1.0) / static_cast<double>(k);
    current += rng.geometric_failure(g);
    ranks.push_back(current);
  }
  return ranks;
}

/// Failure parameter of the step-i increment (i >= 1).
inline double increment_failure_param(Strategy strategy, std::size_t k,
                                      std::uint32_t q, std::size_t i) {
  if (i < 1 || i > k) throw std::domain_error("increment_failure_param: bad i");
  if (strategy == Strategy::coded)
    return std::pow(static_cast<double>(q),
                    static_cast<double>(i) - 1.0 - static_cast<double>(k));
  return (static_cast<double>(i) - 1.0) / static_cast<double>(k);
}

}  // namespace spcache

#endif  // SPCACHE_STRATEGIES_HPP
