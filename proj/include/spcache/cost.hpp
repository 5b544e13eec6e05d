// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_COST_HPP
#define SPCACHE_COST_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spcache/strategies.hpp"

namespace spcache {

/// Parameters of the capped power-law cost: each retrieved part costs
/// min(distance^exponent, cap_distance^exponent).
struct CostSpec {
  double exponent = 2.0;      // a
  double cap_distance = 700.0;  // delta_max, meters

  void validate() const {
    if (!(exponent > 0.0))
      throw std::domain_error("CostSpec: exponent must be positive");
    if (!(cap_distance > 0.0))
      throw std::domain_error("CostSpec: cap distance must be positive");
  }
};

/// Parameters of the miss indicator: clients reach caches within `range`.
struct MissSpec {
  double range = 700.0;  // r, meters

  void validate() const {
    if (!(range > 0.0)) throw std::domain_error("MissSpec: range must be positive");
  }
};

/// Realized delivery cost: sum of capped per-part costs over the recovered
/// parts, plus the cap value for every part the delivery failed to recover.
/// Always in [0, k * cap_distance^exponent].
inline double delivery_cost(const DeliveryResult& delivery, std::size_t k,
                            const CostSpec& spec) {
  spec.validate();
  const double cap = std::pow(spec.cap_distance, spec.exponent);
  double total = 0.0;
  for (double d : delivery.distances)
    total += std::min(std::pow(d, spec.exponent), cap);
  if (delivery.parts() < k)
    total += static_cast<double>(k - delivery.parts()) * cap;
  return total;
}

/// 1 if the delivery misses (incomplete, or some contacted cache is out of
/// range), 0 otherwise.
inline int miss_indicator(const DeliveryResult& delivery, std::size_t k,
                          const MissSpec& spec) {
  spec.validate();
  if (!delivery.complete || delivery.parts() < k) return 1;
  for (double d : delivery.distances)
    if (d > spec.range) return 1;
  return 0;
}

}  // namespace spcache

#endif  // SPCACHE_COST_HPP
