// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_SPCACHE_HPP
#define SPCACHE_SPCACHE_HPP

#include "spcache/analytic.hpp"
#include "spcache/cost.hpp"
#include "spcache/field.hpp"
#include "spcache/geometry.hpp"
#include "spcache/montecarlo.hpp"
#include "spcache/rng.hpp"
#include "spcache/stations.hpp"
#include "spcache/strategies.hpp"

#endif  // SPCACHE_SPCACHE_HPP
