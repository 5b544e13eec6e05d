// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_GEOMETRY_HPP
#define SPCACHE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "spcache/rng.hpp"

namespace spcache {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Planar region, rectangle or disk, in meters. Dimensions may be zero
/// (degenerate bounding boxes of imported data) but never negative.
struct Region {
  enum class Kind { rectangle, disk };

  Kind kind = Kind::rectangle;
  Point origin{};  // rectangle: lower-left corner
  double width = 0.0;
  double height = 0.0;
  Point center{};  // disk
  double radius = 0.0;

  static Region rectangle(double x0, double y0, double width, double height) {
    if (width < 0.0 || height < 0.0 || !std::isfinite(width) ||
        !std::isfinite(height))
      throw std::domain_error("Region: rectangle dimensions must be >= 0");
    Region r;
    r.kind = Kind::rectangle;
    r.origin = {x0, y0};
    r.width = width;
    r.height = height;
    return r;
  }

  static Region disk(Point center, double radius) {
    if (radius < 0.0 || !std::isfinite(radius))
      throw std::domain_error("Region: disk radius must be >= 0");
    Region r;
    r.kind = Kind::disk;
    r.center = center;
    r.radius = radius;
    return r;
  }

  double area() const noexcept {
    return kind == Kind::rectangle ? width * height
                                   : std::numbers::pi * radius * radius;
  }

  bool contains(Point p) const noexcept {
    if (kind == Kind::rectangle)
      return p.x >= origin.x && p.x <= origin.x + width && p.y >= origin.y &&
             p.y <= origin.y + height;
    return distance(p, center) <= radius;
  }

  /// Uniform sample on the region.
  Point sample(RngStream& rng) const {
    if (kind == Kind::rectangle)
      return {origin.x + rng.uniform01() * width,
              origin.y + rng.uniform01() * height};
    const double rho = radius * std::sqrt(rng.uniform01());
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    return {center.x + rho * std::cos(theta), center.y + rho * std::sin(theta)};
  }
};

/// A set of cache positions plus the region they live in.
struct CacheField {
  enum class Source { synthetic_hpp, imported };

  std::vector<Point> positions;
  Region region;
  Source source = Source::synthetic_hpp;

  std::size_t size() const noexcept { return positions.size(); }
  bool empty() const noexcept { return positions.empty(); }
};

/// Homogeneous Poisson process over a region: point count ~ Poisson(
/// intensity * area), positions i.i.d. uniform.
inline CacheField sample_hpp(double intensity, const Region& region,
                             RngStream& rng, double expected_count_cap = 1e7) {
  if (!(intensity > 0.0))
    throw std::domain_error("sample_hpp: intensity must be positive");
  const double mean = intensity * region.area();
  if (mean > expected_count_cap)
    throw std::runtime_error("sample_hpp: expected point count exceeds cap");
  const std::uint64_t n = rng.poisson(mean);
  CacheField field;
  field.region = region;
  field.source = CacheField::Source::synthetic_hpp;
  field.positions.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    field.positions.push_back(region.sample(rng));
  return field;
}

/// Caches sorted by distance to a client. Rank accessors are 1-based: rank 1
/// is the nearest cache. Ties are broken by ascending original index.
class DistanceOrder {
 public:
  DistanceOrder(Point client, std::vector<double> distances,
                std::vector<std::size_t> indices)
      : client_(client),
        distances_(std::move(distances)),
        indices_(std::move(indices)) {}

  Point client() const noexcept { return client_; }
  std::size_t count() const noexcept { return distances_.size(); }

  double distance(std::size_t rank) const {
    if (rank < 1 || rank > distances_.size())
      throw std::out_of_range("DistanceOrder::distance: bad rank");
    return distances_[rank - 1];
  }

  std::size_t cache_index(std::size_t rank) const {
    if (rank < 1 || rank > indices_.size())
      throw std::out_of_range("DistanceOrder::cache_index: bad rank");
    return indices_[rank - 1];
  }

 private:
  Point client_;
  std::vector<double> distances_;
  std::vector<std::size_t> indices_;
};

inline DistanceOrder order_by_distance(const CacheField& field, Point client) {
  if (field.empty())
    throw std::domain_error("order_by_distance: field is empty");
  const std::size_t n = field.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] = distance(field.positions[i], client);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });
  std::vector<double> sorted(n);
  for (std::size_t r = 0; r < n; ++r) sorted[r] = dist[idx[r]];
  return DistanceOrder(client, std::move(sorted), std::move(idx));
}

/// Where clients may appear relative to the region border.
struct BorderPolicy {
  enum class Kind { anywhere, centered_subrectangle };

  Kind kind = Kind::anywhere;
  double fraction = 0.5;  // side length fraction of the sub-rectangle

  static BorderPolicy anywhere() { return {Kind::anywhere, 1.0}; }

  static BorderPolicy centered(double fraction = 0.5) {
    if (!(fraction > 0.0) || fraction > 1.0)
      throw std::domain_error("BorderPolicy: fraction must be in (0, 1]");
    return {Kind::centered_subrectangle, fraction};
  }
};

/// Uniform client position under the given border policy. The centered
/// sub-rectangle policy requires a rectangular region.
inline Point sample_client(const Region& region, const BorderPolicy& policy,
                           RngStream& rng) {
  if (policy.kind == BorderPolicy::Kind::anywhere) return region.sample(rng);
  if (region.kind != Region::Kind::rectangle)
    throw std::domain_error(
        "sample_client: centered sub-rectangle needs a rectangular region");
  const double w = region.width * policy.fraction;
  const double h = region.height * policy.fraction;
  const Region inner = Region::rectangle(
      region.origin.x + (region.width - w) / 2.0,
      region.origin.y + (region.height - h) / 2.0, w, h);
  return inner.sample(rng);
}

}  // namespace spcache

#endif  // SPCACHE_GEOMETRY_HPP
