// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_STATIONS_HPP
#define SPCACHE_STATIONS_HPP

#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spcache/geometry.hpp"

namespace spcache {

/// CSV error carrying the 1-based line number (header = line 1).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& cell, const std::string& path,
                           std::size_t line) {
  const std::string t = trim(cell);
  if (t.empty()) throw ParseError(path, line, "empty field");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ParseError(path, line, "not a number: '" + t + "'");
  }
  if (pos != t.size())
    throw ParseError(path, line, "trailing characters: '" + t + "'");
  if (!std::isfinite(v)) throw ParseError(path, line, "non-finite value");
  return v;
}

inline Region bounding_rectangle(const std::vector<Point>& pts) {
  if (pts.empty()) return Region::rectangle(0.0, 0.0, 0.0, 0.0);
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const Point& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return Region::rectangle(x0, y0, x1 - x0, y1 - y0);
}

}  // namespace detail

inline constexpr double kEarthRadiusMeters = 6371000.0;

/// Loads station coordinates from a CSV file with header `x_m,y_m` (planar
/// meters, used as-is) or `lat,lon` (degrees, projected to meters with an
/// equirectangular projection about the reference latitude; defaults to the
/// mean latitude of the file, origin at the mean coordinate).
///
/// The returned field's region is the bounding rectangle of the points.
inline CacheField load_stations(const std::string& path,
                                std::optional<double> ref_lat_deg = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_stations: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
  const std::string header = detail::trim(line);
  bool latlon = false;
  if (header == "x_m,y_m") {
    latlon = false;
  } else if (header == "lat,lon") {
    latlon = true;
  } else {
    throw ParseError(path, 1,
                     "unrecognized header '" + header +
                         "' (expected 'x_m,y_m' or 'lat,lon')");
  }

  std::vector<Point> raw;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos)
      throw ParseError(path, lineno, "expected two comma-separated fields");
    const std::string a = t.substr(0, comma);
    const std::string b = t.substr(comma + 1);
    if (b.find(',') != std::string::npos)
      throw ParseError(path, lineno, "expected exactly two fields");
    raw.push_back({detail::parse_number(a, path, lineno),
                   detail::parse_number(b, path, lineno)});
  }

  CacheField field;
  field.source = CacheField::Source::imported;
  if (!latlon) {
    field.positions = std::move(raw);
  } else {
    // raw holds (lat, lon) in degrees.
    double mean_lat = 0.0, mean_lon = 0.0;
    for (const Point& p : raw) {
      mean_lat += p.x;
      mean_lon += p.y;
    }
    if (!raw.empty()) {
      mean_lat /= static_cast<double>(raw.size());
      mean_lon /= static_cast<double>(raw.size());
    }
    const double lat0 = ref_lat_deg.value_or(mean_lat);
    const double deg = std::numbers::pi / 180.0;
    const double cos_ref = std::cos(lat0 * deg);
    field.positions.reserve(raw.size());
    for (const Point& p : raw)
      field.positions.push_back(
          {kEarthRadiusMeters * cos_ref * (p.y - mean_lon) * deg,
           kEarthRadiusMeters * (p.x - mean_lat) * deg});
  }
  field.region = detail::bounding_rectangle(field.positions);
  return field;
}

/// Writes a field as a normalized `x_m,y_m` CSV. Coordinates round-trip
/// bit-exactly through load_stations.
inline void write_stations(const std::string& path, const CacheField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_stations: cannot open " + path);
  out << "x_m,y_m\n";
  char buf[64];
  for (const Point& p : field.positions) {
    std::snprintf(buf, sizeof buf, "%.17g", p.x);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.y);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("write_stations: write failed: " + path);
}

}  // namespace spcache

#endif  // SPCACHE_STATIONS_HPP
