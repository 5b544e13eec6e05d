// Copyright 2026 the spcache authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SPCACHE_FIELD_HPP
#define SPCACHE_FIELD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spcache/rng.hpp"

namespace spcache {

using GfElem = std::uint32_t;
using CoefVector = std::vector<GfElem>;

/// Finite field GF(q), q prime or q = 2^m with 1 <= m <= 16.
///
/// Prime fields use modular integers. Binary extension fields represent
/// elements as polynomials over GF(2) packed into bits, reduced by an
/// irreducible polynomial (bit i = coefficient of x^i, degree bit included);
/// multiplication and inversion go through log/antilog tables built at
/// construction. All validation (primality, irreducibility, size bound) is
/// exhaustive at construction; arithmetic assumes a valid field thereafter.
class Field {
 public:
  static constexpr std::uint32_t kMaxSize = 1u << 16;

  static Field prime(std::uint32_t p) { return Field(p, 0, 0); }

  static Field binary(unsigned m) { return Field(0, m, default_poly(m)); }

  static Field binary(unsigned m, std::uint32_t poly) { return Field(0, m, poly); }

  /// q prime -> prime field; q a power of two -> binary field with the
  /// default polynomial; anything else is rejected.
  static Field of_size(std::uint32_t q) {
    if (q >= 2 && (q & (q - 1)) == 0) {
      unsigned m = 0;
      while ((1u << m) < q) ++m;
      return binary(m);
    }
    return prime(q);
  }

  std::uint32_t size() const noexcept { return q_; }
  bool is_binary() const noexcept { return m_ > 0; }
  unsigned extension_degree() const noexcept { return m_; }
  std::uint32_t reduction_poly() const noexcept { return poly_; }

  GfElem add(GfElem a, GfElem b) const {
    check(a);
    check(b);
    return m_ > 0 ? (a ^ b) : (a + b) % q_;
  }

  GfElem sub(GfElem a, GfElem b) const {
    check(a);
    check(b);
    return m_ > 0 ? (a ^ b) : (a + q_ - b) % q_;
  }

  GfElem neg(GfElem a) const {
    check(a);
    return m_ > 0 ? a : (q_ - a) % q_;
  }

  GfElem mul(GfElem a, GfElem b) const {
    check(a);
    check(b);
    if (a == 0 || b == 0) return 0;
    if (m_ > 0) return exp_[log_[a] + log_[b]];
    return static_cast<GfElem>(
        (static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b)) % q_);
  }

  GfElem inv(GfElem a) const {
    check(a);
    if (a == 0) throw std::domain_error("Field::inv: zero has no inverse");
    if (m_ > 0) return exp_[(q_ - 1) - log_[a]];
    return pow_mod(a, q_ - 2);
  }

  bool operator==(const Field& other) const noexcept {
    return q_ == other.q_ && poly_ == other.poly_;
  }

 private:
  Field(std::uint32_t p, unsigned m, std::uint32_t poly) {
    if (m == 0) {
      if (p < 2 || p > kMaxSize)
        throw std::domain_error("Field: size must be in [2, 2^16]");
      if (!is_prime(p))
        throw std::domain_error("Field: " + std::to_string(p) +
                                " is neither prime nor a power of two");
      q_ = p;
      m_ = 0;
      poly_ = 0;
      return;
    }
    if (m < 1 || m > 16)
      throw std::domain_error("Field: extension degree must be in [1, 16]");
    if (poly >> m != 1u)
      throw std::domain_error("Field: reduction polynomial must be monic of degree m");
    if (!is_irreducible(poly, m))
      throw std::domain_error("Field: reduction polynomial is reducible");
    q_ = 1u << m;
    m_ = m;
    poly_ = poly;
    build_tables();
  }

  void check(GfElem a) const {
    if (a >= q_) throw std::domain_error("Field: element out of range");
  }

  static bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  // Carry-less product reduced by poly (degree m). Slow path: used only for
  // validation and table construction.
  static std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b,
                                 std::uint32_t poly, unsigned m) {
    std::uint32_t r = 0;
    const std::uint32_t top = 1u << m;
    while (b) {
      if (b & 1u) r ^= a;
      b >>= 1;
      a <<= 1;
      if (a & top) a ^= poly;
    }
    return r;
  }

  static unsigned poly_degree(std::uint32_t p) {
    unsigned d = 0;
    while (p >> (d + 1)) ++d;
    return d;
  }

  static std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
    const unsigned db = poly_degree(b);
    while (a && poly_degree(a) >= db) a ^= b << (poly_degree(a) - db);
    return a;
  }

  // Exhaustive trial division by every polynomial of degree 1..m/2.
  static bool is_irreducible(std::uint32_t poly, unsigned m) {
    if (m == 1) return true;
    for (unsigned d = 1; d <= m / 2; ++d)
      for (std::uint32_t f = 1u << d; f < (2u << d); ++f)
        if (poly_mod(poly, f) == 0) return false;
    return true;
  }

  static std::uint32_t default_poly(unsigned m) {
    // Irreducible (primitive, except m=8 which matches the common
    // x^8+x^4+x^3+x+1 convention) polynomials per degree.
    static constexpr std::uint32_t table[17] = {
        0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x83,  0x11B,
        0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};
    if (m < 1 || m > 16)
      throw std::domain_error("Field: extension degree must be in [1, 16]");
    return table[m];
  }

  GfElem pow_mod(GfElem a, std::uint32_t e) const {
    std::uint64_t base = a, r = 1;
    while (e) {
      if (e & 1u) r = (r * base) % q_;
      base = (base * base) % q_;
      e >>= 1;
    }
    return static_cast<GfElem>(r);
  }

  std::uint32_t pow_slow(std::uint32_t a, std::uint32_t e) const {
    std::uint32_t r = 1;
    while (e) {
      if (e & 1u) r = clmul_mod(r, a, poly_, m_);
      a = clmul_mod(a, a, poly_, m_);
      e >>= 1;
    }
    return r;
  }

  void build_tables() {
    const std::uint32_t order = q_ - 1;
    // Find a generator of the multiplicative group: test candidates against
    // the prime factors of q-1.
    std::vector<std::uint32_t> factors;
    std::uint32_t n = order;
    for (std::uint32_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        factors.push_back(d);
        while (n % d == 0) n /= d;
      }
    }
    if (n > 1) factors.push_back(n);
    std::uint32_t gen = 0;
    for (std::uint32_t cand = 2; cand < q_; ++cand) {
      bool ok = true;
      for (std::uint32_t f : factors) {
        if (pow_slow(cand, order / f) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) {
        gen = cand;
        break;
      }
    }
    if (gen == 0 && q_ == 2) gen = 1;
    log_.assign(q_, 0);
    exp_.assign(2 * order > 0 ? 2 * order : 1, 1);
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < order; ++i) {
      exp_[i] = static_cast<std::uint16_t>(x);
      log_[x] = static_cast<std::uint16_t>(i);
      x = clmul_mod(x, gen, poly_, m_);
    }
    for (std::uint32_t i = order; i < 2 * order; ++i) exp_[i] = exp_[i - order];
  }

  std::uint32_t q_ = 0;
  unsigned m_ = 0;  // 0 for prime fields
  std::uint32_t poly_ = 0;
  std::vector<std::uint16_t> log_;
  std::vector<std::uint16_t> exp_;
};

/// Coefficient vector of length k with i.i.d. uniform entries.
inline CoefVector random_coef_vector(const Field& field, std::size_t k,
                                     RngStream& rng) {
  if (k == 0) throw std::domain_error("random_coef_vector: k must be >= 1");
  CoefVector v(k);
  for (auto& c : v) c = static_cast<GfElem>(rng.uniform_below(field.size()));
  return v;
}

/// Incrementally maintained basis in reduced row-echelon form.
///
/// insert() accepts a vector iff it is linearly independent of the rows seen
/// so far; accepted vectors are reduced into the basis so each pivot column
/// has a single 1. The field object must outlive the basis.
class EchelonBasis {
 public:
  EchelonBasis(const Field& field, std::size_t k) : field_(&field), k_(k) {
    if (k == 0) throw std::domain_error("EchelonBasis: k must be >= 1");
  }

  std::size_t dimension() const noexcept { return k_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  bool full_rank() const noexcept { return rows_.size() == k_; }
  const std::vector<CoefVector>& rows() const noexcept { return rows_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  bool insert(CoefVector v) {
    if (v.size() != k_)
      throw std::domain_error("EchelonBasis::insert: length mismatch");
    const Field& f = *field_;
    // Reduce against existing rows.
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::size_t p = pivots_[r];
      const GfElem c = v[p];
      if (c == 0) continue;
      const CoefVector& row = rows_[r];
      for (std::size_t j = p; j < k_; ++j) v[j] = f.sub(v[j], f.mul(c, row[j]));
    }
    std::size_t pivot = k_;
    for (std::size_t j = 0; j < k_; ++j) {
      if (v[j] != 0) {
        pivot = j;
        break;
      }
    }
    if (pivot == k_) return false;  // dependent (or zero) vector
    // Normalize the pivot to 1 and clear its column in existing rows.
    const GfElem scale = f.inv(v[pivot]);
    for (std::size_t j = pivot; j < k_; ++j) v[j] = f.mul(scale, v[j]);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const GfElem c = rows_[r][pivot];
      if (c == 0) continue;
      CoefVector& row = rows_[r];
      for (std::size_t j = pivot; j < k_; ++j)
        row[j] = f.sub(row[j], f.mul(c, v[j]));
    }
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < pivot) ++pos;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), pivot);
    return true;
  }

 private:
  const Field* field_;
  std::size_t k_;
  std::vector<CoefVector> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace spcache

#endif  // SPCACHE_FIELD_HPP
