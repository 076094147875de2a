#pragma once

// Rational points of projective N-space in canonical coprime-integer form,
// and the coordinatewise multiplicative structure coming from the torus.

#include "orbitdep/number.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orbitdep {

/// A point [a_0 : ... : a_N] with integer coordinates, gcd 1, and first
/// nonzero coordinate positive.  The canonical form is unique, so equality
/// of points is structural equality.
class ProjectivePoint {
 public:
  /// Clears denominators, divides by the content and fixes the sign.
  static ProjectivePoint normalize(std::span<const Rational> raw);
  static ProjectivePoint normalize(std::span<const Integer> raw);
  static ProjectivePoint from_ints(std::initializer_list<long> coords);

  /// Parses "[a0:a1:...:aN]"; entries may be rationals.
  static ProjectivePoint parse(std::string_view text);

  std::size_t dimension() const { return coords_.size() - 1; }
  std::size_t size() const { return coords_.size(); }
  const std::vector<Integer>& coords() const { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }

  bool has_zero_coordinate() const;
  /// max_i |a_i|; on canonical coordinates this is exp(h(P)).
  Integer max_abs() const;
  std::size_t max_digits() const;

  std::string to_string() const;

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
    return a.coords_ == b.coords_;
  }
  /// Total order used for deterministic output: coordinatewise by
  /// (|a_i|, sign) so that 0 < 1 < -1 < 2 < -2 < ...
  friend bool operator<(const ProjectivePoint& a, const ProjectivePoint& b);

 private:
  explicit ProjectivePoint(std::vector<Integer> coords) : coords_(std::move(coords)) {}
  std::vector<Integer> coords_;
};

struct ProjectivePointHash {
  std::size_t operator()(const ProjectivePoint& p) const noexcept;
};

/// Orders integers as 0, 1, -1, 2, -2, ...
bool enumeration_less(const Integer& a, const Integer& b);

/// [a_0 b_0 : ... : a_N b_N].  Throws DomainError on dimension mismatch or
/// when every product vanishes.
ProjectivePoint coord_mul(const ProjectivePoint& p, const ProjectivePoint& q);

/// Coordinatewise r-th power.  Points with a zero coordinate only admit
/// r >= 1, and only when `torus` is false.
ProjectivePoint power(const ProjectivePoint& p, long r, bool torus = false);

/// Raises torus coordinate i (a_i / a_0) to rvec[i-1].
ProjectivePoint vector_power(const ProjectivePoint& p, std::span<const long> rvec);

/// A point (a_1, ..., a_N) of the split torus G_m^N over Q.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<Rational> coords);
  /// Parses comma separated rationals, optionally wrapped in parentheses.
  static TorusPoint parse(std::string_view text);
  static TorusPoint identity(std::size_t dimension);

  std::size_t dimension() const { return coords_.size(); }
  const std::vector<Rational>& coords() const { return coords_; }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }

  TorusPoint operator*(const TorusPoint& other) const;
  TorusPoint pow(const Integer& e) const;
  std::string to_string() const;

  friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.coords_ == b.coords_; }

 private:
  std::vector<Rational> coords_;
};

/// (a_1, ..., a_N) -> [1 : a_1 : ... : a_N]
ProjectivePoint torus_embed(const TorusPoint& t);
/// [a_0 : ... : a_N] -> (a_1/a_0, ..., a_N/a_0); requires a zero-free point.
TorusPoint torus_coords(const ProjectivePoint& p);

Rational rational_pow(const Rational& q, const Integer& e);

}  // namespace orbitdep
