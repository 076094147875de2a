#include "orbitdep/projective.hpp"

#include <algorithm>
#include <sstream>

namespace orbitdep {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

}  // namespace

ProjectivePoint ProjectivePoint::normalize(std::span<const Rational> raw) {
  if (raw.size() < 2) throw DomainError("projective point needs at least two coordinates");
  Integer lcm = 1;
  for (const auto& q : raw) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<Integer> ints;
  ints.reserve(raw.size());
  for (const auto& q : raw) ints.push_back(q.get_num() * (lcm / q.get_den()));
  return normalize(std::span<const Integer>(ints));
}

ProjectivePoint ProjectivePoint::normalize(std::span<const Integer> raw) {
  if (raw.size() < 2) throw DomainError("projective point needs at least two coordinates");
  Integer g = 0;
  for (const auto& a : raw) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  if (g == 0) throw DomainError("projective point with all coordinates zero");
  const auto lead = std::find_if(raw.begin(), raw.end(), [](const Integer& a) { return a != 0; });
  if (sgn(*lead) < 0) g = -g;
  std::vector<Integer> coords;
  coords.reserve(raw.size());
  for (const auto& a : raw) {
    Integer c;
    mpz_divexact(c.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    coords.push_back(std::move(c));
  }
  return ProjectivePoint(std::move(coords));
}

ProjectivePoint ProjectivePoint::from_ints(std::initializer_list<long> coords) {
  std::vector<Integer> ints;
  for (long c : coords) ints.emplace_back(c);
  return normalize(std::span<const Integer>(ints));
}

ProjectivePoint ProjectivePoint::parse(std::string_view text) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    throw std::invalid_argument("projective point must look like [a0:a1:...:aN], got '" + s + "'");
  }
  std::vector<Rational> raw;
  for (const auto& part : split_on(std::string_view(s).substr(1, s.size() - 2), ':')) {
    raw.push_back(parse_rational(part));
  }
  return normalize(std::span<const Rational>(raw));
}

bool ProjectivePoint::has_zero_coordinate() const {
  return std::any_of(coords_.begin(), coords_.end(), [](const Integer& a) { return a == 0; });
}

Integer ProjectivePoint::max_abs() const {
  Integer m = 0;
  for (const auto& a : coords_) {
    if (cmpabs(a, m) > 0) m = abs(a);
  }
  return m;
}

std::size_t ProjectivePoint::max_digits() const { return decimal_digits(max_abs()); }

std::string ProjectivePoint::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ':';
    out += coords_[i].get_str();
  }
  out += ']';
  return out;
}

bool enumeration_less(const Integer& a, const Integer& b) {
  const int c = cmpabs(a, b);
  if (c != 0) return c < 0;
  return sgn(a) > sgn(b);
}

bool operator<(const ProjectivePoint& a, const ProjectivePoint& b) {
  const std::size_t n = std::min(a.coords_.size(), b.coords_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coords_[i] == b.coords_[i]) continue;
    return enumeration_less(a.coords_[i], b.coords_[i]);
  }
  return a.coords_.size() < b.coords_.size();
}

std::size_t ProjectivePointHash::operator()(const ProjectivePoint& p) const noexcept {
  std::size_t seed = p.size();
  IntegerHash h;
  for (const auto& a : p.coords()) seed ^= h(a) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  return seed;
}

ProjectivePoint coord_mul(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.size() != q.size()) throw DomainError("coord_mul: dimension mismatch");
  std::vector<Integer> prod;
  prod.reserve(p.size());
  bool any = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    prod.push_back(p[i] * q[i]);
    any = any || prod.back() != 0;
  }
  if (!any) throw DomainError("coord_mul: degenerate product (all coordinates zero)");
  return ProjectivePoint::normalize(std::span<const Integer>(prod));
}

Rational rational_pow(const Rational& q, const Integer& e) {
  if (!e.fits_slong_p()) throw BudgetError("exponent too large");
  const long k = e.get_si();
  if (k < 0 && q == 0) throw DomainError("negative power of zero");
  const unsigned long ak = static_cast<unsigned long>(k < 0 ? -k : k);
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), q.get_num().get_mpz_t(), ak);
  mpz_pow_ui(d.get_mpz_t(), q.get_den().get_mpz_t(), ak);
  return k < 0 ? make_rational(d, n) : make_rational(n, d);
}

ProjectivePoint power(const ProjectivePoint& p, long r, bool torus) {
  if ((r <= 0 || torus) && p.has_zero_coordinate()) {
    throw DomainError("power: exponent " + std::to_string(r) + " needs a point without zero coordinates");
  }
  std::vector<Rational> raw;
  raw.reserve(p.size());
  for (const auto& a : p.coords()) raw.push_back(rational_pow(Rational(a), r));
  return ProjectivePoint::normalize(std::span<const Rational>(raw));
}

ProjectivePoint vector_power(const ProjectivePoint& p, std::span<const long> rvec) {
  if (rvec.size() != p.dimension()) throw DomainError("vector_power: exponent vector has wrong length");
  const TorusPoint t = torus_coords(p);
  std::vector<Rational> raw;
  raw.reserve(rvec.size());
  for (std::size_t i = 0; i < rvec.size(); ++i) {
    if (rvec[i] == 0) throw DomainError("vector_power: exponents must be nonzero");
    raw.push_back(rational_pow(t[i], rvec[i]));
  }
  return torus_embed(TorusPoint(std::move(raw)));
}

TorusPoint::TorusPoint(std::vector<Rational> coords) : coords_(std::move(coords)) {
  for (auto& q : coords_) {
    q.canonicalize();
    if (q == 0) throw DomainError("torus point with a zero coordinate");
  }
}

TorusPoint TorusPoint::parse(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::vector<Rational> coords;
  for (const auto& part : split_on(s, ',')) coords.push_back(parse_rational(part));
  return TorusPoint(std::move(coords));
}

TorusPoint TorusPoint::identity(std::size_t dimension) {
  return TorusPoint(std::vector<Rational>(dimension, Rational(1)));
}

TorusPoint TorusPoint::operator*(const TorusPoint& other) const {
  if (dimension() != other.dimension()) throw DomainError("torus product: dimension mismatch");
  std::vector<Rational> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) out[i] = coords_[i] * other.coords_[i];
  return TorusPoint(std::move(out));
}

TorusPoint TorusPoint::pow(const Integer& e) const {
  std::vector<Rational> out;
  out.reserve(coords_.size());
  for (const auto& q : coords_) out.push_back(rational_pow(q, e));
  return TorusPoint(std::move(out));
}

std::string TorusPoint::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += orbitdep::to_string(coords_[i]);
  }
  return out + ")";
}

ProjectivePoint torus_embed(const TorusPoint& t) {
  std::vector<Rational> raw;
  raw.reserve(t.dimension() + 1);
  raw.emplace_back(1);
  for (const auto& q : t.coords()) raw.push_back(q);
  return ProjectivePoint::normalize(std::span<const Rational>(raw));
}

TorusPoint torus_coords(const ProjectivePoint& p) {
  if (p.has_zero_coordinate()) throw DomainError("torus_coords: point " + p.to_string() + " has a zero coordinate");
  std::vector<Rational> coords;
  coords.reserve(p.dimension());
  for (std::size_t i = 1; i < p.size(); ++i) coords.push_back(make_rational(p[i], p[0]));
  return TorusPoint(std::move(coords));
}

}  // namespace orbitdep
