#include "orbitdep/heights.hpp"

#include <algorithm>

namespace orbitdep {

namespace {

HomogeneousForm primitive_part(HomogeneousForm form) {
  if (form.is_zero()) throw DomainError("divisor form is identically zero");
  if (form.degree() == 0) throw DomainError("divisor form must have positive degree");
  const Integer g = form.content();
  if (g == 1) return form;
  std::vector<Monomial> terms = form.monomials();
  for (auto& m : terms) mpz_divexact(m.coef.get_mpz_t(), m.coef.get_mpz_t(), g.get_mpz_t());
  return HomogeneousForm(form.num_vars(), std::move(terms));
}

Integer checked_form_value(const Divisor& d, const ProjectivePoint& p) {
  if (p.size() != d.form().num_vars()) throw DomainError("divisor and point dimensions differ");
  Integer value = d.evaluate(p);
  if (value == 0) throw DomainError("point " + p.to_string() + " lies on the divisor support");
  return value;
}

Integer pow_integer(const Integer& base, unsigned long e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace

Divisor::Divisor(HomogeneousForm form) : form_(primitive_part(std::move(form))) {
  if (form_.num_vars() < 2) throw DomainError("divisor must live on P^N with N >= 1");
}

Divisor Divisor::coordinate_product(std::size_t dimension, std::span<const std::size_t> indices) {
  std::vector<unsigned> exps(dimension + 1, 0);
  for (auto i : indices) {
    if (i > dimension) throw DomainError("coordinate index out of range");
    exps[i] = 1;
  }
  return Divisor(HomogeneousForm::monomial(std::move(exps)));
}

bool Divisor::is_coordinate_subdivisor() const {
  if (form_.monomials().size() != 1) return false;
  const auto& m = form_.monomials().front();
  return m.coef == 1 && std::all_of(m.exps.begin(), m.exps.end(), [](unsigned e) { return e <= 1; });
}

std::vector<std::size_t> Divisor::coordinate_indices() const {
  std::vector<std::size_t> out;
  if (!is_coordinate_subdivisor()) return out;
  const auto& exps = form_.monomials().front().exps;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i]) out.push_back(i);
  }
  return out;
}

Integer Divisor::evaluate(const ProjectivePoint& p) const { return form_.evaluate(p.coords()); }

PlaceSet::PlaceSet(std::span<const Integer> primes) {
  for (const auto& p : primes) insert(p);
}

void PlaceSet::insert(const Integer& prime) {
  if (!is_prime(prime)) throw DomainError("place set: " + prime.get_str() + " is not prime");
  primes_.insert(prime);
}

bool PlaceSet::contains(const Place& v) const { return v.is_archimedean() || primes_.count(v.prime()) != 0; }

bool PlaceSet::is_subset_of(const PlaceSet& other) const {
  return std::includes(other.primes_.begin(), other.primes_.end(), primes_.begin(), primes_.end(), IntegerLess{});
}

std::string PlaceSet::to_string() const {
  std::string out = "{inf";
  for (const auto& p : primes_) out += "," + p.get_str();
  return out + "}";
}

HeightValue::HeightValue(Rational arch_argument, std::map<Integer, long, IntegerLess> finite)
    : arch_(std::move(arch_argument)), finite_(std::move(finite)) {
  arch_.canonicalize();
  if (sgn(arch_) <= 0) throw DomainError("height archimedean argument must be positive");
  std::erase_if(finite_, [](const auto& kv) { return kv.second == 0; });
}

double HeightValue::arch() const { return log_ratio(arch_.get_num(), arch_.get_den()); }

double HeightValue::finite_nats() const {
  double sum = 0.0;
  for (const auto& [p, e] : finite_) sum += static_cast<double>(e) * log_magnitude(p);
  return sum;
}

HeightValue HeightValue::scaled(long k) const {
  if (k == 0) return HeightValue();
  std::map<Integer, long, IntegerLess> f;
  for (const auto& [p, e] : finite_) f[p] = e * k;
  return HeightValue(rational_pow(arch_, k), std::move(f));
}

HeightValue HeightValue::operator+(const HeightValue& other) const {
  auto f = finite_;
  for (const auto& [p, e] : other.finite_) f[p] += e;
  return HeightValue(arch_ * other.arch_, std::move(f));
}

Rational HeightValue::exp_value() const {
  Rational v = arch_;
  for (const auto& [p, e] : finite_) v *= rational_pow(Rational(p), e);
  return v;
}

HeightValue weil_height(const ProjectivePoint& p) { return HeightValue(Rational(p.max_abs())); }

double local_height(const Place& v, const Divisor& d, const ProjectivePoint& p) {
  const Integer value = checked_form_value(d, p);
  if (v.is_archimedean()) {
    return log_ratio(pow_integer(p.max_abs(), d.degree()), abs(value));
  }
  return static_cast<double>(valuation(v.prime(), value)) * log_magnitude(v.prime());
}

double LocalHeightDecomposition::arch() const {
  return log_ratio(arch_argument.get_num(), arch_argument.get_den());
}

double LocalHeightDecomposition::finite_nats() const {
  double sum = 0.0;
  for (const auto& [p, e] : finite.factors) sum += static_cast<double>(e) * log_magnitude(p);
  return sum;
}

bool LocalHeightDecomposition::sums_to_divisor_height(const Divisor& d, const ProjectivePoint& p) const {
  Integer reconstructed = 1;
  for (const auto& [q, e] : finite.factors) reconstructed *= pow_integer(q, static_cast<unsigned long>(e));
  return reconstructed == abs(form_value) &&
         arch_argument * Rational(reconstructed) == Rational(pow_integer(p.max_abs(), d.degree()));
}

LocalHeightDecomposition all_local_heights(const Divisor& d, const ProjectivePoint& p, const FactorOptions& options) {
  LocalHeightDecomposition out;
  out.form_value = checked_form_value(d, p);
  out.arch_argument = make_rational(pow_integer(p.max_abs(), d.degree()), abs(out.form_value));
  out.finite = factor(out.form_value, options);
  return out;
}

HeightValue divisor_height(const Divisor& d, const ProjectivePoint& p) {
  if (p.size() != d.form().num_vars()) throw DomainError("divisor and point dimensions differ");
  return weil_height(p).scaled(static_cast<long>(d.degree()));
}

OutsideSum sum_outside_S(const Divisor& d, const PlaceSet& s, const ProjectivePoint& p) {
  OutsideSum out;
  out.s_free_part = abs(checked_form_value(d, p));
  for (const auto& q : s.primes()) remove_factor(out.s_free_part, q);
  out.nats = log_magnitude(out.s_free_part);
  return out;
}

QuasiIntegralResult quasi_integral_test(const Divisor& d, const PlaceSet& s, const ProjectivePoint& p, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in [0, 1)");
  QuasiIntegralResult out;
  out.outside_sum = sum_outside_S(d, s, p).nats;
  out.height = divisor_height(d, p).total();
  if (out.height == 0.0) throw DomainError("height degenerate: h(D, P) = 0 at " + p.to_string());
  out.margin = out.outside_sum - eps * out.height;
  out.quasi_integral = out.margin < 0.0;
  out.ratio = out.outside_sum / out.height;
  return out;
}

}  // namespace orbitdep
