#include "orbitdep/number.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace orbitdep {

namespace {

using u64 = std::uint64_t;
__extension__ using u128 = unsigned __int128;

bool fits_u64(const Integer& n) { return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

u64 to_u64(const Integer& n) {
  // mpz_get_ui is only 64-bit on LP64 platforms; assemble from limbs.
  static_assert(sizeof(mp_limb_t) == 8);
  return mpz_size(n.get_mpz_t()) == 0 ? 0 : mpz_getlimbn(n.get_mpz_t(), 0);
}

Integer from_u64(u64 v) {
  Integer r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic for all 64-bit inputs with these bases.
bool miller_rabin_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

u64 absdiff(u64 a, u64 b) { return a > b ? a - b : b - a; }

// Pollard-Brent on a composite 64-bit n; returns a nontrivial factor or 0.
u64 brent_u64(u64 n, u64 c, u64& budget) {
  if (n % 2 == 0) return 2;
  auto f = [&](u64 x) { return static_cast<u64>((static_cast<u128>(x) * x + c) % n); };
  u64 y = 2, x = 2, ys = 2, q = 1, g = 1;
  const u64 m = 128;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      const u64 lim = std::min(m, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = f(y);
        q = mulmod(q, absdiff(x, y), n);
      }
      g = gcd_u64(q, n);
      if (budget < lim) throw BudgetError("factor: Pollard rho iteration budget exhausted");
      budget -= lim;
    }
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = gcd_u64(absdiff(x, ys), n);
    } while (g == 1);
  }
  return g == n ? 0 : g;
}

Integer brent_mpz(const Integer& n, unsigned long c, u64& budget) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  Integer y = 2, x = 2, ys = 2, q = 1, g = 1, t;
  auto f = [&](Integer& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  const u64 m = 128;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) f(y);
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      const u64 lim = std::min(m, r - k);
      for (u64 i = 0; i < lim; ++i) {
        f(y);
        t = x - y;
        q *= t;
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      if (budget < lim) throw BudgetError("factor: Pollard rho iteration budget exhausted");
      budget -= lim;
    }
  }
  if (g == n) {
    do {
      f(ys);
      t = x - ys;
      mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g == n ? Integer(0) : g;
}

Integer find_factor(const Integer& n, u64& budget) {
  for (unsigned long c = 1;; ++c) {
    if (fits_u64(n)) {
      if (u64 d = brent_u64(to_u64(n), c, budget)) return from_u64(d);
    } else {
      Integer d = brent_mpz(n, c, budget);
      if (d != 0) return d;
    }
  }
}

void split(const Integer& n, std::map<Integer, long, IntegerLess>& acc, u64& budget, long mult) {
  if (n == 1) return;
  if (is_prime(n)) {
    acc[n] += mult;
    return;
  }
  // Perfect powers defeat rho's cycle detection; take roots first.
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    const auto bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (unsigned long k = bits; k >= 2; --k) {
      Integer root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
        split(root, acc, budget, mult * static_cast<long>(k));
        return;
      }
    }
  }
  Integer d = find_factor(n, budget);
  split(d, acc, budget, mult);
  split(Integer(n / d), acc, budget, mult);
}

}  // namespace

std::size_t IntegerHash::operator()(const Integer& v) const noexcept {
  const std::size_t n = mpz_size(v.get_mpz_t());
  std::size_t seed = n ^ static_cast<std::size_t>(sgn(v) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    seed ^= std::hash<mp_limb_t>{}(mpz_getlimbn(v.get_mpz_t(), i)) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
  }
  return seed;
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t' && ch != '+') s.push_back(ch);
  }
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  Integer num, den = 1;
  auto parse_int = [&](const std::string& part, Integer& out) {
    if (part.empty() || out.set_str(part, 10) != 0) {
      throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    }
  };
  parse_int(s.substr(0, slash), num);
  if (slash != std::string::npos) parse_int(s.substr(slash + 1), den);
  return make_rational(num, den);
}

std::string to_string(const Integer& n) { return n.get_str(10); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str(10);
  return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

double log_magnitude(const Integer& n) {
  if (n == 0) throw DomainError("log of zero");
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 53) return std::log(std::fabs(n.get_d()));  // exact in a double
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::numbers::ln2;
}

double log_magnitude(const Rational& q) {
  if (q == 0) throw DomainError("log of zero");
  return log_ratio(abs(q.get_num()), q.get_den());
}

double log_ratio(const Integer& a, const Integer& b) {
  if (sgn(a) <= 0 || sgn(b) <= 0) throw DomainError("log_ratio needs positive arguments");
  if (a == b) return 0.0;
  if (mpz_sizeinbase(a.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(b.get_mpz_t(), 2) <= 53) {
    return std::log(a.get_d()) - std::log(b.get_d());
  }
  const long ba = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  const long bb = static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
  // Scale so the integer quotient carries at least 64 significant bits.
  const long k = std::max(0L, 64 + bb - ba);
  Integer t = a;
  mpz_mul_2exp(t.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
  mpz_tdiv_q(t.get_mpz_t(), t.get_mpz_t(), b.get_mpz_t());
  return log_magnitude(t) - static_cast<double>(k) * std::numbers::ln2;
}

std::size_t decimal_digits(const Integer& n) {
  if (n == 0) return 1;
  return mpz_sizeinbase(n.get_mpz_t(), 10);
}

Place Place::finite(const Integer& p) {
  if (!is_prime(p)) throw DomainError("place: " + p.get_str() + " is not prime");
  Place v;
  v.archimedean_ = false;
  v.prime_ = p;
  return v;
}

const Integer& Place::prime() const {
  if (archimedean_) throw DomainError("archimedean place has no prime");
  return prime_;
}

std::string Place::to_string() const { return archimedean_ ? "inf" : prime_.get_str(); }

Integer Factorization::value() const {
  Integer v = sign;
  for (const auto& [p, e] : factors) {
    Integer pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
    v *= pe;
  }
  return v;
}

bool is_prime(const Integer& n) {
  if (n < 2) return false;
  if (fits_u64(n)) return miller_rabin_u64(to_u64(n));
  // Baillie-PSW followed by extra Miller-Rabin rounds.
  return mpz_probab_prime_p(n.get_mpz_t(), 25) > 0;
}

const std::vector<unsigned long>& small_primes(unsigned long bound) {
  static std::mutex mu;
  static std::map<unsigned long, std::vector<unsigned long>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bound);
  if (it != cache.end()) return it->second;
  std::vector<bool> composite(bound + 1, false);
  std::vector<unsigned long> primes;
  for (unsigned long i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (unsigned long j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return cache.emplace(bound, std::move(primes)).first->second;
}

Factorization factor(const Integer& n, const FactorOptions& options) {
  if (n == 0) throw DomainError("factor: zero has no factorization");
  if (decimal_digits(n) > options.digit_cap) {
    throw BudgetError("factor: input exceeds digit cap of " + std::to_string(options.digit_cap));
  }
  Factorization out;
  out.sign = sgn(n) < 0 ? -1 : 1;
  Integer m = abs(n);
  std::map<Integer, long, IntegerLess> acc;

  const auto& primes = small_primes(options.trial_bound);
  bool cofactor_prime = false;
  std::size_t idx = 0;
  auto trial = [&](std::size_t stop) {
    for (; idx < stop && idx < primes.size(); ++idx) {
      const unsigned long p = primes[idx];
      if (m == 1) return;
      if (fits_u64(m)) {
        const u64 mm = to_u64(m);
        if (static_cast<u128>(p) * p > mm) return;
        if (mm % p != 0) continue;
      } else if (!mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        continue;
      }
      long e = 0;
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        ++e;
      }
      acc[Integer(p)] += e;
      if (m != 1 && is_prime(m)) {
        cofactor_prime = true;
        return;
      }
    }
  };
  trial(168);  // primes below 1000
  if (!cofactor_prime && m != 1 && is_prime(m)) cofactor_prime = true;
  if (!cofactor_prime) trial(primes.size());

  if (m != 1) {
    if (cofactor_prime || (fits_u64(m) && idx < primes.size())) {
      // Trial division stopped at p^2 > m, so m is prime.
      acc[m] += 1;
    } else {
      u64 budget = options.rho_iterations;
      split(m, acc, budget, 1);
    }
  }
  out.factors.reserve(acc.size());
  for (auto& [p, e] : acc) out.factors.push_back({p, e});
  return out;
}

long remove_factor(Integer& n, const Integer& p) {
  if (n == 0) throw DomainError("valuation of zero is infinite");
  return static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

long valuation(const Integer& p, const Integer& n) {
  if (n == 0) throw DomainError("valuation of zero is infinite");
  if (p < 2) throw DomainError("valuation base must be at least 2");
  Integer m = n;
  return remove_factor(m, p);
}

long valuation(const Integer& p, const Rational& q) {
  if (q == 0) throw DomainError("valuation of zero is infinite");
  return valuation(p, q.get_num()) - valuation(p, q.get_den());
}

double log_abs(const Place& v, const Rational& q) {
  if (q == 0) throw DomainError("log_abs of zero");
  if (v.is_archimedean()) return log_magnitude(q);
  return -static_cast<double>(valuation(v.prime(), q)) * log_magnitude(v.prime());
}

}  // namespace orbitdep
