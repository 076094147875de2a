#include "orbitdep/multdep.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace orbitdep {

namespace {

bool negative(const Rational& q) { return sgn(q) < 0; }

std::size_t torus_hash(const TorusPoint& t) {
  IntegerHash h;
  std::size_t acc = 0x9e3779b97f4a7c15ull;
  for (const auto& q : t.coords()) {
    acc ^= h(q.get_num()) + 0x9e3779b97f4a7c15ull + (acc << 6) + (acc >> 2);
    acc ^= h(q.get_den()) + 0x9e3779b97f4a7c15ull + (acc << 6) + (acc >> 2);
  }
  return acc;
}

Integer l1_norm(const IntVector& v) {
  Integer acc = 0;
  for (const auto& x : v) acc += abs(x);
  return acc;
}

/// (sum |e|, then lexicographic) order on exponent vectors.
bool exponent_less(const IntVector& a, const IntVector& b) {
  const int c = cmp(l1_norm(a), l1_norm(b));
  if (c != 0) return c < 0;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Integer& x, const Integer& y) { return x < y; });
}

bool within_box(const IntVector& v, const std::optional<Integer>& box) {
  if (!box) return true;
  return std::all_of(v.begin(), v.end(), [&](const Integer& x) { return cmpabs(x, *box) <= 0; });
}

long remove_base(Integer& n, const Integer& b) {
  return static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), b.get_mpz_t()));
}

/// Exponent of base element b in the rational q (b from a coprime base
/// covering q).
long base_valuation(const Rational& q, const Integer& b) {
  Integer num = abs(q.get_num());
  Integer den = q.get_den();
  return remove_base(num, b) - remove_base(den, b);
}

void fix_sign(IntVector& v) {
  auto it = std::find_if(v.begin(), v.end(), [](const Integer& x) { return x != 0; });
  if (it != v.end() && sgn(*it) < 0) {
    for (auto& x : v) x = -x;
  }
}

/// Reduced row echelon form over GF(2); returns pivot columns.
std::vector<std::size_t> gf2_rref(std::vector<std::vector<unsigned char>>& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t sel = row;
    while (sel < a.size() && !a[sel][col]) ++sel;
    if (sel == a.size()) continue;
    std::swap(a[sel], a[row]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i != row && a[i][col]) {
        for (std::size_t j = 0; j < cols; ++j) a[i][j] ^= a[row][j];
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

IntVector add_scaled(const IntVector& acc, const IntVector& v, const Integer& k) {
  IntVector out = acc;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += k * v[i];
  return out;
}

/// Lattice L = span(basis) in Z^m split as (head | tail), with the head
/// being the first `head` coordinates.  Provides the fibre lattice over a
/// head value and coset minimization in the tail.
class SplitLattice {
 public:
  SplitLattice(std::vector<IntVector> basis, std::size_t head) : basis_(std::move(basis)), head_(head) {
    const std::size_t n = basis_.size();
    const std::size_t m = n ? basis_.front().size() : head;
    b_ = IntMatrix::from_columns(basis_, m);
    p_ = IntMatrix(head, n);
    for (std::size_t i = 0; i < head; ++i) {
      for (std::size_t j = 0; j < n; ++j) p_(i, j) = b_(i, j);
    }
    for (const auto& c : integer_kernel(p_)) {
      IntVector full = b_ * c;
      fibre_.emplace_back(full.begin() + static_cast<std::ptrdiff_t>(head), full.end());
    }
    lll_reduce(fibre_);
    tail_ = m - head;
  }

  std::size_t rank() const { return basis_.size(); }
  const IntMatrix& projection() const { return p_; }
  const std::vector<IntVector>& fibre() const { return fibre_; }

  /// Some tail value over `head_value`, which must lie in the projection.
  IntVector particular_tail(const IntVector& head_value) const {
    auto c = solve_integer(p_, head_value);
    if (!c) throw DomainError("internal: head value outside the projected lattice");
    IntVector full = b_ * *c;
    return IntVector(full.begin() + static_cast<std::ptrdiff_t>(head_), full.end());
  }

  /// The (sum |e|, lex)-minimal element of tail0 + fibre inside the box.
  std::optional<IntVector> minimal_tail(const IntVector& tail0, const std::optional<Integer>& box) const {
    if (fibre_.empty()) {
      if (!within_box(tail0, box)) return std::nullopt;
      return tail0;
    }
    const std::size_t d = fibre_.size();
    const std::size_t k = tail_;
    // Gram matrix and its inverse in floating point; only used to bound
    // the enumeration region, every candidate is exact.
    std::vector<std::vector<double>> g(d, std::vector<double>(2 * d, 0.0));
    std::vector<double> rhs(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) g[i][j] = dot(fibre_[i], fibre_[j]).get_d();
      g[i][d + i] = 1.0;
      rhs[i] = -dot(fibre_[i], tail0).get_d();
    }
    for (std::size_t col = 0; col < d; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < d; ++r) {
        if (std::fabs(g[r][col]) > std::fabs(g[piv][col])) piv = r;
      }
      std::swap(g[piv], g[col]);
      std::swap(rhs[piv], rhs[col]);
      const double inv = 1.0 / g[col][col];
      for (auto& x : g[col]) x *= inv;
      rhs[col] *= inv;
      for (std::size_t r = 0; r < d; ++r) {
        if (r == col || g[r][col] == 0.0) continue;
        const double f = g[r][col];
        for (std::size_t j = 0; j < 2 * d; ++j) g[r][j] -= f * g[col][j];
        rhs[r] -= f * rhs[col];
      }
    }
    IntVector z0(d);
    for (std::size_t i = 0; i < d; ++i) z0[i] = Integer(static_cast<long>(std::lround(rhs[i])));
    IntVector best;
    bool have = false;
    {
      IntVector v = tail0;
      for (std::size_t i = 0; i < d; ++i) v = add_scaled(v, fibre_[i], z0[i]);
      if (within_box(v, box)) {
        best = v;
        have = true;
      }
    }
    double radius = std::numeric_limits<double>::infinity();
    if (have) radius = l1_norm(best).get_d();
    if (box) radius = std::min(radius, std::sqrt(static_cast<double>(k)) * box->get_d());
    std::vector<long> lo(d), hi(d);
    double volume = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double half = radius * std::sqrt(std::max(g[i][d + i], 0.0)) * (1.0 + 1e-9) + 1.0;
      lo[i] = static_cast<long>(std::floor(rhs[i] - half));
      hi[i] = static_cast<long>(std::ceil(rhs[i] + half));
      volume *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (volume > 2e6) return have ? std::optional<IntVector>(best) : std::nullopt;
    std::vector<long> z(lo);
    for (;;) {
      IntVector v = tail0;
      for (std::size_t i = 0; i < d; ++i) v = add_scaled(v, fibre_[i], Integer(z[i]));
      if (within_box(v, box) && (!have || exponent_less(v, best))) {
        best = std::move(v);
        have = true;
      }
      std::size_t i = 0;
      while (i < d && z[i] == hi[i]) {
        z[i] = lo[i];
        ++i;
      }
      if (i == d) break;
      ++z[i];
    }
    if (!have) return std::nullopt;
    return best;
  }

 private:
  std::vector<IntVector> basis_;
  std::size_t head_;
  std::size_t tail_ = 0;
  IntMatrix b_;
  IntMatrix p_;
  std::vector<IntVector> fibre_;
};

bool ratio_ok(const Integer& r, const Integer& s, const std::optional<Rational>& bound) {
  if (!bound) return true;
  // |s| / |r| <= num / den
  return abs(s) * bound->get_den() <= bound->get_num() * abs(r);
}

}  // namespace

GroupGamma::GroupGamma(std::size_t dimension, std::vector<TorusPoint> generators)
    : dimension_(dimension), generators_(std::move(generators)) {
  if (dimension_ == 0) throw DomainError("torus dimension must be positive");
  for (const auto& g : generators_) {
    if (g.dimension() != dimension_) throw DomainError("Gamma generator " + g.to_string() + " has wrong dimension");
  }
}

TorusPoint GroupGamma::element(const IntVector& exponents) const {
  if (exponents.size() != generators_.size()) throw DomainError("exponent vector length differs from Gamma rank");
  TorusPoint out = TorusPoint::identity(dimension_);
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    if (exponents[j] != 0) out = out * generators_[j].pow(exponents[j]);
  }
  return out;
}

std::vector<Integer> GroupGamma::support_primes() const {
  std::set<Integer, IntegerLess> primes;
  for (const auto& g : generators_) {
    for (const auto& q : g.coords()) {
      for (const Integer& part : {Integer(abs(q.get_num())), Integer(q.get_den())}) {
        if (part == 1) continue;
        for (const auto& pp : factor(part).factors) primes.insert(pp.prime);
      }
    }
  }
  return {primes.begin(), primes.end()};
}

ExponentVector encode(const TorusPoint& t, const FactorOptions& options) {
  ExponentVector out;
  for (std::size_t i = 0; i < t.dimension(); ++i) {
    const Rational& q = t[i];
    if (q == 0) throw DomainError("cannot encode a zero coordinate");
    out.signs.push_back(negative(q));
    for (const auto& pp : factor(q.get_num(), options).factors) out.exponents[{i + 1, pp.prime}] += pp.exponent;
    for (const auto& pp : factor(q.get_den(), options).factors) out.exponents[{i + 1, pp.prime}] -= pp.exponent;
  }
  std::erase_if(out.exponents, [](const auto& kv) { return kv.second == 0; });
  return out;
}

TorusPoint decode(const ExponentVector& v) {
  std::vector<Rational> coords(v.signs.size(), Rational(1));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (v.signs[i]) coords[i] = -1;
  }
  for (const auto& [key, e] : v.exponents) {
    const auto& [index, p] = key;
    if (index == 0 || index > coords.size()) throw DomainError("exponent vector coordinate index out of range");
    coords[index - 1] *= rational_pow(Rational(p), e);
  }
  return TorusPoint(std::move(coords));
}

std::vector<Integer> coprime_base(const std::vector<Integer>& values) {
  std::vector<Integer> base;
  std::vector<Integer> work;
  for (const auto& v : values) {
    if (v == 0) throw DomainError("coprime base of zero");
    Integer a = abs(v);
    if (a > 1) work.push_back(a);
  }
  while (!work.empty()) {
    Integer y = std::move(work.back());
    work.pop_back();
    if (y == 1) continue;
    bool split = false;
    for (std::size_t i = 0; i < base.size(); ++i) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), y.get_mpz_t(), base[i].get_mpz_t());
      if (g == 1) continue;
      Integer b = std::move(base[i]);
      base.erase(base.begin() + static_cast<std::ptrdiff_t>(i));
      work.push_back(g);
      work.push_back(Integer(b / g));
      work.push_back(Integer(y / g));
      split = true;
      break;
    }
    if (!split) base.push_back(std::move(y));
  }
  std::sort(base.begin(), base.end(), IntegerLess{});
  return base;
}

std::vector<IntVector> relation_lattice(const std::vector<TorusPoint>& w) {
  const std::size_t m = w.size();
  if (m == 0) return {};
  const std::size_t n = w.front().dimension();
  for (const auto& t : w) {
    if (t.dimension() != n) throw DomainError("relation lattice: mixed torus dimensions");
  }
  std::vector<IntVector> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Integer> parts;
    for (const auto& t : w) {
      parts.push_back(t[i].get_num());
      parts.push_back(t[i].get_den());
    }
    for (const auto& b : coprime_base(parts)) {
      IntVector row(m);
      bool nonzero = false;
      for (std::size_t j = 0; j < m; ++j) {
        row[j] = base_valuation(w[j][i], b);
        nonzero = nonzero || row[j] != 0;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }
  IntMatrix mat(rows.size(), m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) mat(i, j) = rows[i][j];
  }
  const auto kernel = integer_kernel(mat);
  const std::size_t t = kernel.size();
  if (t == 0) return {};

  // Sign parity: sum_j sign_ij x_j must be even for every coordinate i.
  std::vector<std::vector<unsigned char>> parity(n, std::vector<unsigned char>(t, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < t; ++c) {
      unsigned bit = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (negative(w[j][i]) && mpz_odd_p(kernel[c][j].get_mpz_t())) bit ^= 1u;
      }
      parity[i][c] = static_cast<unsigned char>(bit);
    }
  }
  const auto pivots = gf2_rref(parity, t);
  std::vector<bool> is_pivot(t, false);
  for (auto p : pivots) is_pivot[p] = true;

  std::vector<IntVector> basis;
  for (std::size_t f = 0; f < t; ++f) {
    if (is_pivot[f]) {
      basis.push_back(add_scaled(IntVector(m, Integer(0)), kernel[f], 2));
      continue;
    }
    IntVector v = kernel[f];
    for (std::size_t row = 0; row < pivots.size(); ++row) {
      if (parity[row][f]) v = add_scaled(v, kernel[pivots[row]], 1);
    }
    basis.push_back(std::move(v));
  }
  lll_reduce(basis);
  for (auto& v : basis) fix_sign(v);
  return basis;
}

std::string to_string(DependenceStatus status) {
  switch (status) {
    case DependenceStatus::found:
      return "found";
    case DependenceStatus::none:
      return "none";
    case DependenceStatus::none_within_bound:
      return "none_within_bound";
  }
  return "none";
}

bool witness_less(const DependenceRelation& a, const DependenceRelation& b) {
  const Integer ta = abs(a.r) + abs(a.s), tb = abs(b.r) + abs(b.s);
  if (ta != tb) return ta < tb;
  if (cmpabs(a.r, b.r) != 0) return cmpabs(a.r, b.r) < 0;
  if (a.gamma_exponents != b.gamma_exponents) return exponent_less(a.gamma_exponents, b.gamma_exponents);
  return a.s > b.s;  // positive s first
}

namespace {

void check_inputs(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma) {
  if (q1.dimension() == 0 || q1.dimension() != q2.dimension() || q1.dimension() != gamma.dimension()) {
    throw DomainError("dependence: torus dimensions of Q1, Q2 and Gamma must agree");
  }
}

std::vector<TorusPoint> inverse_generators(const GroupGamma& gamma) {
  std::vector<TorusPoint> out;
  for (const auto& g : gamma.generators()) out.push_back(g.pow(-1));
  return out;
}

}  // namespace

DependenceResult solve_dependence(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                                  const DependenceConstraint& constraint) {
  check_inputs(q1, q2, gamma);
  DependenceResult out;
  std::vector<TorusPoint> w{q1, q2.pow(-1)};
  for (auto& g : inverse_generators(gamma)) w.push_back(std::move(g));
  out.lattice = relation_lattice(w);
  if (out.lattice.empty()) return out;

  const SplitLattice split(out.lattice, 2);
  const auto image = column_echelon(split.projection());
  out.image_rank = image.size();

  const auto& box = constraint.max_abs_e;
  auto in_ranges = [&](const Integer& r, const Integer& s) {
    if (constraint.max_abs_r && cmpabs(r, *constraint.max_abs_r) > 0) return false;
    if (constraint.max_abs_s && cmpabs(s, *constraint.max_abs_s) > 0) return false;
    return ratio_ok(r, s, constraint.ratio_bound);
  };
  auto witness = [&](const Integer& r, const Integer& s) -> std::optional<DependenceRelation> {
    auto e = split.minimal_tail(split.particular_tail({r, s}), box);
    if (!e) return std::nullopt;
    DependenceRelation rel{r, s, *e, gamma.element(*e)};
    return rel;
  };
  auto finish = [&](std::optional<DependenceRelation> rel) {
    out.status = DependenceStatus::found;
    out.relation = std::move(rel);
  };

  if (image.empty()) return out;

  if (image.size() == 1) {
    const Integer r0 = image[0][0], s0 = image[0][1];
    // r0 == 0: every relation has r = 0.  s0 == 0: every relation has s = 0.
    if (r0 == 0 || s0 == 0) return out;
    if (!ratio_ok(r0, s0, constraint.ratio_bound)) return out;
    for (std::uint64_t k = 1;; ++k) {
      const Integer r = r0 * k, s = s0 * k;
      if (!in_ranges(r, s)) return out;
      if (auto rel = witness(r, s)) {
        finish(std::move(rel));
        return out;
      }
      if (k >= constraint.search_limit) {
        out.status = DependenceStatus::none_within_bound;
        return out;
      }
    }
  }

  // Rank 2: Lambda = {(k a, k b + j c)} with a, c > 0.
  const Integer a = image[0][0], b = image[0][1], c = image[1][1];
  if (constraint.ratio_bound && *constraint.ratio_bound == 0) return out;
  if (constraint.max_abs_s && *constraint.max_abs_s == 0) return out;

  auto residue_candidates = [&](const Integer& r) {
    // nonzero s = r/a * b (mod c) of least absolute value
    Integer t = (r / a) * b;
    mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), c.get_mpz_t());
    std::vector<Integer> out_s;
    if (t == 0) {
      out_s = {Integer(-c), c};
    } else if (2 * t < c) {
      out_s = {t};
    } else if (2 * t > c) {
      out_s = {Integer(t - c)};
    } else {
      out_s = {Integer(t - c), t};
    }
    return out_s;
  };

  std::optional<DependenceRelation> best;
  std::uint64_t examined = 0;
  if (!box) {
    // Every (r, s) in Lambda has a witness; scan r = a, 2a, ... and stop
    // once r alone exceeds the best total.
    for (Integer r = a;; r += a) {
      if (constraint.max_abs_r && r > *constraint.max_abs_r) break;
      if (best && r + 1 >= abs(best->r) + abs(best->s)) break;
      for (const auto& s : residue_candidates(r)) {
        if (!in_ranges(r, s)) continue;
        auto rel = witness(r, s);
        if (rel && (!best || witness_less(*rel, *best))) best = std::move(rel);
      }
      if (++examined >= constraint.search_limit && !best) {
        out.status = DependenceStatus::none_within_bound;
        return out;
      }
    }
    if (best) finish(std::move(best));
    return out;
  }

  // With a box on e not every lattice pair has a witness: walk totals
  // T = |r| + |s| upward.
  std::optional<Integer> max_total;
  if (constraint.max_abs_r && constraint.max_abs_s) max_total = *constraint.max_abs_r + *constraint.max_abs_s;
  for (Integer total = 2;; ++total) {
    if (max_total && total > *max_total) return out;
    for (Integer r = a; r < total; r += a) {
      const Integer sabs = total - r;
      for (const Integer& s : {Integer(-sabs), sabs}) {
        Integer k = r / a;
        Integer diff = s - k * b;
        if (!mpz_divisible_p(diff.get_mpz_t(), c.get_mpz_t())) continue;
        if (!in_ranges(r, s)) continue;
        auto rel = witness(r, s);
        if (rel && (!best || witness_less(*rel, *best))) best = std::move(rel);
        ++examined;
      }
      if (best) {
        finish(std::move(best));
        return out;
      }
      if (++examined >= constraint.search_limit) {
        out.status = DependenceStatus::none_within_bound;
        return out;
      }
    }
  }
}

bool verify_relation(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                     const DependenceRelation& rel) {
  if (q1.dimension() != q2.dimension() || q1.dimension() != gamma.dimension()) return false;
  if (rel.r == 0 || rel.s == 0) return false;
  if (rel.gamma_exponents.size() != gamma.rank()) return false;
  if (!(rel.u == gamma.element(rel.gamma_exponents))) return false;
  return q1.pow(rel.r) == rel.u * q2.pow(rel.s);
}

std::optional<IntVector> gamma_membership(const TorusPoint& t, const GroupGamma& gamma) {
  if (t.dimension() != gamma.dimension()) throw DomainError("membership: torus dimensions differ");
  std::vector<TorusPoint> w{t};
  for (auto& g : inverse_generators(gamma)) w.push_back(std::move(g));
  const auto basis = relation_lattice(w);
  if (basis.empty()) return std::nullopt;
  const SplitLattice split(basis, 1);
  if (!solve_integer(split.projection(), IntVector{1})) return std::nullopt;
  return split.minimal_tail(split.particular_tail({1}), std::nullopt);
}

GammaTable::GammaTable(const GroupGamma& gamma, long max_exp) : max_exp_(max_exp) {
  if (max_exp < 0) throw DomainError("Gamma table bound must be nonnegative");
  const std::size_t k = gamma.rank();
  double size = std::pow(2.0 * static_cast<double>(max_exp) + 1.0, static_cast<double>(k));
  if (size > 2e7) throw BudgetError("Gamma table would exceed 2e7 entries");
  std::vector<long> e(k, -max_exp);
  for (;;) {
    IntVector ev(e.begin(), e.end());
    TorusPoint t = gamma.element(ev);
    const std::size_t h = torus_hash(t);
    table_.emplace(h, std::make_pair(std::move(t), e));
    std::size_t i = 0;
    while (i < k && e[i] == max_exp) {
      e[i] = -max_exp;
      ++i;
    }
    if (i == k) break;
    ++e[i];
  }
}

std::vector<std::vector<long>> GammaTable::lookup(const TorusPoint& t) const {
  std::vector<std::vector<long>> out;
  auto [lo, hi] = table_.equal_range(torus_hash(t));
  for (auto it = lo; it != hi; ++it) {
    if (it->second.first == t) out.push_back(it->second.second);
  }
  std::sort(out.begin(), out.end(), [](const std::vector<long>& x, const std::vector<long>& y) {
    return exponent_less(IntVector(x.begin(), x.end()), IntVector(y.begin(), y.end()));
  });
  return out;
}

std::optional<DependenceRelation> brute_force_dependence(const TorusPoint& q1, const TorusPoint& q2,
                                                         const GroupGamma& gamma, const BruteForceOptions& options) {
  const long ge = options.gamma_max_exp < 0 ? options.max_exp : options.gamma_max_exp;
  return brute_force_dependence(q1, q2, gamma, GammaTable(gamma, ge), options);
}

std::optional<DependenceRelation> brute_force_dependence(const TorusPoint& q1, const TorusPoint& q2,
                                                         const GroupGamma& gamma, const GammaTable& table,
                                                         const BruteForceOptions& options) {
  check_inputs(q1, q2, gamma);
  if (options.max_exp < 1) throw DomainError("brute force needs max_exp >= 1");
  const long m = options.max_exp;
  std::vector<TorusPoint> q2_inv_pow;  // q2^{-s} for s = -m..m
  for (long s = -m; s <= m; ++s) q2_inv_pow.push_back(q2.pow(Integer(-s)));
  std::optional<DependenceRelation> best;
  for (long r = 1; r <= m; ++r) {
    const TorusPoint q1r = q1.pow(Integer(r));
    for (long s = -m; s <= m; ++s) {
      if (s == 0 || !ratio_ok(Integer(r), Integer(s), options.ratio_bound)) continue;
      const TorusPoint t = q1r * q2_inv_pow[static_cast<std::size_t>(s + m)];
      for (const auto& e : table.lookup(t)) {
        IntVector ev(e.begin(), e.end());
        DependenceRelation rel{Integer(r), Integer(s), ev, gamma.element(ev)};
        if (!verify_relation(q1, q2, gamma, rel)) continue;
        if (!best || witness_less(rel, *best)) best = std::move(rel);
      }
    }
  }
  return best;
}

namespace {

bool vector_witness_less(const VectorRelation& a, const VectorRelation& b) {
  const Integer ta = l1_norm(a.r) + l1_norm(a.s), tb = l1_norm(b.r) + l1_norm(b.s);
  if (ta != tb) return ta < tb;
  if (l1_norm(a.r) != l1_norm(b.r)) return l1_norm(a.r) < l1_norm(b.r);
  if (a.gamma_exponents != b.gamma_exponents) return exponent_less(a.gamma_exponents, b.gamma_exponents);
  // Prefer positive exponents, then lexicographic order.
  const auto negatives = [](const IntVector& v) { return std::count_if(v.begin(), v.end(), [](const Integer& x) { return x < 0; }); };
  if (negatives(a.r) != negatives(b.r)) return negatives(a.r) < negatives(b.r);
  if (negatives(a.s) != negatives(b.s)) return negatives(a.s) < negatives(b.s);
  if (a.r != b.r) return a.r < b.r;
  return a.s < b.s;
}

}  // namespace

VectorDependenceResult solve_vector_dependence(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                                               const VectorConstraint& constraint) {
  check_inputs(q1, q2, gamma);
  if (constraint.bound < 1) throw DomainError("vector dependence bound must be >= 1");
  const std::size_t n = q1.dimension();
  for (auto i : constraint.divisor_indices) {
    if (i == 0 || i > n) throw DomainError("divisor index out of torus range");
  }
  VectorDependenceResult out;

  // Unknowns r_1..r_N, s_1..s_N, e_1..e_k.
  std::vector<TorusPoint> w;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> c(n, Rational(1));
    c[i] = q1[i];
    w.emplace_back(std::move(c));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> c(n, Rational(1));
    c[i] = 1 / q2[i];
    w.emplace_back(std::move(c));
  }
  for (auto& g : inverse_generators(gamma)) w.push_back(std::move(g));
  const auto basis = relation_lattice(w);
  if (basis.empty()) return out;
  const std::size_t head = 2 * n;
  const SplitLattice split(basis, head);
  const auto image = column_echelon(split.projection());

  // A coordinate vanishing on the whole image is a proof of absence.
  for (std::size_t row = 0; row < head; ++row) {
    if (std::all_of(image.begin(), image.end(), [&](const IntVector& v) { return v[row] == 0; })) return out;
  }

  std::vector<std::size_t> pivot(image.size());
  for (std::size_t k = 0; k < image.size(); ++k) {
    pivot[k] = static_cast<std::size_t>(
        std::find_if(image[k].begin(), image[k].end(), [](const Integer& x) { return x != 0; }) - image[k].begin());
  }

  const Integer bound(constraint.bound);
  std::optional<VectorRelation> best;
  std::uint64_t nodes = 0;
  bool truncated = false;

  auto ratio_filter = [&](const IntVector& y) {
    if (!constraint.ratio_bound) return true;
    for (auto i : constraint.divisor_indices) {
      if (!ratio_ok(y[i - 1], y[n + i - 1], constraint.ratio_bound)) return false;
    }
    return true;
  };

  // Depth-first over echelon coefficients; rows [pivot[k], pivot[k+1]) are
  // final once coefficient k is chosen.
  auto recurse = [&](auto&& self, std::size_t k, const IntVector& acc, const Integer& partial) -> void {
    if (truncated) return;
    if (++nodes > constraint.node_limit) {
      truncated = true;
      return;
    }
    const std::size_t end_row = k + 1 < image.size() ? pivot[k + 1] : head;
    const Integer& piv = image[k][pivot[k]];
    Integer lo_num = -bound - acc[pivot[k]], hi_num = bound - acc[pivot[k]];
    Integer lo, hi;
    mpz_cdiv_q(lo.get_mpz_t(), lo_num.get_mpz_t(), piv.get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), hi_num.get_mpz_t(), piv.get_mpz_t());
    if (k == 0 && lo < 1) lo = 1;  // normalization r_1 > 0
    for (Integer ck = lo; ck <= hi; ++ck) {
      IntVector next = add_scaled(acc, image[k], ck);
      Integer sum = partial;
      bool ok = true;
      for (std::size_t row = pivot[k]; row < end_row && ok; ++row) {
        if (next[row] == 0 || cmpabs(next[row], bound) > 0) ok = false;
        sum += abs(next[row]);
      }
      if (!ok) continue;
      const Integer lower = sum + Integer(static_cast<unsigned long>(head - end_row));
      if (best && lower > l1_norm(best->r) + l1_norm(best->s)) continue;
      if (end_row == head) {
        if (!ratio_filter(next)) continue;
        IntVector rv(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(n));
        IntVector sv(next.begin() + static_cast<std::ptrdiff_t>(n), next.end());
        auto e = split.minimal_tail(split.particular_tail(next), std::nullopt);
        if (!e) continue;
        VectorRelation rel{rv, sv, *e, gamma.element(*e)};
        if (!best || vector_witness_less(rel, *best)) best = std::move(rel);
      } else {
        self(self, k + 1, next, sum);
      }
    }
  };
  recurse(recurse, 0, IntVector(head, Integer(0)), Integer(0));

  if (best) {
    out.status = DependenceStatus::found;
    out.relation = std::move(best);
  } else {
    out.status = DependenceStatus::none_within_bound;
  }
  return out;
}

bool verify_vector_relation(const TorusPoint& q1, const TorusPoint& q2, const GroupGamma& gamma,
                            const VectorRelation& rel) {
  const std::size_t n = q1.dimension();
  if (q2.dimension() != n || gamma.dimension() != n || rel.r.size() != n || rel.s.size() != n) return false;
  if (rel.gamma_exponents.size() != gamma.rank()) return false;
  if (!(rel.u == gamma.element(rel.gamma_exponents))) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (rel.r[i] == 0 || rel.s[i] == 0) return false;
    if (rational_pow(q1[i], rel.r[i]) != rel.u[i] * rational_pow(q2[i], rel.s[i])) return false;
  }
  return true;
}

}  // namespace orbitdep
