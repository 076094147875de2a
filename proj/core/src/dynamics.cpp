#include "orbitdep/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace orbitdep {

namespace {

unsigned common_degree(const std::vector<HomogeneousForm>& forms) {
  if (forms.size() < 2) throw DomainError("endomorphism of P^N needs N+1 >= 2 forms");
  const std::size_t nvars = forms.size();
  std::optional<unsigned> deg;
  bool any_nonzero = false;
  for (const auto& f : forms) {
    if (f.num_vars() != nvars) throw DomainError("endomorphism forms must have N+1 variables");
    if (f.is_zero()) continue;
    any_nonzero = true;
    if (deg && *deg != f.degree()) throw DomainError("endomorphism forms must share one degree");
    deg = f.degree();
  }
  if (!any_nonzero) throw DomainError("endomorphism with all forms zero");
  if (*deg < 2) throw DomainError("endomorphism degree must be at least 2");
  return *deg;
}

std::vector<std::vector<unsigned>> exponent_tuples(std::size_t nvars, unsigned d) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur(nvars, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == nvars) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      cur[i] = e;
      self(self, i + 1, left - e);
    }
  };
  rec(rec, 0, d);
  return out;
}

HomogeneousForm random_form(std::size_t nvars, unsigned d, long bound, SplitMix64& rng) {
  for (;;) {
    std::vector<Monomial> terms;
    for (auto& e : exponent_tuples(nvars, d)) terms.push_back({std::move(e), Integer(rng.uniform(-bound, bound))});
    HomogeneousForm f(nvars, std::move(terms), d);
    if (!f.is_zero()) return f;
  }
}

bool is_morphism(const Endomorphism& phi) {
  const auto check = check_morphism(phi);
  return phi.dimension() == 1 ? check.verified : !check.likely_non_morphism;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw BudgetError("word degree overflows 64 bits");
  return out;
}

Integer pow_integer(const Integer& base, unsigned long e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

double defect_from_max(const Integer& image_max, const Integer& source_max, unsigned d) {
  return std::fabs(log_ratio(image_max, pow_integer(source_max, d))) / d;
}

}  // namespace

Endomorphism::Endomorphism(std::vector<HomogeneousForm> forms, std::string label)
    : forms_(std::move(forms)), degree_(common_degree(forms_)), label_(std::move(label)) {
  // Zero forms adopt the common degree so every coordinate is well typed.
  for (auto& f : forms_) {
    if (f.is_zero()) f = HomogeneousForm(f.num_vars(), {}, degree_);
  }
}

double Endomorphism::height_growth_constant() const {
  std::size_t terms = 0;
  Integer coef = 0;
  for (const auto& f : forms_) {
    terms = std::max(terms, f.monomials().size());
    if (cmp(f.max_abs_coef(), coef) > 0) coef = f.max_abs_coef();
  }
  return log_magnitude(Integer(coef * static_cast<unsigned long>(terms)));
}

ProjectivePoint evaluate(const Endomorphism& phi, const ProjectivePoint& p) {
  if (p.size() != phi.forms().size()) throw DomainError("evaluate: point and map dimensions differ");
  std::vector<Integer> values;
  values.reserve(p.size());
  bool any = false;
  for (const auto& f : phi.forms()) {
    values.push_back(f.evaluate(p.coords()));
    any = any || values.back() != 0;
  }
  if (!any) {
    throw IndeterminacyError("indeterminate at point " + p.to_string() + ": every coordinate form vanishes", 0);
  }
  return ProjectivePoint::normalize(std::span<const Integer>(values));
}

MorphismCheck check_morphism(const Endomorphism& phi) {
  MorphismCheck out;
  const std::size_t nvars = phi.forms().size();
  if (nvars == 2) {
    out.resultant = binary_resultant(phi.forms()[0], phi.forms()[1]);
    out.verified = *out.resultant != 0;
  }
  if (nvars > 4) return out;
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17};
  for (unsigned p : kPrimes) {
    // Projective points over F_p: first nonzero coordinate equal to 1.
    bool common_zero = false;
    std::vector<std::uint64_t> pt(nvars, 0);
    for (std::size_t lead = 0; lead < nvars && !common_zero; ++lead) {
      const std::size_t free = nvars - lead - 1;
      std::uint64_t count = 1;
      for (std::size_t i = 0; i < free; ++i) count *= p;
      for (std::uint64_t code = 0; code < count && !common_zero; ++code) {
        std::fill(pt.begin(), pt.end(), 0);
        pt[lead] = 1;
        std::uint64_t c = code;
        for (std::size_t i = lead + 1; i < nvars; ++i) {
          pt[i] = c % p;
          c /= p;
        }
        common_zero = std::all_of(phi.forms().begin(), phi.forms().end(),
                                  [&](const HomogeneousForm& f) { return f.evaluate_mod(pt, p) == 0; });
      }
    }
    if (common_zero) out.primes_with_common_zero.push_back(p);
  }
  out.likely_non_morphism = out.primes_with_common_zero.size() == std::size(kPrimes);
  return out;
}

Word Word::then(std::size_t g) const {
  std::vector<std::size_t> letters;
  letters.reserve(letters_.size() + 1);
  letters.push_back(g);
  letters.insert(letters.end(), letters_.begin(), letters_.end());
  return Word(std::move(letters));
}

Word Word::compose(const Word& inner) const {
  std::vector<std::size_t> letters = letters_;
  letters.insert(letters.end(), inner.letters_.begin(), inner.letters_.end());
  return Word(std::move(letters));
}

std::uint64_t Word::degree(const GeneratorList& gens) const {
  validate(gens);
  std::uint64_t d = 1;
  for (auto g : letters_) d = checked_mul(d, gens[g].degree());
  return d;
}

void Word::validate(const GeneratorList& gens) const {
  for (auto g : letters_) {
    if (g >= gens.size()) throw DomainError("word letter " + std::to_string(g) + " out of generator range");
  }
}

std::string Word::to_string(const GeneratorList& gens) const {
  if (letters_.empty()) return "id";
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) out += "∘";
    const auto g = letters_[i];
    out += (g < gens.size() && !gens[g].label().empty()) ? gens[g].label() : "f" + std::to_string(g);
  }
  return out;
}

ProjectivePoint evaluate_word(const Word& w, const GeneratorList& gens, const ProjectivePoint& p) {
  w.validate(gens);
  ProjectivePoint q = p;
  const auto& letters = w.letters();
  for (std::size_t k = 0; k < letters.size(); ++k) {
    const auto g = letters[letters.size() - 1 - k];
    try {
      q = evaluate(gens[g], q);
    } catch (const IndeterminacyError& e) {
      const Word prefix(std::vector<std::size_t>(letters.end() - static_cast<std::ptrdiff_t>(k), letters.end()));
      throw IndeterminacyError(std::string(e.what()) + " (after applying " + prefix.to_string(gens) + ")", k);
    }
  }
  return q;
}

Orbit orbit_enumerate(const GeneratorList& gens, const ProjectivePoint& seed, const OrbitBudget& budget) {
  if (budget.max_degree == 0 || budget.max_points == 0 || budget.max_digits == 0 || !(budget.max_height_nats > 0)) {
    throw DomainError("orbit budget fields must be positive");
  }
  for (const auto& g : gens) {
    if (g.forms().size() != seed.size()) throw DomainError("orbit: generator and seed dimensions differ");
  }
  Orbit orbit;
  std::unordered_map<ProjectivePoint, std::size_t, ProjectivePointHash> index;
  // (record, generator) -> record of the image, or -1 when skipped.
  std::unordered_map<std::uint64_t, std::ptrdiff_t> image_cache;

  orbit.records.push_back({Word::identity(), {Word::identity()}, seed, weil_height(seed), -1, 1});
  orbit.word_stream.emplace_back(0, Word::identity());
  index.emplace(seed, 0);

  struct Frontier {
    std::size_t record;
    Word word;
    std::uint64_t degree;
  };
  std::vector<Frontier> level{{0, Word::identity(), 1}};
  bool stop = false;
  while (!level.empty() && !stop) {
    std::vector<Frontier> next;
    for (const auto& item : level) {
      for (std::size_t g = 0; g < gens.size() && !stop; ++g) {
        const std::uint64_t deg = checked_mul(item.degree, gens[g].degree());
        if (deg > budget.max_degree) continue;
        if (orbit.word_stream.size() >= budget.max_words) {
          orbit.budget_exhausted = true;
          orbit.warnings.push_back("word budget exhausted");
          stop = true;
          break;
        }
        const std::uint64_t key = static_cast<std::uint64_t>(item.record) * gens.size() + g;
        std::ptrdiff_t target;
        if (auto it = image_cache.find(key); it != image_cache.end()) {
          target = it->second;
        } else {
          target = -1;
          const auto& source = orbit.records[item.record];
          try {
            ProjectivePoint img = evaluate(gens[g], source.point);
            if (auto found = index.find(img); found != index.end()) {
              target = static_cast<std::ptrdiff_t>(found->second);
            } else if (img.max_digits() > budget.max_digits) {
              orbit.budget_exhausted = true;
              orbit.warnings.push_back("digit budget exceeded beyond " + source.point.to_string());
            } else if (HeightValue h = weil_height(img); h.total() > budget.max_height_nats) {
              orbit.budget_exhausted = true;
              orbit.warnings.push_back("height budget exceeded beyond " + source.point.to_string());
            } else if (orbit.records.size() >= budget.max_points) {
              orbit.budget_exhausted = true;
              orbit.warnings.push_back("point budget exhausted");
              stop = true;
            } else {
              target = static_cast<std::ptrdiff_t>(orbit.records.size());
              index.emplace(img, orbit.records.size());
              orbit.records.push_back({item.word.then(g), {}, std::move(img), h,
                                       static_cast<std::ptrdiff_t>(item.record), deg});
            }
          } catch (const IndeterminacyError& e) {
            orbit.warnings.push_back(std::string("skipped ") + item.word.then(g).to_string(gens) + ": " + e.what());
          }
          image_cache.emplace(key, target);
        }
        if (target < 0) continue;
        Word w = item.word.then(g);
        auto& rec = orbit.records[static_cast<std::size_t>(target)];
        rec.words.push_back(w);
        orbit.word_stream.emplace_back(static_cast<std::size_t>(target), w);
        next.push_back({static_cast<std::size_t>(target), std::move(w), deg});
      }
      if (stop) break;
    }
    level = std::move(next);
  }
  return orbit;
}

std::size_t InfiniteWord::at(std::size_t stage) const {
  if (stage < preperiod.size()) return preperiod[stage];
  if (period.empty()) throw DomainError("infinite word needs a nonempty period");
  return period[(stage - preperiod.size()) % period.size()];
}

InfiniteWord InfiniteWord::repeating(const Word& w) {
  if (w.is_identity()) throw DomainError("cannot repeat the identity word");
  InfiniteWord gamma;
  gamma.period.assign(w.letters().rbegin(), w.letters().rend());
  return gamma;
}

std::optional<double> a_priori_defect(const Endomorphism& phi) {
  const std::size_t n = phi.dimension();
  const unsigned d = phi.degree();
  // Coordinatewise power maps, up to signs and a permutation, keep
  // canonical coordinates coprime: h(phi(Q)) = d h(Q) exactly.
  std::vector<bool> used(n + 1, false);
  bool power_map = true;
  for (const auto& f : phi.forms()) {
    if (f.monomials().size() != 1 || abs(f.monomials()[0].coef) != 1) {
      power_map = false;
      break;
    }
    const auto& e = f.monomials()[0].exps;
    const auto it = std::find(e.begin(), e.end(), d);
    if (it == e.end() || used[static_cast<std::size_t>(it - e.begin())]) {
      power_map = false;
      break;
    }
    used[static_cast<std::size_t>(it - e.begin())] = true;
  }
  if (power_map) return 0.0;
  if (n != 1) return std::nullopt;
  const auto& f = phi.forms()[0];
  const auto& g = phi.forms()[1];
  if (binary_resultant(f, g) == 0) return std::nullopt;
  // f1 F + g1 G = Res X^(2d-1) and f2 F + g2 G = Res Y^(2d-1), with the
  // coefficients of f_i, g_i cofactors of the Sylvester matrix (Hadamard
  // bound B), and gcd(F(a), G(a)) | Res on coprime a, give
  // h(phi(Q)) >= d h(Q) - log(2 d B).
  auto log_norm = [](const HomogeneousForm& h) {
    Integer sq = 0;
    for (const auto& m : h.monomials()) sq += m.coef * m.coef;
    return 0.5 * log_magnitude(sq);
  };
  const double nf = log_norm(f), ng = log_norm(g);
  const double lower = std::log(2.0 * d) + d * nf + d * ng - std::min(nf, ng);
  return std::max(phi.height_growth_constant(), lower) / d;
}

double height_defect(const Endomorphism& phi, const ProjectivePoint& q) {
  return defect_from_max(evaluate(phi, q).max_abs(), q.max_abs(), phi.degree());
}

CanonicalHeightEstimate canonical_height_estimate(const InfiniteWord& gamma, const GeneratorList& gens,
                                                  const ProjectivePoint& p, const CanonicalHeightOptions& options) {
  if (!(options.tolerance > 0)) throw DomainError("canonical height tolerance must be positive");
  if (gamma.period.empty()) throw DomainError("infinite word needs a nonempty period");
  for (auto g : gamma.preperiod) Word({g}).validate(gens);
  for (auto g : gamma.period) Word({g}).validate(gens);

  CanonicalHeightEstimate out;
  out.defects.assign(gens.size(), 0.0);
  for (std::size_t i = 0; i < std::min(gens.size(), options.defects.size()); ++i) out.defects[i] = options.defects[i];

  std::vector<long double> degs{1.0L};
  ProjectivePoint q = p;
  Integer qmax = q.max_abs();
  out.normalized.push_back(log_magnitude(qmax));

  const std::size_t pre = gamma.preperiod.size(), per = gamma.period.size();
  long double period_degree = 1.0L;
  for (auto g : gamma.period) period_degree *= gens[g].degree();

  std::optional<std::vector<double>> certified(std::vector<double>(gens.size(), 0.0));
  for (std::size_t stage = 0; stage < pre + per; ++stage) {
    const auto g = gamma.at(stage);
    const auto bound = a_priori_defect(gens[g]);
    if (!bound) {
      certified.reset();
      break;
    }
    (*certified)[g] = *bound;
  }

  auto tails = [&](const std::vector<double>& defects) {
    const std::size_t computed = degs.size() - 1;
    std::size_t boundary = std::max(computed, pre);
    while ((boundary - pre) % per != 0) ++boundary;
    std::vector<long double> deg_ext(degs.begin(), degs.end());
    for (std::size_t j = deg_ext.size() - 1; j < boundary; ++j) deg_ext.push_back(deg_ext[j] * gens[gamma.at(j)].degree());
    long double per_sum = 0.0L, run = 1.0L;
    for (auto g : gamma.period) {
      per_sum += defects[g] / run;
      run *= gens[g].degree();
    }
    const long double after = per_sum / (deg_ext[boundary] * (1.0L - 1.0L / period_degree));
    std::vector<double> t(computed + 1);
    long double acc = after;
    if (boundary <= computed) t[boundary] = static_cast<double>(acc);
    for (std::size_t j = boundary; j-- > 0;) {
      acc += defects[gamma.at(j)] / deg_ext[j];
      if (j <= computed) t[j] = static_cast<double>(acc);
    }
    return t;
  };

  for (std::size_t stage = 0;; ++stage) {
    auto finish = [&](std::size_t at) {
      out.stage = at;
      out.value = out.normalized[at];
      out.error_bound = out.tail_bounds[at];
      if (certified) {
        out.certified_tail_bounds = tails(*certified);
        out.certified_bound = out.certified_tail_bounds[at];
        out.empirical = false;
      }
      return out;
    };
    if (options.fixed_stages && stage == options.max_stages) {
      out.tail_bounds = tails(out.defects);
      return finish(stage);
    }
    if (!options.fixed_stages && stage >= options.min_stages) {
      out.tail_bounds = tails(out.defects);
      auto hit = std::find_if(out.tail_bounds.begin(), out.tail_bounds.end(),
                              [&](double t) { return t < options.tolerance; });
      if (hit != out.tail_bounds.end()) return finish(static_cast<std::size_t>(hit - out.tail_bounds.begin()));
    }
    if (stage >= options.max_stages) throw BudgetError("canonical height: stage budget exhausted before convergence");
    const auto g = gamma.at(stage);
    try {
      q = evaluate(gens[g], q);
    } catch (const IndeterminacyError& e) {
      throw IndeterminacyError(std::string(e.what()) + " at stage " + std::to_string(stage + 1), stage);
    }
    if (q.max_digits() > options.max_digits) {
      throw BudgetError("canonical height: digit budget exhausted at stage " + std::to_string(stage + 1));
    }
    Integer next_max = q.max_abs();
    const unsigned d = gens[g].degree();
    out.defects[g] = std::max(out.defects[g], defect_from_max(next_max, qmax, d));
    qmax = std::move(next_max);
    degs.push_back(degs.back() * d);
    out.normalized.push_back(static_cast<double>(log_magnitude(qmax) / degs.back()));
  }
}

EmpiricalConstants estimate_constants(const GeneratorList& gens, const std::vector<ProjectivePoint>& sample,
                                      const ConstantsOptions& options) {
  if (sample.empty()) throw DomainError("estimate_constants: empty sample");
  if (gens.empty()) throw DomainError("estimate_constants: no generators");
  EmpiricalConstants out;
  out.defects.assign(gens.size(), 0.0);
  out.sample_size = sample.size();
  unsigned min_degree = gens.front().degree();
  for (const auto& g : gens) min_degree = std::min(min_degree, g.degree());
  for (const auto& q : sample) {
    const double h = log_magnitude(q.max_abs());
    for (std::size_t i = 0; i < gens.size(); ++i) {
      try {
        ProjectivePoint cur = q;
        Integer cur_max = q.max_abs();
        long double deg = 1.0L;
        for (std::size_t n = 1; n <= std::max<std::size_t>(1, options.c5_stages); ++n) {
          cur = evaluate(gens[i], cur);
          Integer next_max = cur.max_abs();
          if (n == 1) out.defects[i] = std::max(out.defects[i], defect_from_max(next_max, cur_max, gens[i].degree()));
          cur_max = std::move(next_max);
          deg *= gens[i].degree();
          out.c5_hat = std::max(out.c5_hat, std::fabs(static_cast<double>(log_magnitude(cur_max) / deg) - h));
          if (cur.max_digits() > options.c5_max_digits) break;
        }
      } catch (const IndeterminacyError&) {
        // Base points carry no height information.
      }
    }
  }
  const double worst = *std::max_element(out.defects.begin(), out.defects.end());
  out.c1_hat = worst / (1.0 - 1.0 / min_degree);
  return out;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

long SplitMix64::uniform(long lo, long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the draw unbiased and portable.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + static_cast<long>(x % span);
}

bool in_general_position(const std::vector<std::vector<Integer>>& linear_forms) {
  if (linear_forms.empty()) return true;
  const std::size_t k = linear_forms.front().size();
  for (const auto& f : linear_forms) {
    if (f.size() != k) throw DomainError("linear forms must share a variable count");
  }
  if (linear_forms.size() < k) throw DomainError("general position check needs at least N+1 forms");
  const std::size_t n = linear_forms.size();
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    std::vector<std::vector<Integer>> m;
    for (auto i : pick) m.push_back(linear_forms[i]);
    if (determinant(std::move(m)) == 0) return false;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

Endomorphism random_morphism(std::size_t n, unsigned d, long coef_bound, SplitMix64& rng, std::string label) {
  for (std::size_t attempt = 0; attempt < 10'000; ++attempt) {
    std::vector<HomogeneousForm> forms;
    for (std::size_t i = 0; i <= n; ++i) forms.push_back(random_form(n + 1, d, coef_bound, rng));
    Endomorphism phi(std::move(forms), label);
    if (is_morphism(phi)) return phi;
  }
  throw BudgetError("random_morphism: no morphism found");
}

ExampleMaps make_example_maps(std::size_t n, unsigned d, std::uint64_t seed, const ExampleMapOptions& options) {
  if (n < 1) throw DomainError("make_example_maps: dimension must be at least 1");
  if (d <= n + 1) throw DomainError("make_example_maps: need d > N+1");
  SplitMix64 rng(seed);
  auto build = [&](std::vector<std::vector<Integer>>& linear, const char* label) -> std::optional<Endomorphism> {
    linear.clear();
    HomogeneousForm product = HomogeneousForm::monomial(std::vector<unsigned>(n + 1, 0));
    for (unsigned j = 0; j < d; ++j) {
      std::vector<Integer> coefs;
      for (std::size_t i = 0; i <= n; ++i) coefs.emplace_back(rng.uniform(-options.linear_coef_bound, options.linear_coef_bound));
      product = product * HomogeneousForm::linear(coefs);
      linear.push_back(std::move(coefs));
    }
    if (!in_general_position(linear)) return std::nullopt;
    std::vector<HomogeneousForm> forms;
    for (std::size_t i = 0; i < n; ++i) forms.push_back(random_form(n + 1, d, options.form_coef_bound, rng));
    forms.push_back(product);
    Endomorphism phi(std::move(forms), label);
    if (!is_morphism(phi)) return std::nullopt;
    return phi;
  };
  std::vector<std::vector<Integer>> lin1, lin2;
  std::optional<Endomorphism> phi1, phi2;
  std::size_t attempts = 0;
  while (!phi1) {
    if (++attempts > options.max_attempts) throw BudgetError("make_example_maps: retries exhausted");
    phi1 = build(lin1, "phi1");
  }
  while (!phi2) {
    if (++attempts > options.max_attempts) throw BudgetError("make_example_maps: retries exhausted");
    phi2 = build(lin2, "phi2");
  }
  return ExampleMaps{std::move(*phi1), std::move(*phi2), std::move(lin1), std::move(lin2), attempts};
}

}  // namespace orbitdep
