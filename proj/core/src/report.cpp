#include "orbitdep/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace orbitdep {

namespace {

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string field(const std::string& path, const char* name) { return path.empty() ? name : path + "." + name; }

const Json& require(const Json& j, const char* name, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw ConfigError(field(path, name), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, const char* name) {
  auto it = j.find(name);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

bool is_nonnegative_integer(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0);
}

Integer integer_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) {
    return j.is_number_unsigned() ? Integer(j.get<unsigned long>()) : Integer(j.get<long>());
  }
  if (j.is_string()) {
    Integer n;
    if (n.set_str(j.get<std::string>(), 10) != 0) throw ConfigError(path, "not an integer: " + j.get<std::string>());
    return n;
  }
  throw ConfigError(path, "expected an integer");
}

Rational rational_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(integer_from_json(j, path));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (j.is_number_float()) {
    // Decimal literal read exactly as written, e.g. 0.5 -> 1/2.
    const std::string text = j.dump();  // shortest round-trip form
    const auto dot = text.find('.');
    if (text.find_first_of("eE") != std::string::npos) throw ConfigError(path, "use a fraction string for " + text);
    if (dot == std::string::npos) return Rational(Integer(text, 10));
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    Integer den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    Rational q(Integer(digits, 10), den);
    q.canonicalize();
    return q;
  }
  throw ConfigError(path, "expected a rational number");
}

double double_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>()).get_d();
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }
  throw ConfigError(path, "expected a number");
}

std::uint64_t count_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() <= 0)) {
    throw ConfigError(path, "expected a positive integer");
  }
  return j.get<std::uint64_t>();
}

bool bool_from_json(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string string_from_json(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Json integer_json(const Integer& n) {
  if (n.fits_slong_p()) return n.get_si();
  return to_string(n);
}

Json number_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ProjectivePoint point_from_json(const Json& j, std::size_t dimension, const std::string& path) {
  ProjectivePoint p = ProjectivePoint::from_ints({1, 1});
  try {
    if (j.is_string()) {
      p = ProjectivePoint::parse(j.get<std::string>());
    } else if (j.is_array()) {
      std::vector<Rational> raw;
      for (std::size_t i = 0; i < j.size(); ++i) raw.push_back(rational_from_json(j[i], at(path, i)));
      p = ProjectivePoint::normalize(std::span<const Rational>(raw));
    } else {
      throw ConfigError(path, "expected \"[a0:...:aN]\" or an array of coordinates");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  if (p.dimension() != dimension) {
    throw ConfigError(path, "point " + p.to_string() + " is not in P^" + std::to_string(dimension));
  }
  return p;
}

TorusPoint torus_from_json(const Json& j, std::size_t dimension, const std::string& path) {
  std::vector<Rational> coords;
  try {
    if (j.is_string()) {
      coords = TorusPoint::parse(j.get<std::string>()).coords();
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) coords.push_back(rational_from_json(j[i], at(path, i)));
    } else if (j.is_number_integer()) {
      coords.push_back(rational_from_json(j, path));
    } else {
      throw ConfigError(path, "expected \"(u1,...,uN)\" or an array");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  if (coords.size() != dimension) {
    throw ConfigError(path, "torus point needs " + std::to_string(dimension) + " coordinates");
  }
  for (const auto& x : coords) {
    if (x == 0) throw ConfigError(path, "torus coordinates must be nonzero");
  }
  return TorusPoint(std::move(coords));
}

Word word_from_json(const Json& j, const std::string& path) {
  std::vector<std::size_t> letters;
  for (std::size_t i = 0; i < require_array(j, path).size(); ++i) {
    if (!is_nonnegative_integer(j[i])) throw ConfigError(at(path, i), "expected a generator index");
    letters.push_back(j[i].get<std::size_t>());
  }
  return Word(std::move(letters));
}

IntVector intvector_from_json(const Json& j, const std::string& path) {
  IntVector v;
  for (std::size_t i = 0; i < require_array(j, path).size(); ++i) v.push_back(integer_from_json(j[i], at(path, i)));
  return v;
}

Json intvector_json(const IntVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(integer_json(x));
  return out;
}

Json budget_json(const OrbitBudget& b) {
  return Json{{"max_degree", b.max_degree},
              {"max_points", b.max_points},
              {"max_digits", b.max_digits},
              {"max_height_nats", number_json(b.max_height_nats)},
              {"max_words", b.max_words}};
}

OrbitBudget budget_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  OrbitBudget b;
  for (const auto& [key, value] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "max_degree") {
      b.max_degree = count_from_json(value, p);
    } else if (key == "max_points") {
      b.max_points = count_from_json(value, p);
    } else if (key == "max_digits") {
      b.max_digits = count_from_json(value, p);
    } else if (key == "max_words") {
      b.max_words = count_from_json(value, p);
    } else if (key == "max_height_nats") {
      b.max_height_nats = value.is_null() ? std::numeric_limits<double>::infinity() : double_from_json(value, p);
      if (!(b.max_height_nats > 0)) throw ConfigError(p, "must be positive");
    } else {
      throw ConfigError(p, "unknown field");
    }
  }
  return b;
}

Json chain_json(const ChainLedger& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json js{{"name", s.name},         {"lhs", number_json(s.lhs)}, {"rhs", number_json(s.rhs)},
            {"holds", s.holds},       {"tight", s.tight},          {"empirical", s.empirical}};
    if (!s.note.empty()) js["note"] = s.note;
    steps.push_back(std::move(js));
  }
  Json out{{"available", c.available}, {"coefficient", number_json(c.coefficient)}, {"steps", std::move(steps)}};
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

Json hit_json(const DependenceHit& h) {
  Json out{{"seed", h.seed.to_string()},
           {"word_phi", to_json(h.phi)},
           {"word_psi", to_json(h.psi)},
           {"deg_phi", h.deg_phi},
           {"deg_psi", h.deg_psi},
           {"phi_point", h.phi_point.to_string()},
           {"psi_point", h.psi_point.to_string()},
           {"relation", to_json(h.relation)},
           {"ratio", to_string(h.ratio)},
           {"height_nats", number_json(h.height_nats)},
           {"outside_sum", number_json(h.outside_sum)},
           {"integrality_ratio", h.integrality_ratio ? number_json(*h.integrality_ratio) : Json(nullptr)},
           {"verified", h.verified}};
  if (h.chain) out["chain"] = chain_json(*h.chain);
  return out;
}

Json hyp_json(const HypPoint& p) {
  return Json{{"seed", p.seed.to_string()},
              {"word", to_json(p.word)},
              {"degree", p.degree},
              {"point", p.point.to_string()},
              {"height_nats", number_json(p.height_nats)},
              {"outside_sum", number_json(p.outside_sum)},
              {"comparison_height", number_json(p.comparison_height)},
              {"integrality_ratio", number_json(p.integrality_ratio)}};
}

Json summary_json(const ScanSummary& s) {
  return Json{{"seeds_total", s.seeds_total},
              {"seeds_scanned", s.seeds_scanned},
              {"seeds_skipped", s.seeds_skipped},
              {"orbit_points", s.orbit_points},
              {"pairs_examined", s.pairs_examined},
              {"pairs_excluded", s.pairs_excluded},
              {"solver_calls", s.solver_calls},
              {"inconclusive", s.inconclusive},
              {"hits", s.hits},
              {"distinct_seeds", s.distinct_seeds},
              {"distinct_points", s.distinct_points},
              {"flagged", s.flagged},
              {"min_integrality_ratio",
               s.min_integrality_ratio ? number_json(*s.min_integrality_ratio) : Json(nullptr)}};
}

std::string csv_number(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string word_indices(const Word& w) {
  if (w.is_identity()) return "id";
  std::string out;
  for (std::size_t i = 0; i < w.letters().size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(w.letters()[i]);
  }
  return out;
}

Json to_json(const HomogeneousForm& f) {
  Json monomials = Json::array();
  for (const auto& m : f.monomials()) monomials.push_back(Json{{"exps", m.exps}, {"coef", integer_json(m.coef)}});
  return Json{{"monomials", std::move(monomials)}};
}

Json to_json(const Endomorphism& phi) {
  Json forms = Json::array();
  for (const auto& f : phi.forms()) forms.push_back(to_json(f));
  Json out = Json::object();
  if (!phi.label().empty()) out["label"] = phi.label();
  out["forms"] = std::move(forms);
  return out;
}

Json to_json(const Divisor& d) { return to_json(d.form()); }

Json to_json(const HeightValue& h) {
  Json finite = Json::array();
  for (const auto& [p, e] : h.finite()) finite.push_back(Json::array({integer_json(p), e}));
  return Json{{"nats", number_json(h.total())}, {"exact_finite", std::move(finite)}, {"arch", number_json(h.arch())}};
}

Json to_json(const TorusPoint& t) {
  Json out = Json::array();
  for (const auto& x : t.coords()) out.push_back(to_string(x));
  return out;
}

Json to_json(const Word& w) { return Json(w.letters()); }

Json to_json(const DependenceRelation& rel) {
  return Json{{"r", integer_json(rel.r)},
              {"s", integer_json(rel.s)},
              {"gamma_exponents", intvector_json(rel.gamma_exponents)},
              {"u", to_json(rel.u)},
              {"status", "found"}};
}

Json to_json(const EmpiricalConstants& c) {
  Json defects = Json::array();
  for (double d : c.defects) defects.push_back(number_json(d));
  return Json{{"label", EmpiricalConstants::label},
              {"c1_hat", number_json(c.c1_hat)},
              {"c5_hat", number_json(c.c5_hat)},
              {"defects", std::move(defects)},
              {"sample_size", c.sample_size}};
}

HomogeneousForm form_from_json(const Json& j, std::size_t num_vars, const std::string& path) {
  const std::string mpath = field(path, "monomials");
  const Json& ms = require_array(require(j, "monomials", path), mpath);
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string p = at(mpath, i);
    const Json& exps = require_array(require(ms[i], "exps", p), field(p, "exps"));
    if (exps.size() != num_vars) {
      throw ConfigError(field(p, "exps"), "expected " + std::to_string(num_vars) + " exponents");
    }
    Monomial m;
    for (std::size_t k = 0; k < exps.size(); ++k) {
      if (!is_nonnegative_integer(exps[k])) throw ConfigError(at(field(p, "exps"), k), "expected a nonnegative integer");
      m.exps.push_back(exps[k].get<unsigned>());
    }
    m.coef = integer_from_json(require(ms[i], "coef", p), field(p, "coef"));
    terms.push_back(std::move(m));
  }
  if (terms.empty()) throw ConfigError(mpath, "a form needs at least one monomial");
  try {
    HomogeneousForm f(num_vars, std::move(terms));
    if (f.is_zero()) throw ConfigError(mpath, "form is identically zero");
    return f;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

Endomorphism endomorphism_from_json(const Json& j, std::size_t dimension, const std::string& path) {
  const std::string fpath = field(path, "forms");
  const Json& fs = require_array(require(j, "forms", path), fpath);
  if (fs.size() != dimension + 1) {
    throw ConfigError(fpath, "expected " + std::to_string(dimension + 1) + " forms");
  }
  std::vector<HomogeneousForm> forms;
  for (std::size_t i = 0; i < fs.size(); ++i) forms.push_back(form_from_json(fs[i], dimension + 1, at(fpath, i)));
  std::string label;
  if (const Json* l = optional_field(j, "label")) label = string_from_json(*l, field(path, "label"));
  try {
    return Endomorphism(std::move(forms), std::move(label));
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

LoadedConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  static const std::set<std::string> known = {
      "schema", "dimension", "generators", "example", "divisor", "places", "gamma", "c", "epsilon", "r", "s",
      "corollary", "seeds", "seed_height_bound", "seed_max_coordinate", "budget", "random_seed",
      "solver_search_limit", "chains", "hyp_variant", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }
  const Json& schema = require(j, "schema", "");
  if (!schema.is_number_integer() || schema.get<long>() != kConfigSchema) {
    throw ConfigError("schema", "unsupported schema version (expected " + std::to_string(kConfigSchema) + ")");
  }

  LoadedConfig out;
  ScenarioConfig& c = out.scenario;
  const Json& dim = require(j, "dimension", "");
  if (!is_nonnegative_integer(dim) || dim.get<std::size_t>() == 0) throw ConfigError("dimension", "expected N >= 1");
  c.dimension = dim.get<std::size_t>();

  if (const Json* r = optional_field(j, "random_seed")) {
    if (!is_nonnegative_integer(*r)) throw ConfigError("random_seed", "expected a nonnegative integer");
    c.random_seed = r->get<std::uint64_t>();
  }

  const Json* gens = optional_field(j, "generators");
  const Json* example = optional_field(j, "example");
  if (!gens && !example) throw ConfigError("generators", "give \"generators\" or \"example\"");
  if (gens) {
    require_array(*gens, "generators");
    if (gens->empty()) throw ConfigError("generators", "at least one endomorphism is required");
    for (std::size_t i = 0; i < gens->size(); ++i) {
      c.generators.push_back(endomorphism_from_json((*gens)[i], c.dimension, at("generators", i)));
    }
  }
  if (example) {
    ExampleSpec spec;
    spec.dimension = c.dimension;
    if (const Json* d = optional_field(*example, "dimension")) {
      if (!is_nonnegative_integer(*d) || d->get<std::size_t>() != c.dimension) {
        throw ConfigError("example.dimension", "must equal the scenario dimension");
      }
    }
    const Json& deg = require(*example, "degree", "example");
    if (!is_nonnegative_integer(deg)) throw ConfigError("example.degree", "expected a positive integer");
    spec.degree = deg.get<unsigned>();
    spec.seed = c.random_seed;
    if (const Json* s = optional_field(*example, "seed")) {
      if (!is_nonnegative_integer(*s)) throw ConfigError("example.seed", "expected a nonnegative integer");
      spec.seed = s->get<std::uint64_t>();
    }
    // Explicit generators (as in a report echo) take precedence.
    if (!gens) {
      try {
        auto maps = make_example_maps(spec.dimension, spec.degree, spec.seed);
        c.generators = {maps.phi1, maps.phi2};
      } catch (const std::exception& e) {
        throw ConfigError("example", e.what());
      }
    }
    c.example = spec;
  }

  if (const Json* d = optional_field(j, "divisor")) {
    if (d->is_object() && d->contains("coordinates")) {
      const Json& idx = require_array((*d)["coordinates"], "divisor.coordinates");
      std::vector<std::size_t> indices;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (!is_nonnegative_integer(idx[i]) || idx[i].get<std::size_t>() > c.dimension) {
          throw ConfigError(at("divisor.coordinates", i), "expected a coordinate index in 0..N");
        }
        indices.push_back(idx[i].get<std::size_t>());
      }
      try {
        c.divisor = Divisor::coordinate_product(c.dimension, indices);
      } catch (const std::exception& e) {
        throw ConfigError("divisor", e.what());
      }
    } else {
      try {
        c.divisor = Divisor(form_from_json(*d, c.dimension + 1, "divisor"));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError("divisor", e.what());
      }
    }
  }

  if (const Json* p = optional_field(j, "places")) {
    require_array(*p, "places");
    for (std::size_t i = 0; i < p->size(); ++i) {
      const Integer q = integer_from_json((*p)[i], at("places", i));
      if (q < 2 || !is_prime(q)) throw ConfigError(at("places", i), to_string(q) + " is not a prime");
      c.places.insert(q);
    }
  }
  if (const Json* g = optional_field(j, "gamma")) {
    require_array(*g, "gamma");
    for (std::size_t i = 0; i < g->size(); ++i) c.gamma.push_back(torus_from_json((*g)[i], c.dimension, at("gamma", i)));
  }
  if (const Json* x = optional_field(j, "c")) c.c = rational_from_json(*x, "c");
  if (const Json* x = optional_field(j, "epsilon")) c.epsilon = double_from_json(*x, "epsilon");
  if (const Json* x = optional_field(j, "r")) c.r = integer_from_json(*x, "r");
  if (const Json* x = optional_field(j, "s")) c.s = integer_from_json(*x, "s");
  if (const Json* x = optional_field(j, "corollary")) c.corollary = bool_from_json(*x, "corollary");
  if (const Json* x = optional_field(j, "chains")) c.chains = bool_from_json(*x, "chains");
  if (const Json* x = optional_field(j, "hyp_variant")) c.hyp_variant = string_from_json(*x, "hyp_variant");
  if (const Json* x = optional_field(j, "solver_search_limit")) {
    c.solver_search_limit = count_from_json(*x, "solver_search_limit");
  }
  if (const Json* s = optional_field(j, "seeds")) {
    require_array(*s, "seeds");
    for (std::size_t i = 0; i < s->size(); ++i) c.seeds.push_back(point_from_json((*s)[i], c.dimension, at("seeds", i)));
  }
  const Json* hb = optional_field(j, "seed_height_bound");
  const Json* hm = optional_field(j, "seed_max_coordinate");
  if (hb && hm) throw ConfigError("seed_height_bound", "give at most one of seed_height_bound and seed_max_coordinate");
  if (hb) c.seed_height_bound = double_from_json(*hb, "seed_height_bound");
  if (hm) {
    const Integer h = integer_from_json(*hm, "seed_max_coordinate");
    if (h < 1 || !h.fits_slong_p()) throw ConfigError("seed_max_coordinate", "expected a positive integer");
    c.seed_height_bound = std::log(h.get_d());
  }
  if (c.seeds.empty() && !c.seed_height_bound) {
    throw ConfigError("seeds", "give seeds, seed_height_bound or seed_max_coordinate");
  }
  if (const Json* b = optional_field(j, "budget")) c.budget = budget_from_json(*b, "budget");
  if (const Json* o = optional_field(j, "output")) {
    if (!o->is_object()) throw ConfigError("output", "expected an object");
    for (const auto& [key, value] : o->items()) {
      if (key == "json") {
        out.output.json = string_from_json(value, "output.json");
      } else if (key == "csv") {
        out.output.csv = string_from_json(value, "output.csv");
      } else {
        throw ConfigError("output." + key, "unknown field");
      }
    }
  }

  try {
    c.validate();
  } catch (const DomainError& e) {
    // validate() messages start with the field name.
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    if (colon == std::string::npos) throw ConfigError("", msg);
    throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
  }
  return out;
}

LoadedConfig parse_config_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Locate the byte offset as line/column for the diagnostic.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), "malformed JSON");
  }
  return parse_config(j);
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Json config_to_json(const ScenarioConfig& c, const OutputPaths& output) {
  Json out{{"schema", kConfigSchema}, {"dimension", c.dimension}};
  if (c.example) {
    out["example"] = Json{{"dimension", c.example->dimension}, {"degree", c.example->degree}, {"seed", c.example->seed}};
  }
  // Generators are always echoed so a report replays without the builder.
  Json gens = Json::array();
  for (const auto& g : c.generators) gens.push_back(to_json(g));
  out["generators"] = std::move(gens);
  if (c.divisor) out["divisor"] = to_json(*c.divisor);
  Json places = Json::array();
  for (const auto& p : c.places.primes()) places.push_back(integer_json(p));
  out["places"] = std::move(places);
  Json gamma = Json::array();
  for (const auto& g : c.gamma) gamma.push_back(to_json(g));
  out["gamma"] = std::move(gamma);
  out["c"] = to_string(c.c);
  out["epsilon"] = c.epsilon;
  if (c.r) out["r"] = integer_json(*c.r);
  if (c.s) out["s"] = integer_json(*c.s);
  out["corollary"] = c.corollary;
  Json seeds = Json::array();
  for (const auto& p : c.seeds) seeds.push_back(p.to_string());
  out["seeds"] = std::move(seeds);
  if (c.seed_height_bound) out["seed_height_bound"] = *c.seed_height_bound;
  out["budget"] = budget_json(c.budget);
  out["random_seed"] = c.random_seed;
  out["solver_search_limit"] = c.solver_search_limit;
  out["chains"] = c.chains;
  out["hyp_variant"] = c.hyp_variant;
  if (!output.json.empty() || !output.csv.empty()) {
    Json o = Json::object();
    if (!output.json.empty()) o["json"] = output.json;
    if (!output.csv.empty()) o["csv"] = output.csv;
    out["output"] = std::move(o);
  }
  return out;
}

Json report_to_json(const ScanReport& report) {
  Json out{{"schema", kConfigSchema}, {"kind", report.kind}, {"config", config_to_json(report.config)}};
  Json places = Json::array();
  for (const auto& p : report.places.primes()) places.push_back(integer_json(p));
  out["effective_places"] = std::move(places);
  Json hits = Json::array();
  for (const auto& h : report.hits) hits.push_back(hit_json(h));
  out["hits"] = std::move(hits);
  out["summary"] = summary_json(report.summary);
  out["constants"] = to_json(report.constants);
  out["flags"] = Json{{"budget_exhausted", report.budget_exhausted}, {"inconclusive", report.summary.inconclusive > 0}};
  if (report.kind == "hyp-scan") {
    Json flagged = Json::array();
    for (const auto& p : report.hyp_points) flagged.push_back(hyp_json(p));
    out["flagged"] = std::move(flagged);
    Json patterns = Json::array();
    for (const auto& p : report.candidates.patterns) patterns.push_back(Json{{"pattern", p.pattern}, {"count", p.count}});
    Json forms = Json::array();
    for (const auto& f : report.candidates.forms) forms.push_back(f.to_string());
    out["candidates"] = Json{{"status", "candidate, not certified"},
                             {"patterns", std::move(patterns)},
                             {"interpolation_degree", report.candidates.interpolation_degree
                                                          ? Json(*report.candidates.interpolation_degree)
                                                          : Json(nullptr)},
                             {"forms", std::move(forms)}};
  }
  out["notes"] = report.notes;
  return out;
}

std::string report_json_text(const ScanReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string report_csv(const ScanReport& report) {
  std::string out = "seed,word_phi,word_psi,deg_phi,deg_psi,r,s,ratio,height_nats,integrality_ratio\n";
  for (const auto& h : report.hits) {
    out += csv_quote(h.seed.to_string()) + ',' + word_indices(h.phi) + ',' + word_indices(h.psi) + ',' +
           std::to_string(h.deg_phi) + ',' + std::to_string(h.deg_psi) + ',' + to_string(h.relation.r) + ',' +
           to_string(h.relation.s) + ',' + to_string(h.ratio) + ',' + csv_number(h.height_nats) + ',' +
           (h.integrality_ratio ? csv_number(*h.integrality_ratio) : std::string()) + '\n';
  }
  return out;
}

ScanReport report_from_json(const Json& j) {
  ScanReport report;
  report.kind = string_from_json(require(j, "kind", ""), "kind");
  Json config = require(j, "config", "");
  report.config = parse_config(config).scenario;
  const std::size_t n = report.config.dimension;
  if (const Json* p = optional_field(j, "effective_places")) {
    for (std::size_t i = 0; i < require_array(*p, "effective_places").size(); ++i) {
      report.places.insert(integer_from_json((*p)[i], at("effective_places", i)));
    }
  } else {
    report.places = effective_places(report.config);
  }
  const Json& hits = require_array(require(j, "hits", ""), "hits");
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const std::string path = at("hits", i);
    const Json& h = hits[i];
    DependenceHit hit;
    hit.seed = point_from_json(require(h, "seed", path), n, field(path, "seed"));
    hit.phi = word_from_json(require(h, "word_phi", path), field(path, "word_phi"));
    hit.psi = word_from_json(require(h, "word_psi", path), field(path, "word_psi"));
    hit.deg_phi = require(h, "deg_phi", path).get<std::uint64_t>();
    hit.deg_psi = require(h, "deg_psi", path).get<std::uint64_t>();
    hit.phi_point = point_from_json(require(h, "phi_point", path), n, field(path, "phi_point"));
    hit.psi_point = point_from_json(require(h, "psi_point", path), n, field(path, "psi_point"));
    const std::string rpath = field(path, "relation");
    const Json& rel = require(h, "relation", path);
    hit.relation.r = integer_from_json(require(rel, "r", rpath), field(rpath, "r"));
    hit.relation.s = integer_from_json(require(rel, "s", rpath), field(rpath, "s"));
    hit.relation.gamma_exponents =
        intvector_from_json(require(rel, "gamma_exponents", rpath), field(rpath, "gamma_exponents"));
    hit.relation.u = torus_from_json(require(rel, "u", rpath), n, field(rpath, "u"));
    hit.ratio = rational_from_json(require(h, "ratio", path), field(path, "ratio"));
    hit.verified = require(h, "verified", path).get<bool>();
    report.hits.push_back(std::move(hit));
  }
  if (const Json* f = optional_field(j, "flagged")) {
    for (std::size_t i = 0; i < require_array(*f, "flagged").size(); ++i) {
      const std::string path = at("flagged", i);
      const Json& x = (*f)[i];
      HypPoint p;
      p.seed = point_from_json(require(x, "seed", path), n, field(path, "seed"));
      p.word = word_from_json(require(x, "word", path), field(path, "word"));
      p.point = point_from_json(require(x, "point", path), n, field(path, "point"));
      p.flagged = true;
      report.hyp_points.push_back(std::move(p));
    }
  }
  if (const Json* flags = optional_field(j, "flags")) {
    report.budget_exhausted = require(*flags, "budget_exhausted", "flags").get<bool>();
  }
  return report;
}

}  // namespace orbitdep
