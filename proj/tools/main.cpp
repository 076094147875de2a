// orbitdep: heights, orbits and multiplicative dependence scans.

#include "orbitdep/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace orbitdep;

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct ScanFlags {
  std::string config;
  std::string c;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_degree;
  std::optional<std::size_t> max_points;
  std::string json;
  std::string csv;
  bool chain = false;
  std::optional<long> r;
  std::optional<long> s;
};

std::string format_factorization(const Integer& n) {
  if (n == 1) return "1";
  const Factorization f = factor(n);
  std::string out;
  for (const auto& pp : f.factors) {
    if (!out.empty()) out += " * ";
    out += to_string(pp.prime);
    if (pp.exponent != 1) out += "^" + std::to_string(pp.exponent);
  }
  return out;
}

std::string nats(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Divisor divisor_from_flag(const std::string& spec, std::size_t dimension) {
  std::vector<std::size_t> indices;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      indices.push_back(std::stoul(part));
    } catch (const std::exception&) {
      throw ConfigError("--divisor", "expected coordinate indices like 0,1");
    }
  }
  return Divisor::coordinate_product(dimension, indices);
}

LoadedConfig apply_overrides(const ScanFlags& f) {
  LoadedConfig loaded = load_config(f.config);
  ScenarioConfig& c = loaded.scenario;
  try {
    if (!f.c.empty()) c.c = parse_rational(f.c);
  } catch (const std::exception& e) {
    throw ConfigError("--c", e.what());
  }
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.seed) c.random_seed = *f.seed;
  if (f.max_degree) c.budget.max_degree = *f.max_degree;
  if (f.max_points) c.budget.max_points = *f.max_points;
  if (f.chain) c.chains = true;
  if (f.r) c.r = Integer(*f.r);
  if (f.s) c.s = Integer(*f.s);
  if (!f.json.empty()) loaded.output.json = f.json;
  if (!f.csv.empty()) loaded.output.csv = f.csv;
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError("", e.what());
  }
  return loaded;
}

int emit_report(const ScanReport& report, const OutputPaths& out) {
  const std::string json = report_json_text(report);
  if (out.json.empty()) {
    std::cout << json;
  } else {
    write_file(out.json, json);
  }
  if (!out.csv.empty()) write_file(out.csv, report_csv(report));
  std::cerr << report.kind << ": " << report.summary.hits << " hits, " << report.summary.flagged << " flagged, "
            << report.summary.orbit_points << " orbit points\n";
  if (report.budget_exhausted) {
    std::cerr << "budget exhausted; partial report written\n";
    return kExitBudget;
  }
  return 0;
}

void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--config", f.config, "Scenario JSON file")->required();
  cmd->add_option("--c", f.c, "Ratio constant c in [0, 1), e.g. 1/2");
  cmd->add_option("--epsilon", f.epsilon, "Quasi-integrality epsilon");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--max-degree", f.max_degree, "Largest word degree");
  cmd->add_option("--max-points", f.max_points, "Orbit point budget per seed");
  cmd->add_option("--json", f.json, "Write the JSON report here (default stdout)");
  cmd->add_option("--csv", f.csv, "Write the hit table here");
  cmd->add_flag("--chain", f.chain, "Attach proof-chain ledgers to hits");
}

int run(int argc, char** argv) {
  CLI::App app{"Heights, semigroup orbits and multiplicative dependence"};
  app.require_subcommand(1);

  std::string point_text;
  bool height_json = false;
  auto* height = app.add_subcommand("height", "Weil height of a point with its exact factorization");
  height->add_option("--point", point_text, "Point such as [3:4:12]")->required();
  height->add_flag("--json", height_json, "Print {nats, exact_finite, arch}");

  std::string divisor_text, places_text;
  auto* local = app.add_subcommand("local-height", "Local heights of a point relative to a coordinate divisor");
  local->add_option("--point", point_text, "Point such as [2:3]")->required();
  local->add_option("--divisor", divisor_text, "Coordinate indices of D, e.g. 0 or 0,1")->required();
  local->add_option("--places", places_text, "Finite primes of S, e.g. 2,3");

  ScanFlags orbit_flags;
  auto* orbit_cmd = app.add_subcommand("orbit", "Enumerate the semigroup orbit of a point");
  orbit_cmd->add_option("--config", orbit_flags.config, "Scenario JSON file")->required();
  orbit_cmd->add_option("--point", point_text, "Seed (default: first seed of the config)");
  orbit_cmd->add_option("--max-degree", orbit_flags.max_degree, "Largest word degree");
  orbit_cmd->add_option("--max-points", orbit_flags.max_points, "Orbit point budget");

  std::string q1_text, q2_text, ratio_text;
  std::vector<std::string> gamma_text;
  bool vector_mode = false;
  long vector_bound = 10;
  auto* deps = app.add_subcommand("deps", "Solve Q1^r = u Q2^s with u in Gamma");
  deps->add_option("--q1", q1_text, "Torus point, e.g. 4 or 4,8")->required();
  deps->add_option("--q2", q2_text, "Torus point")->required();
  deps->add_option("--gamma", gamma_text, "Gamma generator (repeatable)");
  deps->add_option("--ratio", ratio_text, "Bound on |s/r|");
  deps->add_flag("--vector", vector_mode, "Componentwise exponents r_i, s_i");
  deps->add_option("--bound", vector_bound, "Exponent box for --vector");

  ScanFlags t1, t2, hyp;
  auto* scan_t1 = app.add_subcommand("scan-t1", "Dependence scan with free r, s and |s/r| deg psi <= c deg phi");
  add_scan_flags(scan_t1, t1);
  auto* scan_t2 = app.add_subcommand("scan-t2", "Dependence scan phi(psi(P))^r = u psi(P)^s with fixed r, s");
  add_scan_flags(scan_t2, t2);
  scan_t2->add_option("--r", t2.r, "Exponent r");
  scan_t2->add_option("--s", t2.s, "Exponent s");
  auto* hyp_cmd = app.add_subcommand("hyp-scan", "Quasi-integrality scan of orbit points");
  add_scan_flags(hyp_cmd, hyp);

  ScanFlags const_flags;
  auto* constants = app.add_subcommand("constants", "Empirical height-defect constants over the seeds");
  constants->add_option("--config", const_flags.config, "Scenario JSON file")->required();
  constants->add_option("--json", const_flags.json, "Write JSON here (default stdout)");

  std::size_t ex_dim = 1;
  unsigned ex_degree = 8;
  std::uint64_t ex_seed = 0;
  std::string ex_json;
  auto* make_example = app.add_subcommand("make-example", "Build the two example maps of a given degree");
  make_example->add_option("--dimension", ex_dim, "N");
  make_example->add_option("--degree", ex_degree, "d > N + 1");
  make_example->add_option("--seed", ex_seed, "Random seed");
  make_example->add_option("--json", ex_json, "Write the config here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*height) {
    const auto p = ProjectivePoint::parse(point_text);
    const Integer m = p.max_abs();
    if (height_json) {
      std::cout << to_json(weil_height(p)).dump() << "\n";
      return 0;
    }
    std::cout << "h(" << p.to_string() << ") = log " << to_string(m) << " = " << nats(weil_height(p).total())
              << " nats\n";
    std::cout << to_string(m) << " = " << format_factorization(m) << "\n";
    return 0;
  }

  if (*local) {
    const auto p = ProjectivePoint::parse(point_text);
    const Divisor d = divisor_from_flag(divisor_text, p.dimension());
    PlaceSet s;
    std::stringstream ss(places_text);
    std::string part;
    while (std::getline(ss, part, ',')) s.insert(Integer(part, 10));
    if (d.contains(p)) throw DomainError("point lies on the divisor");
    const auto dec = all_local_heights(d, p);
    std::cout << "F(P) = " << to_string(dec.form_value) << "\n";
    std::cout << "lambda_inf = " << nats(dec.arch()) << "\n";
    for (const auto& pp : dec.finite.factors) {
      std::cout << "lambda_" << to_string(pp.prime) << " = " << pp.exponent << " log " << to_string(pp.prime) << " = "
                << nats(local_height(Place::finite(pp.prime), d, p)) << (s.contains_prime(pp.prime) ? "  (in S)" : "")
                << "\n";
    }
    std::cout << "sum = " << nats(dec.total()) << ", deg(D) h(P) = " << nats(divisor_height(d, p).total()) << "\n";
    std::cout << "sum outside S = " << nats(sum_outside_S(d, s, p).nats) << "\n";
    return 0;
  }

  if (*orbit_cmd) {
    LoadedConfig loaded = load_config(orbit_flags.config);
    ScenarioConfig& c = loaded.scenario;
    if (orbit_flags.max_degree) c.budget.max_degree = *orbit_flags.max_degree;
    if (orbit_flags.max_points) c.budget.max_points = *orbit_flags.max_points;
    std::optional<ProjectivePoint> seed;
    if (!point_text.empty()) {
      seed = ProjectivePoint::parse(point_text);
    } else {
      const auto seeds = scenario_seeds(c);
      if (seeds.empty()) throw ConfigError("seeds", "no seed point");
      seed = seeds.front();
    }
    const Orbit orbit = orbit_enumerate(c.generators, *seed, c.budget);
    std::cout << "index\tdegree\tword\tpoint\theight_nats\n";
    for (std::size_t i = 0; i < orbit.records.size(); ++i) {
      const auto& rec = orbit.records[i];
      std::cout << i << '\t' << rec.degree << '\t' << word_indices(rec.word) << '\t' << rec.point.to_string() << '\t'
                << nats(rec.height.total()) << '\n';
    }
    for (const auto& w : orbit.warnings) std::cerr << "warning: " << w << "\n";
    if (orbit.budget_exhausted) {
      std::cerr << "budget exhausted; partial orbit printed\n";
      return kExitBudget;
    }
    return 0;
  }

  if (*deps) {
    const auto q1 = TorusPoint::parse(q1_text);
    const auto q2 = TorusPoint::parse(q2_text);
    std::vector<TorusPoint> gens;
    for (const auto& g : gamma_text) gens.push_back(TorusPoint::parse(g));
    const GroupGamma gamma(q1.dimension(), gens);
    std::optional<Rational> ratio;
    if (!ratio_text.empty()) ratio = parse_rational(ratio_text);
    if (vector_mode) {
      VectorConstraint vc;
      vc.bound = vector_bound;
      vc.ratio_bound = ratio;
      for (std::size_t i = 1; i <= q1.dimension(); ++i) vc.divisor_indices.push_back(i);
      const auto res = solve_vector_dependence(q1, q2, gamma, vc);
      std::cout << "status " << to_string(res.status) << "\n";
      if (res.relation) {
        auto join = [](const IntVector& v) {
          std::string out;
          for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + to_string(v[i]);
          return out;
        };
        std::cout << "relation r=(" << join(res.relation->r) << ") s=(" << join(res.relation->s)
                  << ") u=" << res.relation->u.to_string() << " e=[" << join(res.relation->gamma_exponents) << "]\n";
      }
      return 0;
    }
    DependenceConstraint dc;
    dc.ratio_bound = ratio;
    const auto res = solve_dependence(q1, q2, gamma, dc);
    std::cout << "status " << to_string(res.status) << "\n";
    if (res.relation) {
      std::string e;
      for (std::size_t i = 0; i < res.relation->gamma_exponents.size(); ++i) {
        e += (i ? "," : "") + to_string(res.relation->gamma_exponents[i]);
      }
      std::cout << "relation r=" << to_string(res.relation->r) << ", s=" << to_string(res.relation->s)
                << ", u=" << res.relation->u.to_string() << ", e=[" << e << "]\n";
    }
    return 0;
  }

  if (*scan_t1) {
    const auto loaded = apply_overrides(t1);
    return emit_report(scan_theorem1(loaded.scenario), loaded.output);
  }
  if (*scan_t2) {
    const auto loaded = apply_overrides(t2);
    return emit_report(scan_theorem2(loaded.scenario), loaded.output);
  }
  if (*hyp_cmd) {
    const auto loaded = apply_overrides(hyp);
    return emit_report(hyp_scan(loaded.scenario), loaded.output);
  }

  if (*constants) {
    const LoadedConfig loaded = load_config(const_flags.config);
    const auto seeds = scenario_seeds(loaded.scenario);
    const std::string text = to_json(estimate_constants(loaded.scenario.generators, seeds)).dump(2) + "\n";
    if (const_flags.json.empty()) {
      std::cout << text;
    } else {
      write_file(const_flags.json, text);
    }
    return 0;
  }

  if (*make_example) {
    const auto maps = make_example_maps(ex_dim, ex_degree, ex_seed);
    ScenarioConfig c;
    c.dimension = ex_dim;
    c.generators = {maps.phi1, maps.phi2};
    c.example = ExampleSpec{ex_dim, ex_degree, ex_seed};
    c.divisor = Divisor::coordinate_product(ex_dim, std::vector<std::size_t>{ex_dim});
    c.seed_height_bound = 0.0;
    const std::string text = config_to_json(c).dump(2) + "\n";
    std::cerr << "general position: " << (in_general_position(maps.linear1) ? "yes" : "no") << ", "
              << (in_general_position(maps.linear2) ? "yes" : "no") << " after " << maps.attempts << " attempts\n";
    if (ex_json.empty()) {
      std::cout << text;
    } else {
      write_file(ex_json, text);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
