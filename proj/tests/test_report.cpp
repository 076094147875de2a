#include "orbitdep/report.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace orbitdep;

namespace {

std::string data_path(const std::string& name) { return std::string(ORBITDEP_TEST_DATA) + "/" + name; }

Json squaring_config() {
  return Json::parse(R"json({
    "schema": 1,
    "dimension": 1,
    "generators": [{"label": "f", "forms": [
      {"monomials": [{"exps": [2, 0], "coef": 1}]},
      {"monomials": [{"exps": [0, 2], "coef": 1}]}]}],
    "divisor": {"coordinates": [0, 1]},
    "c": "1/2",
    "seeds": ["[1:1]", "[1:2]"],
    "gamma": ["(2)"],
    "budget": {"max_degree": 16}
  })json");
}

std::string error_of(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing accepts the documented forms") {
  const auto loaded = parse_config(squaring_config());
  const auto& cfg = loaded.scenario;
  CHECK(cfg.dimension == 1);
  CHECK(cfg.generators.size() == 1);
  CHECK(cfg.generators[0].degree() == 2);
  CHECK(cfg.c == Rational(1, 2));
  CHECK(cfg.seeds.size() == 2);
  REQUIRE(cfg.gamma.size() == 1);
  CHECK(cfg.gamma[0] == TorusPoint(std::vector<Rational>{Rational(2)}));
  CHECK(cfg.budget.max_degree == 16);
  REQUIRE(cfg.divisor);
  CHECK(cfg.divisor->coordinate_indices() == std::vector<std::size_t>{0, 1});

  auto j = squaring_config();
  j["c"] = 0.25;
  CHECK(parse_config(j).scenario.c == Rational(1, 4));
  j["gamma"] = Json::array({Json::array({"3"})});
  CHECK(parse_config(j).scenario.gamma[0] == TorusPoint(std::vector<Rational>{Rational(3)}));
}

TEST_CASE("config errors name the offending field") {
  auto j = squaring_config();
  j.erase("schema");
  CHECK(error_of(j).rfind("schema", 0) == 0);

  j = squaring_config();
  j["schema"] = 2;
  CHECK(error_of(j).rfind("schema", 0) == 0);

  j = squaring_config();
  j["generators"][0]["forms"][1]["monomials"][0]["exps"] = Json::array({1, 0});
  CHECK(error_of(j).find("generators[0]") == 0);

  j = squaring_config();
  j["c"] = "3/2";
  CHECK(error_of(j).rfind("c:", 0) == 0);

  j = squaring_config();
  j["places"] = Json::array({4});
  CHECK(error_of(j).rfind("places", 0) == 0);

  j = squaring_config();
  j["colour"] = "blue";
  CHECK(error_of(j).find("colour") != std::string::npos);

  j = squaring_config();
  j.erase("seeds");
  CHECK_FALSE(error_of(j).empty());
}

TEST_CASE("malformed JSON reports line and column") {
  try {
    parse_config_text("{\n  \"schema\": 1,\n  \"dimension\": ,\n}");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(data_path("does_not_exist.json")), ConfigError);
}

TEST_CASE("example generators are built from the seed") {
  auto j = squaring_config();
  j.erase("generators");
  j["example"] = {{"dimension", 1}, {"degree", 8}, {"seed", 3}};
  const auto a = parse_config(j).scenario;
  const auto b = parse_config(j).scenario;
  REQUIRE(a.generators.size() == 2);
  CHECK(a.generators[0] == b.generators[0]);
  CHECK(a.generators[0].degree() == 8);
  REQUIRE(a.example);
  CHECK(a.example->seed == 3);
}

TEST_CASE("config echo round-trips") {
  const auto loaded = parse_config(squaring_config());
  const Json echo = config_to_json(loaded.scenario);
  const auto again = parse_config(echo).scenario;
  CHECK(again.generators == loaded.scenario.generators);
  CHECK(again.c == loaded.scenario.c);
  CHECK(again.seeds == loaded.scenario.seeds);
  CHECK(again.gamma == loaded.scenario.gamma);
  CHECK(config_to_json(again) == echo);
}

TEST_CASE("relation serialization follows the documented shape") {
  DependenceRelation rel{Integer(1), Integer(2), {Integer(-2)}, TorusPoint(std::vector<Rational>{Rational(1, 4)})};
  const Json j = to_json(rel);
  CHECK(j["r"] == 1);
  CHECK(j["s"] == 2);
  CHECK(j["gamma_exponents"] == Json::array({-2}));
  CHECK(j["u"] == Json::array({"1/4"}));
  CHECK(j["status"] == "found");
}

TEST_CASE("reports serialize deterministically and replay from JSON") {
  const auto cfg = parse_config(squaring_config()).scenario;
  const auto a = scan_theorem1(cfg);
  const auto b = scan_theorem1(cfg);
  REQUIRE_FALSE(a.hits.empty());
  const auto text = report_json_text(a);
  CHECK(text == report_json_text(b));
  CHECK(text.back() == '\n');

  const Json j = Json::parse(text);
  for (const char* key : {"hits", "summary", "constants", "flags", "config"}) CHECK(j.contains(key));
  const auto back = report_from_json(j);
  CHECK(back.hits.size() == a.hits.size());
  CHECK_FALSE(replay_verify(back).has_value());

  auto tampered = j;
  tampered["hits"][0]["relation"]["s"] = 5;
  CHECK(replay_verify(report_from_json(tampered)).has_value());
}

TEST_CASE("CSV layout") {
  const auto cfg = parse_config(squaring_config()).scenario;
  const auto report = scan_theorem1(cfg);
  const auto csv = report_csv(report);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "seed,word_phi,word_psi,deg_phi,deg_psi,r,s,ratio,height_nats,integrality_ratio");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == report.hits.size());
}

TEST_CASE("word indices") {
  CHECK(word_indices(Word()) == "id");
  CHECK(word_indices(Word({0, 1, 1})) == "0 1 1");
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"squaring_t1.json", "squaring_t2.json", "squaring_hyp.json", "ex46.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(data_path(name)));
  }
}
