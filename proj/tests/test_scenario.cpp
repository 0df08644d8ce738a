#include "mpfe/errors.hpp"
#include "mpfe/scenario.hpp"

#include "doctest.h"
#include "json.hpp"

#include <cstdio>
#include <filesystem>

using namespace mpfe;
using nlohmann::json;

TEST_CASE("every builtin validates and survives a JSON round trip") {
  const auto names = builtin_names();
  CHECK(names.size() == 4u);
  for (const auto& n : names) {
    INFO(n);
    const Scenario s = builtin_scenario(n);
    CHECK_NOTHROW(validate(s));
    const Scenario back = scenario_from_json(json::parse(scenario_to_json(s).dump()));
    CHECK(back == s);
  }
  CHECK_THROWS_AS(builtin_scenario("nope"), ValidationError);
}

TEST_CASE("builtins rescale with the grid") {
  const Scenario s = builtin_scenario("single_grain_3d", {32, 32, 32});
  CHECK(s.grid.extents == std::array<int, 3>{32, 32, 32});
  CHECK_NOTHROW(validate(s));
  for (const auto& nu : s.nuclei.list)
    for (int a = 0; a < 3; ++a) {
      CHECK(nu.cell[a] >= 0);
      CHECK(nu.cell[a] < 32);
    }
  const Scenario tj = builtin_scenario("triple_junction", {64, 64, 1});
  CHECK_NOTHROW(validate(tj));
  CHECK(tj.outputs.probes.size() == 3u);
}

TEST_CASE("file round trip") {
  const Scenario s = builtin_scenario("polycrystal_2d");
  const auto path = (std::filesystem::temp_directory_path() / "mpfe_scenario_roundtrip.json").string();
  save_scenario(s, path);
  CHECK(load_scenario(path) == s);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE("malformed input is rejected with the offending key") {
  json j = scenario_to_json(builtin_scenario("laminate_validation"));
  SUBCASE("unknown key") {
    j["kinetics"]["interface_widht_cells"] = 5;
    try {
      scenario_from_json(j);
      FAIL("no error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("interface_widht_cells") != std::string::npos);
    }
  }
  SUBCASE("wrong type") {
    j["steps"] = "many";
    CHECK_THROWS_AS(scenario_from_json(j), ValidationError);
  }
  SUBCASE("bad extents") {
    j["grid"]["extents"] = json::array({8});
    CHECK_THROWS_AS(scenario_from_json(j), ValidationError);
  }
}

TEST_CASE("semantic validation") {
  auto bad = [](auto mutate) {
    Scenario s = builtin_scenario("laminate_validation");
    mutate(s);
    return s;
  };
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.model = "model_c"; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.kinetics.interface_width_cells = 3.0; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.kinetics.pair_interfacial_energies = {0.1, 0.2}; })),
                  ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.phases[0].bain = {0.01, 0.02}; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.phases[1].name = s.phases[0].name; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.phases[0].mu = -1.0; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.geometry.layers.back().end -= 1; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.solver.control = "mixed"; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.grid.extents[0] = 2; })), ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.nuclei.list.push_back({{999, 0, 0}, 0, 0.1, 0.0}); })),
                  ValidationError);
  CHECK_THROWS_AS(validate(bad([](Scenario& s) { s.kinetics.time_step = 0.0; })), ValidationError);
}

TEST_CASE("default averaging radius follows the interface width") {
  Scenario s = builtin_scenario("single_grain_3d");
  s.kinetics.interface_width_cells = 5.0;
  s.kinetics.averaging_radius_cells = -1.0;
  CHECK(averaging_radius(s) == doctest::Approx(4.0));
  s.kinetics.averaging_radius_cells = 2.5;
  CHECK(averaging_radius(s) == 2.5);
}
