#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equivaria/datasets.hpp"
#include "equivaria/suites.hpp"

using namespace equivaria;

namespace {

std::string canonical(const Bundle& b) { return serialize(bundle_to_json(b)); }

bool throws_input_error(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
  } catch (const InputError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("complex numbers and matrices") {
  const cplx z(1.5, -0.25);
  CHECK(to_json(z) == json::array({1.5, -0.25}));
  CHECK(complex_from_json(json::array({1.5, -0.25})) == z);
  CHECK(complex_from_json(json(2.0)) == cplx(2.0, 0.0));
  CHECK(to_json(cplx(-0.0, -0.0)).dump() == "[0.0,0.0]");

  Mat m(2, 3);
  m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8), cplx(9, 10), cplx(11, 12);
  const json j = to_json(m);
  CHECK(j.size() == 2);
  CHECK(j[0][1] == json::array({3.0, 4.0}));  // row-major
  CHECK(matrix_from_json(j) == m);
  CHECK(matrix_from_json(json::array()).size() == 0);
  CHECK(throws_input_error([] { matrix_from_json(json::parse("[[[1,0]],[[1,0],[2,0]]]")); }, "ragged"));
  CHECK(throws_input_error([] { complex_from_json(json::parse("[1]")); }, "[re, im]"));
}

TEST_CASE("groups") {
  const FiniteGroup s3 = FiniteGroup::symmetric3();
  const json j = group_to_json(s3);
  CHECK(j["order"] == 6);
  CHECK(group_from_json(j) == s3);
  CHECK(group_from_json(json::parse(R"({"order": 2, "mul": [[0, 1], [1, 0]]})")) == FiniteGroup::cyclic(2));
  CHECK(group_from_json(json::parse(R"({"builtin": "Q8"})")).order() == 8);
  CHECK(builtin_group("Z/5").order() == 5);
  CHECK(builtin_group("Z7").order() == 7);
  CHECK(builtin_group("D8") == FiniteGroup::dihedral(8));
  CHECK(throws_input_error([] { builtin_group("Z/"); }, "unknown builtin group"));
  CHECK(throws_input_error([] { builtin_group("A5"); }, "unknown builtin group"));
  CHECK(throws_input_error([] { group_from_json(json::parse(R"({"order": 2})")); }, "missing key \"mul\""));
  CHECK(throws_input_error([] { group_from_json(json::parse(R"({"order": 2, "mul": [[0, 1]]})")); }, "expected 2 rows"));
  // A table that is not a group is a validation failure, not an input error.
  CHECK_THROWS_AS(group_from_json(json::parse(R"({"order": 2, "mul": [[0, 1], [1, 1]]})")), ValidationError);
}

TEST_CASE("algebras and modules") {
  const MatrixStarAlgebra a = direct_sum(std::vector<MatrixStarAlgebra>{full_matrix_algebra(2), scalar_algebra(1)});
  const MatrixStarAlgebra back = algebra_from_json(algebra_to_json(a));
  CHECK(back.dim() == a.dim());
  CHECK(same_span(back, a));

  const FDHilbertModule e = function_module(z2_line(1));
  const json j = module_to_json(e);
  CHECK(j["carrier_dim"] == e.carrier_dim());
  const FDHilbertModule f = module_from_json(j);
  CHECK(f.carrier_dim() == e.carrier_dim());
  CHECK(f.algebra().dim() == e.algebra().dim());
  CHECK(serialize(module_to_json(f)) == serialize(j));
  CHECK(module_axioms(f, 20).ok());

  json broken = j;
  broken["inner"].erase(0);
  CHECK(throws_input_error([&] { module_from_json(broken); }, "module.inner"));
}

TEST_CASE("systems round-trip byte for byte") {
  for (const DatasetInfo& info : bundled_datasets()) {
    CAPTURE(info.name);
    const std::string text = canonical(bundled_dataset(info.name));
    const Bundle parsed = bundle_from_json(parse_json_text(text));
    CHECK(canonical(parsed) == text);
    CHECK(parsed.components.size() == bundled_dataset(info.name).components.size());
  }
  const std::string single = serialize(system_to_json(z2_line(2), Splitting{{0}, {0, 1}}));
  const SystemEntry e = system_from_json(parse_json_text(single));
  REQUIRE(e.splitting.has_value());
  CHECK(e.splitting->r == std::vector<int>{0, 1});
  CHECK(serialize(system_to_json(e.system, e.splitting)) == single);
}

TEST_CASE("system inputs") {
  const json minimal = json::parse(R"({
    "group": {"order": 2, "mul": [[0, 1], [1, 0]]},
    "points": ["-1", "0", "1"],
    "action": {"1": [2, 1, 0]},
    "fiber_dim": 2,
    "cocycle": {"builtin": "z2-line"}
  })");
  const SystemEntry e = system_from_json(minimal);
  const EquivariantSystem ref = z2_line(1);
  CHECK(e.system.num_points() == 3);
  for (int x = 0; x < 3; ++x) CHECK(frob(e.system.cocycle(1, x) - ref.cocycle(1, x)) < 1e-15);
  CHECK(classify_irreps(e.system).entries.size() == 3);

  const SystemEntry b = system_from_json(json::parse(R"({"builtin": "z2-line", "params": {"n": 2}})"));
  CHECK(b.system.num_points() == 5);
  CHECK(system_from_json(json::parse(R"({"builtin": "regular-point", "params": {"group": "S3"}})")).system.fiber_dim() == 6);

  json missing = minimal;
  missing["cocycle"] = json::object();
  CHECK(throws_input_error([&] { system_from_json(missing); }, "missing entry \"1,0\""));
  json no_action = minimal;
  no_action.erase("action");
  CHECK(throws_input_error([&] { system_from_json(no_action); }, "missing key \"action\""));
  json wrong_schema = minimal;
  wrong_schema["schema"] = "equivaria/0";
  CHECK(throws_input_error([&] { system_from_json(wrong_schema); }, "unsupported schema"));
  CHECK(throws_input_error([] { builtin_system("moebius"); }, "unknown builtin system"));
  CHECK(throws_input_error([] { bundled_dataset("moebius"); }, "unknown dataset"));

  // I_s I_s = -1 breaks the cocycle identity at w1 = w2 = s.
  json corrupted = system_to_json(anticomplete_point());
  corrupted["cocycle"]["1,0"] = json::parse("[[[0.0, 1.0]]]");
  try {
    system_from_json(corrupted);
    FAIL("corrupted cocycle accepted");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("cocycle identity") != std::string::npos);
  }
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_json_text("{\"order\": 2,\n \"mul\": [[0,1],[1,0]\n}", "group.json");
    FAIL("malformed text accepted");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("group.json") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
  CHECK(throws_input_error([] { read_json_file("/nonexistent/file.json"); }, "cannot open"));
}

TEST_CASE("reports") {
  const EquivariantSystem sys = z2_line(4);
  const json sp = spectrum_report(sys, classify_irreps(sys), wedderburn_crosscheck(sys));
  CHECK(sp["schema"] == kSchema);
  CHECK(sp["entries"].size() == 6);
  CHECK(sp["crosscheck"]["pass"] == true);
  CHECK(sp["crosscheck"]["blocks"] == json::array({1, 1, 2, 2, 2, 2}));

  const json irr = irreps_report(FiniteGroup::symmetric3(), enumerate_irreps(FiniteGroup::symmetric3()));
  CHECK(irr["irreps"].size() == 3);
  CHECK(irr["irreps"][2]["dim"] == 2);
  CHECK(irr["sum_of_squares"] == 6);

  const auto thm = verify_morita_theorem(anticomplete_point());
  const json mt = morita_theorem_report(anticomplete_point(), thm);
  CHECK(mt["strict"] == true);
  CHECK(mt["dims"]["j"] == 1);
  CHECK(mt["dims"]["c"] == 2);

  const auto red = semidirect_reduction(z2z2_line(1), {0, 2}, {0, 1});
  const json rr = reduction_report(red);
  CHECK(rr["links"].size() == red.links.size());
  CHECK(rr["ok"] == true);
  CHECK(rr["composite"]["witness"].is_object());
}

TEST_CASE("suites") {
  const SuiteResult groups = run_suite("groups", Bundle{});
  CHECK(groups.ok());
  CHECK(groups.checks.size() == 4 * builtin_group_names().size());
  CHECK(suite_json(groups)["ok"] == true);

  Bundle mine{"mine", "", {}};
  mine.components.push_back(builtin_system("z2-line", {{"n", 1}}));
  const SuiteResult sys = run_suite("systems", mine);
  CHECK(sys.ok());
  CHECK(sys.checks.size() == 2);
  CHECK(run_suite("morita", mine).ok());
  CHECK(throws_input_error([] { run_suite("nonsense", Bundle{}); }, "unknown suite"));
}
