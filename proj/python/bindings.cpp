// Python module _equivaria. Structured data crosses the boundary as JSON text
// in the equivaria/1 schema; matrices come back as numpy arrays.

#include "equivaria/datasets.hpp"
#include "equivaria/suites.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace eq = equivaria;

namespace {

eq::Bundle bundle_of(const std::string& text) {
  if (text.empty()) return eq::Bundle{};
  return eq::bundle_from_json(eq::parse_json_text(text));
}

eq::EquivariantSystem single_system(const std::string& text) {
  eq::Bundle b = bundle_of(text);
  if (b.components.size() != 1) throw eq::InputError("expected exactly one system, got " + std::to_string(b.components.size()));
  return b.components.front().system;
}

std::string irreps(const std::string& group, std::uint64_t seed, double tol) {
  const eq::FiniteGroup g = eq::group_from_json(eq::parse_json_text(group));
  return eq::serialize(eq::irreps_report(g, eq::enumerate_irreps(g, seed, tol)));
}

std::string spectrum(const std::string& text, std::uint64_t seed, double tol) {
  eq::json out = eq::json::array();
  for (const eq::SystemEntry& e : bundle_of(text).components) {
    const auto desc = eq::classify_irreps(e.system, seed, tol);
    out.push_back(eq::spectrum_report(e.system, desc, eq::wedderburn_crosscheck(e.system, seed, tol)));
  }
  return eq::serialize(out);
}

std::string morita(const std::string& text, std::uint64_t seed, double tol) {
  const double t = std::max(tol, 1e-8);
  eq::json out = eq::json::array();
  for (const eq::SystemEntry& e : bundle_of(text).components) {
    eq::json item = {{"theorem", eq::morita_theorem_report(e.system, eq::verify_morita_theorem(e.system, seed, t))}};
    if (e.splitting) {
      item["reduction"] =
          eq::reduction_report(eq::semidirect_reduction(e.system, e.splitting->wprime, e.splitting->r, seed, t));
    }
    out.push_back(std::move(item));
  }
  return eq::serialize(out);
}

std::string suite(const std::string& name, const std::string& text, std::uint64_t seed, double tol) {
  return eq::serialize(eq::suite_json(eq::run_suite(name, bundle_of(text), seed, tol)));
}

std::string green_julg(const std::string& text) {
  const auto v = eq::verify_green_julg(eq::equivariant_function_module(single_system(text)));
  return eq::serialize({{"pass", v.pass},
                        {"dim_crossed_compacts", v.dim_crossed_compacts},
                        {"dim_invariant", v.dim_invariant},
                        {"residual", v.residual}});
}

}  // namespace

PYBIND11_MODULE(_equivaria, m) {
  m.doc() = "Equivariant C*-algebra computations on finite systems";

  auto base = py::register_exception<eq::Error>(m, "EquivariaError", PyExc_RuntimeError);
  py::register_exception<eq::InputError>(m, "InputError", base.ptr());
  py::register_exception<eq::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<eq::NumericError>(m, "NumericError", base.ptr());

  m.attr("SCHEMA") = eq::kSchema;
  m.attr("DEFAULT_TOL") = eq::kDefaultTol;

  m.def("builtin_groups", &eq::builtin_group_names);
  m.def("datasets", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : eq::bundled_datasets()) out.emplace_back(d.name, d.description);
    return out;
  });
  m.def("dataset", [](const std::string& name) { return eq::serialize(eq::bundle_to_json(eq::bundled_dataset(name))); },
        py::arg("name"));
  m.def("canonical", [](const std::string& text) { return eq::serialize(eq::bundle_to_json(bundle_of(text))); },
        py::arg("text"), "Parse a system or bundle and write it back in canonical form.");

  m.def("irreps", &irreps, py::arg("group"), py::arg("seed") = 0, py::arg("tol") = eq::kDefaultTol);
  m.def("spectrum", &spectrum, py::arg("system"), py::arg("seed") = 0, py::arg("tol") = eq::kDefaultTol);
  m.def("morita", &morita, py::arg("system"), py::arg("seed") = 0, py::arg("tol") = eq::kDefaultTol);
  m.def("green_julg", &green_julg, py::arg("system"));
  m.def("run_suite", &suite, py::arg("name"), py::arg("system") = "", py::arg("seed") = 0,
        py::arg("tol") = eq::kDefaultTol);
  m.def("suite_names", &eq::suite_names);

  m.def(
      "fixed_point_algebra",
      [](const std::string& text, double tol) {
        const eq::MatrixStarAlgebra a = eq::fixed_point_algebra(single_system(text), tol);
        return a.basis();
      },
      py::arg("system"), py::arg("tol") = eq::kDefaultTol, "Basis of C(X, K(H))^W as block-diagonal matrices.");
  m.def(
      "cocycle", [](const std::string& text, int w, int x) -> eq::Mat {
        const eq::EquivariantSystem sys = single_system(text);
        if (w < 0 || w >= sys.group().order() || x < 0 || x >= sys.num_points())
          throw eq::InputError("cocycle index out of range");
        return sys.cocycle(w, x);
      },
      py::arg("system"), py::arg("w"), py::arg("x"));
}
