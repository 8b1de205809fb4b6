#include "equivaria/io.hpp"

#include "equivaria/datasets.hpp"

#include <fstream>
#include <sstream>

namespace equivaria {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing key \"" + key + "\"");
  return *it;
}

long long as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<long long>();
}

double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<int>(as_int(j[i], where + "[" + std::to_string(i) + "]")));
  return out;
}

std::vector<Mat> matrix_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of matrices");
  std::vector<Mat> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json matrix_list_json(const std::vector<Mat>& ms) {
  json out = json::array();
  for (const Mat& m : ms) out.push_back(to_json(m));
  return out;
}

json stamp(const char* kind) {
  json j = json::object();
  j["schema"] = kSchema;
  j["kind"] = kind;
  return j;
}

void check_schema(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find("schema");
  if (it != j.end() && *it != kSchema) throw InputError(where + ": unsupported schema " + it->dump());
}

std::string point_label(const EquivariantSystem& sys, int x) { return sys.points()[static_cast<size_t>(x)]; }

}  // namespace

// Adding 0.0 maps -0.0 to 0.0 so equal values serialize identically.
json to_json(cplx z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

json to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InputError(where + ": expected [re, im]");
  return {as_double(j[0], where + "[0]"), as_double(j[1], where + "[1]")};
}

Mat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Mat(0, 0);
  if (!j[0].is_array()) throw InputError(where + "[0]: expected a row");
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw InputError(rw + ": ragged row");
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<size_t>(k)], rw + "[" + std::to_string(k) + "]");
  }
  return m;
}

json group_to_json(const FiniteGroup& g) {
  json j = json::object();
  if (!g.name().empty()) j["name"] = g.name();
  j["order"] = g.order();
  j["mul"] = g.table();
  return j;
}

FiniteGroup group_from_json(const json& j) {
  if (j.is_string()) return builtin_group(j.get<std::string>());
  check_schema(j, "group");
  if (j.contains("builtin")) {
    const json& b = j["builtin"];
    if (!b.is_string()) throw InputError("group.builtin: expected a string");
    return builtin_group(b.get<std::string>());
  }
  const long long order = as_int(require(j, "order", "group"), "group.order");
  const json& mul = require(j, "mul", "group");
  if (!mul.is_array() || static_cast<long long>(mul.size()) != order)
    throw InputError("group.mul: expected " + std::to_string(order) + " rows");
  Table t;
  for (size_t a = 0; a < mul.size(); ++a) {
    auto row = int_list(mul[a], "group.mul[" + std::to_string(a) + "]");
    if (static_cast<long long>(row.size()) != order) throw InputError("group.mul[" + std::to_string(a) + "]: wrong length");
    t.push_back(std::move(row));
  }
  std::string name;
  if (j.contains("name") && j["name"].is_string()) name = j["name"].get<std::string>();
  return FiniteGroup(std::move(t), name);
}

json algebra_to_json(const MatrixStarAlgebra& a) {
  json j = json::object();
  j["ambient_dim"] = a.ambient_dim();
  j["basis"] = matrix_list_json(a.basis());
  return j;
}

MatrixStarAlgebra algebra_from_json(const json& j) {
  const Index n = static_cast<Index>(as_int(require(j, "ambient_dim", "algebra"), "algebra.ambient_dim"));
  std::vector<Mat> basis = matrix_list(require(j, "basis", "algebra"), "algebra.basis");
  for (size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].rows() != n || basis[k].cols() != n)
      throw InputError("algebra.basis[" + std::to_string(k) + "]: expected " + std::to_string(n) + "x" + std::to_string(n));
  }
  try {
    return MatrixStarAlgebra::from_orthonormal(n, basis);
  } catch (const Error&) {
    return MatrixStarAlgebra::span_of(n, basis);
  }
}

json system_to_json(const EquivariantSystem& sys, const std::optional<Splitting>& splitting) {
  json j = stamp("system");
  j["name"] = sys.name();
  j["group"] = group_to_json(sys.group());
  j["points"] = sys.points();
  json action = json::object();
  for (int w = 0; w < sys.group().order(); ++w) action[std::to_string(w)] = sys.action()[static_cast<size_t>(w)];
  j["action"] = std::move(action);
  j["fiber_dim"] = sys.fiber_dim();
  json cocycle = json::object();
  for (int w = 0; w < sys.group().order(); ++w)
    for (int x = 0; x < sys.num_points(); ++x) cocycle[std::to_string(w) + "," + std::to_string(x)] = to_json(sys.cocycle(w, x));
  j["cocycle"] = std::move(cocycle);
  if (splitting) j["splitting"] = {{"wprime", splitting->wprime}, {"r", splitting->r}};
  return j;
}

SystemEntry system_from_json(const json& j) {
  check_schema(j, "system");
  if (j.contains("builtin")) {
    const json& b = j["builtin"];
    if (!b.is_string()) throw InputError("system.builtin: expected a string");
    return builtin_system(b.get<std::string>(), j.value("params", json::object()));
  }
  const FiniteGroup g = group_from_json(require(j, "group", "system"));
  const json& pts = require(j, "points", "system");
  if (!pts.is_array()) throw InputError("system.points: expected an array of labels");
  std::vector<std::string> points;
  for (size_t x = 0; x < pts.size(); ++x) {
    if (pts[x].is_string()) points.push_back(pts[x].get<std::string>());
    else if (pts[x].is_number()) points.push_back(pts[x].dump());
    else throw InputError("system.points[" + std::to_string(x) + "]: expected a label");
  }
  const int nx = static_cast<int>(points.size());
  const int nw = g.order();

  const json& act = require(j, "action", "system");
  std::vector<std::vector<int>> action(static_cast<size_t>(nw));
  for (int w = 0; w < nw; ++w) {
    const std::string key = std::to_string(w);
    if (act.is_object() && act.contains(key)) {
      action[static_cast<size_t>(w)] = int_list(act[key], "system.action." + key);
    } else if (act.is_array() && static_cast<int>(act.size()) == nw) {
      action[static_cast<size_t>(w)] = int_list(act[static_cast<size_t>(w)], "system.action[" + key + "]");
    } else if (w == 0) {
      for (int x = 0; x < nx; ++x) action[0].push_back(x);
    } else {
      throw InputError("system.action: missing permutation for element " + key);
    }
  }
  const Index d = static_cast<Index>(as_int(require(j, "fiber_dim", "system"), "system.fiber_dim"));
  if (d <= 0) throw InputError("system.fiber_dim: must be positive");

  const json& coc = require(j, "cocycle", "system");
  std::vector<std::vector<Mat>> cocycle(static_cast<size_t>(nw), std::vector<Mat>(static_cast<size_t>(nx)));
  if (coc.is_object() && coc.contains("builtin")) {
    const std::string fam = coc["builtin"].is_string() ? coc["builtin"].get<std::string>() : "";
    if (fam == "trivial") {
      for (auto& row : cocycle)
        for (Mat& m : row) m = Mat::Identity(d, d);
    } else if (fam == "z2-line") {
      if (nw != 2 || d != 2) throw InputError("system.cocycle: z2-line needs a group of order 2 and fiber_dim 2");
      for (int x = 0; x < nx; ++x) {
        double coord = 0.0;
        try {
          coord = std::stod(points[static_cast<size_t>(x)]);
        } catch (const std::exception&) {
          throw InputError("system.cocycle: z2-line reads point labels as numbers; got \"" + points[static_cast<size_t>(x)] + "\"");
        }
        cocycle[0][static_cast<size_t>(x)] = Mat::Identity(2, 2);
        cocycle[1][static_cast<size_t>(x)] = z2_line_cocycle(coord);
      }
    } else {
      throw InputError("system.cocycle: unknown builtin cocycle \"" + fam + "\"");
    }
  } else {
    if (!coc.is_object()) throw InputError("system.cocycle: expected an object keyed by \"w,x\"");
    for (int w = 0; w < nw; ++w) {
      for (int x = 0; x < nx; ++x) {
        const std::string key = std::to_string(w) + "," + std::to_string(x);
        if (coc.contains(key)) {
          cocycle[static_cast<size_t>(w)][static_cast<size_t>(x)] = matrix_from_json(coc[key], "system.cocycle." + key);
        } else if (w == 0) {
          cocycle[0][static_cast<size_t>(x)] = Mat::Identity(d, d);
        } else {
          throw InputError("system.cocycle: missing entry \"" + key + "\"");
        }
      }
    }
  }
  std::string name = j.value("name", std::string{});
  SystemEntry e{EquivariantSystem(g, std::move(points), std::move(action), d, std::move(cocycle), name), std::nullopt};
  if (j.contains("splitting")) {
    const json& s = j["splitting"];
    e.splitting = Splitting{int_list(require(s, "wprime", "system.splitting"), "system.splitting.wprime"),
                            int_list(require(s, "r", "system.splitting"), "system.splitting.r")};
  }
  return e;
}

json bundle_to_json(const Bundle& b) {
  json j = stamp("bundle");
  j["name"] = b.name;
  j["description"] = b.description;
  json comps = json::array();
  for (const SystemEntry& e : b.components) comps.push_back(system_to_json(e.system, e.splitting));
  j["components"] = std::move(comps);
  return j;
}

Bundle bundle_from_json(const json& j) {
  check_schema(j, "input");
  if (j.contains("builtin") && !j.contains("params")) {
    const json& b = j["builtin"];
    if (!b.is_string()) throw InputError("input.builtin: expected a string");
    const std::string name = b.get<std::string>();
    for (const DatasetInfo& info : bundled_datasets())
      if (info.name == name) return bundled_dataset(name);
  }
  if (j.contains("components")) {
    const json& comps = j["components"];
    if (!comps.is_array()) throw InputError("bundle.components: expected an array");
    Bundle out{j.value("name", std::string{}), j.value("description", std::string{}), {}};
    for (const json& c : comps) out.components.push_back(system_from_json(c));
    return out;
  }
  SystemEntry e = system_from_json(j);
  Bundle out{e.system.name(), j.value("description", std::string{}), {}};
  out.components.push_back(std::move(e));
  return out;
}

json module_to_json(const FDHilbertModule& e) {
  json j = stamp("module");
  j["name"] = e.name();
  j["carrier_dim"] = e.carrier_dim();
  j["algebra"] = algebra_to_json(e.algebra());
  j["action"] = matrix_list_json(e.right_action());
  j["inner"] = matrix_list_json(e.inner_tensor());
  return j;
}

FDHilbertModule module_from_json(const json& j) {
  check_schema(j, "module");
  const Index m = static_cast<Index>(as_int(require(j, "carrier_dim", "module"), "module.carrier_dim"));
  MatrixStarAlgebra alg = algebra_from_json(require(j, "algebra", "module"));
  std::vector<Mat> action = matrix_list(require(j, "action", "module"), "module.action");
  std::vector<Mat> inner = matrix_list(require(j, "inner", "module"), "module.inner");
  if (static_cast<Index>(action.size()) != alg.dim()) throw InputError("module.action: one matrix per algebra basis element");
  if (static_cast<Index>(inner.size()) != alg.dim()) throw InputError("module.inner: one matrix per algebra basis element");
  return FDHilbertModule(std::move(alg), m, std::move(action), std::move(inner), j.value("name", std::string{}));
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_json_text(os.str(), path);
}

std::string serialize(const json& j) { return j.dump(2) + "\n"; }

json irreps_report(const FiniteGroup& g, const std::vector<UnitaryRep>& irreps) {
  json j = stamp("irreps");
  j["group"] = g.name();
  j["order"] = g.order();
  json rows = json::array();
  long long squares = 0;
  for (const UnitaryRep& rho : irreps) {
    json chi = json::array();
    const Vec c = rho.character();
    for (Index k = 0; k < c.size(); ++k) chi.push_back(to_json(c(k)));
    rows.push_back({{"label", rho.label}, {"dim", rho.dim()}, {"character", std::move(chi)}});
    squares += static_cast<long long>(rho.dim()) * rho.dim();
  }
  j["irreps"] = std::move(rows);
  j["sum_of_squares"] = squares;
  return j;
}

json spectrum_report(const EquivariantSystem& sys, const SpectrumDescription& desc, const CrosscheckVerdict& check) {
  json j = stamp("spectrum");
  j["system"] = sys.name();
  json orbits = json::array();
  for (const OrbitInfo& o : desc.orbits) {
    orbits.push_back({{"representative", point_label(sys, o.representative)},
                      {"points", o.points},
                      {"stabilizer", o.stabilizer}});
  }
  j["orbits"] = std::move(orbits);
  json entries = json::array();
  for (const SpectrumEntry& e : desc.entries) {
    entries.push_back({{"orbit", e.orbit},
                       {"representative", point_label(sys, e.representative)},
                       {"stabilizer_order", e.stabilizer.group.order()},
                       {"stabilizer", e.stabilizer.to_parent},
                       {"irrep", e.irrep.label},
                       {"irrep_dim", e.irrep.dim()},
                       {"dim", e.dim}});
  }
  j["entries"] = std::move(entries);
  j["crosscheck"] = {{"pass", check.pass},
                     {"algebra_dim", check.algebra_dim},
                     {"sum_of_squares", check.sum_of_squares},
                     {"classified", check.classified},
                     {"blocks", check.blocks},
                     {"realization_rank", check.realization_rank},
                     {"all_irreducible", check.all_irreducible},
                     {"diff", check.diff}};
  return j;
}

json isomorphism_json(const IsomorphismReport& r) {
  return {{"source_dim", r.source_dim}, {"target_dim", r.target_dim}, {"image_rank", r.image_rank},
          {"multiplicative", r.multiplicative}, {"star", r.star}, {"onto", r.onto}, {"bijective", r.bijective}};
}

json witness_json(const MoritaWitness& w) {
  return {{"a_dim", w.a.dim()},
          {"a_ambient", w.a.ambient_dim()},
          {"b_dim", w.b().dim()},
          {"carrier_dim", w.module.carrier_dim()},
          {"blocks_a", w.blocks_a},
          {"blocks_b", w.blocks_b},
          {"isomorphism", isomorphism_json(w.report)}};
}

json morita_verdict_json(const MoritaVerdict& v) {
  json j = {{"ok", v.ok},
            {"reason", v.reason},
            {"fullness_dim", v.fullness_dim},
            {"blocks_a", v.blocks_a},
            {"blocks_k", v.blocks_k}};
  j["witness"] = v.witness ? witness_json(*v.witness) : json(nullptr);
  return j;
}

json morita_theorem_report(const EquivariantSystem& sys, const MoritaTheoremVerdict& v) {
  json j = stamp("morita-theorem");
  j["system"] = sys.name();
  json pts = json::array();
  for (const PointScalars& p : v.scalars.points) {
    pts.push_back({{"point", point_label(sys, p.point)},
                   {"stabilizer", p.stabilizer},
                   {"scalar", p.scalar},
                   {"normalised", p.normalised},
                   {"missing", p.missing}});
  }
  j["scalars"] = {{"points", std::move(pts)},
                  {"normalisation_ok", v.scalars.normalisation_ok},
                  {"completeness_ok", v.scalars.completeness_ok},
                  {"conjugation_ok", v.scalars.conjugation_ok},
                  {"failures", v.scalars.failures}};
  j["hypotheses"] = v.hypotheses;
  j["dims"] = {{"fixed", v.fixed.dim()}, {"j", v.j.dim()}, {"c", v.c.dim()}};
  j["blocks"] = {{"fixed", v.blocks_fixed}, {"j", v.blocks_j}, {"c", v.blocks_c}};
  j["inclusion"] = v.inclusion;
  j["span_residual"] = v.span_residual;
  j["equal"] = v.equal;
  j["strict"] = v.strict;
  j["morita"] = morita_verdict_json(v.morita);
  j["pass"] = v.pass;
  j["summary"] = v.summary;
  return j;
}

json reduction_report(const ReductionReport& r) {
  json j = stamp("reduction");
  j["system"] = r.system;
  j["wprime"] = r.wprime;
  j["r"] = r.r;
  json links = json::array();
  for (const ReductionLink& l : r.links) {
    links.push_back({{"name", l.name},
                     {"kind", l.kind},
                     {"source_dim", l.source_dim},
                     {"target_dim", l.target_dim},
                     {"source_blocks", l.source_blocks},
                     {"target_blocks", l.target_blocks},
                     {"residual", l.residual},
                     {"ok", l.ok},
                     {"detail", l.detail}});
  }
  j["links"] = std::move(links);
  j["start_dim"] = r.start.dim();
  j["end_dim"] = r.end.dim();
  j["blocks_start"] = r.blocks_start;
  j["blocks_end"] = r.blocks_end;
  j["composite"] = morita_verdict_json(r.composite);
  j["ok"] = r.ok;
  return j;
}

json toy_dual_report(const ToyDual& t) {
  json j = stamp("toy-dual");
  json comps = json::array();
  for (const ReductionReport& r : t.reports) comps.push_back(reduction_report(r));
  j["components"] = std::move(comps);
  j["combined"] = morita_verdict_json(t.combined);
  j["ok"] = t.ok;
  return j;
}

}  // namespace equivaria
