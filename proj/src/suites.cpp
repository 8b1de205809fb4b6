#include "equivaria/suites.hpp"

#include "equivaria/datasets.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace equivaria {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string label(const EquivariantSystem& sys) { return sys.name().empty() ? std::string("system") : sys.name(); }

std::vector<SystemEntry> systems_of(const Bundle& input) {
  if (!input.components.empty()) return input.components;
  std::vector<SystemEntry> out;
  for (const DatasetInfo& info : bundled_datasets()) {
    for (SystemEntry& e : bundled_dataset(info.name).components) out.push_back(std::move(e));
  }
  return out;
}

std::vector<int> cyclic_subgroup(const FiniteGroup& g, int a) {
  std::vector<int> out{0};
  for (int x = a; x != 0; x = g.mul(x, a)) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

/// A cyclic normal subgroup U with a cyclic complement V, or U = 1, V = W.
std::pair<std::vector<int>, std::vector<int>> simple_splitting(const FiniteGroup& g) {
  for (int a = 1; a < g.order(); ++a) {
    const auto u = cyclic_subgroup(g, a);
    if (static_cast<int>(u.size()) == g.order() || !is_normal_subgroup(g, u)) continue;
    for (int b = 1; b < g.order(); ++b) {
      const auto v = cyclic_subgroup(g, b);
      if (u.size() * v.size() != static_cast<size_t>(g.order())) continue;
      std::vector<int> meet;
      std::set_intersection(u.begin(), u.end(), v.begin(), v.end(), std::back_inserter(meet));
      if (meet.size() == 1) return {u, v};
    }
  }
  std::vector<int> all(static_cast<size_t>(g.order()));
  std::iota(all.begin(), all.end(), 0);
  return {{0}, all};
}

void groups_suite(SuiteResult& out, std::uint64_t seed, double tol) {
  Rng rng(seed);
  for (const std::string& name : builtin_group_names()) {
    const FiniteGroup g = builtin_group(name);
    const auto irreps = enumerate_irreps(g, seed);
    long long squares = 0;
    for (const auto& rho : irreps) squares += static_cast<long long>(rho.dim()) * rho.dim();
    out.checks.push_back({name + ": sum of squared dims", squares == g.order(),
                          std::to_string(squares) + " vs |W| = " + std::to_string(g.order())});

    double chi = 0.0, schur = 0.0;
    for (size_t i = 0; i < irreps.size(); ++i) {
      schur = std::max(schur, schur_orthogonality_residual(irreps[i], rng));
      for (size_t k = 0; k < irreps.size(); ++k) {
        const cplx ip = character_inner(irreps[i].character(), irreps[k].character());
        chi = std::max(chi, std::abs(ip - cplx(i == k ? 1.0 : 0.0, 0.0)));
      }
    }
    out.checks.push_back({name + ": character orthogonality", chi < tol, fmt(chi)});
    out.checks.push_back({name + ": Schur orthogonality", schur < tol, fmt(schur)});

    const UnitaryRep reg = regular_rep(g);
    const auto iso = isotypic_decomposition(reg, irreps);
    Mat total = Mat::Zero(g.order(), g.order());
    double idem = 0.0;
    for (const auto& part : iso.parts) {
      total += part.projection;
      idem = std::max(idem, frob(part.projection * part.projection - part.projection));
    }
    const double resolve = std::max(idem, frob(total - Mat::Identity(g.order(), g.order())));
    out.checks.push_back({name + ": isotypic projections resolve the identity", resolve < tol, fmt(resolve)});
  }
}

void algebras_suite(SuiteResult& out, std::uint64_t seed, double tol) {
  Rng rng(seed);
  int failures = 0;
  std::string first;
  const int pairs = 50;
  for (int t = 0; t < pairs; ++t) {
    const MatrixStarAlgebra a = random_algebra(rng, 20);
    const BlockStructure blocks = block_decompose(a, seed + static_cast<std::uint64_t>(t));
    const MatrixStarAlgebra b = random_subalgebra(a, blocks, rng);
    const auto v = check_stone_weierstrass(b, a, blocks, std::max(tol, 1e-8));
    if (!v.pass) {
      ++failures;
      if (first.empty()) first = "pair " + std::to_string(t) + ": " + v.witness;
    }
  }
  out.checks.push_back({"Stone-Weierstrass on " + std::to_string(pairs) + " random pairs", failures == 0,
                        failures == 0 ? "no separating proper subalgebra" : first});
}

void systems_suite(SuiteResult& out, const std::vector<SystemEntry>& systems, std::uint64_t seed, double tol) {
  for (const SystemEntry& e : systems) {
    const EquivariantSystem& sys = e.system;
    const std::string n = label(sys);
    const auto f1 = fixed_point_algebra(sys, tol);
    const auto f2 = fixed_point_algebra_by_commutant(sys, tol);
    const double d = span_distance(f1, f2);
    out.checks.push_back({n + ": fixed-point algebra equals the commutant of U", f1.dim() == f2.dim() && d < 1e-8,
                          "dim " + std::to_string(f1.dim()) + ", distance " + fmt(d)});
    const auto check = wedderburn_crosscheck(sys, seed, tol);
    out.checks.push_back({n + ": spectrum matches Wedderburn blocks", check.pass,
                          check.pass ? std::to_string(check.blocks.size()) + " blocks" : check.diff});
  }
}

void crossed_suite(SuiteResult& out, const std::vector<SystemEntry>& systems, bool bundled, double tol) {
  std::vector<std::pair<EquivariantSystem, std::optional<Splitting>>> cases;
  for (const SystemEntry& e : systems) cases.emplace_back(e.system, e.splitting);
  if (bundled) {
    cases.emplace_back(z2z2_line(4), Splitting{{0, 2}, {0, 1}});
    cases.emplace_back(free_orbit(FiniteGroup::symmetric3()), std::nullopt);
  }
  const double limit = std::max(tol, 1e-9);
  for (const auto& [sys, split] : cases) {
    const std::string n = label(sys) + " (" + sys.group().name() + ")";
    const PhiIso phi = phi_iso(sys);
    out.checks.push_back({n + ": phi is a *-isomorphism", phi.report.ok(limit),
                          "multiplicative " + fmt(phi.report.multiplicative) + ", onto " + fmt(phi.report.onto)});
    std::vector<int> u, v;
    if (split) {
      u = split->wprime;
      v = split->r;
    } else {
      std::tie(u, v) = simple_splitting(sys.group());
    }
    const IteratedIso it = iterated_crossed_iso(function_action(scalar_shadow(sys)), u, v);
    out.checks.push_back({n + ": iterated crossed product isomorphism", it.report.ok(limit),
                          "multiplicative " + fmt(it.report.multiplicative)});
  }
}

void modules_suite(SuiteResult& out, const std::vector<SystemEntry>& systems, std::uint64_t seed, double tol) {
  auto axioms = [&](const std::string& n, const FDHilbertModule& e) {
    const ModuleAxioms ax = module_axioms(e, 100, seed);
    const double worst = std::max({ax.linearity, ax.conjugate_linearity, ax.right_linearity, ax.right_action,
                                   ax.compatibility, ax.hermitian, ax.positivity, ax.cauchy_schwarz});
    out.checks.push_back({n + ": Hilbert module axioms", ax.ok(std::max(tol, 1e-9)), "worst residual " + fmt(worst)});
  };
  axioms("C^3 over C", hilbert_space(3));
  for (const SystemEntry& e : systems) {
    const EquivariantSystem& sys = e.system;
    const std::string n = label(sys);
    const EquivariantModule eq = equivariant_function_module(sys);
    axioms(n + " C(X, H)", eq.base);
    axioms(n + " fixed-point algebra over itself", standard_module(fixed_point_algebra(sys, tol)));
    const GreenJulgModule gj = green_julg_module(eq);
    axioms(n + " Green-Julg module", gj.module);
    const GreenJulgVerdict v = verify_green_julg(eq);
    out.checks.push_back({n + ": Green-Julg span equality", v.pass,
                          "dims " + std::to_string(v.dim_crossed_compacts) + "/" + std::to_string(v.dim_invariant) +
                              ", residual " + fmt(v.residual)});
    const NormBounds nb = green_julg_norm_bounds(eq, 100, seed);
    out.checks.push_back({n + ": Green-Julg norm bounds", nb.ok(),
                          "ratio in [" + fmt(nb.min_ratio) + ", " + fmt(nb.max_ratio) + "], |W| = " +
                              std::to_string(nb.group_order)});
  }
}

void morita_suite(SuiteResult& out, const std::vector<SystemEntry>& systems, std::uint64_t seed, double tol) {
  const double t = std::max(tol, 1e-8);
  for (const SystemEntry& e : systems) {
    const std::string n = label(e.system);
    const MoritaTheoremVerdict v = verify_morita_theorem(e.system, seed, t);
    out.checks.push_back({n + ": Morita theorem", v.pass, v.summary});
    if (e.splitting) {
      const ReductionReport r = semidirect_reduction(e.system, e.splitting->wprime, e.splitting->r, seed, t);
      out.checks.push_back({n + ": semidirect reduction", r.ok,
                            std::to_string(r.blocks_start) + " blocks -> " + std::to_string(r.blocks_end) + " blocks"});
    }
  }
}

}  // namespace

bool SuiteResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

std::vector<std::string> suite_names() { return {"groups", "algebras", "systems", "crossed", "modules", "morita"}; }

SuiteResult run_suite(const std::string& name, const Bundle& input, std::uint64_t seed, double tol) {
  SuiteResult out{name, {}};
  const bool bundled = input.components.empty();
  if (name == "groups") {
    groups_suite(out, seed, tol);
  } else if (name == "algebras") {
    algebras_suite(out, seed, tol);
  } else if (name == "systems") {
    systems_suite(out, systems_of(input), seed, tol);
  } else if (name == "crossed") {
    crossed_suite(out, systems_of(input), bundled, tol);
  } else if (name == "modules") {
    modules_suite(out, systems_of(input), seed, tol);
  } else if (name == "morita") {
    morita_suite(out, systems_of(input), seed, tol);
  } else {
    throw InputError("unknown suite \"" + name + "\"");
  }
  return out;
}

json suite_json(const SuiteResult& r) {
  json checks = json::array();
  for (const Check& c : r.checks) checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  return {{"suite", r.suite}, {"ok", r.ok()}, {"checks", std::move(checks)}};
}

}  // namespace equivaria
