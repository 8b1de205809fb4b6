// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "equivaria/datasets.hpp"
#include "equivaria/suites.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace equivaria;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(2) << std::scientific << v;
  return os.str();
}

std::string dims(std::vector<Index> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[FAILED: " << what << "] ";
    }
  }
};

// 1. Spectrum of the Z/2 line at n = 4.
void z2_line_spectrum(Outcome& o) {
  const auto t0 = Clock::now();
  const EquivariantSystem sys = z2_line(4);
  const SpectrumDescription desc = classify_irreps(sys, 0, 1e-8);
  int origin = -1;
  for (int x = 0; x < sys.num_points(); ++x)
    if (sys.points()[static_cast<size_t>(x)] == "0") origin = x;
  int two = 0, one_origin = 0, other = 0;
  for (const SpectrumEntry& e : desc.entries) {
    if (e.dim == 2) ++two;
    else if (e.dim == 1 && e.representative == origin) ++one_origin;
    else ++other;
  }
  const CrosscheckVerdict check = wedderburn_crosscheck(sys, 0, 1e-8);
  const double t = seconds_since(t0);
  o.require(two == 4 && one_origin == 2 && other == 0, "4 x dim 2 and 2 x dim 1 at the origin");
  o.require(check.algebra_dim == 18, "fixed-point algebra dim 18");
  o.require(check.pass && check.blocks == std::vector<Index>{1, 1, 2, 2, 2, 2}, "blocks {2,2,2,2,1,1}");
  o.require(t < 5.0, "runtime < 5 s");
  o.detail << two << " dim-2 entries, " << one_origin << " dim-1 at the origin, dim " << check.algebra_dim
           << ", blocks " << dims(check.blocks) << ", " << std::fixed << std::setprecision(2) << t << " s";
}

// 2. Both one-dimensional irreps of W_0 = Z/2 are limits of pi_{1/n}, sampled at n = 2^k.
void fell_certificates(Outcome& o) {
  const Z2Family fam = z2_line_family();
  const auto seq = dyadic_reciprocals(32);
  double worst = 0.0;
  for (int rho : {0, 1}) {
    const LimitCertificate c = fell_limit_certificate(fam, seq, 0.0, rho, 8, 1e-6);
    for (size_t k = c.residuals.size() - 8; k < c.residuals.size(); ++k) worst = std::max(worst, c.residuals[k]);
    o.require(c.accepted, "(0, " + c.irrep_label + ") accepted");
  }
  o.require(worst < 1e-6, "tail residual < 1e-6");
  o.detail << "(0, trivial) and (0, sign) for x_n = 1/n at n = 2^1..2^" << seq.size() << ", worst tail residual "
           << sci(worst);
}

// 3. K_{B x| W}(E) = K_B(E)^W.
void green_julg(Outcome& o) {
  const std::vector<std::pair<std::string, EquivariantModule>> cases = {
      {"trivial W", trivially_equivariant(function_module(z2_line(2)), FiniteGroup::cyclic(1))},
      {"z2-line", equivariant_function_module(z2_line(4))},
      {"S3 regular point", equivariant_function_module(regular_point(FiniteGroup::symmetric3()))},
  };
  for (const auto& [name, eq] : cases) {
    const GreenJulgVerdict v = verify_green_julg(eq, 1e-8);
    o.require(v.pass && v.residual < 1e-8, name);
    o.detail << name << " " << sci(v.residual) << "; ";
  }
}

// 4. J = C on the Z/2 line, strict inclusion on the anticomplete point.
void morita_theorem(Outcome& o) {
  const MoritaTheoremVerdict line = verify_morita_theorem(z2_line(4), 0, 1e-8);
  o.require(line.pass && line.equal && line.span_residual < 1e-8, "z2-line J = C");
  o.require(line.morita.witness.has_value(), "z2-line witness");
  const MoritaTheoremVerdict anti = verify_morita_theorem(anticomplete_point(), 0, 1e-8);
  o.require(anti.pass && anti.strict && anti.j.dim() == 1 && anti.c.dim() == 2, "anticomplete dim J = 1 < dim C = 2");
  o.require(anti.inclusion < 1e-8, "anticomplete J inside C");
  o.detail << "z2-line J = C (residual " << sci(line.span_residual) << ", witness "
           << (line.morita.witness ? "yes" : "no") << "); anticomplete-point dim J " << anti.j.dim() << " < dim C "
           << anti.c.dim() << " (inclusion " << sci(anti.inclusion) << ")";
}

std::vector<int> generated(const FiniteGroup& g, int a) {
  std::vector<int> out{0};
  for (int x = a; x != 0; x = g.mul(x, a)) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

// S3 = <r> x| <s> with r of order 3 and s of order 2.
std::pair<std::vector<int>, std::vector<int>> s3_splitting(const FiniteGroup& g) {
  std::vector<int> u, v;
  for (int a = 1; a < g.order(); ++a) {
    const auto h = generated(g, a);
    if (h.size() == 3) u = h;
    if (h.size() == 2 && v.empty()) v = h;
  }
  return {u, v};
}

// 5. phi and the iterated crossed product isomorphism.
void crossed_isos(Outcome& o) {
  struct Case {
    std::string name;
    EquivariantSystem sys;
    std::vector<int> u, v;
  };
  const FiniteGroup s3 = FiniteGroup::symmetric3();
  const auto [r3, s2] = s3_splitting(s3);
  const std::vector<Case> cases = {
      {"Z/2", z2_line(4), {0}, {0, 1}},
      {"Z/2xZ/2", z2z2_line(4), {0, 2}, {0, 1}},
      {"S3 free orbit", free_orbit(s3), r3, s2},
      {"S3 regular point", regular_point(s3), r3, s2},
  };
  double worst = 0.0;
  for (const Case& c : cases) {
    o.require(c.sys.num_points() <= 9, c.name + " grid <= 9 points");
    const PhiIso phi = phi_iso(c.sys);
    const IteratedIso it = iterated_crossed_iso(function_action(scalar_shadow(c.sys)), c.u, c.v);
    o.require(phi.report.ok(1e-9), c.name + " phi");
    o.require(it.report.ok(1e-9), c.name + " iterated");
    worst = std::max({worst, phi.report.multiplicative, it.report.multiplicative});
    o.detail << c.name << " " << sci(std::max(phi.report.multiplicative, it.report.multiplicative)) << "; ";
  }
  o.detail << "worst " << sci(worst);
}

// 6. Semidirect reduction on the Z/2 x Z/2 line and the toy assembly.
void reduction(Outcome& o) {
  const int n = 4;
  const ReductionReport r = semidirect_reduction(z2z2_line(n), {0, 2}, {0, 1}, 0, 1e-8);
  std::string end;
  for (const ReductionLink& l : r.links)
    if (l.kind == "morita") end = l.name.substr(l.name.find("~ ") + 2);
  o.require(r.ok, "reduction chain");
  o.require(end == "C(X)^{W'} x| R" && r.r.size() == 2, "ends at C(X)^{W'} x| Z/2");
  o.require(r.blocks_start == n + 2 && r.blocks_end == n + 2, "n + 2 blocks at both ends");
  o.require(r.composite.ok && r.composite.witness.has_value(), "composite witness");
  const ToyDual toy = assemble_toy_dual({{z2_line(1), {0}, {0, 1}}, {z2z2_line(n), {0, 2}, {0, 1}}}, 0, 1e-8);
  o.require(toy.ok && toy.combined.ok && toy.combined.witness.has_value(), "block-diagonal witness");
  o.detail << "ends at " << end << " with R = Z/2, blocks " << r.blocks_start << " -> " << r.blocks_end << "; toy dual over "
           << toy.reports.size() << " components: " << (toy.ok ? "witness blocks " + dims(toy.combined.blocks_a) : "none");
}

// 7. Representation theory of the builtin groups.
void representation_theory(Outcome& o) {
  const SuiteResult r = run_suite("groups", Bundle{}, 0, 1e-10);
  int failed = 0;
  for (const Check& c : r.checks) {
    if (!c.ok) {
      ++failed;
      o.require(false, c.name + " " + c.detail);
    }
  }
  o.detail << r.checks.size() - static_cast<size_t>(failed) << "/" << r.checks.size() << " checks over "
           << builtin_group_names().size() << " groups at 1e-10";
}

// 8. Stone-Weierstrass sweep.
void stone_weierstrass(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int separating = 0, proper = 0;
  for (int t = 0; t < 200; ++t) {
    const MatrixStarAlgebra a = random_algebra(rng, 20);
    const BlockStructure blocks = block_decompose(a, static_cast<std::uint64_t>(t));
    const MatrixStarAlgebra b = random_subalgebra(a, blocks, rng);
    const StoneWeierstrassVerdict v = check_stone_weierstrass(b, a, blocks, 1e-8);
    if (v.dim_b < v.dim_a) ++proper;
    if (!v.pass) {
      ++separating;
      o.require(false, "pair " + std::to_string(t) + ": " + v.witness);
    }
  }
  const double t = seconds_since(t0);
  o.require(t < 60.0, "runtime < 60 s");
  o.detail << "200 pairs (" << proper << " proper), " << separating << " counterexamples, " << std::fixed
           << std::setprecision(2) << t << " s";
}

// 9. Hilbert module axioms and the Green-Julg norm bounds.
void module_axioms_and_bounds(Outcome& o) {
  std::vector<std::pair<std::string, FDHilbertModule>> modules = {{"C^3", hilbert_space(3)}};
  std::vector<std::pair<std::string, EquivariantModule>> equivariant;
  for (const DatasetInfo& info : bundled_datasets()) {
    for (const SystemEntry& e : bundled_dataset(info.name).components) {
      const std::string n = info.name + "/" + e.system.name();
      const EquivariantModule eq = equivariant_function_module(e.system);
      modules.emplace_back(n + " C(X,H)", eq.base);
      modules.emplace_back(n + " fixed", standard_module(fixed_point_algebra(e.system)));
      modules.emplace_back(n + " GJ", green_julg_module(eq).module);
      equivariant.emplace_back(n, eq);
    }
  }
  double worst = 0.0;
  for (const auto& [name, e] : modules) {
    const ModuleAxioms ax = module_axioms(e, 100, 0);
    o.require(ax.ok(1e-9), name + " axioms");
    worst = std::max({worst, ax.linearity, ax.conjugate_linearity, ax.right_linearity, ax.right_action,
                      ax.compatibility, ax.hermitian, ax.positivity, ax.cauchy_schwarz});
  }
  for (const auto& [name, eq] : equivariant) {
    const NormBounds nb = green_julg_norm_bounds(eq, 100, 0);
    o.require(nb.ok(), name + " norm bounds");
  }
  const NormBounds eq1 =
      green_julg_norm_bounds(trivially_equivariant(function_module(z2_line(2)), FiniteGroup::cyclic(1)), 100, 0);
  const bool equality = eq1.ok() && std::abs(eq1.min_ratio - 1.0) < 1e-9 && std::abs(eq1.max_ratio - 1.0) < 1e-9;
  o.require(equality, "equality at |W| = 1");
  o.detail << modules.size() << " modules x 100 pairs, worst residual " << sci(worst) << "; bounds on "
           << equivariant.size() << " systems; |W| = 1 ratio in [" << sci(eq1.min_ratio) << ", " << sci(eq1.max_ratio)
           << "]";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"z2-line spectrum", z2_line_spectrum},
      {"Fell limit certificates", fell_certificates},
      {"Green-Julg span equality", green_julg},
      {"Morita theorem", morita_theorem},
      {"crossed product isomorphisms", crossed_isos},
      {"semidirect reduction and toy dual", reduction},
      {"representation theory suite", representation_theory},
      {"Stone-Weierstrass sweep", stone_weierstrass},
      {"Hilbert module axioms and norm bounds", module_axioms_and_bounds},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail.str()
              << " [" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
