// equivaria: irreps, spectrum, morita, verify, examples.
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include "equivaria/datasets.hpp"
#include "equivaria/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace eq = equivaria;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

struct RunConfig {
  std::string command;
  std::string input;
  std::string builtin;
  std::string suite = "all";
  double tolerance = eq::kDefaultTol;
  std::uint64_t seed = 0;
  std::string format = "text";
  bool json() const { return format == "json"; }
};

std::string join(const std::vector<eq::Index>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(2) << std::scientific << v;
  return os.str();
}

std::string complex_text(eq::cplx z) {
  std::ostringstream os;
  const double re = std::abs(z.real()) < 1e-12 ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < 1e-12 ? 0.0 : z.imag();
  os << std::setprecision(4) << re;
  if (im != 0.0) os << (im > 0 ? "+" : "-") << std::abs(im) << "i";
  return os.str();
}

eq::Bundle load_bundle(const RunConfig& cfg) {
  if (!cfg.input.empty()) return eq::bundle_from_json(eq::read_json_file(cfg.input));
  if (!cfg.builtin.empty()) return eq::bundle_from_json(eq::json{{"builtin", cfg.builtin}});
  throw eq::InputError(cfg.command + ": pass --input FILE or --builtin NAME");
}

int cmd_irreps(const RunConfig& cfg) {
  eq::FiniteGroup g;
  if (!cfg.input.empty()) {
    const eq::json j = eq::read_json_file(cfg.input);
    g = eq::group_from_json(j.contains("group") ? j["group"] : j);
  } else if (!cfg.builtin.empty()) {
    g = eq::builtin_group(cfg.builtin);
  } else {
    throw eq::InputError("irreps: pass --input FILE or --builtin GROUP");
  }
  const auto irreps = eq::enumerate_irreps(g, cfg.seed, cfg.tolerance);
  const eq::json report = eq::irreps_report(g, irreps);
  const bool ok = report["sum_of_squares"].get<long long>() == g.order();
  if (cfg.json()) {
    std::cout << eq::serialize(report);
  } else {
    std::cout << "group " << (g.name().empty() ? "(unnamed)" : g.name()) << ", order " << g.order() << "\n";
    std::cout << std::left << std::setw(8) << "label" << std::setw(6) << "dim" << "character\n";
    for (const auto& rho : irreps) {
      std::cout << std::setw(8) << rho.label << std::setw(6) << rho.dim();
      const eq::Vec chi = rho.character();
      for (eq::Index k = 0; k < chi.size(); ++k) std::cout << (k ? " " : "") << complex_text(chi(k));
      std::cout << "\n";
    }
    std::cout << "sum of squared dims " << report["sum_of_squares"].get<long long>() << " = |W|: " << (ok ? "yes" : "NO")
              << "\n";
  }
  return ok ? kOk : kFail;
}

int cmd_spectrum(const RunConfig& cfg) {
  const eq::Bundle bundle = load_bundle(cfg);
  bool ok = true;
  eq::json reports = eq::json::array();
  for (const eq::SystemEntry& e : bundle.components) {
    const auto& sys = e.system;
    const auto desc = eq::classify_irreps(sys, cfg.seed, cfg.tolerance);
    const auto check = eq::wedderburn_crosscheck(sys, cfg.seed, cfg.tolerance);
    ok = ok && check.pass;
    reports.push_back(eq::spectrum_report(sys, desc, check));
    if (cfg.json()) continue;
    std::cout << "system " << sys.name() << ": " << sys.num_points() << " points, W = " << sys.group().name()
              << ", fiber C^" << sys.fiber_dim() << "\n";
    std::cout << std::left << std::setw(7) << "orbit" << std::setw(10) << "point" << std::setw(12) << "|W_x|"
              << std::setw(8) << "rho" << "dim\n";
    for (const auto& entry : desc.entries) {
      std::cout << std::setw(7) << entry.orbit << std::setw(10) << sys.points()[static_cast<size_t>(entry.representative)]
                << std::setw(12) << entry.stabilizer.group.order() << std::setw(8) << entry.irrep.label << entry.dim
                << "\n";
    }
    std::cout << desc.entries.size() << " entries; fixed-point algebra dim " << check.algebra_dim << ", blocks "
              << join(check.blocks) << "\n";
    std::cout << "crosscheck: " << (check.pass ? "PASS" : "FAIL") << (check.pass ? "" : " (" + check.diff + ")") << "\n";
  }
  if (cfg.json()) {
    eq::json out = {{"schema", eq::kSchema}, {"kind", "spectrum-run"}, {"dataset", bundle.name}, {"systems", reports},
                    {"pass", ok}};
    std::cout << eq::serialize(out);
  }
  return ok ? kOk : kFail;
}

void print_theorem(const eq::EquivariantSystem& sys, const eq::MoritaTheoremVerdict& v) {
  std::cout << "system " << sys.name() << "\n";
  std::cout << "  hypotheses (normalised, complete, conjugation-stable): "
            << (v.scalars.normalisation_ok ? "yes" : "no") << ", " << (v.scalars.completeness_ok ? "yes" : "no") << ", "
            << (v.scalars.conjugation_ok ? "yes" : "no") << "\n";
  for (const auto& f : v.scalars.failures) std::cout << "    " << f << "\n";
  std::cout << "  dim fixed-point algebra " << v.fixed.dim() << ", dim J " << v.j.dim() << ", dim C(X,W,I) " << v.c.dim()
            << "\n";
  std::cout << "  blocks: fixed " << join(v.blocks_fixed) << ", J " << join(v.blocks_j) << ", C " << join(v.blocks_c)
            << "\n";
  if (v.equal) {
    std::cout << "  J = C(X,W,I) (span residual " << sci(v.span_residual) << ")\n";
  } else if (v.strict) {
    std::cout << "  J strictly inside C(X,W,I): dim " << v.j.dim() << " < " << v.c.dim() << " (inclusion residual "
              << sci(v.inclusion) << ")\n";
  } else {
    std::cout << "  J and C(X,W,I) differ (span residual " << sci(v.span_residual) << ")\n";
  }
  if (v.morita.witness) {
    const auto& w = *v.morita.witness;
    std::cout << "  witness: fixed-point algebra ~ J through a module of carrier dim " << w.module.carrier_dim()
              << ", isomorphism onto K(E) multiplicative " << sci(w.report.multiplicative) << ", star "
              << sci(w.report.star) << ", onto " << sci(w.report.onto) << "\n";
  } else {
    std::cout << "  no witness: " << v.morita.reason << "\n";
  }
  std::cout << "  verdict: " << (v.pass ? "PASS" : "FAIL") << " (" << v.summary << ")\n";
}

void print_reduction(const eq::ReductionReport& r) {
  std::cout << "  reduction W' = " << join(r.wprime) << ", R = " << join(r.r) << "\n";
  for (const auto& l : r.links) {
    std::cout << "    " << std::left << std::setw(40) << l.name << " " << std::setw(11) << l.kind << " "
              << l.source_dim << " -> " << l.target_dim << "  blocks " << join(l.source_blocks) << " -> "
              << join(l.target_blocks) << "  residual " << sci(l.residual) << "  " << (l.ok ? "ok" : "FAIL") << "\n";
  }
  std::cout << "    composite witness: " << (r.composite.ok ? "ok" : "FAIL: " + r.composite.reason) << "\n";
  std::cout << "    block counts " << r.blocks_start << " -> " << r.blocks_end << ": " << (r.ok ? "PASS" : "FAIL")
            << "\n";
}

int cmd_morita(const RunConfig& cfg) {
  const eq::Bundle bundle = load_bundle(cfg);
  const double tol = std::max(cfg.tolerance, 1e-8);
  bool ok = true;
  eq::json comps = eq::json::array();
  const bool assemble = bundle.components.size() > 1 &&
                        std::all_of(bundle.components.begin(), bundle.components.end(),
                                    [](const eq::SystemEntry& e) { return e.splitting.has_value(); });
  for (const eq::SystemEntry& e : bundle.components) {
    const auto v = eq::verify_morita_theorem(e.system, cfg.seed, tol);
    ok = ok && v.pass;
    eq::json c = {{"theorem", eq::morita_theorem_report(e.system, v)}};
    if (!cfg.json()) print_theorem(e.system, v);
    if (e.splitting && !assemble) {
      const auto r = eq::semidirect_reduction(e.system, e.splitting->wprime, e.splitting->r, cfg.seed, tol);
      ok = ok && r.ok;
      c["reduction"] = eq::reduction_report(r);
      if (!cfg.json()) print_reduction(r);
    }
    comps.push_back(std::move(c));
  }
  eq::json out = {{"schema", eq::kSchema}, {"kind", "morita-run"}, {"dataset", bundle.name}, {"components", comps}};
  if (assemble) {
    std::vector<eq::Component> parts;
    for (const auto& e : bundle.components) parts.push_back({e.system, e.splitting->wprime, e.splitting->r});
    const auto toy = eq::assemble_toy_dual(parts, cfg.seed, tol);
    ok = ok && toy.ok;
    out["toy_dual"] = eq::toy_dual_report(toy);
    if (!cfg.json()) {
      std::cout << "toy assembly over " << parts.size() << " components\n";
      for (const auto& r : toy.reports) print_reduction(r);
      std::cout << "  block-diagonal witness: " << (toy.combined.ok ? "ok" : "FAIL: " + toy.combined.reason)
                << ", blocks " << join(toy.combined.blocks_a) << " ~ " << join(toy.combined.blocks_k) << "\n";
      std::cout << "  assembly: " << (toy.ok ? "PASS" : "FAIL") << "\n";
    }
  }
  out["pass"] = ok;
  if (cfg.json()) std::cout << eq::serialize(out);
  return ok ? kOk : kFail;
}

std::vector<std::string> split_suites(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

int cmd_verify(const RunConfig& cfg) {
  eq::Bundle input;
  if (!cfg.input.empty() || !cfg.builtin.empty()) input = load_bundle(cfg);
  std::vector<std::string> suites = split_suites(cfg.suite);
  if (suites.size() == 1 && suites[0] == "all") suites = eq::suite_names();
  if (suites.size() == 1 && suites[0] == "none") suites.clear();
  for (const auto& s : suites) {
    const auto names = eq::suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end())
      throw eq::InputError("unknown suite \"" + s + "\" (known: all, groups, algebras, systems, crossed, modules, morita)");
  }
  bool ok = true;
  eq::json results = eq::json::array();
  for (const auto& s : suites) {
    const eq::SuiteResult r = eq::run_suite(s, input, cfg.seed, cfg.tolerance);
    ok = ok && r.ok();
    results.push_back(eq::suite_json(r));
    if (cfg.json()) continue;
    for (const auto& c : r.checks)
      std::cout << (c.ok ? "PASS " : "FAIL ") << "[" << s << "] " << c.name << " (" << c.detail << ")\n";
  }
  if (cfg.json()) {
    std::cout << eq::serialize({{"schema", eq::kSchema}, {"kind", "verify"}, {"suites", results}, {"pass", ok}});
  } else {
    std::cout << suites.size() << " suite(s) run: " << (ok ? "all passed" : "FAILURES") << "\n";
  }
  return ok ? kOk : kFail;
}

int cmd_examples(const RunConfig& cfg) {
  if (!cfg.builtin.empty()) {
    std::cout << eq::serialize(eq::bundle_to_json(eq::bundled_dataset(cfg.builtin)));
    return kOk;
  }
  const auto infos = eq::bundled_datasets();
  if (cfg.json()) {
    eq::json list = eq::json::array();
    for (const auto& i : infos) list.push_back({{"name", i.name}, {"description", i.description}});
    std::cout << eq::serialize({{"schema", eq::kSchema}, {"kind", "examples"}, {"datasets", list},
                                {"groups", eq::builtin_group_names()}});
    return kOk;
  }
  std::cout << "bundled datasets (use --builtin NAME; `examples --builtin NAME` prints the JSON):\n";
  for (const auto& i : infos) std::cout << "  " << std::left << std::setw(20) << i.name << i.description << "\n";
  std::cout << "builtin groups:";
  for (const auto& g : eq::builtin_group_names()) std::cout << " " << g;
  std::cout << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite equivariant bundles, crossed products and Morita reductions"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--input", cfg.input, "JSON input file");
  app.add_option("--builtin", cfg.builtin, "bundled dataset or builtin group name");
  app.add_option("--tolerance", cfg.tolerance, "relative tolerance (> 0)")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Cmd cmds[] = {
      {"irreps", "irreducible representations of a group", cmd_irreps},
      {"spectrum", "spectrum of the fixed-point algebra with a Wedderburn crosscheck", cmd_spectrum},
      {"morita", "Morita theorem, semidirect reduction and toy assembly", cmd_morita},
      {"verify", "run invariant suites", cmd_verify},
      {"examples", "list bundled datasets", cmd_examples},
  };
  std::vector<CLI::App*> subs;
  for (const Cmd& c : cmds) subs.push_back(app.add_subcommand(c.name, c.help));
  subs[3]->add_option("--suite", cfg.suite, "comma-separated suites, all, or none (empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  for (size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    cfg.command = cmds[i].name;
    try {
      return cmds[i].run(cfg);
    } catch (const eq::InputError& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return kInput;
    } catch (const eq::ValidationError& e) {
      std::cerr << "verification failure: " << e.what() << "\n";
      return kFail;
    } catch (const eq::NumericError& e) {
      std::cerr << "numeric failure (try a looser --tolerance): " << e.what() << "\n";
      return kFail;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kFail;
    }
  }
  return kInput;
}
