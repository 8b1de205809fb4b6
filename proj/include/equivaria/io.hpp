// JSON schema "equivaria/1": groups, algebras, systems, modules and reports.
// Complex numbers are [re, im]; matrices are arrays of rows.
#pragma once

#include "equivaria/hilbmod.hpp"
#include "equivaria/morita.hpp"
#include "equivaria/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace equivaria {

using json = nlohmann::json;

inline constexpr const char* kSchema = "equivaria/1";

/// Malformed or incomplete input; the message names the offending location.
class InputError : public Error {
 public:
  using Error::Error;
};

json to_json(cplx z);
json to_json(const Mat& m);
cplx complex_from_json(const json& j, const std::string& where = "complex");
Mat matrix_from_json(const json& j, const std::string& where = "matrix");

json group_to_json(const FiniteGroup& g);
/// {"order", "mul"} or {"builtin": name}.
FiniteGroup group_from_json(const json& j);

json algebra_to_json(const MatrixStarAlgebra& a);
MatrixStarAlgebra algebra_from_json(const json& j);

struct Splitting {
  std::vector<int> wprime;
  std::vector<int> r;
};

struct SystemEntry {
  EquivariantSystem system;
  std::optional<Splitting> splitting;
};

/// One or more systems; several components form a toy assembly input.
struct Bundle {
  std::string name;
  std::string description;
  std::vector<SystemEntry> components;
};

json system_to_json(const EquivariantSystem& sys, const std::optional<Splitting>& splitting = std::nullopt);
/// Full system object or {"builtin": name, "params": {...}}. The cocycle may
/// itself be {"builtin": "z2-line"}, reading point labels as coordinates.
/// Cocycle violations surface as ValidationError.
SystemEntry system_from_json(const json& j);

json bundle_to_json(const Bundle& b);
/// Accepts a bundle, a single system, or {"builtin": dataset}.
Bundle bundle_from_json(const json& j);

json module_to_json(const FDHilbertModule& e);
FDHilbertModule module_from_json(const json& j);

/// Throws InputError with line and column on malformed text.
json parse_json_text(const std::string& text, const std::string& source = "input");
json read_json_file(const std::string& path);
/// Indented dump with a trailing newline; the canonical byte form.
std::string serialize(const json& j);

json irreps_report(const FiniteGroup& g, const std::vector<UnitaryRep>& irreps);
json spectrum_report(const EquivariantSystem& sys, const SpectrumDescription& desc, const CrosscheckVerdict& check);
json isomorphism_json(const IsomorphismReport& r);
json witness_json(const MoritaWitness& w);
json morita_verdict_json(const MoritaVerdict& v);
json morita_theorem_report(const EquivariantSystem& sys, const MoritaTheoremVerdict& v);
json reduction_report(const ReductionReport& r);
json toy_dual_report(const ToyDual& t);

}  // namespace equivaria
