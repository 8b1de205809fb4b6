#include "equivaria/datasets.hpp"

#include <cctype>

namespace equivaria {

namespace {

int param_int(const json& params, const char* key, int fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  const json& v = params[key];
  if (!v.is_number_integer()) throw InputError(std::string("params.") + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace

FiniteGroup builtin_group(const std::string& name) {
  if (name == "S3") return FiniteGroup::symmetric3();
  if (name == "D8") return FiniteGroup::dihedral(8);
  if (name == "Q8") return FiniteGroup::quaternion8();
  if (name == "Z2xZ2" || name == "V4") return FiniteGroup::klein_four();
  std::string digits;
  if (name.rfind("Z/", 0) == 0) digits = name.substr(2);
  else if (name.size() > 1 && name[0] == 'Z') digits = name.substr(1);
  if (!digits.empty() && digits.size() <= 4 &&
      std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
    const int n = std::stoi(digits);
    if (n >= 1) return FiniteGroup::cyclic(n);
  }
  throw InputError("unknown builtin group \"" + name + "\" (known: Z/n, Z2xZ2, S3, D8, Q8)");
}

std::vector<std::string> builtin_group_names() {
  std::vector<std::string> out;
  for (int n = 1; n <= 8; ++n) out.push_back("Z/" + std::to_string(n));
  for (const char* s : {"Z2xZ2", "S3", "D8", "Q8"}) out.emplace_back(s);
  return out;
}

std::vector<DatasetInfo> bundled_datasets() {
  return {
      {"z2-line", "Z/2 acting on the grid {-4..4} by x -> -x, fiber C^2, I(x) = diag(e^{ix}, -e^{-ix})"},
      {"dihedral-plane", "symmetries of the square on the grid {-1..1}^2, fiber C^2, I(w) = w"},
      {"anticomplete-point", "one point, W = Z/2 acting on C by -1: completeness fails"},
      {"two-component", "toy assembly: a Z/2 line and a Z/2 x Z/2 line with their splittings"},
  };
}

SystemEntry builtin_system(const std::string& name, const json& params) {
  if (name == "z2-line") {
    return {z2_line(param_int(params, "n", 4)), Splitting{{0}, {0, 1}}};
  }
  if (name == "z2z2-line") {
    return {z2z2_line(param_int(params, "n", 2)), Splitting{{0, 2}, {0, 1}}};
  }
  // I_w = w is not normalised at the origin (the half-turn acts by -1), so
  // no splitting satisfies the reduction hypotheses.
  if (name == "dihedral-plane") return {dihedral_plane(param_int(params, "m", 1)), std::nullopt};
  if (name == "anticomplete-point") return {anticomplete_point(), std::nullopt};
  if (name == "regular-point") {
    std::string g = "S3";
    if (params.is_object() && params.contains("group")) {
      if (!params["group"].is_string()) throw InputError("params.group: expected a group name");
      g = params["group"].get<std::string>();
    }
    return {regular_point(builtin_group(g)), std::nullopt};
  }
  throw InputError("unknown builtin system \"" + name +
                   "\" (known: z2-line, z2z2-line, dihedral-plane, anticomplete-point, regular-point)");
}

Bundle bundled_dataset(const std::string& name) {
  for (const DatasetInfo& info : bundled_datasets()) {
    if (info.name != name) continue;
    Bundle b{info.name, info.description, {}};
    if (name == "two-component") {
      SystemEntry first{z2_line(1), Splitting{{0}, {0, 1}}};
      SystemEntry second = builtin_system("z2z2-line", {{"n", 2}});
      b.components.push_back(std::move(first));
      b.components.push_back(std::move(second));
    } else {
      b.components.push_back(builtin_system(name));
    }
    return b;
  }
  throw InputError("unknown dataset \"" + name + "\" (known: z2-line, dihedral-plane, anticomplete-point, two-component)");
}

}  // namespace equivaria
