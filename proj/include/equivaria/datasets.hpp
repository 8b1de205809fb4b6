// Bundled groups and example systems.
#pragma once

#include "equivaria/io.hpp"

#include <string>
#include <vector>

namespace equivaria {

/// "Z/n" (or "Zn"), "Z2xZ2", "S3", "D8", "Q8". Throws InputError otherwise.
FiniteGroup builtin_group(const std::string& name);
std::vector<std::string> builtin_group_names();

struct DatasetInfo {
  std::string name;
  std::string description;
};
std::vector<DatasetInfo> bundled_datasets();

/// "z2-line", "dihedral-plane", "anticomplete-point", "two-component".
Bundle bundled_dataset(const std::string& name);

/// Parametrized builtin systems: z2-line {n}, z2z2-line {n},
/// dihedral-plane {m}, anticomplete-point, regular-point {group}.
SystemEntry builtin_system(const std::string& name, const json& params = json::object());

}  // namespace equivaria
