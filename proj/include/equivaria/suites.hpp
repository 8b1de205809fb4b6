// Named invariant suites shared by the command-line tool and the bindings.
#pragma once

#include "equivaria/io.hpp"

#include <string>
#include <vector>

namespace equivaria {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  bool ok() const;
};

/// "groups", "algebras", "systems", "crossed", "modules", "morita".
std::vector<std::string> suite_names();

/// Runs one suite. Systems come from `input` when it has components, else
/// from the bundled datasets. Throws InputError for an unknown suite name.
SuiteResult run_suite(const std::string& name, const Bundle& input, std::uint64_t seed = 0, double tol = kDefaultTol);

json suite_json(const SuiteResult& r);

}  // namespace equivaria
