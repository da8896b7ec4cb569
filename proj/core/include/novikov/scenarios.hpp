#pragma once

#include <string>
#include <vector>

#include "novikov/config.hpp"

namespace novikov::scenarios {

/// Built-in scenario documents. The files under scenarios/ in the source
/// tree carry the same settings (tests compare their hashes).
struct Builtin {
  std::string name;
  std::string text;
};

const std::vector<Builtin>& builtins();

/// Resolved built-in by name; throws UsageError for an unknown name.
ScenarioConfig builtin(const std::string& name);

}  // namespace novikov::scenarios
