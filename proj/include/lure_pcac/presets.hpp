#pragma once

#include <string>
#include <vector>

#include "lure_pcac/config.hpp"

namespace lure_pcac {

/// Built-in experiment parameterizations: ex1, ex1p, ex2, ex3, ex4.
/// Throws for unknown names.
ConfigMap preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace lure_pcac
