//------------------------------------------------------------------------------
// ir.hpp
// JSON dump of the evaluated project for downstream tools
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>

#include "tydi/model.hpp"

namespace tydi {

/// Evaluated streamlets, concrete implementations and named types of every
/// package with sorted object keys.
std::string emit_ir(const Project& project);

} // namespace tydi
