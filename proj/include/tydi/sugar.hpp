//------------------------------------------------------------------------------
// sugar.hpp
// Duplicator and voider insertion so every port end has exactly one connection
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <vector>

#include "tydi/model.hpp"

namespace tydi {

struct PortUsage {
    PortEnd end;
    /// Self `in` ports and instance `out` ports drive data inside the implementation.
    bool is_source = false;
    int use_count = 0;
    /// Connections naming this end, in declaration order.
    std::vector<Connection*> uses;
};

/// Every port end of an evaluated implementation, array ports per element,
/// ordered Self first and then by instance, with their uses.
std::vector<PortUsage> usage_census(const Implementation& impl);

struct SugarResult {
    std::vector<Diagnostic> diagnostics;
    int duplicators = 0;
    int voiders = 0;
};

/// Rewrites every evaluated, non-external implementation. Safe to run twice.
SugarResult sugar_project(Project& project);

/// Implementations sugaring and DRC apply to, sorted by package and name.
std::vector<Implementation*> concrete_implementations(const Project& project);

} // namespace tydi
