//------------------------------------------------------------------------------
// drc.hpp
// Design rule checks over the sugared project
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "tydi/model.hpp"

namespace tydi {

struct DrcDiagnostic {
    Severity severity = Severity::Error;
    /// R1 strict type, R2 compatible type, R3 direction, R4 clockdomain, R5 single connection.
    std::string rule;
    std::string package;
    std::string implementation;
    /// Empty for R5, which is about a port end rather than a connection.
    std::string connection;
    const SourceFile* file = nullptr;
    Span span;
    std::string message;
};

/// Checks every connection of every concrete implementation; sorted by
/// package, implementation, connection and rule.
std::vector<DrcDiagnostic> run_drc(const Project& project);

/// One line per diagnostic and a closing `N errors, M warnings` line.
std::string render_drc_report(const std::vector<DrcDiagnostic>& diags);

std::size_t count_errors(const std::vector<DrcDiagnostic>& diags);

/// Error-severity DRC results as compiler diagnostics.
std::vector<Diagnostic> drc_errors_as_diagnostics(const std::vector<DrcDiagnostic>& diags);

} // namespace tydi
