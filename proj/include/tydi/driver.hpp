//------------------------------------------------------------------------------
// driver.hpp
// The compile pipeline: parse, evaluate, sugar, check and emit
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tydi/drc.hpp"
#include "tydi/model.hpp"
#include "tydi/parser.hpp"

namespace tydi {

struct CompileOptions {
    std::string project_name = "test_project";
    /// `package.impl`; empty to evaluate every default root.
    std::string top;
    unsigned jobs = 1;
    bool drc = false;
    bool dot = false;
    bool ir = false;
};

/// One output file, path relative to the output folder.
struct Artifact {
    std::string path;
    std::string content;
};

struct CompileOutput {
    std::unique_ptr<Project> project;
    /// In pipeline order; stops at the first failing stage.
    std::vector<Artifact> artifacts;
    std::vector<Diagnostic> errors;
    std::vector<DrcDiagnostic> drc;
    bool ok() const { return errors.empty(); }
    /// Content of an artifact, or null when it was not produced.
    const std::string* find(const std::string& path) const;
};

CompileOutput compile(const ProjectParseResult& parsed, const CompileOptions& options);
CompileOutput compile_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                              const CompileOptions& options);

/// Expands directories to the `.td` files below them, sorted; files pass through.
std::vector<std::string> collect_source_paths(const std::vector<std::string>& inputs, std::vector<Diagnostic>& errors);

/// `file:line:col: category: message`, sorted by file and offset.
std::string render_error_report(std::vector<Diagnostic> diags);

} // namespace tydi
