//------------------------------------------------------------------------------
// support.hpp
// Helpers shared by the unit tests and the acceptance runner
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tydi/driver.hpp"

namespace tydi::testing {

using Sources = std::vector<std::pair<std::string, std::string>>;

/// Absolute path of a file below tests/data.
std::string data_path(const std::string& relative);
std::string read_text(const std::string& path);
/// Every `.td` file below `dir`, sorted by path.
Sources load_sources(const std::string& dir);

CompileOutput compile_text(const std::string& text, const CompileOptions& options = {});
CompileOutput compile_many(const Sources& sources, const CompileOptions& options = {});

/// Parsed, built and evaluated but not sugared; errors are appended to `errors`.
std::unique_ptr<Project> evaluated_project(const Sources& sources, std::vector<Diagnostic>& errors,
                                           unsigned jobs = 1);

/// Joined error messages, for assertion output.
std::string error_text(const CompileOutput& out);

/// Lines of `text` with leading and trailing blanks removed.
std::vector<std::string> trimmed_lines(const std::string& text);
bool has_line(const std::string& text, const std::string& line);

/// The block opened by the first line containing `header` up to its matching
/// closing brace, or empty when there is none.
std::string block(const std::string& dump, const std::string& header);

} // namespace tydi::testing
