//------------------------------------------------------------------------------
// support.cpp
// Helpers shared by the unit tests and the acceptance runner
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tydi/evaluator.hpp"
#include "tydi/lower.hpp"

namespace fs = std::filesystem;

namespace tydi::testing {

std::string data_path(const std::string& relative) {
    return (fs::path(TYDI_TEST_DATA_DIR) / relative).string();
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Sources load_sources(const std::string& dir) {
    std::vector<std::string> paths;
    for (auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".td")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    Sources out;
    for (auto& p : paths)
        out.emplace_back(p, read_text(p));
    return out;
}

CompileOutput compile_text(const std::string& text, const CompileOptions& options) {
    return compile_sources({{"test.td", text}}, options);
}

CompileOutput compile_many(const Sources& sources, const CompileOptions& options) {
    return compile_sources(sources, options);
}

std::unique_ptr<Project> evaluated_project(const Sources& sources, std::vector<Diagnostic>& errors,
                                           unsigned jobs) {
    ProjectParseResult parsed = parse_sources(sources, jobs);
    errors.insert(errors.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    if (!errors.empty())
        return nullptr;
    BuildResult built = build_project(parsed, "test_project");
    errors.insert(errors.end(), built.diagnostics.begin(), built.diagnostics.end());
    if (!built.ok())
        return nullptr;
    EvaluationOptions options;
    options.jobs = jobs;
    EvaluationResult result = evaluate_project(*built.project, options);
    errors.insert(errors.end(), result.diagnostics.begin(), result.diagnostics.end());
    return std::move(built.project);
}

std::string error_text(const CompileOutput& out) {
    std::string text;
    for (auto& d : out.errors)
        text += d.file + ": " + d.message + "\n";
    return text;
}

std::vector<std::string> trimmed_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            out.emplace_back();
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

bool has_line(const std::string& text, const std::string& line) {
    auto lines = trimmed_lines(text);
    return std::find(lines.begin(), lines.end(), line) != lines.end();
}

std::string block(const std::string& dump, const std::string& header) {
    auto at = dump.find(header);
    if (at == std::string::npos)
        return {};
    auto start = dump.rfind('\n', at);
    start = start == std::string::npos ? 0 : start + 1;
    int depth = 0;
    for (std::size_t k = start; k < dump.size(); ++k) {
        if (dump[k] == '{')
            ++depth;
        else if (dump[k] == '}' && --depth == 0) {
            auto end = dump.find('\n', k);
            return dump.substr(start, end == std::string::npos ? std::string::npos : end - start + 1);
        }
    }
    return dump.substr(start);
}

} // namespace tydi::testing
