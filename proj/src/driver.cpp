//------------------------------------------------------------------------------
// driver.cpp
// The compile pipeline: parse, evaluate, sugar, check and emit
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/driver.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <tuple>

#include "tydi/dump.hpp"
#include "tydi/evaluator.hpp"
#include "tydi/flatten.hpp"
#include "tydi/ir.hpp"
#include "tydi/lower.hpp"
#include "tydi/sugar.hpp"

namespace tydi {

namespace fs = std::filesystem;

const std::string* CompileOutput::find(const std::string& path) const {
    for (auto& a : artifacts)
        if (a.path == path)
            return &a.content;
    return nullptr;
}

CompileOutput compile(const ProjectParseResult& parsed, const CompileOptions& options) {
    CompileOutput out;
    std::set<std::string> stems;
    for (auto& f : parsed.files) {
        if (!f.root)
            continue;
        std::string stem = fs::path(f.source->path).stem().string();
        std::string name = stem;
        for (int n = 1; !stems.insert(name).second; ++n)
            name = stem + "_" + std::to_string(n);
        out.artifacts.push_back({"0_ast/" + name + ".txt", dump_ast(*f.root) + "\n"});
    }
    if (!parsed.ok()) {
        out.errors = parsed.diagnostics;
        return out;
    }
    BuildResult built = build_project(parsed, options.project_name);
    out.project = std::move(built.project);
    if (!built.diagnostics.empty()) {
        out.errors = built.diagnostics;
        return out;
    }
    out.artifacts.push_back({"1_parser_output.txt", dump_project(*out.project)});

    EvaluationResult evaluated = evaluate_project(*out.project, {options.jobs, options.top});
    if (!evaluated.ok()) {
        out.errors = evaluated.diagnostics;
        return out;
    }
    out.artifacts.push_back({"2_evaluation_output.txt", dump_project(*out.project)});

    SugarResult sugared = sugar_project(*out.project);
    if (!sugared.diagnostics.empty()) {
        out.errors = sugared.diagnostics;
        return out;
    }
    out.artifacts.push_back({"2_evaluation_output_after_sugaring.txt", dump_project(*out.project)});

    if (options.drc) {
        out.drc = run_drc(*out.project);
        out.artifacts.push_back({"drc_report.txt", render_drc_report(out.drc)});
        if (count_errors(out.drc) > 0) {
            out.errors = drc_errors_as_diagnostics(out.drc);
            return out;
        }
    }
    if (options.dot) {
        try {
            out.artifacts.push_back({"circuit.dot", emit_dot(flatten_project(*out.project, options.top))});
        } catch (const CompileError& e) {
            out.errors.push_back(e.diagnostic());
            return out;
        }
    }
    if (options.ir)
        out.artifacts.push_back({"ir.json", emit_ir(*out.project)});
    return out;
}

CompileOutput compile_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                              const CompileOptions& options) {
    return compile(parse_sources(sources, options.jobs), options);
}

std::vector<std::string> collect_source_paths(const std::vector<std::string>& inputs, std::vector<Diagnostic>& errors) {
    std::vector<std::string> out;
    for (auto& input : inputs) {
        std::error_code ec;
        if (fs::is_directory(input, ec)) {
            std::vector<std::string> found;
            for (auto& entry : fs::recursive_directory_iterator(input, ec))
                if (entry.is_regular_file() && entry.path().extension() == ".td")
                    found.push_back(entry.path().string());
            std::sort(found.begin(), found.end());
            if (found.empty()) {
                Diagnostic d;
                d.category = DiagCategory::Io;
                d.file = input;
                d.message = "directory '" + input + "' contains no .td files";
                errors.push_back(d);
            }
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::exists(input, ec)) {
            out.push_back(input);
        } else {
            Diagnostic d;
            d.category = DiagCategory::Io;
            d.file = input;
            d.message = "source path '" + input + "' does not exist";
            errors.push_back(d);
        }
    }
    return out;
}

std::string render_error_report(std::vector<Diagnostic> diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.file, a.span.start, a.message) < std::tie(b.file, b.span.start, b.message);
    });
    std::string out;
    std::size_t errors = 0;
    for (auto& d : diags) {
        if (d.severity == Severity::Error)
            ++errors;
        std::string where = d.file.empty() ? std::string("<project>") : d.file;
        if (!d.file.empty())
            where += ":" + std::to_string(d.position.line) + ":" + std::to_string(d.position.column);
        out += where + ": " + std::string(to_string(d.category)) + " " +
               (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message + "\n";
        for (auto& n : d.notes)
            out += "  note: " + n + "\n";
    }
    out += std::to_string(errors) + (errors == 1 ? " error\n" : " errors\n");
    return out;
}

} // namespace tydi
