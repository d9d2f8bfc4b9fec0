//------------------------------------------------------------------------------
// tydic.cpp
// Command line driver
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tydi/driver.hpp"

namespace fs = std::filesystem;

namespace {

bool write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return static_cast<bool>(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tydi-lang compiler frontend"};
    std::vector<std::string> inputs;
    std::string output = "build";
    tydi::CompileOptions options;
    bool project_given = false;
    app.add_option("inputs", inputs, "Source files or directories scanned for .td files")->required();
    app.add_option("-o,--output", output, "Output folder")->capture_default_str();
    app.add_option("--top", options.top, "Top implementation as package.impl");
    app.add_flag("--drc", options.drc, "Write drc_report.txt");
    app.add_flag("--dot", options.dot, "Write circuit.dot");
    app.add_flag("--ir", options.ir, "Write ir.json");
    app.add_option("-j,--jobs", options.jobs, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    app.add_option("--project", options.project_name, "Project name shown in dumps")
        ->each([&](const std::string&) { project_given = true; });
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (!project_given) {
        // the folder the output directory lives in names the project
        fs::path parent = fs::absolute(fs::path(output)).lexically_normal().parent_path();
        if (!parent.filename().empty())
            options.project_name = parent.filename().string();
    }

    std::vector<tydi::Diagnostic> io_errors;
    std::vector<std::string> paths = tydi::collect_source_paths(inputs, io_errors);
    fs::path out_dir(output);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output folder '" << output << "': " << ec.message() << "\n";
        return 2;
    }
    // stale files from an earlier run would misreport how far this one got
    for (const char* name : {"error_report.txt", "1_parser_output.txt", "2_evaluation_output.txt",
                             "2_evaluation_output_after_sugaring.txt", "drc_report.txt", "circuit.dot", "ir.json"})
        fs::remove(out_dir / name, ec);
    fs::remove_all(out_dir / "0_ast", ec);

    tydi::CompileOutput result;
    if (io_errors.empty()) {
        tydi::ProjectParseResult parsed = tydi::parse_project(paths, options.jobs);
        result = tydi::compile(parsed, options);
    } else {
        result.errors = io_errors;
    }
    bool written = true;
    for (auto& a : result.artifacts)
        written = write_file(out_dir / a.path, a.content) && written;
    std::size_t warnings = result.drc.size() - tydi::count_errors(result.drc);
    if (warnings > 0)
        std::cerr << warnings << " DRC warnings, see " << (out_dir / "drc_report.txt").string() << "\n";
    if (!result.ok()) {
        std::string report = tydi::render_error_report(result.errors);
        write_file(out_dir / "error_report.txt", report);
        std::cerr << report;
        return 1;
    }
    if (!written) {
        std::cerr << "error: cannot write output files to '" << output << "'\n";
        return 1;
    }
    return 0;
}
