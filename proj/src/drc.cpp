//------------------------------------------------------------------------------
// drc.cpp
// Design rule checks over the sugared project
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/drc.hpp"

#include <algorithm>
#include <tuple>

#include "tydi/sugar.hpp"

namespace tydi {

namespace {

std::string end_text(const PortEnd& end) { return end.is_self() ? "Self." + end.key() : end.key(); }

bool end_is_source(const PortEnd& end) {
    return end.is_self() ? end.resolved->is_input : !end.resolved->is_input;
}

void check_connection(const Implementation& impl, const Connection& c, std::vector<DrcDiagnostic>& out) {
    if (!c.source.resolved || !c.sink.resolved)
        return;
    auto report = [&](Severity sev, const char* rule, std::string msg) {
        DrcDiagnostic d;
        d.severity = sev;
        d.rule = rule;
        d.package = impl.package->name;
        d.implementation = impl.name;
        d.connection = c.name;
        d.file = c.file;
        d.span = c.span;
        d.message = std::move(msg);
        out.push_back(std::move(d));
    };
    const Port& src = *c.source.resolved;
    const Port& dst = *c.sink.resolved;
    std::string route = end_text(c.source) + " => " + end_text(c.sink);
    std::string types = type_display(*src.type) + " and " + type_display(*dst.type);
    if (!c.no_strict_type) {
        if (!types_strictly_equal(src.type, dst.type)) {
            if (types_compatible(*src.type, *dst.type))
                report(Severity::Warning, "R1",
                       route + ": " + types + " are structurally equal but not the same type declaration; share one "
                                              "type alias or mark the connection @NoStrictType@");
            else
                report(Severity::Error, "R1", route + ": " + types + " are not compatible");
        }
    } else if (!types_compatible(*src.type, *dst.type)) {
        report(Severity::Error, "R2", route + ": " + types + " are not compatible");
    }
    if (!end_is_source(c.source))
        report(Severity::Error, "R3",
               route + ": " + end_text(c.source) + " cannot drive a connection inside '" + impl.name +
                   "'; sources are Self in ports and instance out ports");
    if (end_is_source(c.sink))
        report(Severity::Error, "R3",
               route + ": " + end_text(c.sink) + " cannot receive a connection inside '" + impl.name +
                   "'; sinks are Self out ports and instance in ports");
    if (!(src.clockdomain == dst.clockdomain))
        report(Severity::Error, "R4",
               route + ": clockdomain " + dump_value(src.clockdomain) + " differs from " + dump_value(dst.clockdomain));
}

} // namespace

std::vector<DrcDiagnostic> run_drc(const Project& project) {
    std::vector<DrcDiagnostic> out;
    for (Implementation* impl : concrete_implementations(project)) {
        for (auto& c : impl->scope->connections)
            check_connection(*impl, *c, out);
        for (auto& u : usage_census(*impl)) {
            if (u.use_count == 1)
                continue;
            DrcDiagnostic d;
            d.rule = "R5";
            d.package = impl->package->name;
            d.implementation = impl->name;
            d.file = impl->file;
            d.span = u.uses.empty() ? impl->span : u.uses.back()->span;
            d.message = end_text(u.end) + (u.use_count == 0 ? " is not connected"
                                                             : " is used by " + std::to_string(u.use_count) +
                                                                   " connections");
            out.push_back(std::move(d));
        }
    }
    auto key = [](const DrcDiagnostic& d) {
        return std::tie(d.package, d.implementation, d.connection, d.rule, d.message);
    };
    std::sort(out.begin(), out.end(), [&](const DrcDiagnostic& a, const DrcDiagnostic& b) { return key(a) < key(b); });
    return out;
}

std::size_t count_errors(const std::vector<DrcDiagnostic>& diags) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [](const DrcDiagnostic& d) { return d.severity == Severity::Error; }));
}

std::string render_drc_report(const std::vector<DrcDiagnostic>& diags) {
    std::string out;
    for (auto& d : diags) {
        out += d.severity == Severity::Error ? "error" : "warning";
        out += "[" + d.rule + "] " + d.package + "." + d.implementation;
        if (!d.connection.empty())
            out += " (" + d.connection + ")";
        if (d.file) {
            LineColumn lc = line_column(d.file->text, d.span.start);
            out += " " + d.file->path + ":" + std::to_string(lc.line) + ":" + std::to_string(lc.column);
        }
        out += ": " + d.message + "\n";
    }
    std::size_t errors = count_errors(diags);
    out += std::to_string(errors) + " errors, " + std::to_string(diags.size() - errors) + " warnings\n";
    return out;
}

std::vector<Diagnostic> drc_errors_as_diagnostics(const std::vector<DrcDiagnostic>& diags) {
    std::vector<Diagnostic> out;
    for (auto& d : diags) {
        if (d.severity != Severity::Error)
            continue;
        std::string where = d.package + "." + d.implementation + (d.connection.empty() ? "" : " (" + d.connection + ")");
        out.push_back(make_diagnostic(DiagCategory::Drc, d.file, d.span, d.rule + " " + where + ": " + d.message));
    }
    return out;
}

} // namespace tydi
