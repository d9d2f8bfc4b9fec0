//------------------------------------------------------------------------------
// flatten.cpp
// Hierarchy flattening and Graphviz DOT emission
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/flatten.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "tydi/sugar.hpp"

namespace tydi {

namespace {

std::string indexed(const std::string& base, std::optional<std::int64_t> index, const char* sep) {
    return index ? base + sep + std::to_string(*index) : base;
}

std::vector<FlatPort> flat_ports(const Streamlet& s) {
    std::vector<FlatPort> out;
    for (auto& [name, port] : s.scope->ports) {
        if (!port->array_size) {
            out.push_back({name, name});
            continue;
        }
        for (std::int64_t i = 0; i < *port->array_size; ++i)
            out.push_back({indexed(name, i, "@"), indexed(name, i, "_AT_")});
    }
    return out;
}

void flatten_into(const Implementation& impl, const std::string& flat, FlatCircuit& out) {
    const Implementation& body = *impl.body();
    FlatComponent comp;
    comp.flat_name = flat;
    comp.is_wrapper = !body.scope->instances.empty();
    comp.ports = flat_ports(*body.streamlet);
    comp.impl = body.name;
    out.components.push_back(std::move(comp));

    auto owner_of = [&](const PortEnd& end) {
        if (end.is_self())
            return flat;
        return flat + "__" + indexed(end.owner, end.owner_index, "_AT_");
    };
    auto label_of = [&](const PortEnd& end) {
        if (end.is_self())
            return flat;
        return flat + "::" + indexed(end.owner, end.owner_index, "_AT_");
    };
    for (auto& c : body.scope->connections) {
        if (!c->evaluated)
            continue;
        FlatNet net;
        net.src_component = owner_of(c->source);
        net.src_anchor = indexed(c->source.port, c->source.port_index, "_AT_");
        net.dst_component = owner_of(c->sink);
        net.dst_anchor = indexed(c->sink.port, c->sink.port_index, "_AT_");
        net.label = c->name + "__" + label_of(c->source) + "__" + label_of(c->sink);
        out.nets.push_back(std::move(net));
    }
    for (auto& [name, inst] : body.scope->instances) {
        if (!inst->target)
            throw_error(DiagCategory::Resolution, inst->file, inst->span,
                        "instance '" + name + "' of '" + body.name + "' is not resolved");
        if (inst->array_size) {
            for (std::int64_t i = 0; i < *inst->array_size; ++i)
                flatten_into(*inst->target, flat + "__" + indexed(name, i, "_AT_"), out);
        } else {
            flatten_into(*inst->target, flat + "__" + name, out);
        }
    }
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

std::string record_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::string_view("{}|<>\"\\ ").find(c) != std::string_view::npos)
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

FlatCircuit flatten(const Implementation& top) {
    if (top.is_template())
        throw_error(DiagCategory::Resolution, top.file, top.span, "top implementation '" + top.name + "' is a template");
    if (top.cell.state != EvalCell::State::Done || !top.body()->streamlet)
        throw_error(DiagCategory::Resolution, top.file, top.span,
                    "top implementation '" + top.name + "' is not evaluated");
    FlatCircuit out;
    flatten_into(top, top.name, out);
    return out;
}

std::vector<const Implementation*> circuit_tops(const Project& project, const std::string& top) {
    std::vector<const Implementation*> out;
    if (!top.empty()) {
        auto dot = top.find('.');
        Package* pkg = dot == std::string::npos ? nullptr : project.find_package(top.substr(0, dot));
        Implementation* impl = pkg ? pkg->scope->find_implement(top.substr(dot + 1)) : nullptr;
        if (!impl)
            throw_error(DiagCategory::Resolution, nullptr, {}, "top implementation '" + top + "' not found");
        out.push_back(impl);
        return out;
    }
    std::set<std::string> imported;
    std::set<const Implementation*> used;
    for (auto& [name, pkg] : project.packages)
        for (auto& imp : pkg->imports)
            imported.insert(imp);
    auto impls = concrete_implementations(project);
    for (Implementation* impl : impls)
        for (auto& [name, inst] : impl->scope->instances)
            if (inst->target)
                used.insert(inst->target->body());
    for (Implementation* impl : impls)
        if (!impl->package->is_prelude && !imported.count(impl->package->name) && !used.count(impl) &&
            !impl->is_instance)
            out.push_back(impl);
    return out;
}

FlatCircuit flatten_project(const Project& project, const std::string& top) {
    FlatCircuit out;
    for (const Implementation* t : circuit_tops(project, top)) {
        FlatCircuit part = flatten(*t);
        out.components.insert(out.components.end(), part.components.begin(), part.components.end());
        out.nets.insert(out.nets.end(), part.nets.begin(), part.nets.end());
    }
    return out;
}

std::string emit_dot(const FlatCircuit& circuit) {
    std::vector<const FlatComponent*> comps;
    for (auto& c : circuit.components)
        comps.push_back(&c);
    std::sort(comps.begin(), comps.end(),
              [](const FlatComponent* a, const FlatComponent* b) { return a->flat_name < b->flat_name; });
    std::vector<const FlatNet*> nets;
    for (auto& n : circuit.nets)
        nets.push_back(&n);
    std::sort(nets.begin(), nets.end(), [](const FlatNet* a, const FlatNet* b) {
        return std::tie(a->label, a->src_component, a->src_anchor) < std::tie(b->label, b->src_component, b->src_anchor);
    });
    std::string out = "digraph {\n";
    for (const FlatComponent* c : comps) {
        out += c->flat_name + " [" + (c->is_wrapper ? "color=red, " : "") + "shape=record, label=\"{<component>" +
               c->flat_name;
        for (auto& p : c->ports)
            out += "|<" + p.anchor + ">" + record_escape(p.display);
        out += "}\"];\n";
    }
    for (const FlatNet* n : nets)
        out += n->src_component + ":" + n->src_anchor + " -> " + n->dst_component + ":" + n->dst_anchor +
               " [label=\"" + dot_escape(n->label) + "\"] ;\n";
    out += "}\n";
    return out;
}

std::vector<std::string> check_dot(const std::string& dot) {
    static const std::regex node_re(R"re(^([A-Za-z0-9_]+) \[(color=red, )?shape=record, label="\{<component>([A-Za-z0-9_]+)((\|<[A-Za-z0-9_]+>([^|{}<>\\]|\\.)*)*)\}"\];$)re");
    static const std::regex port_re(R"re(\|<([A-Za-z0-9_]+)>)re");
    static const std::regex edge_re(R"re(^([A-Za-z0-9_]+):([A-Za-z0-9_]+) -> ([A-Za-z0-9_]+):([A-Za-z0-9_]+) \[label="(([^"\\]|\\.)*)"\] ;$)re");
    std::vector<std::string> problems;
    std::istringstream in(dot);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        lines.push_back(line);
    if (lines.empty() || lines.front() != "digraph {")
        problems.push_back("missing 'digraph {' header");
    if (lines.empty() || lines.back() != "}")
        problems.push_back("missing closing '}'");
    std::map<std::string, std::set<std::string>> anchors;
    std::vector<std::smatch> edges;
    std::vector<std::string> edge_lines;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        std::smatch m;
        const std::string& l = lines[i];
        if (std::regex_match(l, m, node_re)) {
            if (m[1].str() != m[3].str())
                problems.push_back("line " + std::to_string(i + 1) + ": record label names '" + m[3].str() +
                                   "' but node is '" + m[1].str() + "'");
            if (anchors.count(m[1].str()))
                problems.push_back("line " + std::to_string(i + 1) + ": duplicate node '" + m[1].str() + "'");
            auto& set = anchors[m[1].str()];
            std::string ports = m[4].str();
            for (std::sregex_iterator it(ports.begin(), ports.end(), port_re), end; it != end; ++it)
                if (!set.insert((*it)[1].str()).second)
                    problems.push_back("line " + std::to_string(i + 1) + ": duplicate anchor '" + (*it)[1].str() + "'");
        } else if (std::regex_match(l, m, edge_re)) {
            edge_lines.push_back(l);
        } else {
            problems.push_back("line " + std::to_string(i + 1) + ": not a node or edge: " + l);
        }
    }
    for (auto& l : edge_lines) {
        std::smatch m;
        std::regex_match(l, m, edge_re);
        for (int side : {1, 3}) {
            auto it = anchors.find(m[side].str());
            if (it == anchors.end())
                problems.push_back("edge '" + l + "' names unknown node '" + m[side].str() + "'");
            else if (!it->second.count(m[side + 1].str()))
                problems.push_back("edge '" + l + "' names unknown anchor '" + m[side + 1].str() + "' of '" +
                                   m[side].str() + "'");
        }
    }
    return problems;
}

} // namespace tydi
