//------------------------------------------------------------------------------
// dump.cpp
// Text rendering of the code structure
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/dump.hpp"

#include <algorithm>

namespace tydi {

namespace {

class Writer {
public:
    void line(const std::string& text) {
        out_.append(indent_ * 2, ' ');
        out_ += text;
        out_ += '\n';
    }
    void open(const std::string& text) {
        line(text + "{");
        ++indent_;
    }
    void close() {
        --indent_;
        line("}");
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
    int indent_ = 0;
};

bool is_done(const EvalCell& cell) { return cell.state == EvalCell::State::Done; }

std::string raw(const SourceFile* file, const AstNode& node) {
    return file ? std::string(file->slice(node.span)) : std::string();
}

std::string not_inferred(const std::string& text) { return "NotInferred(" + quote_string(text) + ")"; }

std::string pre_type(const AstNode& lt, const SourceFile* file) {
    const AstNode& inner = lt.kind == NodeKind::LogicalType ? *lt.children[0] : lt;
    switch (inner.kind) {
        case NodeKind::LogicalNullType: return "DataNull";
        case NodeKind::LogicalBitType: return "Bit(" + not_inferred(raw(file, *inner.children[0])) + ")";
        case NodeKind::LogicalStreamType: return "Stream(" + not_inferred(raw(file, *inner.children[0])) + ")";
        default: return "VarType(" + raw(file, inner) + ")";
    }
}

std::string pre_props(const AstNode& stream, const SourceFile* file) {
    const StreamProps d;
    auto given = [&](NodeKind k) -> const AstNode* {
        const AstNode* p = stream.find(k);
        return p ? p->children[0].get() : nullptr;
    };
    auto field = [&](NodeKind k, std::string fallback) {
        const AstNode* p = given(k);
        return p ? not_inferred(raw(file, *p)) : fallback;
    };
    const AstNode* user = given(NodeKind::StreamPropertyUserType);
    std::string out = "dimension=" + field(NodeKind::StreamPropertyDimension, std::to_string(d.dimension));
    out += ", user=" + (user ? pre_type(*user, file) : std::string("DataNull"));
    out += ", throughput=" + field(NodeKind::StreamPropertyThroughput, format_float(d.throughput));
    out += ", synchronicity=" + field(NodeKind::StreamPropertySynchronicity, std::string(to_string(d.synchronicity)));
    out += ", complexity=" + field(NodeKind::StreamPropertyComplexity, std::to_string(d.complexity));
    out += ", direction=" + field(NodeKind::StreamPropertyDirection, std::string(to_string(d.direction)));
    out += ", keep=" + field(NodeKind::StreamPropertyKeep, "false");
    return out;
}

void dump_scope(Writer& w, const Scope& scope);

void dump_stream_block(Writer& w, const std::string& prefix, const LogicalType& t) {
    w.open(prefix + type_display(t));
    w.line("DataType=" + type_display(*t.element));
    w.line(stream_props_display(t.props));
    w.close();
}

void dump_type_entry(Writer& w, const TypeEntry& t) {
    std::string prefix = t.id + ":";
    if (t.is_group_or_union()) {
        bool group = t.body->kind == NodeKind::LogicalGroupType;
        w.open(prefix + (group ? "DataGroup(" : "DataUnion(") + t.id + ")");
        dump_scope(w, *t.member_scope);
        w.close();
        return;
    }
    if (is_done(t.cell) && t.value) {
        if (t.value->is_stream())
            dump_stream_block(w, prefix, *t.value);
        else
            w.line(prefix + type_display(*t.value));
        return;
    }
    if (!t.body) {
        // unbound template type parameter
        w.line(prefix + "DummyLogicalData(" + not_inferred(t.raw) + ")");
        return;
    }
    const AstNode& inner = *t.body->children[0];
    if (inner.kind == NodeKind::LogicalStreamType) {
        w.open(prefix + "Stream(" + t.id + ")");
        w.line("DataType=" + pre_type(*inner.children[0], t.file));
        w.line(pre_props(inner, t.file));
        w.close();
        return;
    }
    w.line(prefix + pre_type(*t.body, t.file));
}

std::string dump_variable(const Variable& v) {
    std::string prefix = v.id + ":";
    if (v.magic == VarMagic::Package)
        return prefix + "PackageType(NotInferred(\"\"))";
    if (is_done(v.cell))
        return prefix + dump_value(v.value);
    if (v.magic == VarMagic::Arg) {
        if (v.declared_kind == "type")
            return prefix + "DummyLogicalData(" + not_inferred(v.raw) + ")";
        if (v.declared_kind == "impl")
            return prefix + "DummyImplement(" + not_inferred(v.raw) + ")";
        return prefix + v.declared_kind + "(" + not_inferred(v.raw) + ")";
    }
    return prefix + "UnknownType(" + not_inferred(v.raw) + ")";
}

std::string param_list(const std::vector<TemplateParam>& params) {
    std::string out = "<";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i)
            out += ", ";
        const std::string& k = params[i].kind;
        if (k == "type")
            out += "@LogicalDataType(DummyLogicalData)";
        else if (k == "impl")
            out += "@Implement(DummyImplement)";
        else
            out += "@" + k;
    }
    return out + ">";
}

std::string template_ref_raw(const AstNode& ti, const SourceFile* file) {
    std::string out;
    for (auto* id : ti.find_all(NodeKind::ID)) {
        if (!out.empty())
            out += ".";
        out += id->text;
    }
    out += "<";
    if (const AstNode* args = ti.find(NodeKind::TemplateArgs)) {
        for (std::size_t i = 0; i < args->children.size(); ++i) {
            const AstNode& a = *args->children[i];
            if (i)
                out += ", ";
            if (a.kind == NodeKind::TemplateArgExp)
                out += raw(file, *a.children[0]);
            else
                out += "@" + raw(file, *a.children[0]);
        }
    }
    return out + ">";
}

std::string dump_end(const PortEnd& end, const Connection& c) {
    std::string out;
    if (end.is_self() && end.raw_owner.empty())
        out = "Self.";
    else if (c.evaluated)
        out = "ExternalOwner(" + end.owner + (end.owner_index ? "[" + std::to_string(*end.owner_index) + "]" : "") +
              ").";
    else
        out = "ExternalOwner(" + end.raw_owner + ").";
    if (!c.evaluated || !end.resolved)
        return out + not_inferred(end.raw_port);
    out += end.port;
    if (end.port_index)
        out += "[" + std::to_string(*end.port_index) + "]";
    return out + ":" + dump_port(*end.resolved);
}

std::string dump_connection(const Connection& c) {
    std::string fifo = std::to_string(c.fifo_depth);
    if (!c.evaluated)
        if (const AstNode* f = c.ast ? c.ast->find(NodeKind::FifoDepth) : nullptr)
            fifo = not_inferred(raw(c.file, *f->children[0]));
    std::string out = dump_end(c.source, c) + " =" + fifo + "=> " + dump_end(c.sink, c) + " (" + c.name + ")";
    if (c.no_strict_type)
        out += " @NoStrictType@";
    return out;
}

std::string dump_instance(const Instance& inst) {
    std::string out = inst.name + ":(";
    if (inst.evaluated && inst.target)
        out += "Implement(" + inst.target->name + ")";
    else
        out += not_inferred(inst.raw_target);
    out += ")";
    if (inst.array_size)
        out += "[" + std::to_string(*inst.array_size) + "]";
    else if (inst.array_ast)
        out += "[" + not_inferred(raw(inst.file, *inst.array_ast->children[0])) + "]";
    return out;
}

template<typename Map, typename F>
void section(Writer& w, const char* title, const Map& map, F&& emit) {
    if (map.empty())
        return;
    w.open(title);
    for (auto& [id, entity] : map)
        emit(*entity);
    w.close();
}

void dump_lines(Writer& w, const char* title, std::vector<std::string> lines) {
    if (lines.empty())
        return;
    std::sort(lines.begin(), lines.end());
    w.open(title);
    for (auto& l : lines)
        w.line(l);
    w.close();
}

void dump_streamlet(Writer& w, const Streamlet& s) {
    w.open("Streamlet(" + s.name + ")" + (s.is_template() ? param_list(s.params) : "<NormalStreamlet>"));
    dump_scope(w, *s.scope);
    w.close();
}

void dump_implementation(Writer& w, const Implementation& impl) {
    std::string header = "Implement(" + impl.name + ")";
    if (impl.is_template())
        header += param_list(impl.params);
    else
        header += impl.external ? "<ExternalImplement>" : "<NormalImplement>";
    header += " -> ";
    bool done = is_done(impl.cell);
    if (impl.is_alias)
        header += "Alias(" + (done && impl.alias_of ? "Implement(" + impl.alias_of->name + ")" : not_inferred(impl.streamlet_raw)) + ")";
    else if (done && impl.streamlet)
        header += "Streamlet(" + impl.streamlet->name + ")";
    else
        header += "ProxyStreamlet(" + template_ref_raw(*impl.streamlet_ref, impl.file) + ")";
    w.open(header);
    dump_scope(w, *impl.scope);
    if (!impl.blocks_expanded) {
        std::vector<std::string> blocks;
        for (const AstNode* b : impl.blocks) {
            if (b->kind == NodeKind::ForBlock)
                blocks.push_back("For(" + b->children[0]->text + " in " + not_inferred(raw(impl.file, *b->children[1])) +
                                 ")");
            else
                blocks.push_back("If(" + not_inferred(raw(impl.file, *b->children[0]->children[0])) + ")");
        }
        if (!blocks.empty()) {
            w.open("Blocks");
            for (auto& b : blocks)
                w.line(b);
            w.close();
        }
    }
    std::vector<std::string> asserts;
    for (const AstNode* a : impl.assertions)
        asserts.push_back("assert(" + (done ? std::string("bool(true)") : not_inferred(raw(impl.file, *a->children[0]))) + ")");
    dump_lines(w, "Assertions", asserts);
    w.line(std::string("simulation_process{") + (impl.has_process ? "Some" : "None") + "}");
    w.close();
}

void dump_scope(Writer& w, const Scope& scope) {
    w.open("Scope(" + scope.name + ")");
    section(w, "Variables", scope.variables, [&](const Variable& v) { w.line(dump_variable(v)); });
    section(w, "Types", scope.types, [&](const TypeEntry& t) { dump_type_entry(w, t); });
    section(w, "Streamlets", scope.streamlets, [&](const Streamlet& s) { dump_streamlet(w, s); });
    section(w, "Implements", scope.implements, [&](const Implementation& i) { dump_implementation(w, i); });
    if (!scope.relations.empty()) {
        w.open("ScopeRelations");
        for (auto& [kind, target] : scope.relations)
            w.line("--" + std::string(relation_label(kind)) + "-->" + target->name);
        w.close();
    }
    section(w, "Ports", scope.ports, [&](const Port& p) { w.line(p.name + ":" + dump_port(p)); });
    section(w, "Instances", scope.instances, [&](const Instance& i) { w.line(dump_instance(i)); });
    std::vector<std::string> conns;
    for (auto& c : scope.connections)
        conns.push_back(dump_connection(*c));
    dump_lines(w, "Connections", conns);
    w.close();
}

} // namespace

std::string dump_type_short(const LogicalType& t) { return type_display(t); }

std::string dump_port(const Port& port) {
    std::string out = "Port(";
    if (port.evaluated && port.type)
        out += type_display(*port.type);
    else
        out += pre_type(*port.type_ast, port.file);
    out += port.is_input ? ",in)" : ",out)";
    if (port.array_size)
        out += "[" + std::to_string(*port.array_size) + "]";
    else if (port.array_ast)
        out += "[" + not_inferred(raw(port.file, *port.array_ast->children[0])) + "]";
    out += " `";
    if (port.evaluated)
        out += port.clockdomain.default_cd ? "DefaultClockDomain" : quote_string(port.clockdomain.s);
    else if (port.cd_ast)
        out += not_inferred(raw(port.file, *port.cd_ast->children[0]));
    else
        out += "DefaultClockDomain";
    return out;
}

std::string dump_project(const Project& project) {
    Writer w;
    w.open("Project(" + project.name + ")");
    for (auto& [name, pkg] : project.packages) {
        w.open("Package(" + name + ")");
        dump_scope(w, *pkg->scope);
        w.close();
    }
    w.close();
    return w.take();
}

} // namespace tydi
