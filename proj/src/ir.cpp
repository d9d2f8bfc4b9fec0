//------------------------------------------------------------------------------
// ir.cpp
// JSON dump of the evaluated project for downstream tools
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/ir.hpp"

#include <json.hpp>

namespace tydi {

namespace {

using json = nlohmann::json;

bool done(const EvalCell& cell) { return cell.state == EvalCell::State::Done; }

json type_json(const LogicalType& t) {
    using K = LogicalType::Kind;
    json j;
    switch (t.kind) {
        case K::Null: j["kind"] = "Null"; break;
        case K::Bit:
            j["kind"] = "Bit";
            j["width"] = t.width;
            break;
        case K::Group:
        case K::Union: {
            j["kind"] = t.kind == K::Group ? "Group" : "Union";
            j["name"] = t.name;
            json fields = json::array();
            for (auto& f : t.fields)
                fields.push_back({{"name", f.name}, {"type", type_json(*f.type)}});
            j["fields"] = fields;
            break;
        }
        case K::Stream:
            j["kind"] = "Stream";
            j["name"] = t.name.empty() ? json(nullptr) : json(t.name);
            j["element"] = type_json(*t.element);
            j["dimension"] = t.props.dimension;
            j["user"] = t.props.user ? type_json(*t.props.user) : json(nullptr);
            j["throughput"] = t.props.throughput;
            j["synchronicity"] = std::string(to_string(t.props.synchronicity));
            j["complexity"] = t.props.complexity;
            j["direction"] = std::string(to_string(t.props.direction));
            j["keep"] = t.props.keep;
            break;
    }
    return j;
}

json clockdomain_json(const Value& cd) { return cd.default_cd ? json(nullptr) : json(cd.s); }

json end_json(const PortEnd& end) {
    json j;
    j["owner"] = end.is_self() ? json(nullptr) : json(end.owner);
    j["owner_index"] = end.owner_index ? json(*end.owner_index) : json(nullptr);
    j["port"] = end.port;
    j["port_index"] = end.port_index ? json(*end.port_index) : json(nullptr);
    j["path"] = end.is_self() ? "Self." + end.key() : end.key();
    return j;
}

json streamlet_json(const Streamlet& s) {
    json j;
    j["doc"] = s.doc;
    json ports = json::array();
    for (auto& name : s.port_order) {
        const Port& p = *s.scope->find_port(name);
        json pj;
        pj["name"] = name;
        pj["direction"] = p.is_input ? "in" : "out";
        pj["type"] = type_json(*p.type);
        pj["array_size"] = p.array_size ? json(*p.array_size) : json(nullptr);
        pj["clockdomain"] = clockdomain_json(p.clockdomain);
        ports.push_back(pj);
    }
    j["ports"] = ports;
    return j;
}

json implementation_json(const Implementation& impl) {
    json j;
    j["doc"] = impl.doc;
    j["external"] = impl.external;
    j["streamlet"] = impl.streamlet ? json(impl.streamlet->name) : json(nullptr);
    if (impl.alias_of) {
        j["alias_of"] = impl.alias_of->name;
        return j;
    }
    json instances = json::array();
    for (auto& [name, inst] : impl.scope->instances) {
        instances.push_back({{"name", name},
                             {"target", inst->target ? json(inst->target->name) : json(nullptr)},
                             {"array_size", inst->array_size ? json(*inst->array_size) : json(nullptr)},
                             {"generated", inst->generated}});
    }
    j["instances"] = instances;
    json connections = json::array();
    for (auto& c : impl.scope->connections) {
        connections.push_back({{"name", c->name},
                               {"source", end_json(c->source)},
                               {"sink", end_json(c->sink)},
                               {"fifo_depth", c->fifo_depth},
                               {"no_strict_type", c->no_strict_type},
                               {"generated", c->generated}});
    }
    j["connections"] = connections;
    j["simulation_process"] = impl.has_process;
    return j;
}

} // namespace

std::string emit_ir(const Project& project) {
    json root;
    root["project"] = project.name;
    json packages = json::object();
    for (auto& [pname, pkg] : project.packages) {
        json pj;
        json types = json::object();
        for (auto& [id, t] : pkg->scope->types)
            if (done(t->cell) && t->value)
                types[id] = type_json(*t->value);
        json streamlets = json::object();
        for (auto& [id, s] : pkg->scope->streamlets)
            if (!s->is_template() && done(s->cell))
                streamlets[id] = streamlet_json(*s);
        json impls = json::object();
        for (auto& [id, impl] : pkg->scope->implements)
            if (!impl->is_template() && done(impl->cell))
                impls[id] = implementation_json(*impl);
        pj["types"] = types;
        pj["streamlets"] = streamlets;
        pj["implementations"] = impls;
        packages[pname] = pj;
    }
    root["packages"] = packages;
    return root.dump(2) + "\n";
}

} // namespace tydi
