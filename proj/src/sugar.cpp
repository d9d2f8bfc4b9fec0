//------------------------------------------------------------------------------
// sugar.cpp
// Duplicator and voider insertion so every port end has exactly one connection
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/sugar.hpp"

#include <map>

#include "tydi/evaluator.hpp"
#include "tydi/lower.hpp"

namespace tydi {

namespace {

void add_ends(std::vector<PortUsage>& out, const Streamlet& s, Instance* inst, std::optional<std::int64_t> owner_index) {
    for (auto& name : s.port_order) {
        Port* p = s.scope->find_port(name);
        std::int64_t count = p->array_size.value_or(1);
        for (std::int64_t i = 0; i < count; ++i) {
            PortUsage u;
            if (inst) {
                u.end.owner = inst->name;
                u.end.owner_index = owner_index;
                u.end.instance = inst;
            }
            u.end.port = name;
            if (p->array_size)
                u.end.port_index = i;
            u.end.resolved = p;
            u.is_source = inst ? !p->is_input : p->is_input;
            out.push_back(std::move(u));
        }
    }
}

std::string name_part(const PortEnd& end) {
    std::string out;
    if (!end.owner.empty()) {
        out += end.owner;
        if (end.owner_index)
            out += "_" + std::to_string(*end.owner_index);
        out += "_";
    }
    out += end.port;
    if (end.port_index)
        out += "_" + std::to_string(*end.port_index);
    return out;
}

std::string unique_instance_name(const Scope& scope, const std::string& base) {
    std::string name = base;
    for (int n = 1; scope.find_instance(name); ++n)
        name = base + "_" + std::to_string(n);
    return name;
}

class Sugarer {
public:
    explicit Sugarer(Project& project) : project_(project), ev_(project) {}

    void run(Implementation& impl, SugarResult& result) {
        auto census = usage_census(impl);
        for (auto& u : census) {
            if (!u.is_source)
                continue;
            bool all_as_source = true;
            for (Connection* c : u.uses)
                all_as_source = all_as_source && c->source.key() == u.end.key();
            if (u.use_count >= 2 && all_as_source) {
                duplicate(impl, u);
                ++result.duplicators;
            } else if (u.use_count == 0 && !u.end.is_self()) {
                void_end(impl, u);
                ++result.voiders;
            }
        }
    }

private:
    Implementation& prelude_template(const char* name) {
        Package* pkg = project_.find_package(prelude_package_name);
        Implementation* tpl = pkg ? pkg->scope->find_implement(name) : nullptr;
        if (!tpl)
            throw_error(DiagCategory::Internal, nullptr, {},
                        std::string("standard library template '") + name + "' is missing");
        return *tpl;
    }

    Instance& add_generated_instance(Implementation& impl, const std::string& base, Implementation& target) {
        ev_.implementation(target);
        auto inst = std::make_unique<Instance>();
        inst->name = unique_instance_name(*impl.scope, base);
        inst->owner = &impl;
        inst->file = impl.file;
        inst->span = impl.span;
        inst->raw_target = target.name;
        inst->generated = true;
        inst->target = &target;
        inst->evaluated = true;
        return impl.scope->add_instance(std::move(inst));
    }

    PortEnd instance_end(Instance& inst, const std::string& port, std::optional<std::int64_t> index) {
        PortEnd end;
        end.owner = inst.name;
        end.port = port;
        end.port_index = index;
        end.raw_owner = inst.name;
        end.raw_port = port + (index ? "[" + std::to_string(*index) + "]" : "");
        end.instance = &inst;
        end.resolved = inst.target->body()->streamlet->scope->find_port(port);
        return end;
    }

    void add_generated_connection(Implementation& impl, const std::string& name, PortEnd source, PortEnd sink) {
        auto c = std::make_unique<Connection>();
        c->name = name;
        c->owner = &impl;
        c->file = impl.file;
        c->span = impl.span;
        if (source.raw_port.empty())
            source.raw_port = source.port;
        if (source.raw_owner.empty())
            source.raw_owner = source.owner;
        c->source = std::move(source);
        c->sink = std::move(sink);
        c->generated = true;
        c->evaluated = true;
        impl.scope->add_connection(std::move(c));
    }

    void duplicate(Implementation& impl, const PortUsage& u) {
        const Port& p = *u.end.resolved;
        std::vector<TemplateArg> args(3);
        args[0].kind = TemplateArg::Kind::Type;
        args[0].type = p.type;
        args[1].value = Value::of_int(u.use_count);
        args[2].value = p.clockdomain;
        Implementation& tpl = prelude_template("duplicator_i");
        Implementation& target = ev_.instantiate(tpl, args, impl.file, impl.span);
        Instance& inst = add_generated_instance(impl, "duplicate_" + name_part(u.end), target);
        PortEnd original = u.end;
        original.raw_owner = u.uses.front()->source.raw_owner;
        original.raw_port = u.uses.front()->source.raw_port;
        for (std::size_t j = 0; j < u.uses.size(); ++j) {
            Connection& c = *u.uses[j];
            c.source = instance_end(inst, "output", static_cast<std::int64_t>(j));
        }
        add_generated_connection(impl, inst.name + "_input", original, instance_end(inst, "input", std::nullopt));
    }

    void void_end(Implementation& impl, const PortUsage& u) {
        const Port& p = *u.end.resolved;
        std::vector<TemplateArg> args(2);
        args[0].kind = TemplateArg::Kind::Type;
        args[0].type = p.type;
        args[1].value = p.clockdomain;
        Implementation& tpl = prelude_template("void_i");
        Implementation& target = ev_.instantiate(tpl, args, impl.file, impl.span);
        Instance& inst = add_generated_instance(impl, "void_" + name_part(u.end), target);
        PortEnd source = u.end;
        source.raw_owner = source.owner + (source.owner_index ? "[" + std::to_string(*source.owner_index) + "]" : "");
        source.raw_port = source.port + (source.port_index ? "[" + std::to_string(*source.port_index) + "]" : "");
        add_generated_connection(impl, inst.name + "_input", source, instance_end(inst, "input", std::nullopt));
    }

    Project& project_;
    Evaluator ev_;
};

} // namespace

std::vector<PortUsage> usage_census(const Implementation& impl) {
    std::vector<PortUsage> out;
    if (!impl.streamlet)
        return out;
    add_ends(out, *impl.streamlet, nullptr, std::nullopt);
    for (auto& [name, inst] : impl.scope->instances) {
        if (!inst->target)
            continue;
        const Streamlet& s = *inst->target->body()->streamlet;
        if (inst->array_size) {
            for (std::int64_t i = 0; i < *inst->array_size; ++i)
                add_ends(out, s, inst.get(), i);
        } else {
            add_ends(out, s, inst.get(), std::nullopt);
        }
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < out.size(); ++i)
        index[out[i].end.key()] = i;
    for (auto& c : impl.scope->connections) {
        for (const PortEnd* end : {&c->source, &c->sink}) {
            auto it = index.find(end->key());
            if (it == index.end())
                continue;
            PortUsage& u = out[it->second];
            ++u.use_count;
            if (u.uses.empty() || u.uses.back() != c.get())
                u.uses.push_back(c.get());
        }
    }
    return out;
}

std::vector<Implementation*> concrete_implementations(const Project& project) {
    std::vector<Implementation*> out;
    for (auto& [pname, pkg] : project.packages)
        for (auto& [iname, impl] : pkg->scope->implements)
            if (!impl->is_template() && !impl->external && !impl->is_alias &&
                impl->cell.state == EvalCell::State::Done)
                out.push_back(impl.get());
    return out;
}

SugarResult sugar_project(Project& project) {
    SugarResult result;
    Sugarer sugarer(project);
    for (Implementation* impl : concrete_implementations(project)) {
        try {
            sugarer.run(*impl, result);
        } catch (const CompileError& e) {
            result.diagnostics.push_back(e.diagnostic());
        }
    }
    return result;
}

} // namespace tydi
