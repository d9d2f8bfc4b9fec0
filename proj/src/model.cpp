//------------------------------------------------------------------------------
// model.cpp
// The code structure: projects, packages, scopes and the entities they hold
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/model.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <set>

namespace tydi {

std::string_view relation_label(RelationKind kind) {
    switch (kind) {
        case RelationKind::Group: return "GroupScope";
        case RelationKind::Union: return "UnionScope";
        case RelationKind::Stream: return "StreamScope";
        case RelationKind::Streamlet: return "StreamletScope";
        case RelationKind::Implement: return "ImplementScope";
        case RelationKind::IfFor: return "IfForScope";
    }
    return "?";
}

std::string_view to_string(Category category) {
    switch (category) {
        case Category::Variable: return "variable";
        case Category::Type: return "type";
        case Category::Streamlet: return "streamlet";
        case Category::Implementation: return "implementation";
        case Category::Port: return "port";
        case Category::Instance: return "instance";
    }
    return "?";
}

bool relation_permits(Category category, RelationKind kind) {
    if (kind == RelationKind::IfFor)
        return false;
    switch (category) {
        case Category::Variable:
        case Category::Type: return true;
        case Category::Streamlet:
        case Category::Implementation: return kind == RelationKind::Implement;
        case Category::Port:
        case Category::Instance: return false;
    }
    return false;
}

// ---- evaluation cells ----

namespace {

std::mutex g_cell_mutex;
std::condition_variable g_cell_cv;
std::map<std::thread::id, std::vector<EvalCell*>> g_stacks;
std::map<std::thread::id, EvalCell*> g_waiting;

void append_from(std::vector<EvalCell*>& out, const std::vector<EvalCell*>& stack, const EvalCell* from) {
    auto it = std::find(stack.begin(), stack.end(), from);
    for (; it != stack.end(); ++it)
        out.push_back(*it);
}

// Follows the wait-for chain starting at `cell`; returns the cycle members if
// it leads back to the calling thread.
std::optional<std::vector<EvalCell*>> find_cycle(EvalCell& cell, std::thread::id me) {
    std::vector<EvalCell*> members;
    EvalCell* cur = &cell;
    std::set<std::thread::id> seen;
    while (true) {
        std::thread::id t = cur->owner;
        append_from(members, g_stacks[t], cur);
        if (t == me)
            return members;
        if (!seen.insert(t).second)
            return std::nullopt;
        auto w = g_waiting.find(t);
        if (w == g_waiting.end())
            return std::nullopt;
        cur = w->second;
        if (cur->state != EvalCell::State::Running)
            return std::nullopt;
    }
}

[[noreturn]] void throw_cycle(std::vector<EvalCell*> members) {
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->label < b->label; });
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::string msg = "circular dependency among: ";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i)
            msg += ", ";
        msg += members[i]->label;
    }
    const EvalCell* at = members.front();
    throw_error(DiagCategory::Resolution, at->file, at->span, msg);
}

} // namespace

bool EvalCell::done() const {
    std::lock_guard lk(g_cell_mutex);
    return state == State::Done;
}

void run_cell(Project& project, EvalCell& cell, const std::function<void()>& body) {
    const std::thread::id me = std::this_thread::get_id();
    {
        std::unique_lock lk(g_cell_mutex);
        while (true) {
            if (cell.state == EvalCell::State::Done)
                return;
            if (cell.state == EvalCell::State::Failed)
                std::rethrow_exception(cell.error);
            if (cell.state == EvalCell::State::Pending) {
                cell.state = EvalCell::State::Running;
                cell.owner = me;
                g_stacks[me].push_back(&cell);
                break;
            }
            if (auto cycle = find_cycle(cell, me)) {
                lk.unlock();
                throw_cycle(std::move(*cycle));
            }
            g_waiting[me] = &cell;
            g_cell_cv.wait(lk);
            g_waiting.erase(me);
        }
    }
    ++project.evaluation_count;
    auto finish = [&](EvalCell::State state, std::exception_ptr error) {
        std::lock_guard lk(g_cell_mutex);
        cell.state = state;
        cell.error = error;
        auto& stack = g_stacks[me];
        stack.pop_back();
        if (stack.empty())
            g_stacks.erase(me);
        g_cell_cv.notify_all();
    };
    try {
        body();
    } catch (...) {
        finish(EvalCell::State::Failed, std::current_exception());
        throw;
    }
    finish(EvalCell::State::Done, nullptr);
}

// ---- scopes ----

Scope::Scope(std::string name, Package* package) : name(std::move(name)), package(package) {}
Scope::~Scope() = default;

bool Scope::is_package_scope() const {
    return package && package->scope.get() == this;
}

namespace {

template<typename Map>
typename Map::mapped_type::element_type* find_in(const Scope& s, const Map& map, std::string_view id) {
    std::shared_lock lk(s.mutex);
    auto it = map.find(std::string(id));
    return it == map.end() ? nullptr : it->second.get();
}

template<typename Map, typename T>
T& add_to(Scope& s, Map& map, std::unique_ptr<T> item, std::string_view what, const std::string& id,
          const SourceFile* file, Span span) {
    std::unique_lock lk(s.mutex);
    auto [it, inserted] = map.emplace(id, nullptr);
    if (!inserted) {
        lk.unlock();
        throw_error(DiagCategory::Resolution, file, span,
                    "duplicate " + std::string(what) + " '" + id + "' in " + s.name);
    }
    it->second = std::move(item);
    return *it->second;
}

} // namespace

Variable* Scope::find_variable(std::string_view id) const { return find_in(*this, variables, id); }
TypeEntry* Scope::find_type(std::string_view id) const { return find_in(*this, types, id); }
Streamlet* Scope::find_streamlet(std::string_view id) const { return find_in(*this, streamlets, id); }
Implementation* Scope::find_implement(std::string_view id) const { return find_in(*this, implements, id); }
Port* Scope::find_port(std::string_view id) const { return find_in(*this, ports, id); }
Instance* Scope::find_instance(std::string_view id) const { return find_in(*this, instances, id); }

const void* Scope::find(Category category, std::string_view id) const {
    switch (category) {
        case Category::Variable: return find_variable(id);
        case Category::Type: return find_type(id);
        case Category::Streamlet: return find_streamlet(id);
        case Category::Implementation: return find_implement(id);
        case Category::Port: return find_port(id);
        case Category::Instance: return find_instance(id);
    }
    return nullptr;
}

Variable& Scope::add_variable(std::unique_ptr<Variable> v) {
    std::string id = v->id;
    auto file = v->file;
    auto span = v->span;
    return add_to(*this, variables, std::move(v), "variable", id, file, span);
}

TypeEntry& Scope::add_type(std::unique_ptr<TypeEntry> t) {
    std::string id = t->id;
    auto file = t->file;
    auto span = t->span;
    return add_to(*this, types, std::move(t), "type", id, file, span);
}

Streamlet& Scope::add_streamlet(std::unique_ptr<Streamlet> s) {
    std::string id = s->name;
    auto file = s->file;
    auto span = s->span;
    if (!is_package_scope())
        throw_error(DiagCategory::Resolution, file, span,
                    "streamlet '" + id + "' must be declared in a package scope, not in " + name);
    return add_to(*this, streamlets, std::move(s), "streamlet", id, file, span);
}

Implementation& Scope::add_implement(std::unique_ptr<Implementation> i) {
    std::string id = i->name;
    auto file = i->file;
    auto span = i->span;
    if (!is_package_scope())
        throw_error(DiagCategory::Resolution, file, span,
                    "implementation '" + id + "' must be declared in a package scope, not in " + name);
    return add_to(*this, implements, std::move(i), "implementation", id, file, span);
}

Port& Scope::add_port(std::unique_ptr<Port> p) {
    std::string id = p->name;
    auto file = p->file;
    auto span = p->span;
    return add_to(*this, ports, std::move(p), "port", id, file, span);
}

Instance& Scope::add_instance(std::unique_ptr<Instance> i) {
    std::string id = i->name;
    auto file = i->file;
    auto span = i->span;
    return add_to(*this, instances, std::move(i), "instance", id, file, span);
}

Connection& Scope::add_connection(std::unique_ptr<Connection> c) {
    std::unique_lock lk(mutex);
    for (auto& existing : connections) {
        if (existing->name == c->name) {
            lk.unlock();
            throw_error(DiagCategory::Resolution, c->file, c->span,
                        "duplicate connection '" + c->name + "' in " + name);
        }
    }
    connections.push_back(std::move(c));
    return *connections.back();
}

std::string PortEnd::key() const {
    std::string out;
    if (!owner.empty()) {
        out += owner;
        if (owner_index)
            out += "[" + std::to_string(*owner_index) + "]";
        out += ".";
    }
    out += port;
    if (port_index)
        out += "[" + std::to_string(*port_index) + "]";
    return out;
}

const Implementation* Implementation::body() const {
    const Implementation* cur = this;
    while (cur->alias_of)
        cur = cur->alias_of;
    return cur;
}

Implementation* Implementation::body() {
    Implementation* cur = this;
    while (cur->alias_of)
        cur = cur->alias_of;
    return cur;
}

Package* Project::find_package(std::string_view name) const {
    auto it = packages.find(std::string(name));
    return it == packages.end() ? nullptr : it->second.get();
}

// ---- name resolution ----

namespace {

Resolved resolve_from(const Scope& scope, std::string_view id, Category category, std::vector<std::string>* searched,
                      std::set<const Scope*>& visited) {
    if (!visited.insert(&scope).second)
        return {};
    if (searched)
        searched->push_back(scope.name);
    if (const void* e = scope.find(category, id))
        return {e, const_cast<Scope*>(&scope)};
    for (auto& [kind, target] : scope.relations) {
        if (!relation_permits(category, kind))
            continue;
        if (Resolved r = resolve_from(*target, id, category, searched, visited))
            return r;
    }
    return {};
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ", ";
        out += items[i];
    }
    return out;
}

const void* resolve_checked(const Scope& start, std::string_view qualifier, std::string_view id,
                            Category category, const SourceFile* file, Span span) {
    if (!qualifier.empty()) {
        Package& pkg = resolve_package(start, qualifier, file, span);
        if (const void* e = pkg.scope->find(category, id))
            return e;
        throw_error(DiagCategory::Resolution, file, span,
                    "cannot find " + std::string(to_string(category)) + " '" + std::string(id) + "' in package '" +
                        pkg.name + "'");
    }
    std::vector<std::string> searched;
    if (Resolved r = resolve_name(start, id, category, &searched))
        return r.entity;
    throw_error(DiagCategory::Resolution, file, span,
                "cannot find " + std::string(to_string(category)) + " '" + std::string(id) +
                    "' (searched: " + join(searched) + ")");
}

} // namespace

Resolved resolve_name(const Scope& start, std::string_view id, Category category, std::vector<std::string>* searched) {
    std::set<const Scope*> visited;
    return resolve_from(start, id, category, searched, visited);
}

Package& resolve_package(const Scope& start, std::string_view qualifier, const SourceFile* file, Span span) {
    std::string magic = "$package$" + std::string(qualifier);
    Resolved r = resolve_name(start, magic, Category::Variable);
    if (!r)
        throw_error(DiagCategory::Resolution, file, span,
                    "package '" + std::string(qualifier) + "' is not imported");
    auto* var = static_cast<const Variable*>(r.entity);
    if (!var->target_package)
        throw_error(DiagCategory::Resolution, file, span,
                    "package '" + std::string(qualifier) + "' does not exist in the project");
    return *var->target_package;
}

Variable& resolve_variable(const Scope& start, std::string_view qualifier, std::string_view id,
                           const SourceFile* file, Span span) {
    return *const_cast<Variable*>(
        static_cast<const Variable*>(resolve_checked(start, qualifier, id, Category::Variable, file, span)));
}

TypeEntry& resolve_type(const Scope& start, std::string_view qualifier, std::string_view id,
                        const SourceFile* file, Span span) {
    return *const_cast<TypeEntry*>(
        static_cast<const TypeEntry*>(resolve_checked(start, qualifier, id, Category::Type, file, span)));
}

Streamlet& resolve_streamlet(const Scope& start, std::string_view qualifier, std::string_view id,
                             const SourceFile* file, Span span) {
    return *const_cast<Streamlet*>(
        static_cast<const Streamlet*>(resolve_checked(start, qualifier, id, Category::Streamlet, file, span)));
}

Implementation& resolve_implement(const Scope& start, std::string_view qualifier, std::string_view id,
                                  const SourceFile* file, Span span) {
    return *const_cast<Implementation*>(static_cast<const Implementation*>(
        resolve_checked(start, qualifier, id, Category::Implementation, file, span)));
}

} // namespace tydi
