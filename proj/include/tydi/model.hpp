//------------------------------------------------------------------------------
// model.hpp
// The code structure: projects, packages, scopes and the entities they hold
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "tydi/ast.hpp"
#include "tydi/logical_type.hpp"
#include "tydi/parser.hpp"
#include "tydi/source.hpp"
#include "tydi/value.hpp"

namespace tydi {

struct Package;
struct Project;
struct Variable;
struct TypeEntry;
struct Streamlet;
struct Implementation;
struct Port;
struct Instance;
struct Connection;

enum class RelationKind { Group, Union, Stream, Streamlet, Implement, IfFor };
enum class Category { Variable, Type, Streamlet, Implementation, Port, Instance };

/// `GroupScope`, `UnionScope`, ...
std::string_view relation_label(RelationKind kind);
std::string_view to_string(Category category);

/// Whether names of `category` may be looked up through a relation of `kind`.
bool relation_permits(Category category, RelationKind kind);

/// Once-only evaluation state shared by every lazily evaluated entity.
struct EvalCell {
    enum class State { Pending, Running, Done, Failed };

    State state = State::Pending;
    std::thread::id owner;
    std::exception_ptr error;
    /// Human-readable identity used in circular-dependency reports.
    std::string label;
    const SourceFile* file = nullptr;
    Span span;

    bool done() const;
};

/// Runs `body` once for `cell`. Concurrent callers wait for the running
/// evaluation; a dependency cycle, on one thread or across several, raises a
/// CompileError listing every member. A failed cell rethrows its error.
void run_cell(Project& project, EvalCell& cell, const std::function<void()>& body);

struct Scope {
    std::string name;
    Package* package = nullptr;
    /// Name of the owning streamlet, impl or group; empty for package scopes.
    std::string owner_name;
    std::vector<std::pair<RelationKind, Scope*>> relations;

    std::map<std::string, std::unique_ptr<Variable>> variables;
    std::map<std::string, std::unique_ptr<TypeEntry>> types;
    std::map<std::string, std::unique_ptr<Streamlet>> streamlets;
    std::map<std::string, std::unique_ptr<Implementation>> implements;
    std::map<std::string, std::unique_ptr<Port>> ports;
    std::map<std::string, std::unique_ptr<Instance>> instances;
    std::vector<std::unique_ptr<Connection>> connections;

    mutable std::shared_mutex mutex;

    Scope(std::string name, Package* package);
    ~Scope();

    bool is_package_scope() const;

    Variable* find_variable(std::string_view id) const;
    TypeEntry* find_type(std::string_view id) const;
    Streamlet* find_streamlet(std::string_view id) const;
    Implementation* find_implement(std::string_view id) const;
    Port* find_port(std::string_view id) const;
    Instance* find_instance(std::string_view id) const;
    /// Any entity of the category, as an opaque pointer.
    const void* find(Category category, std::string_view id) const;

    /// Insert helpers throw CompileError(resolution) on a duplicate id.
    Variable& add_variable(std::unique_ptr<Variable> v);
    TypeEntry& add_type(std::unique_ptr<TypeEntry> t);
    Streamlet& add_streamlet(std::unique_ptr<Streamlet> s);
    Implementation& add_implement(std::unique_ptr<Implementation> i);
    Port& add_port(std::unique_ptr<Port> p);
    Instance& add_instance(std::unique_ptr<Instance> i);
    Connection& add_connection(std::unique_ptr<Connection> c);
};

enum class VarMagic { None, Package, Arg };

struct Variable {
    std::string id;
    Scope* scope = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    /// Initializer `Exp`; null for bare clockdomains and magic entries.
    const AstNode* init = nullptr;
    std::string raw;
    /// int, str, float, bool, clockdomain; `type` and `impl` for template placeholders.
    std::string declared_kind;
    bool declared_array = false;
    VarMagic magic = VarMagic::None;
    Package* target_package = nullptr;

    EvalCell cell;
    Value value;
};

struct TypeEntry {
    std::string id;
    Scope* scope = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    /// LogicalType node, or LogicalGroupType / LogicalUnionType for declarations.
    const AstNode* body = nullptr;
    std::string raw;
    /// Group/Union member scope and field ids in declaration order.
    std::unique_ptr<Scope> member_scope;
    std::vector<std::string> field_order;

    EvalCell cell;
    LogicalTypePtr value;

    bool is_group_or_union() const { return member_scope != nullptr; }
};

struct TemplateParam {
    std::string name;
    /// int, str, float, bool, clockdomain, type, impl
    std::string kind;
    /// For `impl of S`: the TemplateInstance naming S.
    const AstNode* impl_of = nullptr;
    Span span;
};

/// An evaluated template argument.
struct TemplateArg {
    enum class Kind { Value, Type, Impl };
    Kind kind = Kind::Value;
    Value value;
    LogicalTypePtr type;
    Implementation* impl = nullptr;
};

struct Port {
    std::string name;
    Streamlet* owner = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    const AstNode* type_ast = nullptr;
    const AstNode* array_ast = nullptr;
    const AstNode* cd_ast = nullptr;
    bool is_input = true;

    // Filled in by streamlet evaluation.
    LogicalTypePtr type;
    std::optional<std::int64_t> array_size;
    Value clockdomain = Value::default_clockdomain();
    bool evaluated = false;
};

struct Streamlet {
    std::string name;
    Package* package = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    const AstNode* ast = nullptr;
    std::unique_ptr<Scope> scope;
    std::string doc;
    std::vector<TemplateParam> params;
    /// Generated by template instantiation.
    bool is_instance = false;
    std::vector<const AstNode*> assertions;
    std::vector<std::string> port_order;

    EvalCell cell;

    bool is_template() const { return !params.empty(); }
};

/// One generative-loop binding carried by expanded items.
struct Binding {
    std::string name;
    Value value;
};

struct Instance {
    std::string name;
    Implementation* owner = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    /// TemplateInstance naming the target; null for instances made by sugaring.
    const AstNode* target_ast = nullptr;
    const AstNode* array_ast = nullptr;
    std::string raw_target;
    std::vector<Binding> bindings;
    bool generated = false;

    Implementation* target = nullptr;
    std::optional<std::int64_t> array_size;
    bool evaluated = false;
};

struct PortEnd {
    /// Empty for the implementation's own ports.
    std::string owner;
    std::optional<std::int64_t> owner_index;
    std::string port;
    std::optional<std::int64_t> port_index;
    std::string raw_owner;
    std::string raw_port;

    Instance* instance = nullptr;
    Port* resolved = nullptr;

    bool is_self() const { return owner.empty(); }
    /// `Self.p[1]`-free key: `inst[0].p[1]` or `p[1]`.
    std::string key() const;
};

struct Connection {
    std::string name;
    Implementation* owner = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    const AstNode* ast = nullptr;
    std::vector<Binding> bindings;
    PortEnd source;
    PortEnd sink;
    std::int64_t fifo_depth = 0;
    bool no_strict_type = false;
    bool generated = false;
    bool evaluated = false;
};

struct Implementation {
    std::string name;
    Package* package = nullptr;
    const SourceFile* file = nullptr;
    Span span;
    const AstNode* ast = nullptr;
    std::unique_ptr<Scope> scope;
    std::string doc;
    bool external = false;
    std::vector<TemplateParam> params;
    bool is_instance = false;

    /// TemplateInstance naming the streamlet, or the alias target for `impl X(Y<..>);`.
    const AstNode* streamlet_ref = nullptr;
    std::string streamlet_raw;
    bool is_alias = false;
    const AstNode* alias_ref = nullptr;

    std::vector<const AstNode*> blocks;
    std::vector<const AstNode*> assertions;
    bool has_process = false;

    EvalCell cell;
    Streamlet* streamlet = nullptr;
    Implementation* alias_of = nullptr;
    bool blocks_expanded = false;

    bool is_template() const { return !params.empty(); }
    /// Follows alias links to the implementation that owns the body.
    const Implementation* body() const;
    Implementation* body();
};

struct Package {
    std::string name;
    std::unique_ptr<Scope> scope;
    SourceFilePtr source;
    AstPtr root;
    std::vector<std::string> imports;
    bool is_prelude = false;
    /// Serializes template instantiation into this package.
    std::mutex instantiation_mutex;
};

struct Project {
    std::string name = "test_project";
    std::map<std::string, std::unique_ptr<Package>> packages;
    /// Number of cell evaluations performed; each cell runs at most once.
    std::atomic<std::uint64_t> evaluation_count{0};

    Package* find_package(std::string_view name) const;
};

/// Result of a name lookup: the entity and the scope it was found in.
struct Resolved {
    const void* entity = nullptr;
    Scope* scope = nullptr;
    explicit operator bool() const { return entity != nullptr; }
};

/// Looks `id` up in `start` and then through permitted relations, nearest first.
/// Fills `searched` with the visited scope names.
Resolved resolve_name(const Scope& start, std::string_view id, Category category,
                      std::vector<std::string>* searched = nullptr);

/// Typed wrappers that throw CompileError(resolution) naming the searched scopes.
/// `qualifier` selects a package through its `$package$` variable.
Variable& resolve_variable(const Scope& start, std::string_view qualifier, std::string_view id,
                           const SourceFile* file, Span span);
TypeEntry& resolve_type(const Scope& start, std::string_view qualifier, std::string_view id,
                        const SourceFile* file, Span span);
Streamlet& resolve_streamlet(const Scope& start, std::string_view qualifier, std::string_view id,
                             const SourceFile* file, Span span);
Implementation& resolve_implement(const Scope& start, std::string_view qualifier, std::string_view id,
                                  const SourceFile* file, Span span);

/// Package reached by `qualifier` from `start`, requiring the `$package$` variable.
Package& resolve_package(const Scope& start, std::string_view qualifier, const SourceFile* file, Span span);

} // namespace tydi
