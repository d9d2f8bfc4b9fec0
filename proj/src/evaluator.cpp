//------------------------------------------------------------------------------
// evaluator.cpp
// Lazy evaluation of variables, types, streamlets and implementations
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/evaluator.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <functional>
#include <thread>

#include "tydi/expr.hpp"
#include "tydi/lower.hpp"

namespace tydi {

namespace {

[[noreturn]] void type_error(const SourceFile* file, Span span, std::string msg) {
    throw_error(DiagCategory::Type, file, span, std::move(msg));
}

std::optional<Value> coerce(const Value& v, std::string_view kind) {
    if (kind == "int" && v.kind == ValueKind::Int)
        return v;
    if (kind == "float") {
        if (v.kind == ValueKind::Float)
            return v;
        if (v.kind == ValueKind::Int)
            return Value::of_float(static_cast<double>(v.i));
    }
    if (kind == "str" && v.kind == ValueKind::Str)
        return v;
    if (kind == "bool" && v.kind == ValueKind::Bool)
        return v;
    if (kind == "clockdomain") {
        if (v.kind == ValueKind::ClockDomain)
            return v;
        if (v.kind == ValueKind::Str)
            return Value::of_clockdomain(v.s);
    }
    return std::nullopt;
}

std::pair<std::string, std::string> qualified_name(const AstNode& ti) {
    auto ids = ti.find_all(NodeKind::ID);
    if (ids.size() == 2)
        return {ids[0]->text, ids[1]->text};
    return {"", ids.empty() ? std::string() : ids[0]->text};
}

std::int64_t expect_int(const Value& v, const SourceFile* file, Span span, const std::string& what) {
    if (v.kind != ValueKind::Int)
        type_error(file, span, what + " must be int, found " + kind_label(v));
    return v.i;
}

std::string slice(const SourceFile* file, Span span) {
    return file ? std::string(file->slice(span)) : std::string();
}

} // namespace

std::string impl_value_name(const Value& v) { return v.impl ? v.impl->name : "?"; }

// ---- values ----

Value Evaluator::variable(Variable& v) {
    if (v.magic == VarMagic::Package)
        type_error(v.file, v.span, "'" + v.id + "' names a package, not a value");
    if (v.magic == VarMagic::Arg) {
        if (!v.cell.done())
            throw_error(DiagCategory::Resolution, v.file, v.span,
                        "template argument '" + v.id + "' is only bound inside an instantiation");
        return v.value;
    }
    run_cell(project_, v.cell, [&] {
        Value val;
        if (!v.init) {
            if (v.declared_kind != "clockdomain")
                type_error(v.file, v.span, "variable '" + v.id + "' has no initializer");
            val = Value::of_clockdomain("$cd$" + v.scope->name + "." + v.id);
        } else {
            val = expression(*v.init, *v.scope, v.file);
        }
        if (!v.declared_kind.empty()) {
            std::string declared = v.declared_array ? "[" + v.declared_kind + "]" : v.declared_kind;
            auto mismatch = [&] {
                type_error(v.file, v.span,
                           "variable '" + v.id + "' is declared " + declared + " but evaluates to " + kind_label(val));
            };
            if (v.declared_array) {
                if (val.kind != ValueKind::Array)
                    mismatch();
                for (auto& item : val.items) {
                    auto c = coerce(item, v.declared_kind);
                    if (!c)
                        mismatch();
                    item = *c;
                }
                val.elem = *parse_value_kind(v.declared_kind);
            } else {
                auto c = coerce(val, v.declared_kind);
                if (!c)
                    mismatch();
                val = *c;
            }
        }
        v.value = std::move(val);
    });
    return v.value;
}

Value Evaluator::expression(const AstNode& exp, Scope& scope, const SourceFile* file,
                            const std::vector<Binding>& env) {
    ExprPtr expr = lower_expression(exp, file);
    return evaluate_expression(*expr, file, [&](const Expr& leaf) {
        if (leaf.kind == Expr::Kind::Member) {
            MemberTarget m = member(*leaf.member, scope, file, env);
            if (!m.variable)
                type_error(file, leaf.span, "member '" + leaf.member->children[2]->text + "' is a type, not a value");
            return variable(*m.variable);
        }
        if (leaf.qualifier.empty()) {
            for (auto it = env.rbegin(); it != env.rend(); ++it)
                if (it->name == leaf.name)
                    return it->value;
        }
        Variable& v = resolve_variable(scope, leaf.qualifier, leaf.name, file, leaf.span);
        if (v.magic == VarMagic::Package)
            type_error(file, leaf.span, "'" + leaf.name + "' names a package, not a value");
        return variable(v);
    });
}

// ---- logical types ----

LogicalTypePtr Evaluator::type_entry(TypeEntry& t) {
    run_cell(project_, t.cell, [&] {
        if (t.is_group_or_union()) {
            auto g = std::make_shared<LogicalType>();
            g->kind = t.body->kind == NodeKind::LogicalGroupType ? LogicalType::Kind::Group : LogicalType::Kind::Union;
            g->name = t.id;
            g->package = t.scope->package->name;
            g->scope_owner = t.scope->owner_name;
            g->member_scope = t.member_scope.get();
            g->owner_entry = &t;
            for (auto& f : t.field_order)
                g->fields.push_back({f, type_entry(*t.member_scope->find_type(f))});
            t.value = g;
            return;
        }
        if (!t.body)
            throw_error(DiagCategory::Internal, t.file, t.span, "type '" + t.id + "' has no definition");
        t.value = logical_type(*t.body, *t.scope, t.file, {}, &t);
    });
    return t.value;
}

LogicalTypePtr Evaluator::logical_type(const AstNode& lt, Scope& scope, const SourceFile* file,
                                       const std::vector<Binding>& env, const TypeEntry* naming) {
    const AstNode& inner = *lt.children[0];
    switch (inner.kind) {
        case NodeKind::LogicalNullType: return make_null_type();
        case NodeKind::LogicalBitType: {
            Value w = expression(*inner.children[0], scope, file, env);
            std::int64_t width = expect_int(w, file, inner.span, "Bit width");
            if (width < 1)
                type_error(file, inner.span, "Bit width must be positive, found " + std::to_string(width));
            return make_bit_type(width);
        }
        case NodeKind::LogicalUserDefinedType: {
            auto [qualifier, id] = qualified_name(inner);
            TypeEntry& t = resolve_type(scope, qualifier, id, file, inner.span);
            return type_entry(t);
        }
        case NodeKind::MemberAccess: {
            MemberTarget m = member(inner, scope, file, env);
            if (!m.type)
                type_error(file, inner.span, "member '" + inner.children[2]->text + "' is a variable, not a type");
            return type_entry(*m.type);
        }
        case NodeKind::LogicalStreamType: {
            Scope stream_scope("stream", scope.package);
            stream_scope.owner_name = scope.owner_name;
            stream_scope.relations.push_back({RelationKind::Stream, &scope});
            auto t = std::make_shared<LogicalType>();
            t->kind = LogicalType::Kind::Stream;
            t->package = scope.package->name;
            if (naming && naming->body == &lt) {
                t->name = naming->id;
                t->scope_owner = naming->scope->owner_name;
            }
            t->element = logical_type(*inner.children[0], stream_scope, file, env);
            std::vector<NodeKind> seen;
            for (std::size_t i = 1; i < inner.children.size(); ++i) {
                const AstNode& prop = *inner.children[i];
                if (std::find(seen.begin(), seen.end(), prop.kind) != seen.end())
                    type_error(file, prop.span, "stream property given more than once");
                seen.push_back(prop.kind);
                const AstNode& arg = *prop.children[0];
                if (prop.kind == NodeKind::StreamPropertyUserType) {
                    LogicalTypePtr u = logical_type(arg, stream_scope, file, env);
                    if (u->is_stream())
                        type_error(file, arg.span, "stream user type must not be a Stream");
                    if (u->kind != LogicalType::Kind::Null)
                        t->props.user = u;
                    continue;
                }
                Value v = expression(arg, stream_scope, file, env);
                switch (prop.kind) {
                    case NodeKind::StreamPropertyDimension: {
                        std::int64_t d = expect_int(v, file, arg.span, "stream dimension");
                        if (d < 0)
                            type_error(file, arg.span, "stream dimension must be non-negative, found " + std::to_string(d));
                        t->props.dimension = d;
                        break;
                    }
                    case NodeKind::StreamPropertyThroughput: {
                        if (!v.is_numeric())
                            type_error(file, arg.span, "stream throughput must be float, found " + kind_label(v));
                        if (v.as_double() < 0)
                            type_error(file, arg.span, "stream throughput must be non-negative");
                        t->props.throughput = v.as_double();
                        break;
                    }
                    case NodeKind::StreamPropertySynchronicity: {
                        auto s = v.kind == ValueKind::Str ? parse_synchronicity(v.s) : std::nullopt;
                        if (!s)
                            type_error(file, arg.span,
                                       "stream synchronicity must be one of \"Sync\", \"Flatten\", \"Desync\", "
                                       "\"FlatDesync\", found " + dump_value(v));
                        t->props.synchronicity = *s;
                        break;
                    }
                    case NodeKind::StreamPropertyComplexity: {
                        std::int64_t c = expect_int(v, file, arg.span, "stream complexity");
                        if (c < 1 || c > 7)
                            type_error(file, arg.span, "stream complexity must be in 1..7, found " + std::to_string(c));
                        t->props.complexity = c;
                        break;
                    }
                    case NodeKind::StreamPropertyDirection: {
                        auto r = v.kind == ValueKind::Str ? parse_stream_direction(v.s) : std::nullopt;
                        if (!r)
                            type_error(file, arg.span,
                                       "stream direction must be \"Forward\" or \"Reverse\", found " + dump_value(v));
                        t->props.direction = *r;
                        break;
                    }
                    case NodeKind::StreamPropertyKeep: {
                        if (v.kind != ValueKind::Bool)
                            type_error(file, arg.span, "stream keep must be bool, found " + kind_label(v));
                        t->props.keep = v.b;
                        break;
                    }
                    default: break;
                }
            }
            return t;
        }
        default: break;
    }
    type_error(file, inner.span, "Group and Union types must be declared as type statements, not inline");
}

MemberTarget Evaluator::member(const AstNode& access, Scope& scope, const SourceFile* file,
                               const std::vector<Binding>& env) {
    const std::string& kind = access.children[0]->text;
    const AstNode& owner = *access.children[1];
    const std::string& id = access.children[2]->text;
    const Scope* target = nullptr;
    if (kind == "streamlet") {
        target = streamlet_ref(owner, scope, file, env).scope.get();
    } else if (kind == "impl") {
        Implementation& impl = implement_ref(owner, scope, file, env);
        if (impl.is_alias)
            implementation(impl);
        target = impl.body()->scope.get();
    } else {
        if (owner.find(NodeKind::TemplateArgs))
            type_error(file, owner.span, "a logical type takes no template arguments");
        auto [qualifier, name] = qualified_name(owner);
        LogicalTypePtr t = type_entry(resolve_type(scope, qualifier, name, file, owner.span));
        if (!t->member_scope)
            type_error(file, owner.span, "type '" + name + "' is " + type_display(*t) + " and has no members");
        target = t->member_scope;
    }
    MemberTarget m;
    m.variable = target->find_variable(id);
    m.type = target->find_type(id);
    if (!m.variable && !m.type)
        throw_error(DiagCategory::Resolution, file, access.children[2]->span,
                    "no member '" + id + "' in " + target->name);
    return m;
}

// ---- templates ----

Streamlet& Evaluator::streamlet_ref(const AstNode& ti, Scope& scope, const SourceFile* file,
                                    const std::vector<Binding>& env) {
    auto [qualifier, name] = qualified_name(ti);
    const AstNode* args = ti.find(NodeKind::TemplateArgs);
    Streamlet& base = resolve_streamlet(scope, qualifier, name, file, ti.span);
    if (args && !args->children.empty()) {
        if (!base.is_template())
            type_error(file, ti.span, "streamlet '" + name + "' is not a template");
        return instantiate(base, template_args(args, scope, file, env), file, ti.span);
    }
    if (base.is_template())
        type_error(file, ti.span, "streamlet template '" + name + "' requires template arguments");
    return base;
}

Implementation& Evaluator::implement_ref(const AstNode& ti, Scope& scope, const SourceFile* file,
                                         const std::vector<Binding>& env) {
    auto [qualifier, name] = qualified_name(ti);
    const AstNode* args = ti.find(NodeKind::TemplateArgs);
    if (!args && qualifier.empty()) {
        // an `impl of` template parameter shadows implementations of the same name
        if (Resolved r = resolve_name(scope, name, Category::Variable)) {
            auto* v = static_cast<Variable*>(const_cast<void*>(r.entity));
            if (v->declared_kind == "impl") {
                if (!v->cell.done())
                    throw_error(DiagCategory::Resolution, file, ti.span,
                                "template argument '" + name + "' is only bound inside an instantiation");
                return *const_cast<Implementation*>(v->value.impl);
            }
        }
    }
    Implementation& base = resolve_implement(scope, qualifier, name, file, ti.span);
    if (args && !args->children.empty()) {
        if (!base.is_template())
            type_error(file, ti.span, "implementation '" + name + "' is not a template");
        return instantiate(base, template_args(args, scope, file, env), file, ti.span);
    }
    if (base.is_template())
        type_error(file, ti.span, "implementation template '" + name + "' requires template arguments");
    return base;
}

std::vector<TemplateArg> Evaluator::template_args(const AstNode* args, Scope& scope, const SourceFile* file,
                                                  const std::vector<Binding>& env) {
    std::vector<TemplateArg> out;
    if (!args)
        return out;
    for (auto& a : args->children) {
        TemplateArg arg;
        switch (a->kind) {
            case NodeKind::TemplateArgType:
                arg.kind = TemplateArg::Kind::Type;
                arg.type = logical_type(*a->children[0], scope, file, env);
                break;
            case NodeKind::TemplateArgImpl: {
                const AstNode& ti = *a->children[0];
                if (ti.find(NodeKind::TemplateArgs))
                    type_error(file, ti.span,
                               "an impl template argument must name a concrete implementation, not a template "
                               "instance");
                arg.kind = TemplateArg::Kind::Impl;
                arg.impl = &implement_ref(ti, scope, file, env);
                break;
            }
            default:
                arg.kind = TemplateArg::Kind::Value;
                arg.value = expression(*a->children[0], scope, file, env);
                break;
        }
        out.push_back(std::move(arg));
    }
    return out;
}

void Evaluator::check_args(const std::string& what, const std::string& name, const std::vector<TemplateParam>& params,
                           std::vector<TemplateArg>& args, Scope& tpl_scope, const SourceFile* tpl_file,
                           const SourceFile* file, Span span) {
    if (args.size() != params.size())
        type_error(file, span,
                   what + " template '" + name + "' expects " + std::to_string(params.size()) + " arguments, found " +
                       std::to_string(args.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const TemplateParam& p = params[i];
        TemplateArg& a = args[i];
        std::string where = "argument " + std::to_string(i + 1) + " ('" + p.name + "') of '" + name + "'";
        if (p.kind == "type") {
            if (a.kind != TemplateArg::Kind::Type)
                type_error(file, span, where + " must be a logical type marked with 'type'");
            continue;
        }
        if (p.kind == "impl") {
            if (a.kind != TemplateArg::Kind::Impl)
                type_error(file, span, where + " must be an implementation marked with 'impl'");
            Streamlet& iface = streamlet_ref(*p.impl_of, tpl_scope, tpl_file, {});
            implementation(*a.impl);
            if (a.impl->body()->streamlet != &iface)
                type_error(file, span,
                           where + ": implementation '" + a.impl->name + "' does not implement streamlet '" +
                               iface.name + "'");
            continue;
        }
        if (a.kind != TemplateArg::Kind::Value)
            type_error(file, span, where + " must be a " + p.kind + " value");
        auto c = coerce(a.value, p.kind);
        if (!c)
            type_error(file, span, where + " must be " + p.kind + ", found " + kind_label(a.value));
        a.value = *c;
    }
}

std::string Evaluator::mangle(const std::string& tpl, const Package& pkg, const std::vector<TemplateArg>& args) {
    std::string out = tpl;
    for (auto& a : args) {
        out += "@";
        switch (a.kind) {
            case TemplateArg::Kind::Type: out += type_mangle(*a.type, pkg.name); break;
            case TemplateArg::Kind::Impl: out += a.impl->name; break;
            case TemplateArg::Kind::Value:
                out += a.value.kind == ValueKind::Str ? quote_string(a.value.s) : value_text(a.value);
                break;
        }
    }
    return out;
}

void Evaluator::bind_args(Scope& scope, const std::vector<TemplateParam>& params, const std::vector<TemplateArg>& args,
                          const SourceFile* file) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        const TemplateParam& p = params[i];
        const TemplateArg& a = args[i];
        if (a.kind == TemplateArg::Kind::Type) {
            auto t = std::make_unique<TypeEntry>();
            t->id = p.name;
            t->scope = &scope;
            t->file = file;
            t->span = p.span;
            t->raw = "$arg$" + p.name;
            t->value = a.type;
            t->cell.state = EvalCell::State::Done;
            t->cell.label = "type " + p.name + " (" + scope.name + ")";
            scope.add_type(std::move(t));
            continue;
        }
        auto v = std::make_unique<Variable>();
        v->id = p.name;
        v->scope = &scope;
        v->file = file;
        v->span = p.span;
        v->magic = VarMagic::Arg;
        v->declared_kind = p.kind;
        v->raw = "$arg$" + p.name;
        v->value = a.kind == TemplateArg::Kind::Impl ? Value::of_impl(a.impl) : a.value;
        v->cell.state = EvalCell::State::Done;
        v->cell.label = "variable " + p.name + " (" + scope.name + ")";
        scope.add_variable(std::move(v));
    }
}

Streamlet& Evaluator::instantiate(Streamlet& tpl, const std::vector<TemplateArg>& args, const SourceFile* file,
                                  Span span) {
    std::vector<TemplateArg> checked = args;
    check_args("streamlet", tpl.name, tpl.params, checked, *tpl.scope, tpl.file, file, span);
    std::string name = mangle(tpl.name, *tpl.package, checked);
    Package& pkg = *tpl.package;
    std::lock_guard lk(pkg.instantiation_mutex);
    if (Streamlet* existing = pkg.scope->find_streamlet(name))
        return *existing;
    auto inst = lower_streamlet(*tpl.ast, pkg, tpl.file, name, true);
    bind_args(*inst->scope, tpl.params, checked, tpl.file);
    return pkg.scope->add_streamlet(std::move(inst));
}

Implementation& Evaluator::instantiate(Implementation& tpl, const std::vector<TemplateArg>& args,
                                       const SourceFile* file, Span span) {
    std::vector<TemplateArg> checked = args;
    check_args("implementation", tpl.name, tpl.params, checked, *tpl.scope, tpl.file, file, span);
    std::string name = mangle(tpl.name, *tpl.package, checked);
    Package& pkg = *tpl.package;
    std::lock_guard lk(pkg.instantiation_mutex);
    if (Implementation* existing = pkg.scope->find_implement(name))
        return *existing;
    auto inst = lower_implementation(*tpl.ast, pkg, tpl.file, name, true);
    bind_args(*inst->scope, tpl.params, checked, tpl.file);
    return pkg.scope->add_implement(std::move(inst));
}

// ---- streamlets and implementations ----

void Evaluator::evaluate_scope(Scope& scope) {
    std::vector<Variable*> vars;
    std::vector<TypeEntry*> types;
    {
        std::shared_lock lk(scope.mutex);
        for (auto& [id, v] : scope.variables)
            vars.push_back(v.get());
        for (auto& [id, t] : scope.types)
            types.push_back(t.get());
    }
    for (Variable* v : vars)
        if (v->magic == VarMagic::None)
            variable(*v);
    for (TypeEntry* t : types)
        type_entry(*t);
}

void Evaluator::streamlet(Streamlet& s) {
    if (s.is_template())
        type_error(s.file, s.span, "streamlet template '" + s.name + "' cannot be evaluated without arguments");
    run_cell(project_, s.cell, [&] {
        for (auto& name : s.port_order) {
            Port& p = *s.scope->find_port(name);
            p.type = logical_type(*p.type_ast, *s.scope, s.file);
            if (!p.type->is_stream())
                type_error(s.file, p.type_ast->span,
                           "port '" + p.name + "' must carry a Stream type, found " + type_display(*p.type));
            if (p.array_ast) {
                Value n = expression(*p.array_ast->children[0], *s.scope, s.file);
                std::int64_t size = expect_int(n, s.file, p.array_ast->span, "port array size");
                if (size < 1)
                    type_error(s.file, p.array_ast->span, "port array size must be at least 1");
                p.array_size = size;
            }
            if (p.cd_ast) {
                ExprPtr e = lower_term(*p.cd_ast->children[0], s.file);
                Value v = evaluate_expression(*e, s.file, [&](const Expr& leaf) {
                    if (leaf.kind == Expr::Kind::Member) {
                        MemberTarget m = member(*leaf.member, *s.scope, s.file, {});
                        if (!m.variable)
                            type_error(s.file, leaf.span, "a clockdomain must be a value");
                        return variable(*m.variable);
                    }
                    return variable(resolve_variable(*s.scope, leaf.qualifier, leaf.name, s.file, leaf.span));
                });
                auto cd = coerce(v, "clockdomain");
                if (!cd)
                    type_error(s.file, p.cd_ast->span, "port clockdomain must be a clockdomain, found " + kind_label(v));
                p.clockdomain = *cd;
            }
            p.evaluated = true;
        }
        evaluate_scope(*s.scope);
        for (const AstNode* a : s.assertions)
            check_assertion(*a, *s.scope, s.file, {});
    });
}

void Evaluator::implementation(Implementation& impl) {
    if (impl.is_template())
        type_error(impl.file, impl.span,
                   "implementation template '" + impl.name + "' cannot be evaluated without arguments");
    run_cell(project_, impl.cell, [&] {
        if (impl.is_alias) {
            Implementation& target = implement_ref(*impl.alias_ref, *impl.scope, impl.file, {});
            implementation(target);
            impl.alias_of = &target;
            impl.streamlet = target.body()->streamlet;
            return;
        }
        Streamlet& s = streamlet_ref(*impl.streamlet_ref, *impl.scope, impl.file, {});
        streamlet(s);
        impl.streamlet = &s;
        if (!impl.blocks_expanded) {
            expand_items(impl, impl.blocks, {}, false);
            impl.blocks_expanded = true;
        }
        evaluate_scope(*impl.scope);
        std::vector<Instance*> instances;
        for (auto& [name, inst] : impl.scope->instances)
            instances.push_back(inst.get());
        for (Instance* inst : instances)
            evaluate_instance(impl, *inst);
        for (auto& c : impl.scope->connections)
            evaluate_connection(impl, *c);
        for (const AstNode* a : impl.assertions)
            check_assertion(*a, *impl.scope, impl.file, {});
    });
}

void Evaluator::expand_items(Implementation& impl, const std::vector<const AstNode*>& items,
                             const std::vector<Binding>& env, bool in_for) {
    const SourceFile* file = impl.file;
    Scope& scope = *impl.scope;
    for (const AstNode* item : items) {
        switch (item->kind) {
            case NodeKind::IfBlock: {
                for (auto& branch : item->children) {
                    std::size_t first = 0;
                    if (branch->kind != NodeKind::ElseBranch) {
                        const AstNode& cond = *branch->children[0];
                        Value v = expression(cond, scope, file, env);
                        if (v.kind != ValueKind::Bool)
                            type_error(file, cond.span, "if condition must be bool, found " + kind_label(v));
                        if (!v.b)
                            continue;
                        first = 1;
                    }
                    std::vector<const AstNode*> body;
                    for (std::size_t i = first; i < branch->children.size(); ++i)
                        body.push_back(branch->children[i].get());
                    expand_items(impl, body, env, in_for);
                    break;
                }
                break;
            }
            case NodeKind::ForBlock: {
                const std::string& var = item->children[0]->text;
                const AstNode& iter = *item->children[1];
                Value arr = expression(iter, scope, file, env);
                if (arr.kind != ValueKind::Array)
                    type_error(file, iter.span, "for block must iterate an array, found " + kind_label(arr));
                std::vector<const AstNode*> body;
                for (std::size_t i = 2; i < item->children.size(); ++i)
                    body.push_back(item->children[i].get());
                for (auto& element : arr.items) {
                    std::vector<Binding> inner = env;
                    inner.push_back({var, element});
                    expand_items(impl, body, inner, true);
                }
                break;
            }
            case NodeKind::Instance: {
                const AstNode& id = *item->find(NodeKind::ID);
                if (in_for && id.text.find("{{") == std::string::npos)
                    throw_error(DiagCategory::Resolution, file, id.span,
                                "instance '" + id.text +
                                    "' cannot be declared in a for block because every iteration would duplicate "
                                    "it; interpolate the loop variable, e.g. " + id.text + "_{{" + env.back().name +
                                    "}}");
                auto inst = std::make_unique<Instance>();
                inst->name = interpolate_identifier(id.text, env, file, id.span);
                inst->owner = &impl;
                inst->file = file;
                inst->span = item->span;
                inst->target_ast = item->find(NodeKind::TemplateInstance);
                inst->array_ast = item->find(NodeKind::ArraySize);
                inst->raw_target = slice(file, inst->target_ast->span);
                inst->bindings = env;
                scope.add_instance(std::move(inst));
                break;
            }
            case NodeKind::Connection: scope.add_connection(lower_connection(*item, impl, file, env)); break;
            case NodeKind::Assert: check_assertion(*item, scope, file, env); break;
            case NodeKind::ProcessBlock: impl.has_process = true; break;
            case NodeKind::ConstDecl:
            case NodeKind::TypeDeclaration:
                throw_error(DiagCategory::Syntax, file, item->span,
                            "declarations are not allowed inside if and for blocks");
            default:
                throw_error(DiagCategory::Internal, file, item->span,
                            "unexpected " + std::string(to_string(item->kind)) + " in block");
        }
    }
}

std::int64_t Evaluator::evaluate_index(const AstNode& array_size, Scope& scope, const SourceFile* file,
                                       const std::vector<Binding>& env, std::int64_t bound, const std::string& what) {
    Value v = expression(*array_size.children[0], scope, file, env);
    std::int64_t idx = expect_int(v, file, array_size.span, "array index");
    if (idx < 0 || idx >= bound)
        throw_error(DiagCategory::Resolution, file, array_size.span,
                    "index " + std::to_string(idx) + " is out of bounds for " + what + " of size " +
                        std::to_string(bound));
    return idx;
}

void Evaluator::evaluate_instance(Implementation& impl, Instance& inst) {
    if (inst.evaluated)
        return;
    Implementation& target = implement_ref(*inst.target_ast, *impl.scope, impl.file, inst.bindings);
    implementation(target);
    inst.target = &target;
    if (inst.array_ast) {
        Value n = expression(*inst.array_ast->children[0], *impl.scope, impl.file, inst.bindings);
        std::int64_t size = expect_int(n, impl.file, inst.array_ast->span, "instance array size");
        if (size < 1)
            type_error(impl.file, inst.array_ast->span, "instance array size must be at least 1");
        inst.array_size = size;
    }
    inst.evaluated = true;
}

void Evaluator::resolve_end(Implementation& impl, Connection& conn, const AstNode& ref, PortEnd& end) {
    const SourceFile* file = conn.file;
    std::vector<std::pair<const AstNode*, const AstNode*>> segments;
    for (auto& c : ref.children) {
        if (c->kind == NodeKind::ID)
            segments.push_back({c.get(), nullptr});
        else if (c->kind == NodeKind::ArraySize && !segments.empty())
            segments.back().second = c.get();
    }
    if (segments.size() > 2)
        throw_error(DiagCategory::Resolution, file, ref.span,
                    "malformed connection path '" + slice(file, ref.span) +
                        "': expected port, port[i], instance.port or instance[i].port[j]");
    Streamlet* s = impl.streamlet;
    std::string where = "implementation '" + impl.name + "'";
    PortEnd fresh;
    fresh.raw_owner = end.raw_owner;
    fresh.raw_port = end.raw_port;
    end = fresh;
    if (segments.size() == 2) {
        const AstNode& owner_id = *segments[0].first;
        std::string owner = interpolate_identifier(owner_id.text, conn.bindings, file, owner_id.span);
        Instance* inst = impl.scope->find_instance(owner);
        if (!inst)
            throw_error(DiagCategory::Resolution, file, owner_id.span,
                        "unknown instance '" + owner + "' in " + where);
        if (inst->array_size) {
            if (!segments[0].second)
                throw_error(DiagCategory::Resolution, file, owner_id.span,
                            "instance array '" + owner + "' must be indexed");
            end.owner_index = evaluate_index(*segments[0].second, *impl.scope, file, conn.bindings,
                                             *inst->array_size, "instance array '" + owner + "'");
        } else if (segments[0].second) {
            throw_error(DiagCategory::Resolution, file, segments[0].second->span,
                        "instance '" + owner + "' is not an array");
        }
        end.owner = owner;
        end.instance = inst;
        s = inst->target->body()->streamlet;
        where = "instance '" + owner + "' (streamlet '" + s->name + "')";
    } else {
        where = "streamlet '" + s->name + "' of " + where;
    }
    const AstNode& port_id = *segments.back().first;
    std::string port = interpolate_identifier(port_id.text, conn.bindings, file, port_id.span);
    Port* p = s->scope->find_port(port);
    if (!p)
        throw_error(DiagCategory::Resolution, file, port_id.span, "unknown port '" + port + "' on " + where);
    if (p->array_size) {
        if (!segments.back().second)
            throw_error(DiagCategory::Resolution, file, port_id.span, "port array '" + port + "' must be indexed");
        end.port_index = evaluate_index(*segments.back().second, *impl.scope, file, conn.bindings, *p->array_size,
                                        "port array '" + port + "'");
    } else if (segments.back().second) {
        throw_error(DiagCategory::Resolution, file, segments.back().second->span,
                    "port '" + port + "' is not an array");
    }
    end.port = port;
    end.resolved = p;
}

void Evaluator::evaluate_connection(Implementation& impl, Connection& conn) {
    if (conn.evaluated)
        return;
    auto refs = conn.ast->find_all(NodeKind::PortRef);
    resolve_end(impl, conn, *refs[0], conn.source);
    resolve_end(impl, conn, *refs[1], conn.sink);
    if (const AstNode* fifo = conn.ast->find(NodeKind::FifoDepth)) {
        Value v = expression(*fifo->children[0], *impl.scope, conn.file, conn.bindings);
        std::int64_t depth = expect_int(v, conn.file, fifo->span, "FIFO depth");
        if (depth < 0)
            type_error(conn.file, fifo->span, "FIFO depth must be non-negative");
        conn.fifo_depth = depth;
    }
    conn.evaluated = true;
}

void Evaluator::check_assertion(const AstNode& assertion, Scope& scope, const SourceFile* file,
                                const std::vector<Binding>& env) {
    const AstNode& exp = *assertion.children[0];
    Value v = expression(exp, scope, file, env);
    if (v.kind != ValueKind::Bool)
        type_error(file, exp.span, "assert expects a bool argument, found " + kind_label(v));
    if (v.b)
        return;
    ExprPtr expr = lower_expression(exp, file);
    std::vector<std::string> operands;
    visit_leaves(*expr, [&](const Expr& leaf) {
        std::string text = slice(file, leaf.span);
        for (auto& o : operands)
            if (o.rfind(text + " = ", 0) == 0)
                return;
        Value lv = evaluate_expression(leaf, file, [&](const Expr& l) {
            if (l.kind == Expr::Kind::Member) {
                MemberTarget m = member(*l.member, scope, file, env);
                return m.variable ? variable(*m.variable) : Value::of_str("<type>");
            }
            if (l.qualifier.empty())
                for (auto it = env.rbegin(); it != env.rend(); ++it)
                    if (it->name == l.name)
                        return it->value;
            return variable(resolve_variable(scope, l.qualifier, l.name, file, l.span));
        });
        operands.push_back(text + " = " + dump_value(lv));
    });
    std::string msg = "assertion failed: " + slice(file, exp.span);
    if (!operands.empty()) {
        msg += " (";
        for (std::size_t i = 0; i < operands.size(); ++i) {
            if (i)
                msg += ", ";
            msg += operands[i];
        }
        msg += ")";
    }
    throw_error(DiagCategory::Assertion, file, assertion.span, msg);
}

// ---- project driver ----

namespace {

struct Root {
    std::string label;
    std::function<void(Evaluator&)> run;
};

std::vector<Root> collect_roots(Project& project, const EvaluationOptions& options, std::vector<Diagnostic>& diags) {
    std::vector<Root> roots;
    if (!options.top.empty()) {
        auto dot = options.top.find('.');
        Package* pkg = dot == std::string::npos ? nullptr : project.find_package(options.top.substr(0, dot));
        Implementation* impl = pkg ? pkg->scope->find_implement(options.top.substr(dot + 1)) : nullptr;
        if (!impl) {
            diags.push_back(make_diagnostic(DiagCategory::Resolution, nullptr, {},
                                            "top implementation '" + options.top + "' not found (expected package.impl)"));
            return roots;
        }
        if (impl->is_template()) {
            diags.push_back(make_diagnostic(DiagCategory::Resolution, impl->file, impl->span,
                                            "top implementation '" + options.top + "' is a template"));
            return roots;
        }
        roots.push_back({"implementation " + options.top, [impl](Evaluator& ev) { ev.implementation(*impl); }});
        return roots;
    }
    std::set<std::string> imported;
    for (auto& [name, pkg] : project.packages)
        for (auto& imp : pkg->imports)
            imported.insert(imp);
    for (auto& [name, pkg] : project.packages) {
        Scope& scope = *pkg->scope;
        for (auto& [id, impl] : scope.implements) {
            if (impl->is_template())
                continue;
            Implementation* p = impl.get();
            roots.push_back({"implementation " + name + "." + id, [p](Evaluator& ev) { ev.implementation(*p); }});
        }
        if (pkg->is_prelude || imported.count(name))
            continue;
        for (auto& [id, v] : scope.variables) {
            if (v->magic != VarMagic::None)
                continue;
            Variable* p = v.get();
            roots.push_back({"variable " + name + "." + id, [p](Evaluator& ev) { ev.variable(*p); }});
        }
        for (auto& [id, t] : scope.types) {
            TypeEntry* p = t.get();
            roots.push_back({"type " + name + "." + id, [p](Evaluator& ev) { ev.type_entry(*p); }});
        }
        for (auto& [id, s] : scope.streamlets) {
            if (s->is_template())
                continue;
            Streamlet* p = s.get();
            roots.push_back({"streamlet " + name + "." + id, [p](Evaluator& ev) { ev.streamlet(*p); }});
        }
    }
    return roots;
}

} // namespace

std::vector<std::string> evaluation_roots(const Project& project, const EvaluationOptions& options) {
    std::vector<Diagnostic> ignored;
    std::vector<std::string> out;
    for (auto& r : collect_roots(const_cast<Project&>(project), options, ignored))
        out.push_back(r.label);
    return out;
}

EvaluationResult evaluate_project(Project& project, const EvaluationOptions& options) {
    EvaluationResult result;
    std::vector<Root> roots = collect_roots(project, options, result.diagnostics);
    std::mutex diag_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        Evaluator ev(project);
        while (true) {
            std::size_t i = next++;
            if (i >= roots.size())
                break;
            try {
                roots[i].run(ev);
            } catch (const CompileError& e) {
                std::lock_guard lk(diag_mutex);
                result.diagnostics.push_back(e.diagnostic());
            } catch (const std::exception& e) {
                std::lock_guard lk(diag_mutex);
                result.diagnostics.push_back(make_diagnostic(DiagCategory::Internal, nullptr, {},
                                                             "internal error in " + roots[i].label + ": " + e.what()));
            }
        }
    };
    unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned j = 0; j < jobs; ++j)
            threads.emplace_back(worker);
        for (auto& t : threads)
            t.join();
    }
    auto key = [](const Diagnostic& d) { return std::tie(d.file, d.span.start, d.span.end, d.message); };
    std::sort(result.diagnostics.begin(), result.diagnostics.end(),
              [&](const Diagnostic& a, const Diagnostic& b) { return key(a) < key(b); });
    result.diagnostics.erase(std::unique(result.diagnostics.begin(), result.diagnostics.end(),
                                         [&](const Diagnostic& a, const Diagnostic& b) { return key(a) == key(b); }),
                             result.diagnostics.end());
    return result;
}

} // namespace tydi
