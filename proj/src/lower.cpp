//------------------------------------------------------------------------------
// lower.cpp
// Builds the code structure from parsed packages
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/lower.hpp"

#include <algorithm>

namespace tydi {

std::string_view prelude_source() {
    return R"(package tydi_std;

#replicates one stream to output_channel outputs#
streamlet duplicator_s<data_type: type, output_channel: int, cd: clockdomain> {
  input: data_type in `cd,
  output: data_type [output_channel] out `cd,
};

external impl duplicator_i<data_type: type, output_channel: int, cd: clockdomain> of duplicator_s<type data_type, output_channel, cd> {
};

#accepts and discards every packet#
streamlet void_s<type_in: type, cd: clockdomain> {
  input: type_in in `cd,
};

external impl void_i<type_in: type, cd: clockdomain> of void_s<type type_in, cd> {
};
)";
}

const std::string& node_id(const AstNode& node) {
    const AstNode* id = node.find(NodeKind::ID);
    static const std::string empty;
    return id ? id->text : empty;
}

namespace {

std::string doc_text(const AstNode& node) {
    const AstNode* doc = node.find(NodeKind::DOC);
    if (!doc)
        return {};
    std::string text = doc->text;
    if (!text.empty() && text.front() == '#')
        text.erase(text.begin());
    if (!text.empty() && text.back() == '#')
        text.pop_back();
    return text;
}

std::string slice(const SourceFile* file, Span span) {
    return file ? std::string(file->slice(span)) : std::string();
}

void reject_inline_groups(const AstNode& lt, const SourceFile* file) {
    walk_ast(lt, [&](const AstNode& n) {
        if (n.kind == NodeKind::LogicalGroupType || n.kind == NodeKind::LogicalUnionType)
            throw_error(DiagCategory::Type, file, n.span,
                        "Group and Union types must be declared as `type Group <id> {...}` statements, not inline");
    });
}

std::unique_ptr<Variable> lower_const(const AstNode& decl, Scope& scope, const SourceFile* file) {
    auto v = std::make_unique<Variable>();
    v->id = node_id(decl);
    v->scope = &scope;
    v->file = file;
    v->span = decl.span;
    if (const AstNode* ind = decl.find(NodeKind::TypeIndicator)) {
        std::string kind = ind->text;
        if (kind.size() > 2 && kind.front() == '[') {
            v->declared_array = true;
            kind = kind.substr(1, kind.size() - 2);
        }
        v->declared_kind = kind;
    }
    if (const AstNode* init = decl.find(NodeKind::Exp)) {
        v->init = init;
        v->raw = slice(file, init->span);
    }
    v->cell.label = "variable " + v->id + " (" + scope.name + ")";
    v->cell.file = file;
    v->cell.span = decl.span;
    return v;
}

std::unique_ptr<TypeEntry> make_type_entry(std::string id, const AstNode* body, Scope& scope, const SourceFile* file,
                                           Span span) {
    auto t = std::make_unique<TypeEntry>();
    t->id = std::move(id);
    t->scope = &scope;
    t->file = file;
    t->span = span;
    t->body = body;
    if (body)
        t->raw = slice(file, body->span);
    t->cell.label = "type " + t->id + " (" + scope.name + ")";
    t->cell.file = file;
    t->cell.span = span;
    return t;
}

void lower_type_decl(const AstNode& decl, Scope& scope, const SourceFile* file) {
    const AstNode& first = *decl.children[0];
    if (first.kind == NodeKind::LogicalGroupType || first.kind == NodeKind::LogicalUnionType) {
        bool is_group = first.kind == NodeKind::LogicalGroupType;
        std::string id = node_id(first);
        auto entry = make_type_entry(id, &first, scope, file, decl.span);
        entry->member_scope = std::make_unique<Scope>((is_group ? "group_" : "union_") + id, scope.package);
        Scope& members = *entry->member_scope;
        members.owner_name = id;
        members.relations.push_back({is_group ? RelationKind::Group : RelationKind::Union, &scope});
        for (auto& item : first.children) {
            if (item->kind == NodeKind::ConstDecl) {
                members.add_variable(lower_const(*item, members, file));
            } else if (item->kind == NodeKind::SubItemItem) {
                const AstNode* lt = item->child(1);
                reject_inline_groups(*lt, file);
                members.add_type(make_type_entry(node_id(*item), lt, members, file, item->span));
                entry->field_order.push_back(node_id(*item));
            }
        }
        scope.add_type(std::move(entry));
        return;
    }
    const AstNode* lt = decl.child(1);
    reject_inline_groups(*lt, file);
    scope.add_type(make_type_entry(first.text, lt, scope, file, decl.span));
}

void add_param_placeholders(Scope& scope, const std::vector<TemplateParam>& params, const SourceFile* file) {
    for (auto& p : params) {
        auto v = std::make_unique<Variable>();
        v->id = p.name;
        v->scope = &scope;
        v->file = file;
        v->span = p.span;
        v->magic = VarMagic::Arg;
        v->declared_kind = p.kind;
        v->raw = "$arg$" + p.name;
        v->cell.label = "template argument " + p.name + " (" + scope.name + ")";
        scope.add_variable(std::move(v));
    }
}

// Span of a statement without its trailing separator.
Span content_span(const AstNode& node) {
    Span s = node.span;
    if (!node.children.empty())
        s.end = node.children.back()->span.end;
    return s;
}

std::string binding_text(const Value& v) {
    return v.kind == ValueKind::Str ? quote_string(v.s) : value_text(v);
}

void lower_impl_item(const AstNode& item, Implementation& impl, const SourceFile* file) {
    Scope& scope = *impl.scope;
    switch (item.kind) {
        case NodeKind::ConstDecl: scope.add_variable(lower_const(item, scope, file)); break;
        case NodeKind::TypeDeclaration: lower_type_decl(item, scope, file); break;
        case NodeKind::Assert: impl.assertions.push_back(&item); break;
        case NodeKind::IfBlock:
        case NodeKind::ForBlock: impl.blocks.push_back(&item); break;
        case NodeKind::ProcessBlock: impl.has_process = true; break;
        case NodeKind::Instance: {
            auto inst = std::make_unique<Instance>();
            inst->name = interpolate_identifier(node_id(item), {}, file, item.find(NodeKind::ID)->span);
            inst->owner = &impl;
            inst->file = file;
            inst->span = content_span(item);
            inst->target_ast = item.find(NodeKind::TemplateInstance);
            inst->array_ast = item.find(NodeKind::ArraySize);
            inst->raw_target = slice(file, inst->target_ast->span);
            scope.add_instance(std::move(inst));
            break;
        }
        case NodeKind::Connection: scope.add_connection(lower_connection(item, impl, file, {})); break;
        default:
            throw_error(DiagCategory::Internal, file, item.span,
                        "unexpected " + std::string(to_string(item.kind)) + " in implementation");
    }
}

} // namespace

std::vector<TemplateParam> lower_template_params(const AstNode* params) {
    std::vector<TemplateParam> out;
    if (!params)
        return out;
    for (auto& p : params->children) {
        TemplateParam tp;
        tp.name = node_id(*p);
        const AstNode* kind = p->find(NodeKind::ParamKind);
        tp.kind = kind->text;
        tp.impl_of = kind->find(NodeKind::TemplateInstance);
        tp.span = p->span;
        out.push_back(std::move(tp));
    }
    return out;
}

std::string interpolate_identifier(std::string_view id, const std::vector<Binding>& bindings, const SourceFile* file,
                                   Span span) {
    if (id.find("{{") == std::string_view::npos)
        return std::string(id);
    std::string out;
    std::size_t pos = 0;
    while (pos < id.size()) {
        std::size_t open = id.find("{{", pos);
        if (open == std::string_view::npos) {
            out += id.substr(pos);
            break;
        }
        out += id.substr(pos, open - pos);
        std::size_t close = id.find("}}", open);
        std::string var(id.substr(open + 2, close - open - 2));
        auto it = std::find_if(bindings.rbegin(), bindings.rend(), [&](const Binding& b) { return b.name == var; });
        if (it == bindings.rend())
            throw_error(DiagCategory::Resolution, file, span,
                        "'{{" + var + "}}' in identifier '" + std::string(id) + "' is not bound by an enclosing for block");
        if (it->value.kind == ValueKind::Int)
            out += std::to_string(it->value.i);
        else if (it->value.kind == ValueKind::Str)
            out += it->value.s;
        else
            throw_error(DiagCategory::Type, file, span,
                        "'{{" + var + "}}' must be int or str to form an identifier, found " + kind_label(it->value));
        pos = close + 2;
    }
    if (!is_valid_identifier(out) || is_keyword(out))
        throw_error(DiagCategory::Syntax, file, span,
                    "interpolated identifier '" + out + "' is not a valid identifier");
    return out;
}

std::unique_ptr<Connection> lower_connection(const AstNode& ast, Implementation& owner, const SourceFile* file,
                                             const std::vector<Binding>& bindings) {
    auto c = std::make_unique<Connection>();
    c->owner = &owner;
    c->file = file;
    c->ast = &ast;
    c->span = content_span(ast);
    c->bindings = bindings;
    if (const AstNode* name = ast.find(NodeKind::ConnectionName))
        c->name = unescape_string_literal(name->children[0]->text);
    else
        c->name = "connection_" + std::to_string(c->span.start) + "-" + std::to_string(c->span.end);
    for (auto& b : bindings)
        c->name += "@" + b.name + "=" + binding_text(b.value);
    c->no_strict_type = ast.find(NodeKind::NoStrictType) != nullptr;
    auto refs = ast.find_all(NodeKind::PortRef);
    auto fill = [&](PortEnd& end, const AstNode& ref) {
        // the last ID starts the port part; everything before it names the owner
        std::size_t last_id = 0;
        for (std::size_t i = 0; i < ref.children.size(); ++i)
            if (ref.children[i]->kind == NodeKind::ID)
                last_id = i;
        const AstNode& port_id = *ref.children[last_id];
        end.raw_port = slice(file, {port_id.span.start, ref.span.end});
        if (last_id > 0)
            end.raw_owner = slice(file, {ref.span.start, ref.children[last_id - 1]->span.end});
    };
    fill(c->source, *refs[0]);
    fill(c->sink, *refs[1]);
    return c;
}

std::unique_ptr<Streamlet> lower_streamlet(const AstNode& ast, Package& pkg, const SourceFile* file,
                                           const std::string& name, bool as_instance) {
    auto s = std::make_unique<Streamlet>();
    s->name = name;
    s->package = &pkg;
    s->file = file;
    s->span = ast.span;
    s->ast = &ast;
    s->doc = doc_text(ast);
    s->is_instance = as_instance;
    s->scope = std::make_unique<Scope>("streamlet_" + name, &pkg);
    s->scope->owner_name = name;
    s->scope->relations.push_back({RelationKind::Streamlet, pkg.scope.get()});
    s->cell.label = "streamlet " + name + " (" + pkg.scope->name + ")";
    s->cell.file = file;
    s->cell.span = ast.span;
    if (!as_instance) {
        s->params = lower_template_params(ast.find(NodeKind::TemplateParams));
        add_param_placeholders(*s->scope, s->params, file);
    }
    for (auto& item : ast.children) {
        switch (item->kind) {
            case NodeKind::ConstDecl: s->scope->add_variable(lower_const(*item, *s->scope, file)); break;
            case NodeKind::TypeDeclaration: lower_type_decl(*item, *s->scope, file); break;
            case NodeKind::Assert: s->assertions.push_back(item.get()); break;
            case NodeKind::Port: {
                auto p = std::make_unique<Port>();
                p->name = node_id(*item);
                p->owner = s.get();
                p->file = file;
                p->span = content_span(*item);
                p->type_ast = item->find(NodeKind::LogicalType);
                p->array_ast = item->find(NodeKind::ArraySize);
                p->cd_ast = item->find(NodeKind::ClockDomainRef);
                p->is_input = item->find(NodeKind::PortDirection)->text == "in";
                reject_inline_groups(*p->type_ast, file);
                s->port_order.push_back(p->name);
                s->scope->add_port(std::move(p));
                break;
            }
            default: break;
        }
    }
    return s;
}

std::unique_ptr<Implementation> lower_implementation(const AstNode& ast, Package& pkg, const SourceFile* file,
                                                     const std::string& name, bool as_instance) {
    auto impl = std::make_unique<Implementation>();
    impl->name = name;
    impl->package = &pkg;
    impl->file = file;
    impl->span = ast.span;
    impl->ast = &ast;
    impl->doc = doc_text(ast);
    impl->external = ast.find(NodeKind::External) != nullptr;
    impl->is_instance = as_instance;
    impl->scope = std::make_unique<Scope>("implement_" + name, &pkg);
    impl->scope->owner_name = name;
    impl->scope->relations.push_back({RelationKind::Implement, pkg.scope.get()});
    impl->cell.label = "implementation " + name + " (" + pkg.scope->name + ")";
    impl->cell.file = file;
    impl->cell.span = ast.span;
    if (ast.kind == NodeKind::ImplementAlias) {
        impl->is_alias = true;
        impl->alias_ref = ast.find(NodeKind::TemplateInstance);
        impl->streamlet_raw = slice(file, impl->alias_ref->span);
        return impl;
    }
    if (!as_instance) {
        impl->params = lower_template_params(ast.find(NodeKind::TemplateParams));
        add_param_placeholders(*impl->scope, impl->params, file);
    }
    impl->streamlet_ref = ast.find(NodeKind::TemplateInstance);
    impl->streamlet_raw = slice(file, impl->streamlet_ref->span);
    bool past_header = false;
    for (auto& item : ast.children) {
        if (item.get() == impl->streamlet_ref) {
            past_header = true;
            continue;
        }
        if (!past_header)
            continue;
        if (impl->external)
            throw_error(DiagCategory::Syntax, file, item->span,
                        "external implementation '" + name + "' must have an empty body");
        lower_impl_item(*item, *impl, file);
    }
    return impl;
}

namespace {

void lower_package_statements(Package& pkg, std::vector<Diagnostic>& diags) {
    const SourceFile* file = pkg.source.get();
    Scope& scope = *pkg.scope;
    for (auto& stmt : pkg.root->children) {
        try {
            switch (stmt->kind) {
                case NodeKind::Import: pkg.imports.push_back(node_id(*stmt)); break;
                case NodeKind::ConstDecl: scope.add_variable(lower_const(*stmt, scope, file)); break;
                case NodeKind::TypeDeclaration: lower_type_decl(*stmt, scope, file); break;
                case NodeKind::Streamlet:
                    scope.add_streamlet(lower_streamlet(*stmt, pkg, file, node_id(*stmt), false));
                    break;
                case NodeKind::Implement:
                case NodeKind::ImplementAlias:
                    scope.add_implement(lower_implementation(*stmt, pkg, file, node_id(*stmt), false));
                    break;
                default: break;
            }
        } catch (const CompileError& e) {
            diags.push_back(e.diagnostic());
        }
    }
}

void add_package_variable(Package& pkg, const std::string& target_name, Package* target) {
    auto v = std::make_unique<Variable>();
    v->id = "$package$" + target_name;
    v->scope = pkg.scope.get();
    v->file = pkg.source.get();
    v->magic = VarMagic::Package;
    v->target_package = target;
    v->cell.label = "variable " + v->id;
    std::unique_lock lk(pkg.scope->mutex);
    pkg.scope->variables.emplace(v->id, std::move(v));
}

} // namespace

BuildResult build_project(const ProjectParseResult& parsed, std::string project_name) {
    BuildResult result;
    auto project = std::make_unique<Project>();
    project->name = std::move(project_name);

    auto prelude_file = std::make_shared<SourceFile>();
    prelude_file->path = "<tydi_std>";
    prelude_file->text = std::string(prelude_source());
    ParseResult prelude = parse_file(*prelude_file);
    if (!prelude.ok()) {
        result.diagnostics = prelude.diagnostics;
        return result;
    }

    auto add_package = [&](const std::string& name, SourceFilePtr source, AstPtr root, bool is_prelude) {
        auto pkg = std::make_unique<Package>();
        pkg->name = name;
        pkg->source = std::move(source);
        pkg->root = std::move(root);
        pkg->is_prelude = is_prelude;
        pkg->scope = std::make_unique<Scope>("package_" + name, pkg.get());
        project->packages.emplace(name, std::move(pkg));
    };

    add_package(std::string(prelude_package_name), prelude_file, prelude.root, true);
    for (auto& [name, file] : parsed.packages) {
        if (name == prelude_package_name) {
            result.diagnostics.push_back(make_diagnostic(DiagCategory::Resolution, file.source.get(), {0, 0},
                                                         "package name '" + name +
                                                             "' is reserved for the built-in standard library"));
            continue;
        }
        add_package(name, file.source, file.root, false);
    }

    for (auto& [name, pkg] : project->packages)
        lower_package_statements(*pkg, result.diagnostics);

    for (auto& [name, pkg] : project->packages) {
        add_package_variable(*pkg, name, pkg.get());
        if (!pkg->is_prelude)
            add_package_variable(*pkg, std::string(prelude_package_name),
                                 project->find_package(prelude_package_name));
        for (auto& imp : pkg->imports) {
            Package* target = project->find_package(imp);
            if (!target || target->is_prelude) {
                Span span{};
                for (auto& stmt : pkg->root->children)
                    if (stmt->kind == NodeKind::Import && node_id(*stmt) == imp)
                        span = stmt->span;
                result.diagnostics.push_back(make_diagnostic(DiagCategory::Resolution, pkg->source.get(), span,
                                                             target ? "package '" + imp + "' is imported implicitly"
                                                                    : "imported package '" + imp +
                                                                          "' does not exist in the project"));
                continue;
            }
            add_package_variable(*pkg, imp, target);
        }
    }
    result.project = std::move(project);
    return result;
}

} // namespace tydi
