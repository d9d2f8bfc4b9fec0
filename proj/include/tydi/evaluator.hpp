//------------------------------------------------------------------------------
// evaluator.hpp
// Lazy evaluation of variables, types, streamlets and implementations
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "tydi/model.hpp"

namespace tydi {

/// Either side of a member access: `streamlet s.x`, `impl i.t`, `type g.x`.
struct MemberTarget {
    Variable* variable = nullptr;
    TypeEntry* type = nullptr;
};

/// Stateless driver over a project; safe to use from several threads.
class Evaluator {
public:
    explicit Evaluator(Project& project) : project_(project) {}

    Project& project() const { return project_; }

    Value variable(Variable& v);
    LogicalTypePtr type_entry(TypeEntry& t);
    void streamlet(Streamlet& s);
    void implementation(Implementation& impl);

    Value expression(const AstNode& exp, Scope& scope, const SourceFile* file, const std::vector<Binding>& env = {});
    /// `naming` is the declaration that names a directly written Stream.
    LogicalTypePtr logical_type(const AstNode& lt, Scope& scope, const SourceFile* file,
                                const std::vector<Binding>& env = {}, const TypeEntry* naming = nullptr);
    MemberTarget member(const AstNode& access, Scope& scope, const SourceFile* file, const std::vector<Binding>& env);

    /// Resolves a TemplateInstance node, instantiating the template when arguments are given.
    Streamlet& streamlet_ref(const AstNode& ti, Scope& scope, const SourceFile* file, const std::vector<Binding>& env);
    Implementation& implement_ref(const AstNode& ti, Scope& scope, const SourceFile* file,
                                  const std::vector<Binding>& env);
    std::vector<TemplateArg> template_args(const AstNode* args, Scope& scope, const SourceFile* file,
                                           const std::vector<Binding>& env);

    /// Memoized monomorphization registered as `<template>@<arg>@...` in the template's package.
    Streamlet& instantiate(Streamlet& tpl, const std::vector<TemplateArg>& args, const SourceFile* file, Span span);
    Implementation& instantiate(Implementation& tpl, const std::vector<TemplateArg>& args, const SourceFile* file,
                                Span span);

    /// Mangled name of a template applied to `args`.
    static std::string mangle(const std::string& tpl, const Package& pkg, const std::vector<TemplateArg>& args);

    /// Evaluates every non-magic variable and type declared directly in `scope`.
    void evaluate_scope(Scope& scope);

private:
    void check_args(const std::string& what, const std::string& name, const std::vector<TemplateParam>& params,
                    std::vector<TemplateArg>& args, Scope& tpl_scope, const SourceFile* tpl_file,
                    const SourceFile* file, Span span);
    void bind_args(Scope& scope, const std::vector<TemplateParam>& params, const std::vector<TemplateArg>& args,
                   const SourceFile* file);
    void expand_items(Implementation& impl, const std::vector<const AstNode*>& items,
                      const std::vector<Binding>& env, bool in_for);
    void evaluate_instance(Implementation& impl, Instance& inst);
    void evaluate_connection(Implementation& impl, Connection& conn);
    void resolve_end(Implementation& impl, Connection& conn, const AstNode& ref, PortEnd& end);
    void check_assertion(const AstNode& assertion, Scope& scope, const SourceFile* file,
                         const std::vector<Binding>& env);
    std::int64_t evaluate_index(const AstNode& array_size, Scope& scope, const SourceFile* file,
                                const std::vector<Binding>& env, std::int64_t bound, const std::string& what);

    Project& project_;
};

struct EvaluationOptions {
    unsigned jobs = 1;
    /// `package.impl`; empty to use every default root.
    std::string top;
};

struct EvaluationResult {
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Labels of the evaluation roots in scheduling order.
std::vector<std::string> evaluation_roots(const Project& project, const EvaluationOptions& options);

/// Evaluates every root on `options.jobs` workers and collects the errors.
EvaluationResult evaluate_project(Project& project, const EvaluationOptions& options);

} // namespace tydi
