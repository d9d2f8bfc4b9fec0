//------------------------------------------------------------------------------
// lower.hpp
// Builds the code structure from parsed packages
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tydi/model.hpp"
#include "tydi/parser.hpp"

namespace tydi {

/// Reserved name of the built-in standard library package.
inline constexpr std::string_view prelude_package_name = "tydi_std";

/// Source of the built-in standard library (duplicator and voider templates).
std::string_view prelude_source();

struct BuildResult {
    std::unique_ptr<Project> project;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return project && diagnostics.empty(); }
};

/// Creates packages, scopes and declarations for every parsed package plus
/// the prelude. Nothing is evaluated.
BuildResult build_project(const ProjectParseResult& parsed, std::string project_name);

/// Lowers a Streamlet node. With `as_instance` the template parameters are
/// not declared; the caller binds them.
std::unique_ptr<Streamlet> lower_streamlet(const AstNode& ast, Package& pkg, const SourceFile* file,
                                           const std::string& name, bool as_instance);

/// Lowers an Implement or ImplementAlias node; see lower_streamlet.
std::unique_ptr<Implementation> lower_implementation(const AstNode& ast, Package& pkg, const SourceFile* file,
                                                     const std::string& name, bool as_instance);

/// Lowers a Connection node; `bindings` come from enclosing for blocks and
/// are appended to the connection name as `@var=value`.
std::unique_ptr<Connection> lower_connection(const AstNode& ast, Implementation& owner, const SourceFile* file,
                                             const std::vector<Binding>& bindings);

/// Substitutes `{{var}}` segments from `bindings`. Int renders in decimal and
/// Str verbatim; other kinds and unbound names are errors. The result must be
/// a valid identifier.
std::string interpolate_identifier(std::string_view id, const std::vector<Binding>& bindings, const SourceFile* file,
                                   Span span);

/// Template parameters of a TemplateParams node.
std::vector<TemplateParam> lower_template_params(const AstNode* params);

/// Name of the first ID child.
const std::string& node_id(const AstNode& node);

} // namespace tydi
