//------------------------------------------------------------------------------
// expr.hpp
// Expression trees lowered from flat parser output, and their evaluation
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tydi/ast.hpp"
#include "tydi/value.hpp"

namespace tydi {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Literal, Name, Member, Unary, Binary, Call, Log, Array, Range, Index };

    Kind kind = Kind::Literal;
    Span span;
    /// Operator symbol or function name.
    std::string op;
    Value literal;
    /// Name: optional package qualifier (`pkg.id`) and the identifier.
    std::string qualifier;
    std::string name;
    /// Member: the MemberAccess node, resolved by the caller.
    const AstNode* member = nullptr;
    std::vector<ExprPtr> args;
};

/// Binding power of a binary operator; higher binds tighter. Zero for unknown.
int binary_precedence(std::string_view op);

/// Lowers an `Exp` node. Literal errors throw CompileError(syntax).
ExprPtr lower_expression(const AstNode& exp, const SourceFile* file);
/// Lowers a single `Term` node.
ExprPtr lower_term(const AstNode& term, const SourceFile* file);

/// Supplies values for Name and Member leaves.
using LeafResolver = std::function<Value(const Expr&)>;

/// Evaluates every operand (no short-circuit) and applies the operator matrix.
/// Math errors become CompileError(type) at the failing subexpression.
Value evaluate_expression(const Expr& expr, const SourceFile* file, const LeafResolver& leaf);

/// Calls `fn` on every Name and Member leaf, left to right.
void visit_leaves(const Expr& expr, const std::function<void(const Expr&)>& fn);

} // namespace tydi
