//------------------------------------------------------------------------------
// expr.cpp
// Expression trees lowered from flat parser output, and their evaluation
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/expr.hpp"

#include <charconv>
#include <cstdlib>

#include "tydi/parser.hpp"

namespace tydi {

int binary_precedence(std::string_view op) {
    if (op == "||")
        return 1;
    if (op == "&&")
        return 2;
    if (op == "|")
        return 3;
    if (op == "&")
        return 4;
    if (op == "==" || op == "!=")
        return 5;
    if (op == "<" || op == ">" || op == "<=" || op == ">=")
        return 6;
    if (op == "<<" || op == ">>")
        return 7;
    if (op == "+" || op == "-")
        return 8;
    if (op == "*" || op == "/" || op == "%")
        return 9;
    if (op == "^")
        return 10;
    return 0;
}

namespace {

std::shared_ptr<Expr> make(Expr::Kind kind, Span span) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->span = span;
    return e;
}

std::int64_t parse_int_literal(const AstNode& raw, const SourceFile* file) {
    std::string_view text = raw.text;
    int base = 10;
    switch (raw.kind) {
        case NodeKind::INT_RAW_BIN: base = 2; break;
        case NodeKind::INT_RAW_HEX: base = 16; break;
        case NodeKind::INT_RAW_OCT: base = 8; break;
        default: break;
    }
    if (base != 10)
        text.remove_prefix(2);
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
        v > static_cast<std::uint64_t>(INT64_MAX))
        throw_error(DiagCategory::Syntax, file, raw.span,
                    "integer literal '" + raw.text + "' does not fit in a 64-bit signed integer");
    return static_cast<std::int64_t>(v);
}

class Lowering {
public:
    explicit Lowering(const SourceFile* file) : file_(file) {}

    ExprPtr term_node(const AstNode& node) { return term(node); }

    ExprPtr exp(const AstNode& node) {
        if (node.kind != NodeKind::Exp)
            throw_error(DiagCategory::Internal, file_, node.span, "expected an expression node");
        if (node.children.size() == 1 && node.children[0]->kind == NodeKind::RangeExp) {
            const AstNode& r = *node.children[0];
            auto e = make(Expr::Kind::Range, r.span);
            e->op = "=>";
            for (auto& c : r.children)
                e->args.push_back(exp(*c));
            return e;
        }
        std::size_t pos = 0;
        return climb(node, pos, 1);
    }

private:
    // Exp children alternate Term, InfixOp, Term, ...
    ExprPtr climb(const AstNode& node, std::size_t& pos, int min_prec) {
        ExprPtr lhs = term(*node.children[pos]);
        while (pos + 2 < node.children.size()) {
            const AstNode& op = *node.children[pos + 1];
            int prec = binary_precedence(op.text);
            if (prec < min_prec)
                break;
            pos += 2;
            int next_min = op.text == "^" ? prec : prec + 1;
            ExprPtr rhs = climb(node, pos, next_min);
            auto e = make(Expr::Kind::Binary, {lhs->span.start, rhs->span.end});
            e->op = op.text;
            e->args = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr term(const AstNode& node) {
        if (node.kind != NodeKind::Term || node.children.empty())
            throw_error(DiagCategory::Internal, file_, node.span, "expected a term node");
        const AstNode& inner = *node.children[0];
        switch (inner.kind) {
            case NodeKind::Exp: {
                // parenthesized: keep the outer span so diagnostics cover the parens
                ExprPtr sub = exp(inner);
                auto e = std::make_shared<Expr>(*sub);
                e->span = node.span;
                return e;
            }
            case NodeKind::IntExp: {
                auto e = make(Expr::Kind::Literal, inner.span);
                e->literal = Value::of_int(parse_int_literal(*inner.children[0], file_));
                return e;
            }
            case NodeKind::FloatExp: {
                auto e = make(Expr::Kind::Literal, inner.span);
                const std::string& text = inner.children[0]->text;
                double v = 0;
                auto res = std::from_chars(text.data(), text.data() + text.size(), v);
                if (res.ec != std::errc())
                    throw_error(DiagCategory::Syntax, file_, inner.span, "invalid float literal '" + text + "'");
                e->literal = Value::of_float(v);
                return e;
            }
            case NodeKind::StringExp: {
                auto e = make(Expr::Kind::Literal, inner.span);
                e->literal = Value::of_str(unescape_string_literal(inner.children[0]->text));
                return e;
            }
            case NodeKind::BoolExp: {
                auto e = make(Expr::Kind::Literal, inner.span);
                e->literal = Value::of_bool(inner.children[0]->text == "true");
                return e;
            }
            case NodeKind::UnaryExp: {
                auto e = make(Expr::Kind::Unary, inner.span);
                e->op = inner.children[0]->text;
                e->args.push_back(term(*inner.children[1]));
                return e;
            }
            case NodeKind::ArrayExp: {
                auto e = make(Expr::Kind::Array, inner.span);
                for (auto& c : inner.children)
                    e->args.push_back(exp(*c));
                return e;
            }
            case NodeKind::FunctionExp: {
                auto e = make(Expr::Kind::Call, inner.span);
                e->op = inner.children[0]->text;
                e->args.push_back(exp(*inner.children[1]));
                return e;
            }
            case NodeKind::LogExp: {
                auto e = make(Expr::Kind::Log, inner.span);
                e->op = "log";
                e->args.push_back(term(*inner.children[0]));
                e->args.push_back(exp(*inner.children[1]));
                return e;
            }
            case NodeKind::MemberAccess: {
                auto e = make(Expr::Kind::Member, inner.span);
                e->member = &inner;
                return e;
            }
            case NodeKind::IdentifierExp: return name(inner);
            case NodeKind::IndexExp: {
                auto e = make(Expr::Kind::Index, inner.span);
                e->args.push_back(name(*inner.children[0]));
                e->args.push_back(exp(*inner.children[1]));
                return e;
            }
            default: break;
        }
        throw_error(DiagCategory::Internal, file_, inner.span,
                    "unexpected node " + std::string(to_string(inner.kind)) + " in expression");
    }

    ExprPtr name(const AstNode& ident) {
        auto e = make(Expr::Kind::Name, ident.span);
        if (ident.children.size() == 2) {
            e->qualifier = ident.children[0]->text;
            e->name = ident.children[1]->text;
        } else {
            e->name = ident.children[0]->text;
        }
        return e;
    }

    const SourceFile* file_;
};

} // namespace

ExprPtr lower_expression(const AstNode& exp, const SourceFile* file) {
    return Lowering(file).exp(exp);
}

ExprPtr lower_term(const AstNode& term, const SourceFile* file) {
    return Lowering(file).term_node(term);
}

Value evaluate_expression(const Expr& expr, const SourceFile* file, const LeafResolver& leaf) {
    auto sub = [&](std::size_t i) { return evaluate_expression(*expr.args[i], file, leaf); };
    try {
        switch (expr.kind) {
            case Expr::Kind::Literal: return expr.literal;
            case Expr::Kind::Name:
            case Expr::Kind::Member: return leaf(expr);
            case Expr::Kind::Unary: {
                Value v = sub(0);
                return apply_unary(expr.op, v);
            }
            case Expr::Kind::Binary: {
                Value a = sub(0);
                Value b = sub(1);
                return apply_binary(expr.op, a, b);
            }
            case Expr::Kind::Call: {
                Value v = sub(0);
                return apply_function(expr.op, v);
            }
            case Expr::Kind::Log: {
                Value base = sub(0);
                Value arg = sub(1);
                return apply_log(base, arg);
            }
            case Expr::Kind::Array: {
                std::vector<Value> items;
                for (std::size_t i = 0; i < expr.args.size(); ++i)
                    items.push_back(sub(i));
                return make_array(std::move(items));
            }
            case Expr::Kind::Range: {
                Value start = sub(0);
                Value step = sub(1);
                Value end = sub(2);
                return make_range(start, step, end);
            }
            case Expr::Kind::Index: {
                Value arr = sub(0);
                Value idx = sub(1);
                return index_array(arr, idx);
            }
        }
    } catch (const MathError& e) {
        throw_error(DiagCategory::Type, file, expr.span, e.what());
    }
    return Value();
}

void visit_leaves(const Expr& expr, const std::function<void(const Expr&)>& fn) {
    if (expr.kind == Expr::Kind::Name || expr.kind == Expr::Kind::Member) {
        fn(expr);
        return;
    }
    for (auto& a : expr.args)
        visit_leaves(*a, fn);
}

} // namespace tydi
