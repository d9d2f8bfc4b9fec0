//------------------------------------------------------------------------------
// ast.cpp
// Position-annotated syntax tree produced by the parser
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/ast.hpp"

namespace tydi {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
#define TYDI_NAME_ENTRY(name) \
    case NodeKind::name: return #name;
        TYDI_NODE_KINDS(TYDI_NAME_ENTRY)
#undef TYDI_NAME_ENTRY
    }
    return "?";
}

const AstNode* AstNode::find(NodeKind k) const {
    for (auto& c : children)
        if (c->kind == k)
            return c.get();
    return nullptr;
}

std::vector<const AstNode*> AstNode::find_all(NodeKind k) const {
    std::vector<const AstNode*> out;
    for (auto& c : children)
        if (c->kind == k)
            out.push_back(c.get());
    return out;
}

static void dump_into(const AstNode& node, std::string& out) {
    out += to_string(node.kind);
    out += '(';
    out += std::to_string(node.span.start);
    out += ", ";
    out += std::to_string(node.span.end);
    if (!node.children.empty()) {
        out += ", [";
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (i)
                out += ", ";
            dump_into(*node.children[i], out);
        }
        out += ']';
    }
    out += ')';
}

std::string dump_ast(const AstNode& node) {
    std::string out;
    dump_into(node, out);
    return out;
}

std::string dump_ast_list(const std::vector<AstPtr>& nodes) {
    std::string out = "[";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i)
            out += ", ";
        dump_into(*nodes[i], out);
    }
    out += ']';
    return out;
}

} // namespace tydi
