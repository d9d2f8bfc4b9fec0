//------------------------------------------------------------------------------
// ast.hpp
// Position-annotated syntax tree produced by the parser
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tydi/source.hpp"

namespace tydi {

#define TYDI_NODE_KINDS(X)                                                            \
    X(Package) X(Import) X(ConstDecl) X(TypeIndicator) X(TypeDeclaration)             \
    X(LogicalType) X(LogicalNullType) X(LogicalBitType) X(LogicalStreamType)           \
    X(LogicalUserDefinedType) X(LogicalGroupType) X(LogicalUnionType) X(SubItemItem)   \
    X(StreamPropertyDimension) X(StreamPropertyUserType) X(StreamPropertyThroughput)   \
    X(StreamPropertySynchronicity) X(StreamPropertyComplexity)                         \
    X(StreamPropertyDirection) X(StreamPropertyKeep)                                   \
    X(MemberAccess) X(MemberOwnerKind)                                                 \
    X(Streamlet) X(DOC) X(TemplateParams) X(TemplateParam) X(ParamKind)                \
    X(Port) X(PortDirection) X(ArraySize) X(ClockDomainRef) X(Assert)                  \
    X(Implement) X(External) X(ImplementAlias) X(TemplateInstance) X(TemplateArgs)     \
    X(TemplateArgType) X(TemplateArgImpl) X(TemplateArgExp)                            \
    X(Instance) X(Connection) X(PortRef) X(FifoDepth) X(ConnectionName)                \
    X(NoStrictType) X(IfBlock) X(IfBranch) X(ElifBranch) X(ElseBranch) X(ForBlock)     \
    X(ProcessBlock)                                                                    \
    X(Exp) X(Term) X(InfixOp) X(UnaryExp) X(UnaryOp) X(IntExp) X(INT_RAW_NORAML)       \
    X(INT_RAW_BIN) X(INT_RAW_HEX) X(INT_RAW_OCT) X(FloatExp) X(FLOAT) X(StringExp)     \
    X(STR) X(BoolExp) X(BOOL) X(ArrayExp) X(RangeExp) X(IdentifierExp) X(IndexExp)    \
    X(FunctionExp) X(FunctionName) X(LogExp) X(ID)

enum class NodeKind {
#define TYDI_ENUM_ENTRY(name) name,
    TYDI_NODE_KINDS(TYDI_ENUM_ENTRY)
#undef TYDI_ENUM_ENTRY
};

std::string_view to_string(NodeKind kind);

struct AstNode;
using AstPtr = std::shared_ptr<const AstNode>;

struct AstNode {
    NodeKind kind;
    Span span;
    std::vector<AstPtr> children;
    /// Identifier/literal/operator text for leaves; empty otherwise.
    std::string text;

    const AstNode* child(std::size_t i) const { return i < children.size() ? children[i].get() : nullptr; }
    /// First child of the given kind, or null.
    const AstNode* find(NodeKind k) const;
    std::vector<const AstNode*> find_all(NodeKind k) const;
};

/// `Kind(start, end, [children...])`, or `Kind(start, end)` for leaves.
std::string dump_ast(const AstNode& node);
/// `[a, b, ...]` over a node list, the form used for whole files.
std::string dump_ast_list(const std::vector<AstPtr>& nodes);

/// Visits every node in pre-order.
template<typename F>
void walk_ast(const AstNode& node, F&& fn) {
    fn(node);
    for (auto& c : node.children)
        walk_ast(*c, fn);
}

} // namespace tydi
