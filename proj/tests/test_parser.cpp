#include "doctest.h"

#include "tydi/parser.hpp"

using namespace tydi;

namespace {

SourceFile make_source(std::string text, std::string path = "test.td") {
    SourceFile f;
    f.path = std::move(path);
    f.text = std::move(text);
    return f;
}

// The union snippet and its expected dump, spans counted by hand from the text.
const char* union_snippet = "Union A {\n"
                            "  a : Bit(10),\n"
                            "  b : Stream(A, d=0, t=\"user type\"),\n"
                            "  c : Stream(A, t=\"user type\"),\n"
                            "  d : Stream(A, d=0),\n"
                            "  e : Stream(A),\n"
                            "}";

const char* union_expected =
    "[LogicalUnionType(0, 134, [ID(6, 7), SubItemItem(12, 24, [ID(12, 13), LogicalType(16, 23, "
    "[LogicalBitType(16, 23, [Exp(20, 22, [Term(20, 22, [IntExp(20, 22, [INT_RAW_NORAML(20, 22)])])])])])]), "
    "SubItemItem(27, 61, [ID(27, 28), LogicalType(31, 60, [LogicalStreamType(31, 60, [LogicalType(38, 39, "
    "[LogicalUserDefinedType(38, 39, [ID(38, 39)])]), StreamPropertyDimension(39, 44, [Exp(43, 44, [Term(43, "
    "44, [IntExp(43, 44, [INT_RAW_NORAML(43, 44)])])])]), StreamPropertyThroughput(44, 59, [Exp(48, 59, "
    "[Term(48, 59, [StringExp(48, 59, [STR(48, 59)])])])])])])]), SubItemItem(64, 93, [ID(64, 65), "
    "LogicalType(68, 92, [LogicalStreamType(68, 92, [LogicalType(75, 76, [LogicalUserDefinedType(75, 76, "
    "[ID(75, 76)])]), StreamPropertyThroughput(76, 91, [Exp(80, 91, [Term(80, 91, [StringExp(80, 91, [STR(80, "
    "91)])])])])])])]), SubItemItem(96, 115, [ID(96, 97), LogicalType(100, 114, [LogicalStreamType(100, 114, "
    "[LogicalType(107, 108, [LogicalUserDefinedType(107, 108, [ID(107, 108)])]), StreamPropertyDimension(108, "
    "113, [Exp(112, 113, [Term(112, 113, [IntExp(112, 113, [INT_RAW_NORAML(112, 113)])])])])])])]), "
    "SubItemItem(118, 132, [ID(118, 119), LogicalType(122, 131, [LogicalStreamType(122, 131, "
    "[LogicalType(129, 130, [LogicalUserDefinedType(129, 130, [ID(129, 130)])])])])])])]";

void check_containment(const AstNode& n) {
    std::size_t prev_end = n.span.start;
    for (auto& c : n.children) {
        CHECK(n.span.contains(c->span));
        CHECK(c->span.start >= prev_end);
        prev_end = c->span.end;
        check_containment(*c);
    }
}

} // namespace

TEST_CASE("union snippet dump matches the reference listing byte for byte") {
    auto src = make_source(union_snippet);
    REQUIRE(src.text.size() == 134);
    auto r = parse_rule(src, Rule::UnionDeclaration);
    REQUIRE(r.ok());
    CHECK(dump_ast_list({r.root}) == union_expected);
    check_containment(*r.root);
}

TEST_CASE("leaf and empty package dumps") {
    auto src = make_source("package p;");
    auto r = parse_file(src);
    REQUIRE(r.ok());
    CHECK(src.package_name == "p");
    CHECK(r.root->children.empty());
    CHECK(dump_ast(*r.root) == "Package(0, 10)");

    AstNode leaf{NodeKind::ID, {6, 7}, {}, "A"};
    CHECK(dump_ast(leaf) == "ID(6, 7)");
}

TEST_CASE("consecutive underscores are rejected at the identifier") {
    auto src = make_source("package p;\nconst a__b = 1;");
    auto r = parse_file(src);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].category == DiagCategory::Syntax);
    CHECK(r.diagnostics[0].span.start == 17);
    CHECK(r.diagnostics[0].span.end == 21);
    CHECK(r.diagnostics[0].position.line == 2);
    CHECK(r.diagnostics[0].position.column == 7);
}

TEST_CASE("integer literal forms and comments") {
    auto src = make_source("package p; // c\n/* block\n */ const a = 0b0001 + 0x01 + 0o01 + 1;");
    auto r = parse_file(src);
    REQUIRE(r.ok());
    std::vector<NodeKind> kinds;
    walk_ast(*r.root, [&](const AstNode& n) {
        if (n.kind == NodeKind::INT_RAW_BIN || n.kind == NodeKind::INT_RAW_HEX || n.kind == NodeKind::INT_RAW_OCT ||
            n.kind == NodeKind::INT_RAW_NORAML)
            kinds.push_back(n.kind);
    });
    CHECK(kinds == std::vector<NodeKind>{NodeKind::INT_RAW_BIN, NodeKind::INT_RAW_HEX, NodeKind::INT_RAW_OCT,
                                         NodeKind::INT_RAW_NORAML});
}

TEST_CASE("unary minus parses as a term of the first operand") {
    auto src = make_source("-1+2");
    auto r = parse_rule(src, Rule::Exp);
    REQUIRE(r.ok());
    CHECK(dump_ast(*r.root) ==
          "Exp(0, 4, [Term(0, 2, [UnaryExp(0, 2, [UnaryOp(0, 1), Term(1, 2, [IntExp(1, 2, [INT_RAW_NORAML(1, 2)])])])]), "
          "InfixOp(2, 3), Term(3, 4, [IntExp(3, 4, [INT_RAW_NORAML(3, 4)])])])");
}

TEST_CASE("full language constructs parse") {
    auto src = make_source(R"(package main;
import other;
const cd0: clockdomain;
const cd1: clockdomain = "100MHz";
const arr: [int] = {1, 2} + 3;
const r = 0=1=>4;
const l = log2(8) + log 3(9) + ceil(1.5);
type Group rgb { const x = 8, r: Bit(x), g: Bit(other.w) };
type s = Stream(rgb, d=2, u=Bit(3), c=6, s="Desync", r="Reverse", x=true, t=2.5);
type m = streamlet acc_s<type s>.count_type;
#doc string#
streamlet bypass<data_type: type, n: int> {
  const delay = type rgb.x,
  input: data_type [n] in `cd0,
  output: data_type [n] out `"10kHz",
  assert(delay == 8),
};
impl outer<ts: impl of comp> of larger<type s, (3 > 1), impl x> {
  instance inst(ts) [2],
  instance b(f<impl g<2>>),
  for i in (0=1=>2) {
    input[i] =1=> inst[i].input "name" @NoStrictType@,
    instance bypass_{{i}}(y),
  }
  if (true) { a => b, } elif (false) { } else { c => d },
  process { nested { } },
};
external impl e of s {};
impl alias(outer<impl z>);
)");
    auto r = parse_file(src);
    if (!r.ok())
        FAIL(r.diagnostics[0].message << " at " << r.diagnostics[0].position.line << ":" << r.diagnostics[0].position.column);
    check_containment(*r.root);
    CHECK(r.root->children.size() == 13);
}

TEST_CASE("syntax diagnostics name the expected construct") {
    auto src = make_source("package p;\nstreamlet s { a: Bit(1) sideways, };");
    auto r = parse_file(src);
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].message.find("expected port direction") != std::string::npos);
    CHECK(r.diagnostics[0].message.find("'sideways'") != std::string::npos);
}

TEST_CASE("project parsing keys by package and rejects duplicates") {
    auto ok = parse_sources({{"simple_0.td", "package simple_0;"}, {"simple_1.td", "package simple_1;"}}, 2);
    CHECK(ok.ok());
    CHECK(ok.packages.size() == 2);
    CHECK(ok.packages.count("simple_0") == 1);

    auto dup = parse_sources({{"a.td", "package tpch;"}, {"b.td", "package tpch;"}}, 2);
    REQUIRE_FALSE(dup.ok());
    CHECK(dup.diagnostics[0].message.find("a.td") != std::string::npos);
    CHECK(dup.diagnostics[0].message.find("b.td") != std::string::npos);

    auto bad = parse_sources({{"a.td", "package a; const = 1;"}, {"b.td", "package b; const x = ;"}}, 2);
    CHECK(bad.diagnostics.size() == 2);
}
