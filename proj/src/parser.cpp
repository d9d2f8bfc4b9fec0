//------------------------------------------------------------------------------
// parser.cpp
// Tokenizer and recursive-descent parser for .td sources
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/parser.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

namespace tydi {

namespace {

constexpr std::array keywords = {
    "package", "import", "const",  "type",     "streamlet", "impl",  "external", "of",
    "instance", "in",    "out",    "if",       "elif",      "else",  "for",      "assert",
    "process", "true",   "false",  "Null",     "Bit",       "Group", "Union",    "Stream",
    "int",     "str",    "float",  "bool",     "clockdomain"};

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

class Lexer {
public:
    explicit Lexer(const SourceFile& file) : file_(file), text_(file.text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_trivia();
            if (pos_ >= text_.size()) {
                out.push_back(Token{TokenKind::End, {pos_, pos_}, "", NodeKind::INT_RAW_NORAML});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    [[noreturn]] void fail(Span span, std::string msg) {
        throw_error(DiagCategory::Syntax, &file_, span, std::move(msg));
    }

    void skip_trivia() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                std::size_t start = pos_;
                auto end = text_.find("*/", pos_ + 2);
                if (end == std::string_view::npos)
                    fail({start, text_.size()}, "unterminated block comment");
                pos_ = end + 2;
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, std::string text) {
        return Token{kind, {start, pos_}, std::move(text), NodeKind::INT_RAW_NORAML};
    }

    Token next() {
        std::size_t start = pos_;
        char c = text_[pos_];

        if (is_ident_start(c))
            return identifier();
        if (is_digit(c))
            return number();
        if (c == '"')
            return string_literal();
        if (c == '#') {
            auto end = text_.find('#', pos_ + 1);
            if (end == std::string_view::npos)
                fail({start, text_.size()}, "unterminated documentation string");
            pos_ = end + 1;
            return make(TokenKind::Doc, start, std::string(text_.substr(start + 1, end - start - 1)));
        }
        if (c == '@') {
            constexpr std::string_view marker = "@NoStrictType@";
            if (text_.substr(pos_, marker.size()) == marker) {
                pos_ += marker.size();
                return make(TokenKind::NoStrictType, start, std::string(marker));
            }
            fail({start, start + 1}, "unexpected character '@'");
        }

        static constexpr std::array<std::string_view, 9> two = {
            "=>", "==", "!=", "<=", ">=", "<<", ">>", "&&", "||"};
        for (auto op : two) {
            if (text_.substr(pos_, 2) == op) {
                pos_ += 2;
                return make(TokenKind::Punct, start, std::string(op));
            }
        }
        constexpr std::string_view singles = "=!<>&|+-*/%^~(){}[],;:.`";
        if (singles.find(c) != std::string_view::npos) {
            ++pos_;
            return make(TokenKind::Punct, start, std::string(1, c));
        }
        fail({start, start + 1}, std::string("unexpected character '") + c + "'");
    }

    Token identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            if (is_ident_char(text_[pos_])) {
                ++pos_;
            } else if (text_.substr(pos_, 2) == "{{") {
                // interpolated segment, e.g. bypass_{{i}}
                std::size_t seg = pos_;
                pos_ += 2;
                std::size_t id_start = pos_;
                while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                    ++pos_;
                if (pos_ == id_start || text_.substr(pos_, 2) != "}}" || !is_ident_start(text_[id_start]))
                    fail({seg, pos_}, "malformed interpolated identifier segment");
                pos_ += 2;
            } else {
                break;
            }
        }
        std::string text(text_.substr(start, pos_ - start));
        if (text.find("__") != std::string::npos)
            fail({start, pos_}, "identifier '" + text + "' contains consecutive underscores");
        return make(TokenKind::Ident, start, text);
    }

    Token number() {
        std::size_t start = pos_;
        NodeKind form = NodeKind::INT_RAW_NORAML;
        if (text_[pos_] == '0' && pos_ + 1 < text_.size() &&
            (text_[pos_ + 1] == 'b' || text_[pos_ + 1] == 'x' || text_[pos_ + 1] == 'o')) {
            char p = text_[pos_ + 1];
            form = p == 'b' ? NodeKind::INT_RAW_BIN : p == 'x' ? NodeKind::INT_RAW_HEX : NodeKind::INT_RAW_OCT;
            pos_ += 2;
            std::size_t digits = pos_;
            while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == digits)
                fail({start, pos_}, "integer literal has no digits");
            Token t = make(TokenKind::Int, start, std::string(text_.substr(start, pos_ - start)));
            t.int_form = form;
            return t;
        }
        while (pos_ < text_.size() && is_digit(text_[pos_]))
            ++pos_;
        bool is_float = false;
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' && is_digit(text_[pos_ + 1])) {
            is_float = true;
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_]))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && is_digit(text_[pos_])) {
                is_float = true;
                while (pos_ < text_.size() && is_digit(text_[pos_]))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        if (pos_ < text_.size() && is_ident_start(text_[pos_]))
            fail({start, pos_ + 1}, "malformed number literal");
        Token t = make(is_float ? TokenKind::Float : TokenKind::Int, start,
                       std::string(text_.substr(start, pos_ - start)));
        t.int_form = form;
        return t;
    }

    Token string_literal() {
        std::size_t start = pos_;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                if (pos_ + 1 >= text_.size() || (text_[pos_ + 1] != '"' && text_[pos_ + 1] != '\\'))
                    fail({pos_, std::min(pos_ + 2, text_.size())}, "unsupported escape sequence in string literal");
                pos_ += 2;
            } else if (text_[pos_] == '\n') {
                fail({start, pos_}, "unterminated string literal");
            } else {
                ++pos_;
            }
        }
        if (pos_ >= text_.size())
            fail({start, pos_}, "unterminated string literal");
        ++pos_;
        return make(TokenKind::Str, start, std::string(text_.substr(start, pos_ - start)));
    }

    const SourceFile& file_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

using NodeList = std::vector<AstPtr>;

AstPtr node(NodeKind kind, Span span, NodeList children = {}, std::string text = {}) {
    auto n = std::make_shared<AstNode>();
    n->kind = kind;
    n->span = span;
    n->children = std::move(children);
    n->text = std::move(text);
    return n;
}

class Parser {
public:
    Parser(const SourceFile& file, std::vector<Token> tokens) : file_(file), toks_(std::move(tokens)) {}

    AstPtr file() {
        std::size_t start = cur().span.start;
        expect_keyword("package", "'package' declaration as the first statement");
        AstPtr name = ident();
        package_name_ = name->text;
        expect(";");
        NodeList stmts;
        while (!at_end())
            stmts.push_back(statement());
        std::size_t end = stmts.empty() ? prev_end_ : stmts.back()->span.end;
        return node(NodeKind::Package, {start, end}, std::move(stmts), package_name_);
    }

    AstPtr fragment(Rule rule) {
        AstPtr out;
        switch (rule) {
            case Rule::File: return file();
            case Rule::GroupDeclaration: out = group_or_union(); break;
            case Rule::UnionDeclaration: out = group_or_union(); break;
            case Rule::LogicalType: out = logical_type(); break;
            case Rule::Exp: out = exp(false); break;
        }
        if (!at_end())
            fail_expected("end of input");
        return out;
    }

    const std::string& package_name() const { return package_name_; }

private:
    // ---- token helpers ----
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n = 1) const { return toks_[std::min(pos_ + n, toks_.size() - 1)]; }
    bool at_end() const { return cur().kind == TokenKind::End; }

    bool is_punct(std::string_view p) const { return cur().kind == TokenKind::Punct && cur().text == p; }
    bool is_word(std::string_view w) const { return cur().kind == TokenKind::Ident && cur().text == w; }

    const Token& advance() {
        const Token& t = toks_[pos_];
        prev_end_ = t.span.end;
        if (pos_ + 1 < toks_.size())
            ++pos_;
        return t;
    }

    bool accept(std::string_view p) {
        if (is_punct(p)) {
            advance();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail_expected(std::string_view what) {
        std::string found = at_end() ? "end of file" : "'" + cur().text + "'";
        if (cur().kind == TokenKind::Str || cur().kind == TokenKind::Doc)
            found = "'" + std::string(file_.slice(cur().span)) + "'";
        throw_error(DiagCategory::Syntax, &file_, cur().span,
                    "expected " + std::string(what) + ", found " + found);
    }

    const Token& expect(std::string_view p) {
        if (!is_punct(p))
            fail_expected("'" + std::string(p) + "'");
        return advance();
    }

    void expect_keyword(std::string_view w, std::string_view what) {
        if (!is_word(w))
            fail_expected(what);
        advance();
    }

    /// Closing '>' of a template list; splits a '>>' token.
    void expect_close_angle() {
        if (is_punct(">>")) {
            Token& t = toks_[pos_];
            prev_end_ = t.span.start + 1;
            t.text = ">";
            t.span.start += 1;
            return;
        }
        if (is_punct(">=")) {
            Token& t = toks_[pos_];
            prev_end_ = t.span.start + 1;
            t.text = "=";
            t.span.start += 1;
            return;
        }
        expect(">");
    }

    AstPtr ident() {
        if (cur().kind != TokenKind::Ident || is_keyword(cur().text))
            fail_expected("identifier");
        const Token& t = advance();
        return node(NodeKind::ID, t.span, {}, t.text);
    }

    bool at_ident() const { return cur().kind == TokenKind::Ident && !is_keyword(cur().text); }

    // ---- top level ----
    AstPtr statement() {
        std::size_t start = cur().span.start;
        if (is_word("import")) {
            advance();
            AstPtr id = ident();
            expect(";");
            return node(NodeKind::Import, {start, prev_end_}, {id});
        }
        if (is_word("const"))
            return const_decl(";");
        if (is_word("type"))
            return type_decl(";");

        AstPtr doc;
        if (cur().kind == TokenKind::Doc) {
            const Token& t = advance();
            doc = node(NodeKind::DOC, t.span, {}, t.text);
        }
        if (is_word("streamlet"))
            return streamlet(start, doc);
        if (is_word("external") || is_word("impl"))
            return implement(start, doc);
        fail_expected(doc ? "'streamlet' or 'impl' after documentation"
                          : "'import', 'const', 'type', 'streamlet' or 'impl'");
    }

    // Items inside braces end with ',' or directly at '}'.
    void item_separator() {
        if (accept(","))
            return;
        if (!is_punct("}"))
            fail_expected("',' or '}'");
    }

    AstPtr const_decl(std::string_view terminator) {
        std::size_t start = cur().span.start;
        expect_keyword("const", "'const'");
        NodeList kids;
        kids.push_back(ident());
        bool is_clockdomain = false;
        if (accept(":")) {
            std::size_t ts = cur().span.start;
            std::string text;
            if (accept("[")) {
                text = "[" + type_indicator_word() + "]";
                expect("]");
            } else {
                text = type_indicator_word();
            }
            is_clockdomain = text == "clockdomain";
            kids.push_back(node(NodeKind::TypeIndicator, {ts, prev_end_}, {}, text));
        }
        if (accept("=")) {
            kids.push_back(exp(false));
        } else if (!is_clockdomain) {
            fail_expected("'=' and an initializer");
        }
        if (terminator == ";")
            expect(";");
        else
            item_separator();
        return node(NodeKind::ConstDecl, {start, prev_end_}, std::move(kids));
    }

    std::string type_indicator_word() {
        static constexpr std::array<std::string_view, 5> kinds = {"int", "str", "float", "bool", "clockdomain"};
        for (auto k : kinds) {
            if (is_word(k)) {
                advance();
                return std::string(k);
            }
        }
        fail_expected("value kind (int, str, float, bool, clockdomain)");
    }

    AstPtr type_decl(std::string_view terminator) {
        std::size_t start = cur().span.start;
        expect_keyword("type", "'type'");
        NodeList kids;
        if (is_word("Group") || is_word("Union")) {
            kids.push_back(group_or_union());
        } else {
            kids.push_back(ident());
            expect("=");
            kids.push_back(logical_type());
        }
        if (terminator == ";")
            expect(";");
        else
            item_separator();
        return node(NodeKind::TypeDeclaration, {start, prev_end_}, std::move(kids));
    }

    AstPtr group_or_union() {
        std::size_t start = cur().span.start;
        NodeKind kind;
        if (is_word("Group"))
            kind = NodeKind::LogicalGroupType;
        else if (is_word("Union"))
            kind = NodeKind::LogicalUnionType;
        else
            fail_expected("'Group' or 'Union'");
        advance();
        NodeList kids;
        kids.push_back(ident());
        expect("{");
        while (!is_punct("}")) {
            if (is_word("const")) {
                kids.push_back(const_decl(","));
                continue;
            }
            std::size_t is = cur().span.start;
            AstPtr id = ident();
            expect(":");
            AstPtr lt = logical_type();
            item_separator();
            kids.push_back(node(NodeKind::SubItemItem, {is, prev_end_}, {id, lt}));
        }
        expect("}");
        return node(kind, {start, prev_end_}, std::move(kids));
    }

    AstPtr logical_type() {
        std::size_t start = cur().span.start;
        AstPtr inner;
        if (is_word("Null")) {
            advance();
            inner = node(NodeKind::LogicalNullType, {start, prev_end_});
        } else if (is_word("Bit")) {
            advance();
            expect("(");
            AstPtr e = exp(false);
            expect(")");
            inner = node(NodeKind::LogicalBitType, {start, prev_end_}, {e});
        } else if (is_word("Stream")) {
            inner = stream_type();
        } else if (is_word("Group") || is_word("Union")) {
            inner = group_or_union();
        } else if (is_word("streamlet") || is_word("impl") || is_word("type")) {
            inner = member_access();
        } else {
            NodeList ids;
            ids.push_back(ident());
            if (accept("."))
                ids.push_back(ident());
            inner = node(NodeKind::LogicalUserDefinedType, {start, prev_end_}, std::move(ids));
        }
        return node(NodeKind::LogicalType, inner->span, {inner});
    }

    AstPtr stream_type() {
        std::size_t start = cur().span.start;
        advance(); // Stream
        expect("(");
        NodeList kids;
        kids.push_back(logical_type());
        while (is_punct(",")) {
            std::size_t ps = cur().span.start;
            advance();
            if (cur().kind != TokenKind::Ident)
                fail_expected("stream property (d, u, t, s, c, r, x)");
            std::string prop = cur().text;
            NodeKind kind;
            if (prop == "d")
                kind = NodeKind::StreamPropertyDimension;
            else if (prop == "u")
                kind = NodeKind::StreamPropertyUserType;
            else if (prop == "t")
                kind = NodeKind::StreamPropertyThroughput;
            else if (prop == "s")
                kind = NodeKind::StreamPropertySynchronicity;
            else if (prop == "c")
                kind = NodeKind::StreamPropertyComplexity;
            else if (prop == "r")
                kind = NodeKind::StreamPropertyDirection;
            else if (prop == "x")
                kind = NodeKind::StreamPropertyKeep;
            else
                fail_expected("stream property (d, u, t, s, c, r, x)");
            advance();
            expect("=");
            AstPtr value = kind == NodeKind::StreamPropertyUserType ? logical_type() : exp(false);
            kids.push_back(node(kind, {ps, prev_end_}, {value}));
        }
        expect(")");
        return node(NodeKind::LogicalStreamType, {start, prev_end_}, std::move(kids));
    }

    // streamlet s<args>.m / impl i<args>.m / type t.m
    AstPtr member_access() {
        std::size_t start = cur().span.start;
        const Token& kw = advance();
        AstPtr owner_kind = node(NodeKind::MemberOwnerKind, kw.span, {}, kw.text);
        std::size_t os = cur().span.start;
        NodeList path;
        path.push_back(ident());
        while (is_punct(".") && peek().kind == TokenKind::Ident) {
            advance();
            path.push_back(ident());
            if (is_punct("<"))
                break;
        }
        NodeList owner_kids;
        AstPtr member;
        if (is_punct("<")) {
            if (path.size() > 2)
                throw_error(DiagCategory::Syntax, &file_, {os, prev_end_}, "malformed member owner path");
            owner_kids = path;
            owner_kids.push_back(template_args());
            expect(".");
            member = ident();
        } else {
            if (path.size() < 2)
                fail_expected("'.' and a member name");
            if (path.size() > 3)
                throw_error(DiagCategory::Syntax, &file_, {os, prev_end_}, "malformed member owner path");
            member = path.back();
            path.pop_back();
            owner_kids = path;
        }
        std::size_t oe = owner_kids.back()->span.end;
        AstPtr owner = node(NodeKind::TemplateInstance, {os, oe}, std::move(owner_kids));
        return node(NodeKind::MemberAccess, {start, prev_end_}, {owner_kind, owner, member});
    }

    AstPtr template_instance() {
        std::size_t start = cur().span.start;
        NodeList kids;
        kids.push_back(ident());
        if (accept("."))
            kids.push_back(ident());
        if (is_punct("<"))
            kids.push_back(template_args());
        return node(NodeKind::TemplateInstance, {start, prev_end_}, std::move(kids));
    }

    AstPtr template_args() {
        std::size_t start = cur().span.start;
        expect("<");
        NodeList args;
        if (!is_punct(">") && !is_punct(">>")) {
            while (true) {
                std::size_t as = cur().span.start;
                if (is_word("type")) {
                    advance();
                    AstPtr lt = logical_type();
                    args.push_back(node(NodeKind::TemplateArgType, {as, prev_end_}, {lt}));
                } else if (is_word("impl")) {
                    advance();
                    AstPtr ti = template_instance();
                    args.push_back(node(NodeKind::TemplateArgImpl, {as, prev_end_}, {ti}));
                } else {
                    AstPtr e = exp(true);
                    args.push_back(node(NodeKind::TemplateArgExp, e->span, {e}));
                }
                if (!accept(","))
                    break;
            }
        }
        expect_close_angle();
        return node(NodeKind::TemplateArgs, {start, prev_end_}, std::move(args));
    }

    AstPtr template_params() {
        std::size_t start = cur().span.start;
        expect("<");
        NodeList params;
        while (true) {
            std::size_t ps = cur().span.start;
            AstPtr id = ident();
            expect(":");
            std::size_t ks = cur().span.start;
            AstPtr kind;
            if (is_word("type")) {
                advance();
                kind = node(NodeKind::ParamKind, {ks, prev_end_}, {}, "type");
            } else if (is_word("impl")) {
                advance();
                expect_keyword("of", "'of' after 'impl'");
                AstPtr ti = template_instance();
                kind = node(NodeKind::ParamKind, {ks, prev_end_}, {ti}, "impl");
            } else {
                std::string word = type_indicator_word();
                kind = node(NodeKind::ParamKind, {ks, prev_end_}, {}, word);
            }
            params.push_back(node(NodeKind::TemplateParam, {ps, prev_end_}, {id, kind}));
            if (!accept(","))
                break;
        }
        expect_close_angle();
        return node(NodeKind::TemplateParams, {start, prev_end_}, std::move(params));
    }

    AstPtr streamlet(std::size_t start, AstPtr doc) {
        advance(); // streamlet
        NodeList kids;
        if (doc)
            kids.push_back(doc);
        kids.push_back(ident());
        if (is_punct("<"))
            kids.push_back(template_params());
        expect("{");
        while (!is_punct("}")) {
            if (is_word("const"))
                kids.push_back(const_decl(","));
            else if (is_word("type"))
                kids.push_back(type_decl(","));
            else if (is_word("assert"))
                kids.push_back(assertion());
            else
                kids.push_back(port());
        }
        expect("}");
        expect(";");
        return node(NodeKind::Streamlet, {start, prev_end_}, std::move(kids));
    }

    AstPtr assertion() {
        std::size_t start = cur().span.start;
        advance();
        expect("(");
        AstPtr e = exp(false);
        expect(")");
        item_separator();
        return node(NodeKind::Assert, {start, prev_end_}, {e});
    }

    AstPtr array_size() {
        std::size_t start = cur().span.start;
        expect("[");
        AstPtr e = exp(false);
        expect("]");
        return node(NodeKind::ArraySize, {start, prev_end_}, {e});
    }

    AstPtr port() {
        std::size_t start = cur().span.start;
        NodeList kids;
        kids.push_back(ident());
        expect(":");
        kids.push_back(logical_type());
        if (is_punct("["))
            kids.push_back(array_size());
        if (is_word("in") || is_word("out")) {
            const Token& t = advance();
            kids.push_back(node(NodeKind::PortDirection, t.span, {}, t.text));
        } else {
            fail_expected("port direction 'in' or 'out'");
        }
        if (is_punct("`")) {
            std::size_t cs = cur().span.start;
            advance();
            AstPtr t = term(false);
            kids.push_back(node(NodeKind::ClockDomainRef, {cs, prev_end_}, {t}));
        }
        item_separator();
        return node(NodeKind::Port, {start, prev_end_}, std::move(kids));
    }

    AstPtr implement(std::size_t start, AstPtr doc) {
        NodeList kids;
        if (doc)
            kids.push_back(doc);
        if (is_word("external")) {
            const Token& t = advance();
            kids.push_back(node(NodeKind::External, t.span));
        }
        expect_keyword("impl", "'impl'");
        kids.push_back(ident());
        if (is_punct("(")) {
            advance();
            kids.push_back(template_instance());
            expect(")");
            expect(";");
            return node(NodeKind::ImplementAlias, {start, prev_end_}, std::move(kids));
        }
        if (is_punct("<"))
            kids.push_back(template_params());
        expect_keyword("of", "'of' and a streamlet");
        kids.push_back(template_instance());
        expect("{");
        impl_items(kids);
        expect("}");
        expect(";");
        return node(NodeKind::Implement, {start, prev_end_}, std::move(kids));
    }

    void impl_items(NodeList& kids) {
        while (!is_punct("}")) {
            if (at_end())
                fail_expected("'}'");
            if (is_word("instance"))
                kids.push_back(instance());
            else if (is_word("const"))
                kids.push_back(const_decl(","));
            else if (is_word("type"))
                kids.push_back(type_decl(","));
            else if (is_word("assert"))
                kids.push_back(assertion());
            else if (is_word("if"))
                kids.push_back(if_block());
            else if (is_word("for"))
                kids.push_back(for_block());
            else if (is_word("process"))
                kids.push_back(process_block());
            else
                kids.push_back(connection());
        }
    }

    AstPtr instance() {
        std::size_t start = cur().span.start;
        advance();
        NodeList kids;
        kids.push_back(ident());
        expect("(");
        kids.push_back(template_instance());
        expect(")");
        if (is_punct("["))
            kids.push_back(array_size());
        item_separator();
        return node(NodeKind::Instance, {start, prev_end_}, std::move(kids));
    }

    AstPtr port_ref() {
        std::size_t start = cur().span.start;
        NodeList kids;
        kids.push_back(ident());
        if (is_punct("["))
            kids.push_back(array_size());
        while (accept(".")) {
            kids.push_back(ident());
            if (is_punct("["))
                kids.push_back(array_size());
        }
        return node(NodeKind::PortRef, {start, prev_end_}, std::move(kids));
    }

    AstPtr connection() {
        std::size_t start = cur().span.start;
        if (!at_ident())
            fail_expected("implementation item (instance, connection, const, type, assert, if, for, process)");
        NodeList kids;
        kids.push_back(port_ref());
        if (is_punct("=")) {
            std::size_t fs = cur().span.start;
            advance();
            AstPtr e = exp(false);
            expect("=>");
            kids.push_back(node(NodeKind::FifoDepth, {fs, prev_end_}, {e}));
        } else {
            expect("=>");
        }
        kids.push_back(port_ref());
        if (cur().kind == TokenKind::Str) {
            const Token& t = advance();
            kids.push_back(node(NodeKind::ConnectionName, t.span, {node(NodeKind::STR, t.span, {}, t.text)}));
        }
        if (cur().kind == TokenKind::NoStrictType) {
            const Token& t = advance();
            kids.push_back(node(NodeKind::NoStrictType, t.span));
        }
        item_separator();
        return node(NodeKind::Connection, {start, prev_end_}, std::move(kids));
    }

    AstPtr block_body(NodeKind kind, std::size_t start, NodeList kids) {
        expect("{");
        impl_items(kids);
        expect("}");
        return node(kind, {start, prev_end_}, std::move(kids));
    }

    AstPtr if_block() {
        std::size_t start = cur().span.start;
        NodeList branches;
        {
            std::size_t bs = cur().span.start;
            advance();
            expect("(");
            AstPtr cond = exp(false);
            expect(")");
            branches.push_back(block_body(NodeKind::IfBranch, bs, {cond}));
        }
        while (is_word("elif")) {
            std::size_t bs = cur().span.start;
            advance();
            expect("(");
            AstPtr cond = exp(false);
            expect(")");
            branches.push_back(block_body(NodeKind::ElifBranch, bs, {cond}));
        }
        if (is_word("else")) {
            std::size_t bs = cur().span.start;
            advance();
            branches.push_back(block_body(NodeKind::ElseBranch, bs, {}));
        }
        accept(",");
        return node(NodeKind::IfBlock, {start, prev_end_}, std::move(branches));
    }

    AstPtr for_block() {
        std::size_t start = cur().span.start;
        advance();
        AstPtr var = ident();
        expect_keyword("in", "'in'");
        AstPtr iter = exp(false);
        AstPtr out = block_body(NodeKind::ForBlock, start, {var, iter});
        if (accept(","))
            return node(NodeKind::ForBlock, {start, prev_end_}, out->children);
        return out;
    }

    AstPtr process_block() {
        std::size_t start = cur().span.start;
        advance();
        const Token& open = expect("{");
        int depth = 1;
        std::size_t body_start = open.span.end;
        std::size_t body_end = body_start;
        while (depth > 0) {
            if (at_end())
                fail_expected("'}' closing the process block");
            if (is_punct("{"))
                ++depth;
            if (is_punct("}")) {
                --depth;
                if (depth == 0)
                    body_end = cur().span.start;
            }
            advance();
        }
        std::string body(file_.slice({body_start, body_end}));
        accept(",");
        return node(NodeKind::ProcessBlock, {start, prev_end_}, {}, body);
    }

    // ---- expressions ----
    bool at_infix(bool no_gt) const {
        if (cur().kind != TokenKind::Punct)
            return false;
        static constexpr std::array<std::string_view, 17> ops = {
            "+", "-", "*", "/", "%", "^", "<<", ">>", "<", ">", "<=", ">=", "==", "!=", "&", "|", "&&"};
        const std::string& t = cur().text;
        if (t == "||")
            return true;
        if (no_gt && (t == ">" || t == ">>" || t == ">="))
            return false;
        return std::find(ops.begin(), ops.end(), t) != ops.end();
    }

    AstPtr chain(bool no_gt) {
        NodeList kids;
        kids.push_back(term(no_gt));
        while (at_infix(no_gt)) {
            const Token& t = advance();
            kids.push_back(node(NodeKind::InfixOp, t.span, {}, t.text));
            kids.push_back(term(no_gt));
        }
        Span span{kids.front()->span.start, kids.back()->span.end};
        return node(NodeKind::Exp, span, std::move(kids));
    }

    AstPtr exp(bool no_gt) {
        AstPtr first = chain(no_gt);
        if (is_punct("=")) {
            // range: start =step=> end
            advance();
            AstPtr step = chain(no_gt);
            expect("=>");
            AstPtr last = chain(no_gt);
            Span span{first->span.start, last->span.end};
            AstPtr range = node(NodeKind::RangeExp, span, {first, step, last});
            return node(NodeKind::Exp, span, {range});
        }
        return first;
    }

    AstPtr wrap_term(AstPtr inner) {
        Span s = inner->span;
        return node(NodeKind::Term, s, {std::move(inner)});
    }

    AstPtr term(bool no_gt) {
        std::size_t start = cur().span.start;
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Int: {
                advance();
                AstPtr raw = node(t.int_form, t.span, {}, t.text);
                return wrap_term(node(NodeKind::IntExp, t.span, {raw}));
            }
            case TokenKind::Float: {
                advance();
                AstPtr raw = node(NodeKind::FLOAT, t.span, {}, t.text);
                return wrap_term(node(NodeKind::FloatExp, t.span, {raw}));
            }
            case TokenKind::Str: {
                advance();
                AstPtr raw = node(NodeKind::STR, t.span, {}, t.text);
                return wrap_term(node(NodeKind::StringExp, t.span, {raw}));
            }
            case TokenKind::Punct: {
                if (t.text == "(") {
                    advance();
                    AstPtr e = exp(false);
                    expect(")");
                    return node(NodeKind::Term, {start, prev_end_}, {e});
                }
                if (t.text == "-" || t.text == "!" || t.text == "~") {
                    advance();
                    AstPtr op = node(NodeKind::UnaryOp, t.span, {}, t.text);
                    AstPtr operand = term(no_gt);
                    return wrap_term(node(NodeKind::UnaryExp, {start, prev_end_}, {op, operand}));
                }
                if (t.text == "{") {
                    advance();
                    NodeList items;
                    if (!is_punct("}")) {
                        while (true) {
                            items.push_back(exp(false));
                            if (!accept(","))
                                break;
                        }
                    }
                    expect("}");
                    return wrap_term(node(NodeKind::ArrayExp, {start, prev_end_}, std::move(items)));
                }
                break;
            }
            case TokenKind::Ident: {
                if (t.text == "true" || t.text == "false") {
                    advance();
                    AstPtr raw = node(NodeKind::BOOL, t.span, {}, t.text);
                    return wrap_term(node(NodeKind::BoolExp, t.span, {raw}));
                }
                if (t.text == "streamlet" || t.text == "impl" || t.text == "type")
                    return wrap_term(member_access());
                if (is_keyword(t.text))
                    break;
                bool call = peek().kind == TokenKind::Punct && peek().text == "(";
                if (call && (t.text == "round" || t.text == "floor" || t.text == "ceil")) {
                    advance();
                    AstPtr name = node(NodeKind::FunctionName, t.span, {}, t.text);
                    expect("(");
                    AstPtr arg = exp(false);
                    expect(")");
                    return wrap_term(node(NodeKind::FunctionExp, {start, prev_end_}, {name, arg}));
                }
                if (call && t.text.size() > 3 && t.text.starts_with("log") &&
                    std::all_of(t.text.begin() + 3, t.text.end(), is_digit)) {
                    // log2(x), log10(x): base folded into the name
                    advance();
                    std::string digits = t.text.substr(3);
                    Span bs{t.span.start + 3, t.span.end};
                    AstPtr base = node(NodeKind::Term, bs,
                                       {node(NodeKind::IntExp, bs, {node(NodeKind::INT_RAW_NORAML, bs, {}, digits)})});
                    expect("(");
                    AstPtr arg = exp(false);
                    expect(")");
                    return wrap_term(node(NodeKind::LogExp, {start, prev_end_}, {base, arg}));
                }
                if (t.text == "log" && !call) {
                    // log <base> (<arg>)
                    advance();
                    AstPtr base = term(no_gt);
                    expect("(");
                    AstPtr arg = exp(false);
                    expect(")");
                    return wrap_term(node(NodeKind::LogExp, {start, prev_end_}, {base, arg}));
                }
                NodeList ids;
                ids.push_back(ident());
                if (is_punct(".") && peek().kind == TokenKind::Ident) {
                    advance();
                    ids.push_back(ident());
                }
                AstPtr id_exp = node(NodeKind::IdentifierExp, {start, prev_end_}, std::move(ids));
                if (is_punct("[")) {
                    advance();
                    AstPtr index = exp(false);
                    expect("]");
                    return wrap_term(node(NodeKind::IndexExp, {start, prev_end_}, {id_exp, index}));
                }
                return wrap_term(id_exp);
            }
            default: break;
        }
        fail_expected("expression");
    }

    const SourceFile& file_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t prev_end_ = 0;
    std::string package_name_;
};

} // namespace

bool is_keyword(std::string_view word) {
    return std::find(keywords.begin(), keywords.end(), word) != keywords.end();
}

bool is_valid_identifier(std::string_view text) {
    if (text.empty() || !is_ident_start(text[0]))
        return false;
    if (!std::all_of(text.begin(), text.end(), is_ident_char))
        return false;
    return text.find("__") == std::string_view::npos && !is_keyword(text);
}

std::string unescape_string_literal(std::string_view quoted) {
    std::string out;
    if (quoted.size() < 2)
        return out;
    for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
        if (quoted[i] == '\\' && i + 2 < quoted.size())
            ++i;
        out += quoted[i];
    }
    return out;
}

std::vector<Token> tokenize(const SourceFile& file) {
    return Lexer(file).run();
}

ParseResult parse_file(SourceFile& file) {
    ParseResult result;
    try {
        Parser p(file, tokenize(file));
        result.root = p.file();
        file.package_name = p.package_name();
    } catch (const CompileError& e) {
        result.diagnostics.push_back(e.diagnostic());
    }
    return result;
}

ParseResult parse_rule(const SourceFile& file, Rule rule) {
    ParseResult result;
    try {
        Parser p(file, tokenize(file));
        result.root = p.fragment(rule);
    } catch (const CompileError& e) {
        result.diagnostics.push_back(e.diagnostic());
    }
    return result;
}

ProjectParseResult parse_sources(const std::vector<std::pair<std::string, std::string>>& sources, unsigned jobs) {
    std::vector<std::shared_ptr<SourceFile>> files;
    for (auto& [path, text] : sources) {
        auto f = std::make_shared<SourceFile>();
        f->path = path;
        f->text = text;
        files.push_back(std::move(f));
    }
    std::vector<ParseResult> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++)
            results[i] = parse_file(*files[i]);
    };
    unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    std::vector<std::thread> threads;
    for (unsigned i = 1; i < n; ++i)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();

    ProjectParseResult out;
    std::map<std::string, std::string> owner_path;
    for (std::size_t i = 0; i < files.size(); ++i) {
        ParsedFile pf{files[i], results[i].root};
        out.files.push_back(pf);
        for (auto& d : results[i].diagnostics)
            out.diagnostics.push_back(d);
        if (!results[i].root)
            continue;
        const std::string& pkg = files[i]->package_name;
        auto [it, inserted] = owner_path.emplace(pkg, files[i]->path);
        if (!inserted) {
            Diagnostic d = make_diagnostic(DiagCategory::Resolution, files[i].get(), {0, 0},
                                           "duplicate package '" + pkg + "' declared in '" + it->second +
                                               "' and '" + files[i]->path + "'");
            out.diagnostics.push_back(d);
            continue;
        }
        out.packages.emplace(pkg, pf);
    }
    return out;
}

ProjectParseResult parse_project(const std::vector<std::string>& paths, unsigned jobs) {
    std::vector<std::pair<std::string, std::string>> sources;
    ProjectParseResult failures;
    for (auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            Diagnostic d;
            d.category = DiagCategory::Io;
            d.file = p;
            d.message = "cannot read source file '" + p + "'";
            failures.diagnostics.push_back(d);
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        sources.emplace_back(p, ss.str());
    }
    ProjectParseResult out = parse_sources(sources, jobs);
    out.diagnostics.insert(out.diagnostics.begin(), failures.diagnostics.begin(), failures.diagnostics.end());
    return out;
}

} // namespace tydi
