//------------------------------------------------------------------------------
// parser.hpp
// Tokenizer and recursive-descent parser for .td sources
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tydi/ast.hpp"
#include "tydi/source.hpp"

namespace tydi {

enum class TokenKind { Ident, Int, Float, Str, Doc, Punct, NoStrictType, End };

struct Token {
    TokenKind kind = TokenKind::End;
    Span span;
    /// Identifier/punctuation text; for Int the literal as written; for Str the raw text with quotes.
    std::string text;
    /// For Int: one of INT_RAW_NORAML / INT_RAW_BIN / INT_RAW_HEX / INT_RAW_OCT.
    NodeKind int_form = NodeKind::INT_RAW_NORAML;
};

/// Throws CompileError(syntax) on malformed input.
std::vector<Token> tokenize(const SourceFile& file);

bool is_keyword(std::string_view word);

/// Identifier syntax check: letters/digits/underscore, no leading digit, no `__`.
bool is_valid_identifier(std::string_view text);

/// Decodes a quoted string literal; accepts the escapes \" and \\ only.
std::string unescape_string_literal(std::string_view quoted);

enum class Rule { File, GroupDeclaration, UnionDeclaration, LogicalType, Exp };

struct ParseResult {
    AstPtr root;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return root != nullptr && diagnostics.empty(); }
};

/// Parses a whole file. Sets `file.package_name` on success.
ParseResult parse_file(SourceFile& file);

/// Parses a fragment of the grammar; the whole text must be consumed.
ParseResult parse_rule(const SourceFile& file, Rule rule);

struct ParsedFile {
    SourceFilePtr source;
    AstPtr root;
};

struct ProjectParseResult {
    std::map<std::string, ParsedFile> packages;
    /// Every parsed file in input order, including ones that failed.
    std::vector<ParsedFile> files;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Reads and parses every file, up to `jobs` at a time.
ProjectParseResult parse_project(const std::vector<std::string>& paths, unsigned jobs = 1);

/// Same as parse_project but with in-memory sources (path, text).
ProjectParseResult parse_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                                 unsigned jobs = 1);

} // namespace tydi
