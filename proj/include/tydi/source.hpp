//------------------------------------------------------------------------------
// source.hpp
// Source files, byte spans and compiler diagnostics
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tydi {

/// Half-open byte range [start, end) into a source file.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
    friend bool operator==(const Span&, const Span&) = default;
};

struct SourceFile {
    std::string path;
    std::string text;
    /// Filled in by the parser from the leading `package <id>;` statement.
    std::string package_name;

    std::string_view slice(Span span) const {
        return std::string_view(text).substr(span.start, span.end - span.start);
    }
};

using SourceFilePtr = std::shared_ptr<const SourceFile>;

/// 1-based line/column of a byte offset.
struct LineColumn {
    std::size_t line = 1;
    std::size_t column = 1;
};

LineColumn line_column(std::string_view text, std::size_t offset);

enum class DiagCategory { Syntax, Resolution, Type, Assertion, Drc, Io, Internal };

std::string_view to_string(DiagCategory category);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagCategory category = DiagCategory::Internal;
    std::string file;   // may be empty for project-level errors
    Span span;
    std::string message;
    std::vector<std::string> notes;
    // Line/column are computed when the file text is known.
    LineColumn position;
};

Diagnostic make_diagnostic(DiagCategory category, const SourceFile* file, Span span, std::string message);

/// Thrown by evaluation stages; carries a fully-formed diagnostic.
class CompileError : public std::runtime_error {
public:
    explicit CompileError(Diagnostic diag) : std::runtime_error(diag.message), diag_(std::move(diag)) {}

    const Diagnostic& diagnostic() const { return diag_; }
    Diagnostic& diagnostic() { return diag_; }

private:
    Diagnostic diag_;
};

[[noreturn]] void throw_error(DiagCategory category, const SourceFile* file, Span span, std::string message);

} // namespace tydi
