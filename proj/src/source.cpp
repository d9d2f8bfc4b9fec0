//------------------------------------------------------------------------------
// source.cpp
// Source files, byte spans and compiler diagnostics
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/source.hpp"

namespace tydi {

LineColumn line_column(std::string_view text, std::size_t offset) {
    LineColumn lc;
    if (offset > text.size())
        offset = text.size();
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.column = 1;
        } else {
            ++lc.column;
        }
    }
    return lc;
}

std::string_view to_string(DiagCategory category) {
    switch (category) {
        case DiagCategory::Syntax: return "syntax";
        case DiagCategory::Resolution: return "resolution";
        case DiagCategory::Type: return "type";
        case DiagCategory::Assertion: return "assertion";
        case DiagCategory::Drc: return "drc";
        case DiagCategory::Io: return "io";
        case DiagCategory::Internal: return "internal";
    }
    return "internal";
}

Diagnostic make_diagnostic(DiagCategory category, const SourceFile* file, Span span, std::string message) {
    Diagnostic d;
    d.category = category;
    d.span = span;
    d.message = std::move(message);
    if (file) {
        d.file = file->path;
        d.position = line_column(file->text, span.start);
    }
    return d;
}

void throw_error(DiagCategory category, const SourceFile* file, Span span, std::string message) {
    throw CompileError(make_diagnostic(category, file, span, std::move(message)));
}

} // namespace tydi
