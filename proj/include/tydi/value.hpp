//------------------------------------------------------------------------------
// value.hpp
// Constant-variable values and the operator semantics of the math engine
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tydi {

struct Implementation;

enum class ValueKind { Int, Str, Float, Bool, ClockDomain, Array, Impl };

std::string_view to_string(ValueKind kind);
/// Parses `int`, `str`, `float`, `bool`, `clockdomain`.
std::optional<ValueKind> parse_value_kind(std::string_view word);

struct Value {
    ValueKind kind = ValueKind::Int;
    std::int64_t i = 0;
    double f = 0.0;
    bool b = false;
    /// Str payload, or the clockdomain expression.
    std::string s;
    /// The compiler-provided clockdomain of ports without an annotation.
    bool default_cd = false;
    /// Element kind of an array; meaningful only when kind == Array.
    ValueKind elem = ValueKind::Int;
    std::vector<Value> items;
    const Implementation* impl = nullptr;

    static Value of_int(std::int64_t v);
    static Value of_float(double v);
    static Value of_bool(bool v);
    static Value of_str(std::string v);
    static Value of_clockdomain(std::string expr);
    static Value default_clockdomain();
    static Value of_array(ValueKind elem, std::vector<Value> items);
    static Value of_impl(const Implementation* impl);

    bool is_numeric() const { return kind == ValueKind::Int || kind == ValueKind::Float; }
    double as_double() const { return kind == ValueKind::Int ? static_cast<double>(i) : f; }
};

bool operator==(const Value& a, const Value& b);

/// Shortest text that round-trips to the same double.
std::string format_float(double v);

/// Quoted string with `"` and `\` escaped.
std::string quote_string(std::string_view s);

/// Kind label used in dumps: int, str, float, bool, clockdomain, array<int>, impl.
std::string kind_label(const Value& v);

/// Dump form, e.g. `int(101)`, `str("a")`, `array<int>({1, 2})`.
std::string dump_value(const Value& v);

/// Plain text of a value: digits for numbers, raw text for strings and clockdomains.
std::string value_text(const Value& v);

/// Thrown by operator semantics; callers attach a source location.
class MathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Value apply_unary(std::string_view op, const Value& v);
Value apply_binary(std::string_view op, const Value& a, const Value& b);
/// round / floor / ceil
Value apply_function(std::string_view name, const Value& v);
Value apply_log(const Value& base, const Value& arg);
/// Half-open range [start, end) walked by `step`.
Value make_range(const Value& start, const Value& step, const Value& end);
Value make_array(std::vector<Value> items);
Value index_array(const Value& array, const Value& index);

/// Implementation name of an Impl value; set by the model.
std::string impl_value_name(const Value& v);

} // namespace tydi
