//------------------------------------------------------------------------------
// value.cpp
// Constant-variable values and the operator semantics of the math engine
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/value.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace tydi {

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Int: return "int";
        case ValueKind::Str: return "str";
        case ValueKind::Float: return "float";
        case ValueKind::Bool: return "bool";
        case ValueKind::ClockDomain: return "clockdomain";
        case ValueKind::Array: return "array";
        case ValueKind::Impl: return "impl";
    }
    return "?";
}

std::optional<ValueKind> parse_value_kind(std::string_view word) {
    if (word == "int")
        return ValueKind::Int;
    if (word == "str")
        return ValueKind::Str;
    if (word == "float")
        return ValueKind::Float;
    if (word == "bool")
        return ValueKind::Bool;
    if (word == "clockdomain")
        return ValueKind::ClockDomain;
    return std::nullopt;
}

Value Value::of_int(std::int64_t v) {
    Value out;
    out.kind = ValueKind::Int;
    out.i = v;
    return out;
}

Value Value::of_float(double v) {
    Value out;
    out.kind = ValueKind::Float;
    out.f = v;
    return out;
}

Value Value::of_bool(bool v) {
    Value out;
    out.kind = ValueKind::Bool;
    out.b = v;
    return out;
}

Value Value::of_str(std::string v) {
    Value out;
    out.kind = ValueKind::Str;
    out.s = std::move(v);
    return out;
}

Value Value::of_clockdomain(std::string expr) {
    Value out;
    out.kind = ValueKind::ClockDomain;
    out.s = std::move(expr);
    return out;
}

Value Value::default_clockdomain() {
    Value out;
    out.kind = ValueKind::ClockDomain;
    out.default_cd = true;
    return out;
}

Value Value::of_array(ValueKind elem, std::vector<Value> items) {
    Value out;
    out.kind = ValueKind::Array;
    out.elem = elem;
    out.items = std::move(items);
    return out;
}

Value Value::of_impl(const Implementation* impl) {
    Value out;
    out.kind = ValueKind::Impl;
    out.impl = impl;
    return out;
}

bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
        case ValueKind::Int: return a.i == b.i;
        case ValueKind::Float: return a.f == b.f;
        case ValueKind::Bool: return a.b == b.b;
        case ValueKind::Str: return a.s == b.s;
        case ValueKind::ClockDomain: return a.default_cd == b.default_cd && a.s == b.s;
        case ValueKind::Array: return a.elem == b.elem && a.items == b.items;
        case ValueKind::Impl: return a.impl == b.impl;
    }
    return false;
}

std::string format_float(double v) {
    if (std::isnan(v))
        return "NaN";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string quote_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string kind_label(const Value& v) {
    if (v.kind == ValueKind::Array)
        return "array<" + std::string(to_string(v.elem)) + ">";
    return std::string(to_string(v.kind));
}

std::string value_text(const Value& v) {
    switch (v.kind) {
        case ValueKind::Int: return std::to_string(v.i);
        case ValueKind::Float: return format_float(v.f);
        case ValueKind::Bool: return v.b ? "true" : "false";
        case ValueKind::Str: return v.s;
        case ValueKind::ClockDomain: return v.default_cd ? "DefaultClockDomain" : v.s;
        case ValueKind::Impl: return impl_value_name(v);
        case ValueKind::Array: {
            std::string out = "{";
            for (std::size_t k = 0; k < v.items.size(); ++k) {
                if (k)
                    out += ", ";
                out += v.items[k].kind == ValueKind::Str ? quote_string(v.items[k].s) : value_text(v.items[k]);
            }
            return out + "}";
        }
    }
    return "";
}

std::string dump_value(const Value& v) {
    switch (v.kind) {
        case ValueKind::Str: return "str(" + quote_string(v.s) + ")";
        case ValueKind::ClockDomain:
            return v.default_cd ? "clockdomain(DefaultClockDomain)" : "clockdomain(" + quote_string(v.s) + ")";
        case ValueKind::Impl: return "Implement(" + impl_value_name(v) + ")";
        case ValueKind::Array: return kind_label(v) + "(" + value_text(v) + ")";
        default: return kind_label(v) + "(" + value_text(v) + ")";
    }
}

namespace {

[[noreturn]] void type_error(std::string_view op, const Value& a) {
    throw MathError("operator '" + std::string(op) + "' is not defined for " + kind_label(a));
}

[[noreturn]] void type_error(std::string_view op, const Value& a, const Value& b) {
    throw MathError("operator '" + std::string(op) + "' is not defined for " + kind_label(a) + " and " +
                    kind_label(b));
}

[[noreturn]] void overflow(std::string_view op) {
    throw MathError("integer overflow in '" + std::string(op) + "'");
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, std::string_view op) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        overflow(op);
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b, std::string_view op) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        overflow(op);
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::string_view op) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        overflow(op);
    return r;
}

Value int_power(std::int64_t base, std::int64_t exp) {
    std::int64_t result = 1;
    std::int64_t b = base;
    while (exp > 0) {
        if (exp & 1)
            result = checked_mul(result, b, "^");
        exp >>= 1;
        if (exp > 0)
            b = checked_mul(b, b, "^");
    }
    return Value::of_int(result);
}

std::int64_t float_to_int(double v, std::string_view fn) {
    if (!std::isfinite(v) || v >= 9223372036854775808.0 || v < -9223372036854775808.0)
        throw MathError("result of '" + std::string(fn) + "' does not fit in a 64-bit integer");
    return static_cast<std::int64_t>(v);
}

bool is_text_operand(const Value& v) {
    return v.kind == ValueKind::Int || v.kind == ValueKind::Float || v.kind == ValueKind::Bool;
}

} // namespace

Value apply_unary(std::string_view op, const Value& v) {
    if (op == "-") {
        if (v.kind == ValueKind::Int) {
            if (v.i == std::numeric_limits<std::int64_t>::min())
                throw MathError("integer overflow in unary '-'");
            return Value::of_int(-v.i);
        }
        if (v.kind == ValueKind::Float)
            return Value::of_float(-v.f);
    } else if (op == "!") {
        if (v.kind == ValueKind::Bool)
            return Value::of_bool(!v.b);
    } else if (op == "~") {
        if (v.kind == ValueKind::Int)
            return Value::of_int(~v.i);
    }
    type_error(op, v);
}

Value apply_binary(std::string_view op, const Value& a, const Value& b) {
    using K = ValueKind;
    bool ints = a.kind == K::Int && b.kind == K::Int;
    bool nums = a.is_numeric() && b.is_numeric();

    if (op == "+") {
        if (a.kind == K::Array && b.kind != K::Array) {
            if (a.elem != b.kind)
                throw MathError("cannot append " + kind_label(b) + " to " + kind_label(a));
            Value out = a;
            out.items.push_back(b);
            return out;
        }
        if (b.kind == K::Array && a.kind != K::Array) {
            if (b.elem != a.kind)
                throw MathError("cannot insert " + kind_label(a) + " into " + kind_label(b));
            Value out = b;
            out.items.insert(out.items.begin(), a);
            return out;
        }
        if (ints) {
            return Value::of_int(checked_add(a.i, b.i, op));
        }
        if (nums)
            return Value::of_float(a.as_double() + b.as_double());
        if (a.kind == K::Str && (b.kind == K::Str || is_text_operand(b)))
            return Value::of_str(a.s + value_text(b));
        if (b.kind == K::Str && is_text_operand(a))
            return Value::of_str(value_text(a) + b.s);
        type_error(op, a, b);
    }
    if (op == "-" || op == "*") {
        if (ints) {
            return Value::of_int(op == "-" ? checked_sub(a.i, b.i, op) : checked_mul(a.i, b.i, op));
        }
        if (nums)
            return Value::of_float(op == "-" ? a.as_double() - b.as_double() : a.as_double() * b.as_double());
        type_error(op, a, b);
    }
    if (op == "/") {
        if (ints) {
            if (b.i == 0)
                throw MathError("division by zero");
            if (a.i == std::numeric_limits<std::int64_t>::min() && b.i == -1)
                throw MathError("integer overflow in '/'");
            return Value::of_int(a.i / b.i);
        }
        if (nums) {
            if (b.as_double() == 0.0)
                throw MathError("division by zero");
            return Value::of_float(a.as_double() / b.as_double());
        }
        type_error(op, a, b);
    }
    if (op == "%") {
        if (ints) {
            if (b.i == 0)
                throw MathError("modulo by zero");
            if (b.i == -1)
                return Value::of_int(0);
            return Value::of_int(a.i % b.i);
        }
        type_error(op, a, b);
    }
    if (op == "^") {
        if (ints) {
            if (b.i >= 0)
                return int_power(a.i, b.i);
            if (a.i == 0)
                throw MathError("zero raised to a negative power");
            return Value::of_float(std::pow(static_cast<double>(a.i), static_cast<double>(b.i)));
        }
        if (nums)
            return Value::of_float(std::pow(a.as_double(), b.as_double()));
        type_error(op, a, b);
    }
    if (op == "<<" || op == ">>") {
        if (!ints)
            type_error(op, a, b);
        if (b.i < 0 || b.i > 63)
            throw MathError("shift amount " + std::to_string(b.i) + " is outside [0, 63]");
        if (op == ">>")
            return Value::of_int(a.i >> b.i);
        std::int64_t r = static_cast<std::int64_t>(static_cast<std::uint64_t>(a.i) << b.i);
        if ((r >> b.i) != a.i)
            throw MathError("integer overflow in '<<'");
        return Value::of_int(r);
    }
    if (op == "&" || op == "|") {
        if (!ints)
            type_error(op, a, b);
        return Value::of_int(op == "&" ? (a.i & b.i) : (a.i | b.i));
    }
    if (op == "&&" || op == "||") {
        if (a.kind != K::Bool || b.kind != K::Bool)
            type_error(op, a, b);
        return Value::of_bool(op == "&&" ? (a.b && b.b) : (a.b || b.b));
    }
    if (op == "==" || op == "!=") {
        bool comparable = a.kind == b.kind && (a.kind == K::Int || a.kind == K::Float || a.kind == K::Str ||
                                               a.kind == K::Bool || a.kind == K::ClockDomain);
        if (!comparable)
            type_error(op, a, b);
        bool eq = a == b;
        return Value::of_bool(op == "==" ? eq : !eq);
    }
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
        if (!nums)
            type_error(op, a, b);
        bool r;
        if (ints) {
            r = op == "<" ? a.i < b.i : op == ">" ? a.i > b.i : op == "<=" ? a.i <= b.i : a.i >= b.i;
        } else {
            double x = a.as_double(), y = b.as_double();
            r = op == "<" ? x < y : op == ">" ? x > y : op == "<=" ? x <= y : x >= y;
        }
        return Value::of_bool(r);
    }
    throw MathError("unknown operator '" + std::string(op) + "'");
}

Value apply_function(std::string_view name, const Value& v) {
    if (v.kind != ValueKind::Float)
        throw MathError("'" + std::string(name) + "' expects a float argument, found " + kind_label(v));
    double r;
    if (name == "round")
        r = std::round(v.f);
    else if (name == "floor")
        r = std::floor(v.f);
    else if (name == "ceil")
        r = std::ceil(v.f);
    else
        throw MathError("unknown function '" + std::string(name) + "'");
    return Value::of_int(float_to_int(r, name));
}

Value apply_log(const Value& base, const Value& arg) {
    if (!base.is_numeric() || !arg.is_numeric())
        throw MathError("'log' expects int or float operands, found " + kind_label(base) + " and " +
                        kind_label(arg));
    double b = base.as_double(), x = arg.as_double();
    if (b <= 0 || b == 1)
        throw MathError("invalid logarithm base " + value_text(base));
    if (x <= 0)
        throw MathError("logarithm of non-positive value " + value_text(arg));
    if (b == 2)
        return Value::of_float(std::log2(x));
    if (b == 10)
        return Value::of_float(std::log10(x));
    return Value::of_float(std::log(x) / std::log(b));
}

Value make_range(const Value& start, const Value& step, const Value& end) {
    if (start.kind != ValueKind::Int || step.kind != ValueKind::Int || end.kind != ValueKind::Int)
        throw MathError("range bounds and step must be int, found " + kind_label(start) + ", " + kind_label(step) +
                        ", " + kind_label(end));
    if (step.i == 0)
        throw MathError("range step must not be zero");
    constexpr std::size_t limit = 1u << 20;
    std::vector<Value> items;
    for (std::int64_t v = start.i; step.i > 0 ? v < end.i : v > end.i;) {
        items.push_back(Value::of_int(v));
        if (items.size() > limit)
            throw MathError("range has more than " + std::to_string(limit) + " elements");
        if (__builtin_add_overflow(v, step.i, &v))
            break;
    }
    return Value::of_array(ValueKind::Int, std::move(items));
}

Value make_array(std::vector<Value> items) {
    if (items.empty())
        throw MathError("array literal must not be empty");
    ValueKind elem = items.front().kind;
    if (elem == ValueKind::Array)
        throw MathError("nested arrays are not supported");
    for (auto& v : items)
        if (v.kind != elem)
            throw MathError("array elements must share one kind, found " + kind_label(items.front()) + " and " +
                            kind_label(v));
    return Value::of_array(elem, std::move(items));
}

Value index_array(const Value& array, const Value& index) {
    if (array.kind != ValueKind::Array)
        throw MathError("cannot index a value of kind " + kind_label(array));
    if (index.kind != ValueKind::Int)
        throw MathError("array index must be int, found " + kind_label(index));
    if (index.i < 0 || static_cast<std::size_t>(index.i) >= array.items.size())
        throw MathError("index " + std::to_string(index.i) + " is out of bounds for array of size " +
                        std::to_string(array.items.size()));
    return array.items[static_cast<std::size_t>(index.i)];
}

} // namespace tydi
