//------------------------------------------------------------------------------
// logical_type.cpp
// Evaluated logical types: Null, Bit, Group, Union and Stream
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "tydi/logical_type.hpp"

#include <algorithm>
#include <stdexcept>

#include "tydi/value.hpp"

namespace tydi {

std::string_view to_string(Synchronicity s) {
    switch (s) {
        case Synchronicity::Sync: return "Sync";
        case Synchronicity::Flatten: return "Flatten";
        case Synchronicity::Desync: return "Desync";
        case Synchronicity::FlatDesync: return "FlatDesync";
    }
    return "Sync";
}

std::string_view to_string(StreamDirection d) {
    return d == StreamDirection::Forward ? "Forward" : "Reverse";
}

std::optional<Synchronicity> parse_synchronicity(std::string_view text) {
    for (auto s : {Synchronicity::Sync, Synchronicity::Flatten, Synchronicity::Desync, Synchronicity::FlatDesync})
        if (to_string(s) == text)
            return s;
    return std::nullopt;
}

std::optional<StreamDirection> parse_stream_direction(std::string_view text) {
    if (text == "Forward")
        return StreamDirection::Forward;
    if (text == "Reverse")
        return StreamDirection::Reverse;
    return std::nullopt;
}

LogicalTypePtr make_null_type() {
    return std::make_shared<LogicalType>();
}

LogicalTypePtr make_bit_type(std::int64_t width) {
    auto t = std::make_shared<LogicalType>();
    t->kind = LogicalType::Kind::Bit;
    t->width = width;
    return t;
}

namespace {

std::string qualified(const LogicalType& t, const std::string_view* reg) {
    std::string out;
    if (reg && t.package != *reg && !t.package.empty())
        out += t.package + ".";
    if (reg && !t.scope_owner.empty())
        out += t.scope_owner + ".";
    return out + t.name;
}

std::string render(const LogicalType& t, const std::string_view* reg) {
    using K = LogicalType::Kind;
    switch (t.kind) {
        case K::Null: return "DataNull";
        case K::Bit: return "Bit(" + std::to_string(t.width) + ")";
        case K::Group: return "DataGroup(" + qualified(t, reg) + ")";
        case K::Union: return "DataUnion(" + qualified(t, reg) + ")";
        case K::Stream: {
            if (!t.name.empty())
                return "Stream(" + qualified(t, reg) + ")";
            std::string out = "Stream(" + render(*t.element, reg);
            const StreamProps def;
            const StreamProps& p = t.props;
            if (p.dimension != def.dimension)
                out += ", d=" + std::to_string(p.dimension);
            if (p.user)
                out += ", u=" + render(*p.user, reg);
            if (p.throughput != def.throughput)
                out += ", t=" + format_float(p.throughput);
            if (p.synchronicity != def.synchronicity)
                out += ", s=" + std::string(to_string(p.synchronicity));
            if (p.complexity != def.complexity)
                out += ", c=" + std::to_string(p.complexity);
            if (p.direction != def.direction)
                out += ", r=" + std::string(to_string(p.direction));
            if (p.keep != def.keep)
                out += ", x=true";
            return out + ")";
        }
    }
    return "DataNull";
}

} // namespace

std::string type_display(const LogicalType& t) {
    return render(t, nullptr);
}

std::string type_mangle(const LogicalType& t, std::string_view registration_package) {
    return render(t, &registration_package);
}

std::string stream_props_display(const StreamProps& p) {
    std::string out = "dimension=" + std::to_string(p.dimension);
    out += ", user=" + (p.user ? type_display(*p.user) : std::string("DataNull"));
    out += ", throughput=" + format_float(p.throughput);
    out += ", synchronicity=" + std::string(to_string(p.synchronicity));
    out += ", complexity=" + std::to_string(p.complexity);
    out += ", direction=" + std::string(to_string(p.direction));
    out += std::string(", keep=") + (p.keep ? "true" : "false");
    return out;
}

std::int64_t bit_width(const LogicalType& t) {
    using K = LogicalType::Kind;
    switch (t.kind) {
        case K::Null: return 0;
        case K::Bit: return t.width;
        case K::Group: {
            std::int64_t sum = 0;
            for (auto& f : t.fields)
                sum += bit_width(*f.type);
            return sum;
        }
        case K::Union: {
            std::int64_t best = 0;
            for (auto& f : t.fields)
                best = std::max(best, bit_width(*f.type));
            return best;
        }
        case K::Stream: break;
    }
    throw std::logic_error("bit width of a Stream type is undefined");
}

bool types_strictly_equal(const LogicalTypePtr& a, const LogicalTypePtr& b) {
    return a && a == b;
}

bool types_compatible(const LogicalType& a, const LogicalType& b) {
    using K = LogicalType::Kind;
    if (&a == &b)
        return true;
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
        case K::Null: return true;
        case K::Bit: return a.width == b.width;
        case K::Group:
        case K::Union: {
            if (a.fields.size() != b.fields.size())
                return false;
            for (std::size_t i = 0; i < a.fields.size(); ++i) {
                if (a.fields[i].name != b.fields[i].name)
                    return false;
                if (!types_compatible(*a.fields[i].type, *b.fields[i].type))
                    return false;
            }
            return true;
        }
        case K::Stream: {
            const StreamProps& p = a.props;
            const StreamProps& q = b.props;
            if (p.dimension != q.dimension || p.throughput != q.throughput || p.synchronicity != q.synchronicity ||
                p.complexity != q.complexity || p.direction != q.direction || p.keep != q.keep)
                return false;
            if (static_cast<bool>(p.user) != static_cast<bool>(q.user))
                return false;
            if (p.user && !types_compatible(*p.user, *q.user))
                return false;
            return types_compatible(*a.element, *b.element);
        }
    }
    return false;
}

} // namespace tydi
