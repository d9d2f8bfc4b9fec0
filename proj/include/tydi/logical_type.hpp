//------------------------------------------------------------------------------
// logical_type.hpp
// Evaluated logical types: Null, Bit, Group, Union and Stream
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tydi {

struct Scope;
struct TypeEntry;
struct LogicalType;
using LogicalTypePtr = std::shared_ptr<const LogicalType>;

enum class Synchronicity { Sync, Flatten, Desync, FlatDesync };
enum class StreamDirection { Forward, Reverse };

std::string_view to_string(Synchronicity s);
std::string_view to_string(StreamDirection d);
std::optional<Synchronicity> parse_synchronicity(std::string_view text);
std::optional<StreamDirection> parse_stream_direction(std::string_view text);

struct StreamProps {
    std::int64_t dimension = 0;
    /// Null when absent.
    LogicalTypePtr user;
    double throughput = 1.0;
    Synchronicity synchronicity = Synchronicity::Sync;
    std::int64_t complexity = 7;
    StreamDirection direction = StreamDirection::Forward;
    bool keep = false;
};

struct LogicalField {
    std::string name;
    LogicalTypePtr type;
};

/// Strict type equality is pointer identity of these objects: aliases share
/// the pointer of their target, every written type expression makes a new one.
struct LogicalType {
    enum class Kind { Null, Bit, Group, Union, Stream };

    Kind kind = Kind::Null;
    std::int64_t width = 0;
    /// Group/Union: declared id. Stream: id of the naming type declaration, empty if anonymous.
    std::string name;
    /// Package the type was written in.
    std::string package;
    /// Non-package scope owner (streamlet, impl or group name) the type was declared in.
    std::string scope_owner;
    std::vector<LogicalField> fields;
    LogicalTypePtr element;
    StreamProps props;
    /// Group/Union member scope and the declaration that owns it.
    const Scope* member_scope = nullptr;
    const TypeEntry* owner_entry = nullptr;

    bool is_stream() const { return kind == Kind::Stream; }
};

LogicalTypePtr make_null_type();
LogicalTypePtr make_bit_type(std::int64_t width);

/// Short form used in dumps: `Bit(5)`, `DataGroup(Date)`, `Stream(int_stream)`, `DataNull`.
std::string type_display(const LogicalType& t);

/// Form used in mangled template names; names from other packages or from
/// non-package scopes are qualified relative to `registration_package`.
std::string type_mangle(const LogicalType& t, std::string_view registration_package);

/// Two-line props form: `dimension=.., user=.., throughput=.., ...`.
std::string stream_props_display(const StreamProps& p);

/// Null 0, Bit w, Group sum, Union max. Throws std::logic_error on Stream.
std::int64_t bit_width(const LogicalType& t);

bool types_strictly_equal(const LogicalTypePtr& a, const LogicalTypePtr& b);
bool types_compatible(const LogicalType& a, const LogicalType& b);

} // namespace tydi
