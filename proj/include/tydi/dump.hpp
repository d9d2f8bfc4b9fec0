//------------------------------------------------------------------------------
// dump.hpp
// Text rendering of the code structure
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>

#include "tydi/model.hpp"

namespace tydi {

/// Nested `Project(..){ Package(..){ Scope(..){ .. } } }` text. Anything not
/// evaluated yet prints as `NotInferred("<source>")`.
std::string dump_project(const Project& project);

/// One port as printed in Ports and Connections: `Port(Stream(x),in) `DefaultClockDomain`.
std::string dump_port(const Port& port);

/// Logical type in its one-line dump form.
std::string dump_type_short(const LogicalType& t);

} // namespace tydi
