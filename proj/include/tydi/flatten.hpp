//------------------------------------------------------------------------------
// flatten.hpp
// Hierarchy flattening and Graphviz DOT emission
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <string>
#include <vector>

#include "tydi/model.hpp"

namespace tydi {

struct FlatPort {
    /// `output@0` for array elements.
    std::string display;
    /// `output_AT_0` for array elements.
    std::string anchor;
};

struct FlatComponent {
    /// Instance path from the top joined by `__`.
    std::string flat_name;
    bool is_wrapper = false;
    std::vector<FlatPort> ports;
    std::string impl;
};

struct FlatNet {
    std::string src_component;
    std::string src_anchor;
    std::string dst_component;
    std::string dst_anchor;
    /// `<connection>__<owner flat>[::<instance>]__<owner flat>[::<instance>]`.
    std::string label;
};

struct FlatCircuit {
    std::vector<FlatComponent> components;
    std::vector<FlatNet> nets;
};

/// Flattens the hierarchy under `top`, which must be evaluated.
FlatCircuit flatten(const Implementation& top);

/// Implementations used as circuit tops: `top` (`package.impl`) when given,
/// otherwise every concrete implementation of an entry package that no other
/// implementation instantiates.
std::vector<const Implementation*> circuit_tops(const Project& project, const std::string& top);

/// Flattens every top into one circuit.
FlatCircuit flatten_project(const Project& project, const std::string& top);

/// `digraph {` with sorted record nodes and sorted edges.
std::string emit_dot(const FlatCircuit& circuit);

/// Mechanical well-formedness check of emitted DOT; returns the problems found.
std::vector<std::string> check_dot(const std::string& dot);

} // namespace tydi
