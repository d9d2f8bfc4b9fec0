//------------------------------------------------------------------------------
// test_sugar.cpp
// Duplicator and voider insertion
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "criteria.hpp"
#include "doctest.h"
#include "support.hpp"
#include "tydi/sugar.hpp"

using namespace tydi;
using namespace tydi::testing;

namespace {

const std::string lib = "package p;\n"
                        "type t = Stream(Bit(8));\n"
                        "streamlet pass_s { input: t in, output: t out, };\n"
                        "external impl pass_i of pass_s {};\n"
                        "streamlet fan_s { input: t in, a: t out, b: t out, c: t out, };\n";

Implementation& impl_of(CompileOutput& out, const std::string& name) {
    Implementation* impl = out.project->find_package("p")->scope->find_implement(name);
    REQUIRE(impl);
    return *impl;
}

} // namespace

TEST_CASE("random fan-out topologies") {
    CriterionResult r = check_sugaring_topologies();
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("TPC-H comparator fan-out") {
    CriterionResult r = check_tpch_fanout();
    CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("a self input used three times gets one duplicator") {
    CompileOutput out = compile_text(lib + "impl fan_i of fan_s {\n"
                                           "  input => a,\n"
                                           "  input => b,\n"
                                           "  input => c,\n"
                                           "};\n");
    REQUIRE_MESSAGE(out.ok(), error_text(out));
    Implementation& impl = impl_of(out, "fan_i");
    Instance* dup = impl.scope->find_instance("duplicate_input");
    REQUIRE(dup);
    CHECK(dup->generated);
    CHECK(dup->target->name == "duplicator_i@Stream(p.t)@3@DefaultClockDomain");
    CHECK(dup->target->package->name == "tydi_std");
    CHECK(dup->target->streamlet->scope->find_port("output")->array_size == 3);

    std::vector<std::string> edges;
    for (auto& c : impl.scope->connections)
        edges.push_back(c->source.key() + "->" + c->sink.key());
    CHECK(edges == std::vector<std::string>{"duplicate_input.output[0]->a", "duplicate_input.output[1]->b",
                                            "duplicate_input.output[2]->c", "input->duplicate_input.input"});
    CHECK(impl.scope->connections.back()->name == "duplicate_input_input");
    CHECK(impl.scope->connections.back()->generated);
}

TEST_CASE("unused instance outputs are voided and self ports are not") {
    CompileOutput out = compile_text(lib + "streamlet two_s { input: t in, output: t out, spare: t out, };\n"
                                           "impl two_i of two_s {\n"
                                           "  instance x(pass_i),\n"
                                           "  instance y(pass_i),\n"
                                           "  input => x.input,\n"
                                           "  x.output => output,\n"
                                           "};\n");
    REQUIRE_MESSAGE(out.ok(), error_text(out));
    Implementation& impl = impl_of(out, "two_i");
    Instance* voider = impl.scope->find_instance("void_y_output");
    REQUIRE(voider);
    CHECK(voider->target->name == "void_i@Stream(p.t)@DefaultClockDomain");
    CHECK(impl.scope->instances.size() == 3);
    bool fed = false;
    for (auto& c : impl.scope->connections)
        fed = fed || (c->source.key() == "y.output" && c->sink.instance == voider && c->name == "void_y_output_input");
    CHECK(fed);
    for (auto& use : usage_census(impl))
        if (use.end.key() == "spare" || use.end.key() == "y.input")
            CHECK(use.use_count == 0);
}

TEST_CASE("generated names avoid user instances") {
    CompileOutput out = compile_text(lib + "impl fan_i of fan_s {\n"
                                           "  instance duplicate_input(pass_i),\n"
                                           "  input => a,\n"
                                           "  input => b,\n"
                                           "  duplicate_input.output => c,\n"
                                           "};\n");
    REQUIRE_MESSAGE(out.ok(), error_text(out));
    Implementation& impl = impl_of(out, "fan_i");
    REQUIRE(impl.scope->find_instance("duplicate_input_1"));
    CHECK(impl.scope->find_instance("duplicate_input_1")->generated);
    CHECK_FALSE(impl.scope->find_instance("duplicate_input")->generated);
}

TEST_CASE("array ports are duplicated per element") {
    CompileOutput out = compile_text(lib + "streamlet arr_s { input: t [2] in, output: t [4] out, };\n"
                                           "impl arr_i of arr_s {\n"
                                           "  input[1] => output[0],\n"
                                           "  input[1] => output[1],\n"
                                           "  input[0] => output[2],\n"
                                           "  input[0] => output[3],\n"
                                           "};\n");
    REQUIRE_MESSAGE(out.ok(), error_text(out));
    Implementation& impl = impl_of(out, "arr_i");
    CHECK(impl.scope->find_instance("duplicate_input_0"));
    CHECK(impl.scope->find_instance("duplicate_input_1"));
    for (auto& use : usage_census(impl))
        CHECK_MESSAGE(use.use_count == 1, use.end.key());
}

TEST_CASE("sugaring twice changes nothing") {
    CompileOutput out = compile_text(lib + "impl fan_i of fan_s { input => a, input => b, input => c, };\n");
    REQUIRE(out.ok());
    SugarResult again = sugar_project(*out.project);
    CHECK(again.duplicators == 0);
    CHECK(again.voiders == 0);
    CHECK(impl_of(out, "fan_i").scope->instances.size() == 1);
}
