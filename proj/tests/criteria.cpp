//------------------------------------------------------------------------------
// criteria.cpp
// The twelve end-to-end acceptance checks
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "criteria.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "support.hpp"
#include "tydi/dump.hpp"
#include "tydi/flatten.hpp"
#include "tydi/logical_type.hpp"
#include "tydi/sugar.hpp"

namespace tydi::testing {

namespace {

/// Collects failed expectations; the first few become the result detail.
class Failures {
public:
    void expect(bool condition, const std::string& message) {
        if (!condition)
            messages_.push_back(message);
    }
    bool empty() const { return messages_.empty(); }
    CriterionResult result(const std::string& summary) const {
        if (messages_.empty())
            return {true, summary};
        std::string detail;
        for (std::size_t k = 0; k < messages_.size() && k < 3; ++k)
            detail += (k ? "; " : "") + messages_[k];
        if (messages_.size() > 3)
            detail += "; +" + std::to_string(messages_.size() - 3) + " more";
        return {false, detail};
    }

private:
    std::vector<std::string> messages_;
};

const std::string* artifact(const CompileOutput& out, const std::string& path, Failures& f) {
    const std::string* text = out.find(path);
    f.expect(text != nullptr, path + " was not produced: " + error_text(out));
    return text;
}

Package* package(const CompileOutput& out, const std::string& name) {
    return out.project ? out.project->find_package(name) : nullptr;
}

} // namespace

// ---- 1: bit widths of the type prelude ----

CriterionResult check_bit_widths() {
    Failures f;
    CompileOutput out = compile_many({{"ch6_types.td", read_text(data_path("ch6_types.td"))}});
    f.expect(out.ok(), "compile failed: " + error_text(out));
    if (const std::string* dump = artifact(out, "2_evaluation_output.txt", f))
        for (const char* line : {"bit_width_decimal_15:int(50)", "year:Bit(17)", "month:Bit(4)", "day:Bit(5)"})
            f.expect(has_line(*dump, line), std::string("missing line ") + line);
    return f.result("bit_width_decimal_15=50, year=Bit(17), month=Bit(4), day=Bit(5)");
}

// ---- 2: cross-package lazy evaluation ----

CriterionResult check_cross_package_laziness() {
    Failures f;
    Sources sources = {
        {"simple_0.td", "package simple_0;\n"
                        "import simple_1;\n"
                        "\n"
                        "const i1: int = 1 + 100;\n"
                        "const external_var0 = simple_1.i1 + 10;\n"
                        "const external_flag0 = false || simple_1.flag;\n"},
        {"simple_1.td", "package simple_1;\n"
                        "const i1 = 100;\n"
                        "const flag = true;\n"
                        "const i2 = 500;\n"},
    };
    CompileOutput out = compile_many(sources);
    f.expect(out.ok(), "compile failed: " + error_text(out));
    if (const std::string* dump = artifact(out, "2_evaluation_output.txt", f)) {
        std::string p0 = block(*dump, "Package(simple_0)");
        std::string p1 = block(*dump, "Package(simple_1)");
        for (const char* line : {"i1:int(101)", "external_var0:int(110)", "external_flag0:bool(true)"})
            f.expect(has_line(p0, line), std::string("simple_0 lacks ") + line);
        f.expect(has_line(p1, "i2:UnknownType(NotInferred(\"500\"))"), "simple_1.i2 was evaluated");
    }
    return f.result("i1=101, external_var0=110, external_flag0=true, i2 left unevaluated");
}

// ---- 3: unary minus binds tighter than binary plus ----

CriterionResult check_unary_precedence() {
    Failures f;
    CompileOutput out = compile_text("package p;\nconst i1 = -1+2;\n");
    f.expect(out.ok(), "compile failed: " + error_text(out));
    if (const std::string* dump = artifact(out, "2_evaluation_output.txt", f))
        f.expect(has_line(*dump, "i1:int(1)"), "i1 is not int(1)");
    return f.result("-1+2 == 1");
}

// ---- 4: stream property defaults and order independence ----

namespace {

struct PropChoice {
    std::string key;
    std::string text;
};

std::vector<PropChoice> random_props(std::mt19937& rng) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    std::vector<PropChoice> all = {
        {"d", std::to_string(pick(4))},
        {"u", pick(2) ? "Null" : "Bit(" + std::to_string(1 + pick(8)) + ")"},
        {"t", std::vector<std::string>{"0.5", "1", "1.0", "2.5", "4"}[pick(5)]},
        {"s", std::vector<std::string>{"\"Sync\"", "\"Flatten\"", "\"Desync\"", "\"FlatDesync\""}[pick(4)]},
        {"c", std::to_string(1 + pick(7))},
        {"r", pick(2) ? "\"Forward\"" : "\"Reverse\""},
        {"x", pick(2) ? "true" : "false"},
    };
    std::vector<PropChoice> chosen;
    for (auto& p : all)
        if (pick(2))
            chosen.push_back(p);
    return chosen;
}

std::string stream_decl(const std::string& name, const std::vector<PropChoice>& props) {
    std::string out = "type " + name + " = Stream(Bit(4)";
    for (auto& p : props)
        out += ", " + p.key + "=" + p.text;
    return out + ");\n";
}

std::string stream_record(const Package& pkg, const std::string& name) {
    const TypeEntry* t = pkg.scope->find_type(name);
    if (!t || !t->value || t->value->kind != LogicalType::Kind::Stream)
        return "<missing " + name + ">";
    return type_display(*t->value->element) + " | " + stream_props_display(t->value->props);
}

} // namespace

CriterionResult check_stream_defaults() {
    Failures f;
    const std::string defaults =
        "dimension=0, user=DataNull, throughput=1, synchronicity=Sync, complexity=7, direction=Forward, keep=false";

    std::string src = "package p;\ntype plain = Stream(Bit(4));\n";
    src += stream_decl("spelled", {{"x", "false"}, {"r", "\"Forward\""}, {"c", "7"}, {"s", "\"Sync\""},
                                   {"t", "1"}, {"u", "Null"}, {"d", "0"}});
    std::mt19937 rng(4);
    const int cases = 40;
    for (int k = 0; k < cases; ++k) {
        auto props = random_props(rng);
        src += stream_decl("a" + std::to_string(k), props);
        std::shuffle(props.begin(), props.end(), rng);
        src += stream_decl("b" + std::to_string(k), props);
    }
    CompileOutput out = compile_text(src);
    f.expect(out.ok(), "compile failed: " + error_text(out));
    const std::string* dump = artifact(out, "2_evaluation_output.txt", f);
    Package* pkg = package(out, "p");
    if (dump && pkg) {
        std::string plain = block(*dump, "plain:Stream(plain)");
        f.expect(has_line(plain, "DataType=Bit(4)") && has_line(plain, defaults),
                 "Stream(Bit(4)) record is not the default record");
        f.expect(stream_record(*pkg, "plain") == "Bit(4) | " + defaults, "plain: " + stream_record(*pkg, "plain"));
        f.expect(stream_record(*pkg, "spelled") == stream_record(*pkg, "plain"),
                 "explicit defaults differ from implicit defaults");
        for (int k = 0; k < cases; ++k) {
            std::string a = stream_record(*pkg, "a" + std::to_string(k));
            std::string b = stream_record(*pkg, "b" + std::to_string(k));
            f.expect(a == b, "permutation " + std::to_string(k) + ": " + a + " vs " + b);
        }
    }
    return f.result("defaults d=0 u=Null t=1 s=Sync c=7 r=Forward x=false; " + std::to_string(cases) +
                    " permuted pairs identical");
}

// ---- 5: name resolution through scope relations ----

CriterionResult check_resolution_matrix() {
    Failures f;
    const char* program = "package m;\n"
                          "const target = 1;\n"
                          "type target = Bit(1);\n"
                          "streamlet target { p: Stream(Bit(1)) in, };\n"
                          "impl target of target {};\n"
                          "type Group probe_group { f: Bit(1), };\n"
                          "type Union probe_union { f: Bit(1), };\n"
                          "streamlet probe_streamlet { q: Stream(Bit(1)) in, };\n"
                          "impl probe_impl of probe_streamlet {};\n";
    const std::vector<std::pair<Category, std::string>> categories = {
        {Category::Variable, "variable"},   {Category::Type, "type"},
        {Category::Streamlet, "streamlet"}, {Category::Port, "port"},
        {Category::Implementation, "impl"}, {Category::Instance, "instance"},
    };
    // Rows follow `categories`, columns Group, Union, Stream, Streamlet, Implement.
    const bool allowed[6][5] = {
        {true, true, true, true, true},     {true, true, true, true, true},
        {false, false, false, false, true}, {false, false, false, false, false},
        {false, false, false, false, true}, {false, false, false, false, false},
    };
    const char* relation_names[5] = {"Group", "Union", "Stream", "Streamlet", "Implement"};

    int cells = 0;
    for (std::size_t row = 0; row < categories.size(); ++row) {
        for (int col = 0; col < 5; ++col) {
            // A fresh micro-program per cell so no lookup can observe another's state.
            CompileOutput out = compile_text(program);
            Package* pkg = package(out, "m");
            if (!out.ok() || !pkg) {
                f.expect(false, "micro-program failed: " + error_text(out));
                continue;
            }
            Scope& outer = *pkg->scope;
            // Ports and instances cannot be declared at package level in source, so
            // the outer scope receives them directly.
            auto port = std::make_unique<Port>();
            port->name = "target";
            outer.add_port(std::move(port));
            auto inst = std::make_unique<Instance>();
            inst->name = "target";
            outer.add_instance(std::move(inst));

            Scope stream_scope("stream", pkg);
            stream_scope.relations.push_back({RelationKind::Stream, &outer});
            Scope* probe = nullptr;
            switch (col) {
                case 0: probe = outer.find_type("probe_group")->member_scope.get(); break;
                case 1: probe = outer.find_type("probe_union")->member_scope.get(); break;
                case 2: probe = &stream_scope; break;
                case 3: probe = outer.find_streamlet("probe_streamlet")->scope.get(); break;
                case 4: probe = outer.find_implement("probe_impl")->scope.get(); break;
            }
            Resolved r = resolve_name(*probe, "target", categories[row].first);
            bool expected = allowed[row][col];
            std::string cell = categories[row].second + " x " + relation_names[col];
            f.expect(static_cast<bool>(r) == expected, cell + (expected ? " not found" : " leaked through"));
            if (r)
                f.expect(r.scope == &outer, cell + " resolved in the wrong scope");
            ++cells;
        }
    }
    f.expect(cells == 30, "only " + std::to_string(cells) + " cells ran");
    return f.result(std::to_string(cells) + " cells match the relation table");
}

// ---- 6: template monomorphization ----

namespace {

struct TypeSample {
    std::string source;
    std::string rendered;
};

TypeSample random_element(std::mt19937& rng) {
    switch (rng() % 5) {
        case 0: {
            auto w = std::to_string(1 + rng() % 64);
            return {"Bit(" + w + ")", "Bit(" + w + ")"};
        }
        case 1: return {"G0", "DataGroup(G0)"};
        case 2: return {"U0", "DataUnion(U0)"};
        case 3: return {"Null", "DataNull"};
        default: {
            auto w = std::to_string(1 + rng() % 16);
            auto d = std::to_string(1 + rng() % 3);
            return {"Stream(Bit(" + w + "), d=" + d + ")", "Stream(Bit(" + w + "), d=" + d + ")"};
        }
    }
}

int count_prefixed(const std::map<std::string, std::unique_ptr<Implementation>>& m, const std::string& prefix) {
    int n = 0;
    for (auto& [name, _] : m)
        n += name.rfind(prefix, 0) == 0;
    return n;
}

int count_prefixed(const std::map<std::string, std::unique_ptr<Streamlet>>& m, const std::string& prefix) {
    int n = 0;
    for (auto& [name, _] : m)
        n += name.rfind(prefix, 0) == 0;
    return n;
}

} // namespace

CriterionResult check_template_instances() {
    Failures f;
    std::mt19937 rng(6);
    const int samples = 50;
    for (int k = 0; k < samples && f.empty(); ++k) {
        TypeSample x = random_element(rng);
        std::string arg = "Stream(" + x.source + ")";
        std::string src = "package p;\n"
                          "type Group G0 { a: Bit(3), b: Bit(5), };\n"
                          "type Union U0 { a: Bit(2), b: Bit(7), };\n"
                          "type expected = " + arg + ";\n"
                          "streamlet void_s<type_in: type> { input: type_in in, };\n"
                          "external impl void_i<type_in: type> of void_s<type type_in> {};\n"
                          "streamlet top_s { input: Stream(Bit(1)) in, };\n"
                          "impl top_i of top_s {\n"
                          "  instance v0(void_i<type " + arg + ">),\n"
                          "  instance v1(void_i<type " + arg + ">),\n"
                          "};\n";
        std::string tag = "sample " + std::to_string(k) + " (" + arg + "): ";
        CompileOutput out = compile_text(src);
        Package* pkg = package(out, "p");
        if (!out.ok() || !pkg) {
            f.expect(false, tag + "compile failed: " + error_text(out));
            break;
        }
        const std::string name = "void_i@Stream(" + x.rendered + ")";
        Scope& scope = *pkg->scope;
        f.expect(count_prefixed(scope.implements, "void_i@") == 1, tag + "expected one void_i instance");
        f.expect(count_prefixed(scope.streamlets, "void_s@") == 1, tag + "expected one void_s instance");
        Implementation* inst = scope.find_implement(name);
        f.expect(inst != nullptr, tag + "no entity named " + name);
        if (!inst)
            continue;
        Implementation* top = scope.find_implement("top_i");
        f.expect(top->scope->find_instance("v0")->target == inst && top->scope->find_instance("v1")->target == inst,
                 tag + "instances do not share the monomorphized implementation");
        Port* port = inst->streamlet ? inst->streamlet->scope->find_port("input") : nullptr;
        const TypeEntry* expected = scope.find_type("expected");
        f.expect(port && port->type && expected && expected->value &&
                     types_compatible(*port->type, *expected->value) &&
                     type_display(*port->type) == "Stream(" + x.rendered + ")",
                 tag + "port type differs from the argument");

        // The template itself keeps its unevaluated form.
        const std::string* before = out.find("1_parser_output.txt");
        const std::string* after = out.find("2_evaluation_output.txt");
        for (const char* header : {"Implement(void_i)<", "Streamlet(void_s)<"})
            f.expect(before && after && !block(*before, header).empty() &&
                         block(*before, header) == block(*after, header),
                     tag + header + " changed during evaluation");
        Implementation* tpl = scope.find_implement("void_i");
        f.expect(tpl && tpl->is_template() && !tpl->streamlet, tag + "template was evaluated in place");
    }
    return f.result(std::to_string(samples) + " random argument types, one entity each");
}

// ---- 7: for expansion against manual unrolling ----

namespace {

/// A body fragment with `$` for the loop variable and `#` for an interpolated name.
std::string random_body(std::mt19937& rng) {
    std::string out;
    int items = 1 + static_cast<int>(rng() % 3);
    bool bypass = rng() % 4 != 0;
    if (bypass)
        out += "instance bypass_#(pass_i),\n"
               "inputs[$] => bypass_#.input,\n"
               "bypass_#.output => outputs[$],\n";
    for (int k = 0; k < items; ++k) {
        switch (rng() % 3) {
            case 0:
                out += "inputs[$] =$ * " + std::to_string(rng() % 4) + "=> outputs[($ + " +
                       std::to_string(rng() % 8) + ") % 8],\n";
                break;
            case 1:
                out += "if ($ % 2 == " + std::to_string(rng() % 2) + ") {\n  inputs[$] => outputs[7 - $],\n}\n"
                       "else {\n  inputs[$] =1=> outputs[$],\n}\n";
                break;
            default:
                out += "instance stage" + std::to_string(k) + "_#(pass_i) [2],\n"
                       "inputs[$] => stage" + std::to_string(k) + "_#[$ % 2].input,\n";
                break;
        }
    }
    return out;
}

std::string substitute(const std::string& body, const std::string& var, const std::string& name) {
    std::string out;
    for (char c : body) {
        if (c == '$')
            out += var;
        else if (c == '#')
            out += name;
        else
            out += c;
    }
    return out;
}

/// Scope lines with the implementation name unified and connection names removed.
std::vector<std::string> normalized_scope(const std::string& dump, const std::string& impl) {
    static const std::regex name_suffix(R"re( \([^()]*\)( @NoStrictType@)?$)re");
    std::vector<std::string> out;
    for (auto line : trimmed_lines(block(dump, "Scope(implement_" + impl + ")"))) {
        if (line.rfind("Scope(implement_", 0) == 0)
            line = "Scope(implement)";
        out.push_back(std::regex_replace(line, name_suffix, "$1"));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> connection_names(const Implementation& impl) {
    std::vector<std::string> out;
    for (auto& c : impl.scope->connections)
        out.push_back(c->name);
    return out;
}

} // namespace

CriterionResult check_for_expansion() {
    Failures f;
    std::mt19937 rng(7);
    const int cases = 40;
    for (int k = 0; k < cases && f.empty(); ++k) {
        std::vector<int> pool = {0, 1, 2, 3, 4, 5, 6, 7};
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(1 + rng() % 8);
        std::string array = "{";
        for (std::size_t j = 0; j < pool.size(); ++j)
            array += (j ? ", " : "") + std::to_string(pool[j]);
        array += "}";

        std::string body = random_body(rng);
        std::string src = "package fe;\n"
                          "type t = Stream(Bit(8));\n"
                          "streamlet pass_s { input: t in, output: t out, };\n"
                          "external impl pass_i of pass_s {};\n"
                          "streamlet bank_s { inputs: t [8] in, outputs: t [8] out, };\n"
                          "const A = " + array + ";\n"
                          "impl looped_i of bank_s {\n"
                          "  for i in A {\n" + substitute(body, "i", "{{i}}") + "  }\n"
                          "};\n"
                          "impl unrolled_i of bank_s {\n";
        for (int v : pool)
            src += substitute(body, std::to_string(v), std::to_string(v));
        src += "};\n";

        std::string tag = "case " + std::to_string(k) + " A=" + array + ": ";
        CompileOutput out = compile_text(src);
        Package* pkg = package(out, "fe");
        const std::string* dump = out.find("2_evaluation_output.txt");
        if (!out.ok() || !pkg || !dump) {
            f.expect(false, tag + "compile failed: " + error_text(out));
            break;
        }
        auto looped_lines = normalized_scope(*dump, "looped_i");
        f.expect(std::count_if(looped_lines.begin(), looped_lines.end(),
                               [](auto& l) { return l.find("=>") != std::string::npos; }) >=
                     static_cast<long>(pool.size()),
                 tag + "expanded scope has too few connections");
        f.expect(looped_lines == normalized_scope(*dump, "unrolled_i"),
                 tag + "expanded scope differs from the unrolled scope");

        Implementation& looped = *pkg->scope->find_implement("looped_i");
        auto names = connection_names(looped);
        std::set<std::string> unique(names.begin(), names.end());
        f.expect(unique.size() == names.size(), tag + "connection names collide");
        if (body.find("bypass_#") != std::string::npos) {
            std::set<std::string> expected, found;
            for (int v : pool)
                expected.insert("bypass_" + std::to_string(v));
            for (auto& [name, _] : looped.scope->instances)
                if (name.rfind("bypass_", 0) == 0)
                    found.insert(name);
            f.expect(found == expected, tag + "bypass instances do not enumerate A");
        }
    }

    // The interpolation example with a contiguous range.
    CompileOutput out = compile_text("package main;\n"
                                     "type bit8_stream = Stream(Bit(8), d = 5, t = 2.5);\n"
                                     "streamlet data_bypass<data: str> {\n"
                                     "  input: bit8_stream in,\n"
                                     "  output: bit8_stream out,\n"
                                     "};\n"
                                     "impl impl_data_bypass<data: str> of data_bypass<data> {\n"
                                     "  input => output,\n"
                                     "};\n"
                                     "const channel = 4;\n"
                                     "streamlet data_bypass_channel {\n"
                                     "  inputs: bit8_stream [channel] in `\"10kHz\",\n"
                                     "  outputs: bit8_stream [channel] out `\"10kHz\",\n"
                                     "};\n"
                                     "const data = {\"Monday\", \"Tuesday\", \"Wednesday\", \"Thursday\"};\n"
                                     "impl impl_data_bypass_channel of data_bypass_channel {\n"
                                     "  for i in (0=1=>channel) {\n"
                                     "    instance bypass_{{i}}(impl_data_bypass<data[i]>),\n"
                                     "    bypass_{{i}}.output => outputs[i],\n"
                                     "    inputs[i] => bypass_{{i}}.input,\n"
                                     "  }\n"
                                     "};\n");
    if (Package* pkg = package(out, "main"); out.ok() && pkg) {
        std::vector<std::string> names;
        for (auto& [name, inst] : pkg->scope->find_implement("impl_data_bypass_channel")->scope->instances)
            names.push_back(name);
        f.expect(names == std::vector<std::string>{"bypass_0", "bypass_1", "bypass_2", "bypass_3"},
                 "channel example does not yield bypass_0..bypass_3");
    } else {
        f.expect(false, "channel example failed: " + error_text(out));
    }
    return f.result(std::to_string(cases) + " random loops equal their unrolled form; bypass_0..bypass_3");
}

// ---- 8: sugaring post-condition on random fan-out topologies ----

namespace {

struct Level {
    int children = 0;
    /// Source end per sink, sinks ordered as child inputs then Self output.
    std::vector<std::string> drivers;
    std::map<std::string, int> fanout;
};

std::vector<Level> random_topology(std::mt19937& rng, std::string& src) {
    int depth = 1 + static_cast<int>(rng() % 3);
    std::vector<Level> levels(depth);
    src = "package topo;\n"
          "type t = Stream(Bit(8));\n"
          "streamlet unit_s { input: t in, output: t out, };\n"
          "external impl leaf_i of unit_s {};\n";
    for (int d = depth - 1; d >= 0; --d) {
        Level& lv = levels[d];
        lv.children = 1 + static_cast<int>(rng() % 6);
        std::string child = d + 1 < depth ? "lvl" + std::to_string(d + 1) + "_i" : "leaf_i";
        std::string body;
        std::vector<std::string> sources = {"input"};
        lv.fanout["input"] = 0;
        auto choose = [&]() {
            std::vector<std::string> open;
            for (auto& s : sources)
                if (lv.fanout[s] < 6)
                    open.push_back(s);
            // Favour the most used open source so wide fan-outs are common.
            if (rng() % 2) {
                return *std::max_element(open.begin(), open.end(), [&](auto& a, auto& b) {
                    return lv.fanout[a] < lv.fanout[b];
                });
            }
            return open[rng() % open.size()];
        };
        for (int c = 0; c < lv.children; ++c) {
            std::string name = "c" + std::to_string(c);
            body += "  instance " + name + "(" + child + "),\n";
            std::string driver = choose();
            ++lv.fanout[driver];
            lv.drivers.push_back(driver);
            body += "  " + driver + " => " + name + ".input,\n";
            sources.push_back(name + ".output");
            lv.fanout[name + ".output"] = 0;
        }
        std::string driver = choose();
        ++lv.fanout[driver];
        lv.drivers.push_back(driver);
        body += "  " + driver + " => output,\n";
        src += "impl lvl" + std::to_string(d) + "_i of unit_s {\n" + body + "};\n";
    }
    return levels;
}

} // namespace

CriterionResult check_sugaring_topologies() {
    Failures f;
    std::mt19937 rng(8);
    const int cases = 40;
    int duplicators = 0;
    for (int k = 0; k < cases && f.empty(); ++k) {
        std::string src;
        std::vector<Level> levels = random_topology(rng, src);
        std::string tag = "topology " + std::to_string(k) + ": ";
        CompileOutput out = compile_text(src);
        Package* pkg = package(out, "topo");
        if (!out.ok() || !pkg) {
            f.expect(false, tag + "compile failed: " + error_text(out));
            break;
        }
        for (std::size_t d = 0; d < levels.size(); ++d) {
            const Level& lv = levels[d];
            Implementation& impl = *pkg->scope->find_implement("lvl" + std::to_string(d) + "_i");
            std::string where = tag + impl.name + ": ";
            for (auto& use : usage_census(impl))
                f.expect(use.use_count == 1,
                         where + use.end.key() + " used " + std::to_string(use.use_count) + " times");

            int expected_dups = 0;
            for (auto& [source, count] : lv.fanout) {
                std::vector<const Connection*> from;
                for (auto& c : impl.scope->connections)
                    if (c->source.key() == source)
                        from.push_back(c.get());
                f.expect(from.size() == 1, where + source + " drives " + std::to_string(from.size()) + " ends");
                if (from.size() != 1)
                    continue;
                const Instance* sink = from[0]->sink.instance;
                std::string target = sink && sink->target ? sink->target->name : "";
                if (count >= 2) {
                    ++expected_dups;
                    const Port* out_port = sink && sink->target && sink->target->streamlet
                                               ? sink->target->streamlet->scope->find_port("output")
                                               : nullptr;
                    f.expect(target.rfind("duplicator_i@", 0) == 0 && out_port && out_port->array_size &&
                                 *out_port->array_size == count,
                             where + source + " needs a " + std::to_string(count) + "-way duplicator");
                } else if (count == 0) {
                    f.expect(target.rfind("void_i@", 0) == 0, where + source + " is not voided");
                }
            }
            int dups = 0;
            for (auto& [name, inst] : impl.scope->instances)
                dups += inst->target && inst->target->name.rfind("duplicator_i@", 0) == 0;
            f.expect(dups == expected_dups, where + "duplicator count " + std::to_string(dups));
            duplicators += dups;
        }

        std::string once = dump_project(*out.project);
        const std::string* recorded = out.find("2_evaluation_output_after_sugaring.txt");
        f.expect(recorded && *recorded == once, tag + "sugared dump differs from the project");
        SugarResult again = sugar_project(*out.project);
        f.expect(again.duplicators == 0 && again.voiders == 0 && again.diagnostics.empty() &&
                     dump_project(*out.project) == once,
                 tag + "sugaring is not idempotent");
    }
    return f.result(std::to_string(cases) + " topologies, " + std::to_string(duplicators) +
                    " duplicators, idempotent");
}

// ---- 9: TPC-H query 1 fan-out ----

CriterionResult check_tpch_fanout() {
    Failures f;
    std::vector<Diagnostic> errors;
    auto project = evaluated_project(load_sources(data_path("tpch_q1")), errors);
    if (!project || !errors.empty()) {
        f.expect(false, "evaluation failed: " + (errors.empty() ? std::string("no project") : errors[0].message));
        return f.result("");
    }
    Implementation* impl = project->find_package("tpch")->scope->find_implement("data_filter_i");
    f.expect(impl != nullptr, "data_filter_i missing");
    if (!impl)
        return f.result("");

    int before = 0;
    for (auto& use : usage_census(*impl))
        if (use.end.key() == "compare_date.output")
            before = use.use_count;
    f.expect(before == 14, "compare_date.output drives " + std::to_string(before) + " sinks before sugaring");

    SugarResult sugar = sugar_project(*project);
    f.expect(sugar.diagnostics.empty(), "sugaring reported errors");
    std::vector<const Connection*> from;
    for (auto& c : impl->scope->connections)
        if (c->source.key() == "compare_date.output")
            from.push_back(c.get());
    f.expect(from.size() == 1, "compare_date.output drives " + std::to_string(from.size()) + " ends after sugaring");
    int dups = 0;
    for (auto& [name, inst] : impl->scope->instances)
        if (inst->target && inst->target->name.rfind("duplicator_i@", 0) == 0)
            for (auto* c : from)
                dups += c->sink.instance == inst.get();
    f.expect(dups == 1, "compare_date.output reaches " + std::to_string(dups) + " duplicators");
    if (from.size() == 1 && from[0]->sink.instance) {
        const Implementation* dup = from[0]->sink.instance->target;
        const Port* out = dup->streamlet->scope->find_port("output");
        f.expect(out && out->array_size && *out->array_size == 14, "duplicator output is not a 14-element array");
        int fed = 0;
        for (auto& c : impl->scope->connections)
            fed += c->source.instance == from[0]->sink.instance && c->source.port == "output";
        f.expect(fed == 14, std::to_string(fed) + " sinks read the duplicator");
    }
    return f.result("14 sinks before; one duplicator with output[14] after");
}

// ---- 10: design rule discrimination ----

namespace {

const char* rgb_prelude = "package tpch;\n"
                          "type Group rgb {\n"
                          "  r: Bit(8),\n"
                          "  g: Bit(8),\n"
                          "  b: Bit(8),\n"
                          "};\n"
                          "type rgb_stream = Stream(rgb);\n";

struct DrcCount {
    std::size_t errors = 0;
    std::size_t warnings = 0;
    std::vector<std::string> rules;
};

DrcCount drc_of(const std::string& body, Failures& f, const std::string& tag) {
    CompileOptions options;
    options.drc = true;
    CompileOutput out = compile_text(std::string(rgb_prelude) + body, options);
    f.expect(out.find("drc_report.txt") != nullptr, tag + ": no DRC report: " + error_text(out));
    DrcCount n;
    for (auto& d : out.drc) {
        (d.severity == Severity::Error ? n.errors : n.warnings)++;
        n.rules.push_back(d.rule);
    }
    return n;
}

} // namespace

CriterionResult check_drc_triple() {
    Failures f;
    DrcCount same = drc_of("streamlet rgb_bypass {\n"
                           "  input: rgb_stream in,\n"
                           "  output: rgb_stream out,\n"
                           "};\n"
                           "impl impl_rgb_bypass of rgb_bypass {\n"
                           "  input => output,\n"
                           "};\n",
                           f, "same alias");
    f.expect(same.errors == 0 && same.warnings == 0, "same-alias connection is not clean");

    const std::string bypass2 = "streamlet rgb_bypass2 {\n"
                                "  input: Stream(rgb) in,\n"
                                "  output: Stream(rgb) out,\n"
                                "};\n";
    DrcCount unmarked = drc_of(bypass2 + "impl impl_rgb_bypass3 of rgb_bypass2 {\n"
                                         "  input => output,\n"
                                         "};\n",
                               f, "unmarked");
    f.expect(unmarked.errors == 0 && unmarked.warnings == 1 && unmarked.rules == std::vector<std::string>{"R1"},
             "structural match without marker should give exactly one R1 warning");

    DrcCount marked = drc_of(bypass2 + "impl impl_rgb_bypass2 of rgb_bypass2 {\n"
                                       "  input => output @NoStrictType@,\n"
                                       "};\n",
                             f, "marked");
    f.expect(marked.errors == 0 && marked.warnings == 0, "marked connection is not clean");

    DrcCount in_in = drc_of("streamlet two_inputs {\n"
                            "  a: rgb_stream in,\n"
                            "  b: rgb_stream in,\n"
                            "};\n"
                            "impl impl_two_inputs of two_inputs {\n"
                            "  a => b,\n"
                            "};\n",
                            f, "in to in");
    f.expect(in_in.errors == 1 && in_in.warnings == 0 && in_in.rules == std::vector<std::string>{"R3"},
             "in-to-in connection should give exactly one R3 error");
    return f.result("clean / one R1 warning / clean / one R3 error");
}

// ---- 11: DOT conventions ----

CriterionResult check_dot_conformance() {
    Failures f;
    CompileOptions options;
    options.dot = true;
    options.drc = true;
    CompileOutput out = compile_text("package dotdemo;\n"
                                     "type t = Stream(Bit(8));\n"
                                     "streamlet pass_s { input: t in, output: t out, };\n"
                                     "external impl leaf_i of pass_s {};\n"
                                     "streamlet pair_s { input: t [2] in, output: t [2] out, };\n"
                                     "impl mid_i of pair_s {\n"
                                     "  instance stage(leaf_i) [2],\n"
                                     "  for i in (0=1=>2) {\n"
                                     "    input[i] => stage[i].input,\n"
                                     "    stage[i].output => output[i],\n"
                                     "  }\n"
                                     "};\n"
                                     "impl top_i of pair_s {\n"
                                     "  instance m(mid_i),\n"
                                     "  input[0] => m.input[0],\n"
                                     "  input[1] => m.input[1],\n"
                                     "  m.output[0] => output[0],\n"
                                     "  m.output[1] => output[1],\n"
                                     "};\n",
                                     options);
    const std::string* dot = artifact(out, "circuit.dot", f);
    if (!dot)
        return f.result("");
    for (auto& problem : check_dot(*dot))
        f.expect(false, problem);

    auto lines = trimmed_lines(*dot);
    auto node = [&](const std::string& name) -> std::string {
        for (auto& l : lines)
            if (l.rfind(name + " [", 0) == 0)
                return l;
        return {};
    };
    std::string top = node("top_i"), mid = node("top_i__m"), leaf = node("top_i__m__stage_AT_1");
    f.expect(!top.empty() && !mid.empty() && !leaf.empty(), "hierarchy nodes missing");
    f.expect(top.find("color=red") != std::string::npos && mid.find("color=red") != std::string::npos,
             "wrappers are not red");
    f.expect(leaf.find("color=red") == std::string::npos, "leaf is marked as wrapper");
    f.expect(top.find("<input_AT_0>input@0") != std::string::npos, "array anchors missing");
    f.expect(leaf.find("shape=record") != std::string::npos &&
                 leaf.find("label=\"{<component>top_i__m__stage_AT_1|") != std::string::npos,
             "record label malformed");
    f.expect(std::count_if(lines.begin(), lines.end(), [](auto& l) { return l.find(" -> ") != std::string::npos; }) ==
                 8,
             "expected 8 edges");

    // The checker itself must notice a dangling anchor and a missing node.
    std::string broken = *dot;
    broken.replace(broken.find("top_i__m:input_AT_0"), 19, "top_i__m:input_AT_9");
    f.expect(!check_dot(broken).empty(), "checker accepted a dangling anchor");
    std::string missing = *dot;
    auto at = missing.find("\ntop_i__m__stage_AT_0 [");
    missing.erase(at, missing.find('\n', at + 1) - at);
    f.expect(!check_dot(missing).empty(), "checker accepted an edge to a missing node");
    return f.result("well-formed; __ names, _AT_ anchors, red wrappers, record labels");
}

// ---- 12: determinism across worker counts ----

CriterionResult check_determinism() {
    Failures f;
    Sources sources = load_sources(data_path("tpch_q1"));
    auto run = [&](unsigned jobs) {
        CompileOptions options;
        options.jobs = jobs;
        options.drc = options.dot = options.ir = true;
        return compile_many(sources, options);
    };
    CompileOutput serial = run(1);
    f.expect(serial.ok(), "serial compile failed: " + error_text(serial));
    const std::vector<std::string> files = {"1_parser_output.txt", "2_evaluation_output.txt",
                                            "2_evaluation_output_after_sugaring.txt", "drc_report.txt",
                                            "circuit.dot", "ir.json"};
    for (int round = 0; round < 2; ++round) {
        CompileOutput parallel = run(8);
        for (auto& file : files) {
            const std::string* a = serial.find(file);
            const std::string* b = parallel.find(file);
            f.expect(a && b && *a == *b, file + " differs between 1 and 8 workers");
        }
    }
    return f.result("6 artifacts byte-identical for 1 and 8 workers");
}

const std::vector<Criterion>& all_criteria() {
    static const std::vector<Criterion> list = {
        {1, "bit-width oracle", 1000, check_bit_widths},
        {2, "cross-package lazy evaluation", 1000, check_cross_package_laziness},
        {3, "unary minus precedence", 1000, check_unary_precedence},
        {4, "stream property defaults", 1000, check_stream_defaults},
        {5, "name-resolution matrix", 5000, check_resolution_matrix},
        {6, "template monomorphization", 5000, check_template_instances},
        {7, "for-expansion oracle", 10000, check_for_expansion},
        {8, "sugaring post-condition", 10000, check_sugaring_topologies},
        {9, "TPC-H fan-out", 2000, check_tpch_fanout},
        {10, "DRC discrimination", 1000, check_drc_triple},
        {11, "DOT conformance", 2000, check_dot_conformance},
        {12, "determinism", 10000, check_determinism},
    };
    return list;
}

} // namespace tydi::testing
