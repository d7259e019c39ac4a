// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "epg/epg.hpp"
#include "epg/error.hpp"
#include "epg/export.hpp"

#include "support.hpp"

using namespace epg;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in{path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

PropertyGraph foo_bar_ctg() {
    auto r = replay(epg_test::load_fixture("foo_bar_attack"));
    VertexRegistry reg;
    return build_ctg(r, reg);
}

}  // namespace

TEST_CASE("Foo/Bar call trace graph matches the golden DOT file") {
    auto dot = to_dot(foo_bar_ctg(), "ctg");
    auto got = epg_test::dot_multisets(dot);
    auto want = epg_test::dot_multisets(slurp(epg_test::golden_path("foo_bar_ctg.dot")));
    REQUIRE(want.vertices.size() == 3);
    CHECK(got.vertices == want.vertices);
    CHECK(got.edges == want.edges);
}

TEST_CASE("empty graph exports to valid empty documents") {
    PropertyGraph g;
    CHECK(to_dot(g) == "digraph epg {\n}\n");
    auto gs = to_graphson(g);
    auto back = from_graphson(nlohmann::json::parse(gs.dump()));
    CHECK(back.vertex_count() == 0);
    CHECK(back.edge_count() == 0);
}

TEST_CASE("GraphSON round trip and DOT determinism over every fixture") {
    for (auto gran : {Granularity::PerAddress, Granularity::PerInvocation}) {
        for (const auto& name : epg_test::fixture_names()) {
            CAPTURE(name);
            auto a = epg_test::pipeline(name, gran);
            auto b = epg_test::pipeline(name, gran);
            const auto& g = a->epg.graph;
            auto back = from_graphson(nlohmann::json::parse(to_graphson(g).dump()));
            CHECK(epg_test::graph_difference(g, back) == "");
            CHECK(to_dot(g) == to_dot(b->epg.graph));
            CHECK(to_dot(back) == to_dot(g));
        }
    }
}

TEST_CASE("GraphSON rejects foreign documents") {
    CHECK_THROWS_AS(from_graphson(nlohmann::json::parse(R"({"@type": "g:Tree"})")), Error);
    CHECK_THROWS_AS(graph_format_from_string("svg"), Error);
}

TEST_CASE("export_graph reports a failed sink") {
    std::ostringstream sink;
    sink.setstate(std::ios::badbit);
    CHECK_THROWS_AS(export_graph(foo_bar_ctg(), GraphFormat::Dot, sink), Error);
    std::ostringstream ok;
    export_graph(foo_bar_ctg(), GraphFormat::GraphSON, ok);
    CHECK(nlohmann::json::parse(ok.str()).contains("@type"));
}
