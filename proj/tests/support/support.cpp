// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <regex>
#include <sstream>

namespace epg_test {

namespace fs = std::filesystem;

std::string fixture_path(const std::string& name) {
    return std::string{EPG_FIXTURE_DIR} + "/" + name + ".json";
}

std::string golden_path(const std::string& name) { return std::string{EPG_GOLDEN_DIR} + "/" + name; }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(EPG_FIXTURE_DIR))
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

epg::ParsedTrace load_fixture(const std::string& name) { return epg::load_trace_file(fixture_path(name)); }

std::unique_ptr<Pipeline> pipeline(epg::ParsedTrace trace, epg::Granularity g) {
    auto p = std::make_unique<Pipeline>();
    p->replay = epg::replay(std::move(trace));
    p->epg = epg::build_epg(p->replay, g);
    return p;
}

std::unique_ptr<Pipeline> pipeline(const std::string& fixture, epg::Granularity g) {
    return pipeline(load_fixture(fixture), g);
}

Address contract_addr() { return fixturegen::filled(0xc0); }

epg::ParsedTrace run_code(const Bytes& code, const Bytes& input, fixturegen::World extra, const Word& value) {
    auto world = std::move(extra);
    world[fixturegen::eoa()].balance = fixturegen::ether(100);
    world[contract_addr()].code = code;
    fixturegen::Tx tx;
    tx.from = fixturegen::eoa();
    tx.to = contract_addr();
    tx.input = input;
    tx.value = value;
    fixturegen::Evm evm{std::move(world)};
    return evm.run(tx, "0x" + std::string(64, '1'));
}

std::vector<epg::Finding> of_rule(const std::vector<epg::Finding>& fs, epg::Rule r) {
    std::vector<epg::Finding> out;
    std::copy_if(fs.begin(), fs.end(), std::back_inserter(out), [r](const auto& f) { return f.rule == r; });
    return out;
}

epg::DetectorConfig default_config() { return {}; }

epg::PriceTable fixture_prices() { return epg::PriceTable::load(std::string{EPG_FIXTURE_DIR} + "/prices.csv"); }

}  // namespace epg_test

namespace epg_test {

namespace {

std::map<std::string, std::string> dot_attributes(const std::string& body) {
    static const std::regex attr{R"re((\w+)\s*=\s*"((?:[^"\\]|\\.)*)")re"};
    std::map<std::string, std::string> out;
    for (std::sregex_iterator it{body.begin(), body.end(), attr}, end; it != end; ++it)
        out[(*it)[1].str()] = (*it)[2].str();
    return out;
}

}  // namespace

DotMultisets dot_multisets(const std::string& dot) {
    static const std::regex edge{R"re(^\s*(\w+)\s*->\s*(\w+)\s*\[(.*)\];\s*$)re"};
    static const std::regex node{R"re(^\s*(\w+)\s*\[(.*)\];\s*$)re"};
    std::map<std::string, std::string> addr;
    std::vector<std::tuple<std::string, std::string, std::map<std::string, std::string>>> raw_edges;
    std::istringstream in{dot};
    std::string line;
    DotMultisets out;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, edge)) {
            raw_edges.emplace_back(m[1].str(), m[2].str(), dot_attributes(m[3].str()));
        } else if (std::regex_match(line, m, node)) {
            auto attrs = dot_attributes(m[2].str());
            addr[m[1].str()] = attrs["addr"];
            out.vertices.insert(attrs["addr"]);
        }
    }
    for (auto& [t, h, attrs] : raw_edges) out.edges.emplace(addr[t], addr[h], attrs["label"], attrs["value"]);
    return out;
}

std::string graph_difference(const epg::PropertyGraph& a, const epg::PropertyGraph& b) {
    if (a.vertex_ids() != b.vertex_ids()) return "vertex id sets differ";
    for (auto v : a.vertex_ids())
        if (!(a.vertex(v) == b.vertex(v))) return "vertex " + std::to_string(v) + " differs";
    if (a.edge_count() != b.edge_count()) return "edge counts differ";
    for (std::size_t i = 0; i < a.edge_count(); ++i)
        if (!(a.edges()[i] == b.edges()[i])) return "edge " + std::to_string(i) + " differs";
    return {};
}

}  // namespace epg_test
