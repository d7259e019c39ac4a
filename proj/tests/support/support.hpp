// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "epg/analysis.hpp"
#include "epg/detectors.hpp"
#include "epg/epg.hpp"
#include "epg/trace.hpp"

#include "common.hpp"

namespace epg_test {

using epg::Address;
using epg::Bytes;
using epg::Word;

std::string fixture_path(const std::string& name);
std::string golden_path(const std::string& name);
/// Fixture names (file stems) in sorted order.
std::vector<std::string> fixture_names();
epg::ParsedTrace load_fixture(const std::string& name);

/// Replay plus graph, pinned in place so the subject's references stay valid.
struct Pipeline {
    epg::Replay replay;
    epg::Epg epg;

    [[nodiscard]] epg::Subject subject() const { return {replay, epg}; }
};

std::unique_ptr<Pipeline> pipeline(epg::ParsedTrace trace,
                                   epg::Granularity g = epg::Granularity::PerInvocation);
std::unique_ptr<Pipeline> pipeline(const std::string& fixture,
                                   epg::Granularity g = epg::Granularity::PerInvocation);

/// Address the single-contract runner installs code at.
Address contract_addr();

/// Calls `code` at contract_addr() from the shared EOA with the given call data.
/// `extra` accounts are added to the world first.
epg::ParsedTrace run_code(const Bytes& code, const Bytes& input = {}, fixturegen::World extra = {},
                          const Word& value = Word{0});

/// Findings of one rule.
std::vector<epg::Finding> of_rule(const std::vector<epg::Finding>& fs, epg::Rule r);

epg::DetectorConfig default_config();
epg::PriceTable fixture_prices();

}  // namespace epg_test

namespace epg_test {

/// Vertex and edge multisets of a DOT document, keyed by the `addr` attribute.
/// Edges are (tail addr, head addr, label, value).
struct DotMultisets {
    std::multiset<std::string> vertices;
    std::multiset<std::tuple<std::string, std::string, std::string, std::string>> edges;

    friend bool operator==(const DotMultisets&, const DotMultisets&) = default;
};

/// Reads the subset of DOT the exporter and the golden files use: one statement
/// per line, `id [k="v", ...];` or `a -> b [k="v", ...];`, `//` comments.
DotMultisets dot_multisets(const std::string& dot);

/// Structural equality up to nothing: same vertex ids, kinds, properties, and
/// the same edge list. Returns a description of the first difference, or "".
std::string graph_difference(const epg::PropertyGraph& a, const epg::PropertyGraph& b);

}  // namespace epg_test
