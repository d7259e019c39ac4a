// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "epg/flow.hpp"
#include "epg/frames.hpp"
#include "epg/graph.hpp"
#include "epg/trace.hpp"

namespace epg {

/// PerAddress merges every invocation of one address into a single contract
/// vertex (the call trace picture). PerInvocation gives each frame its own
/// vertex, which keeps set traversals from leaking between frames.
enum class Granularity : std::uint8_t { PerAddress, PerInvocation };

using BlockKey = std::tuple<FrameId, std::uint64_t, std::uint32_t>;  // frame, pc, visit index

/// Shared vertex id space for the component graphs.
struct VertexRegistry {
    Granularity granularity = Granularity::PerAddress;
    VertexId next = 0;
    std::vector<Vertex> vertices;                   // canonical definitions, by id
    std::map<Address, VertexId> by_address;          // PerAddress contracts (and the sender)
    std::map<FrameId, VertexId> by_frame;            // callee vertex of each frame
    std::optional<VertexId> sender;
    std::map<BlockKey, VertexId> blocks;
    std::map<BlockId, VertexId> by_block;
    std::map<RefId, VertexId> sources;

    VertexId contract(const Address& a, std::optional<FrameId> frame);
    VertexId block(const BlockVisit& b);
    VertexId source(const SourceRef& ref, RefId rid, std::optional<Word> value);
    [[nodiscard]] const Vertex& at(VertexId id) const { return vertices.at(id); }
};

/// Everything the builders need from one replay.
struct Replay {
    ParsedTrace trace;
    FrameTree frames;
    FlowRecords records;
};

Replay replay(ParsedTrace trace, FlowTrackerOptions options = {});

PropertyGraph build_ctg(const Replay& r, VertexRegistry& reg);
PropertyGraph build_dcfg(const Replay& r, FrameId frame, VertexRegistry& reg);
/// Throws Error{DanglingSource} when a tag names a version that was never materialized.
PropertyGraph build_ddg(const Replay& r, VertexRegistry& reg);

/// Execution property graph with registries and the side tables detectors rely on.
struct Epg {
    PropertyGraph graph;
    Granularity granularity = Granularity::PerAddress;
    VertexRegistry registry;
    VertexId sender = 0;
    std::optional<VertexId> origin;               // the Origin source vertex, when materialized
    std::map<VertexId, FrameId> block_frame;
    std::map<VertexId, std::size_t> block_step;   // first step of each block visit
    std::map<VertexId, FrameId> contract_frame;   // PerInvocation only
    std::map<VertexId, RefId> source_ref;
    std::size_t ct_edges = 0;
    std::size_t t_edges = 0;

    [[nodiscard]] bool is_block(VertexId v) const { return block_frame.contains(v); }
    [[nodiscard]] std::optional<VertexId> source_vertex(RefId r) const {
        auto it = registry.sources.find(r);
        return it == registry.sources.end() ? std::nullopt : std::optional{it->second};
    }
};

/// Merges the component graphs and applies the retargeting transformation:
/// one extra CT edge per invocation edge, leaving the initiating block.
Epg construct_epg(const Replay& r, const PropertyGraph& ctg, const std::vector<PropertyGraph>& dcfgs,
                  const PropertyGraph& ddg, VertexRegistry reg);

/// Convenience pipeline: component builders plus construct_epg.
Epg build_epg(const Replay& r, Granularity g);

}  // namespace epg
