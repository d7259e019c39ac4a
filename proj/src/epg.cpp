// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/epg.hpp"

#include <algorithm>
#include <set>

#include "epg/error.hpp"
#include "epg/opcodes.hpp"

namespace epg {
namespace {

std::string contextual_value(const Replay& r, const SourceIdentifier& id) {
    const auto& env = r.trace.envelope;
    auto frame = [&]() -> const CallFrame* { return id.frame < r.frames.size() ? &r.frames.at(id.frame) : nullptr; };
    switch (id.kind) {
        case SourceKind::Origin: return env.from.hex();
        case SourceKind::BlockNumber: return to_hex(Word{env.block_number});
        case SourceKind::Timestamp: return to_hex(Word{env.timestamp});
        case SourceKind::CallData: return frame() ? to_hex(ByteView{frame()->input}) : "";
        case SourceKind::CallValue: return frame() ? to_hex(frame()->apparent_value) : "";
        case SourceKind::Caller: return frame() ? frame()->sender.hex() : "";
        case SourceKind::ReturnData: return frame() ? to_hex(ByteView{frame()->output}) : "";
        default: return "";
    }
}

}  // namespace

VertexId VertexRegistry::contract(const Address& a, std::optional<FrameId> frame) {
    const bool per_frame = granularity == Granularity::PerInvocation && frame.has_value();
    if (per_frame) {
        if (auto it = by_frame.find(*frame); it != by_frame.end()) return it->second;
    } else if (auto it = by_address.find(a); it != by_address.end()) {
        return it->second;
    }
    const VertexId id = next++;
    vertices.push_back(Vertex{id, VertexKind::Contract, {{"addr", a.hex()}}});
    if (per_frame) by_frame[*frame] = id;
    else by_address[a] = id;
    return id;
}

VertexId VertexRegistry::block(const BlockVisit& b) {
    const BlockKey key{b.frame, b.pc, b.index};
    if (auto it = blocks.find(key); it != blocks.end()) return it->second;
    const VertexId id = next++;
    vertices.push_back(Vertex{id,
                              VertexKind::BasicBlock,
                              {{"index", std::uint64_t{b.index}}, {"pc", std::uint64_t{b.pc}}}});
    blocks.emplace(key, id);
    by_block.emplace(b.id, id);
    return id;
}

VertexId VertexRegistry::source(const SourceRef& ref, RefId rid, std::optional<Word> value) {
    if (auto it = sources.find(rid); it != sources.end()) return it->second;
    const VertexId id = next++;
    vertices.push_back(Vertex{id,
                              VertexKind::DataSource,
                              {{"index", std::uint64_t{ref.version}},
                               {"identifier", ref.identifier.to_string()},
                               {"value", value ? to_hex(*value) : std::string{}}}});
    sources.emplace(rid, id);
    return id;
}

Replay replay(ParsedTrace trace, FlowTrackerOptions options) {
    Replay r;
    r.trace = std::move(trace);
    r.frames = reconstruct_frames(r.trace.envelope, r.trace.steps);
    r.records = track_flows(r.trace, r.frames, std::move(options));
    return r;
}

namespace {

VertexId frame_vertex(const Replay& r, FrameId f, VertexRegistry& reg) {
    if (auto it = reg.by_frame.find(f); it != reg.by_frame.end()) return it->second;
    const auto v = reg.contract(r.frames.at(f).callee, f);
    reg.by_frame[f] = v;
    return v;
}

VertexId sender_vertex(const Replay& r, VertexRegistry& reg) {
    if (!reg.sender) reg.sender = reg.contract(r.trace.envelope.from, std::nullopt);
    return *reg.sender;
}

void copy_vertex(PropertyGraph& g, const VertexRegistry& reg, VertexId id) { g.insert_vertex(reg.at(id)); }

}  // namespace

PropertyGraph build_ctg(const Replay& r, VertexRegistry& reg) {
    PropertyGraph g;
    const auto sender = sender_vertex(r, reg);
    copy_vertex(g, reg, sender);
    std::map<FrameId, std::vector<AssetFlow>> flows;
    for (const auto& f : r.records.flows)
        if (!r.frames.discarded(f.frame)) flows[f.frame].push_back(f.flow);

    for (const auto& f : r.frames.frames()) {
        VertexId tail = sender;
        if (f.parent) {
            tail = reg.granularity == Granularity::PerInvocation ? frame_vertex(r, *f.parent, reg)
                                                                  : reg.contract(f.caller, std::nullopt);
        }
        const auto head = frame_vertex(r, f.id, reg);
        copy_vertex(g, reg, tail);
        copy_vertex(g, reg, head);
        Properties p{{"index", std::uint64_t{f.index_in_parent}},
                     {"value", to_hex(f.value)},
                     {"input", to_hex(ByteView{f.input})},
                     {"output", to_hex(ByteView{f.output})}};
        if (auto it = flows.find(f.id); it != flows.end()) p.emplace("assetFlow", it->second);
        g.add_edge(tail, head, invocation_label(f.opcode), std::move(p));
    }
    return g;
}

PropertyGraph build_dcfg(const Replay& r, FrameId frame, VertexRegistry& reg) {
    PropertyGraph g;
    const auto cv = frame_vertex(r, frame, reg);
    copy_vertex(g, reg, cv);
    auto it = r.records.frame_blocks.find(frame);
    if (it == r.records.frame_blocks.end()) return g;
    for (auto bid : it->second) {
        const auto& b = r.records.blocks.at(bid);
        const auto v = reg.block(b);
        copy_vertex(g, reg, v);
        if (!b.predecessor) {
            g.add_edge(cv, v, Label::Entry);
            continue;
        }
        const auto pv = reg.by_block.at(*b.predecessor);
        if (b.entry == BlockEntry::JumpI) g.add_edge(pv, v, Label::JumpI, {{"condition", b.condition.value_or(false)}});
        else g.add_edge(pv, v, Label::Jump);
    }
    return g;
}

PropertyGraph build_ddg(const Replay& r, VertexRegistry& reg) {
    const auto& rec = r.records;
    // live versions: targets of writes whose frame persisted
    std::set<RefId> live;
    std::set<RefId> dead;
    for (const auto& w : rec.writes) (r.frames.discarded(w.frame) ? dead : live).insert(w.target);

    std::set<RefId> needed(live.begin(), live.end());
    auto usable = [&](RefId ref) {
        if (rec.sources.version_of(ref) == 0 || live.contains(ref)) return true;
        if (dead.contains(ref)) return false;
        throw Error(ErrorKind::DanglingSource, "tag names " + rec.sources.resolve(ref).identifier.to_string() + "@" +
                                                   std::to_string(rec.sources.version_of(ref)) +
                                                   ", a version that was never written");
    };
    auto collect = [&](TagId t) {
        for (auto ref : rec.tags.refs(t))
            if (usable(ref)) needed.insert(ref);
    };
    for (const auto& w : rec.writes) {
        if (r.frames.discarded(w.frame)) continue;
        collect(w.value_tag);
        collect(w.slot_tag);
    }
    for (const auto& c : rec.controls)
        if (c.taken_block) collect(c.condition_tag);

    PropertyGraph g;
    auto vertex_of = [&](RefId ref) {
        std::optional<Word> value;
        if (auto it = rec.values.find(ref); it != rec.values.end()) value = it->second;
        const auto sref = rec.sources.resolve(ref);
        const auto v = reg.source(sref, ref, value);
        if (!value && !sref.identifier.writable()) {
            // contextual sources: value comes from the envelope or the frame tree
            auto& vert = reg.vertices.at(v);
            vert.props["value"] = contextual_value(r, sref.identifier);
        }
        return v;
    };
    for (auto ref : needed) copy_vertex(g, reg, vertex_of(ref));
    auto block_vertex = [&](BlockId b) {
        const auto v = reg.block(rec.blocks.at(b));
        copy_vertex(g, reg, v);
        return v;
    };

    for (const auto& w : rec.writes) {
        if (r.frames.discarded(w.frame)) continue;
        const auto target = reg.sources.at(w.target);
        if (w.block) g.add_edge(block_vertex(*w.block), target, Label::Write);
        std::set<RefId> deps;
        for (auto t : {w.value_tag, w.slot_tag})
            for (auto ref : rec.tags.refs(t))
                if (usable(ref)) deps.insert(ref);
        for (auto ref : deps) g.add_edge(reg.sources.at(ref), target, Label::Dependency);
    }
    for (const auto& c : rec.controls) {
        if (!c.taken_block) continue;
        const auto bv = block_vertex(*c.taken_block);
        for (auto ref : rec.tags.refs(c.condition_tag))
            if (usable(ref)) g.add_edge(reg.sources.at(ref), bv, Label::Control);
    }
    // version chains, ascending
    std::map<IdentId, std::vector<std::pair<std::uint32_t, RefId>>> chains;
    for (auto ref : needed)
        if (rec.sources.identifier(rec.sources.ident_of(ref)).writable())
            chains[rec.sources.ident_of(ref)].emplace_back(rec.sources.version_of(ref), ref);
    for (auto& [ident, versions] : chains) {
        std::sort(versions.begin(), versions.end());
        for (std::size_t k = 1; k < versions.size(); ++k)
            g.add_edge(reg.sources.at(versions[k - 1].second), reg.sources.at(versions[k].second),
                       Label::Transition);
    }
    return g;
}

Epg construct_epg(const Replay& r, const PropertyGraph& ctg, const std::vector<PropertyGraph>& dcfgs,
                  const PropertyGraph& ddg, VertexRegistry reg) {
    Epg e;
    e.granularity = reg.granularity;
    for (const auto& v : reg.vertices) e.graph.insert_vertex(v);
    auto copy_edges = [&](const PropertyGraph& g) {
        for (const auto& ed : g.edges()) e.graph.add_edge(ed.tail, ed.head, ed.label, ed.props);
    };
    copy_edges(ctg);
    for (const auto& g : dcfgs) copy_edges(g);
    copy_edges(ddg);

    e.sender = reg.sender.value_or(0);
    // the invocation edges of the call trace graph are emitted in frame order
    for (const auto& ed : ctg.edges()) {
        if (!is_invocation(ed.label)) continue;
        ++e.t_edges;
        const auto frame = static_cast<FrameId>(e.t_edges - 1);
        VertexId tail = e.sender;
        if (auto it = r.records.call_blocks.find(frame); it != r.records.call_blocks.end())
            tail = reg.by_block.at(it->second);
        e.graph.add_edge(tail, ed.head, ct_variant(ed.label), ed.props);
        ++e.ct_edges;
    }

    for (const auto& [key, v] : reg.blocks) e.block_frame.emplace(v, std::get<0>(key));
    for (const auto& [bid, v] : reg.by_block) e.block_step.emplace(v, r.records.blocks.at(bid).first_step);
    if (reg.granularity == Granularity::PerInvocation)
        for (const auto& [f, v] : reg.by_frame) e.contract_frame.emplace(v, f);
    for (const auto& [ref, v] : reg.sources) {
        e.source_ref.emplace(v, ref);
        if (r.records.sources.resolve(ref).identifier.kind == SourceKind::Origin) e.origin = v;
    }
    e.registry = std::move(reg);
    return e;
}

Epg build_epg(const Replay& r, Granularity g) {
    VertexRegistry reg;
    reg.granularity = g;
    auto ctg = build_ctg(r, reg);
    std::vector<PropertyGraph> dcfgs;
    for (const auto& f : r.frames.frames()) dcfgs.push_back(build_dcfg(r, f.id, reg));
    auto ddg = build_ddg(r, reg);
    return construct_epg(r, ctg, dcfgs, ddg, std::move(reg));
}

}  // namespace epg
