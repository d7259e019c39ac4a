// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epg/error.hpp"

namespace epg {
namespace {

const LabelSet kCfg = LabelSet::C() | LabelSet::CT();

bool is_block_vertex(const Vertex& v) { return v.kind == VertexKind::BasicBlock; }

Traversal blocks_only() { return filter(is_block_vertex); }

/// Contract address executing a block, or carried by a contract vertex.
Address address_of(const Subject& s, VertexId v) {
    const auto& e = s.epg;
    if (auto it = e.block_frame.find(v); it != e.block_frame.end()) return s.replay.frames.at(it->second).callee;
    const auto& vert = e.graph.vertex(v);
    if (auto it = vert.props.find("addr"); it != vert.props.end())
        return parse_address(std::get<std::string>(it->second));
    return {};
}

std::uint64_t pc_of(const Subject& s, VertexId b) {
    return std::get<std::uint64_t>(s.epg.graph.vertex(b).props.at("pc"));
}

Witness witness(const Subject& s, std::string role, VertexId v) {
    return Witness{std::move(role), v, address_of(s, v).hex()};
}

std::optional<VertexId> frame_vertex_of_block(const Subject& s, VertexId b) {
    auto it = s.epg.block_frame.find(b);
    if (it == s.epg.block_frame.end()) return std::nullopt;
    auto fv = s.epg.registry.by_frame.find(it->second);
    return fv == s.epg.registry.by_frame.end() ? std::nullopt : std::optional{fv->second};
}

std::optional<VertexId> source_vertex_where(const Subject& s, SourceKind kind, FrameId frame) {
    for (const auto& [v, ref] : s.epg.source_ref) {
        const auto id = s.replay.records.sources.resolve(ref).identifier;
        if (id.kind == kind && id.frame == frame) return v;
    }
    return std::nullopt;
}

bool origin_controlled(const Subject& s, const DetectorConfig& cfg, const VertexSet& sources) {
    if (s.epg.origin && sources.contains(*s.epg.origin)) return true;
    if (cfg.accept_root_caller)
        if (auto c = source_vertex_where(s, SourceKind::Caller, 0); c && sources.contains(*c)) return true;
    return false;
}

/// Keeps one finding per (rule, victim, pc); the candidate list is already in preference order.
std::vector<Finding> dedupe(std::vector<Finding> candidates) {
    std::vector<Finding> out;
    std::set<std::tuple<Rule, Address, std::uint64_t>> seen;
    for (auto& f : candidates)
        if (seen.emplace(f.rule, f.victim, f.pc).second) out.push_back(std::move(f));
    return out;
}

void sort_findings(std::vector<Finding>& fs) {
    auto key = [](const Finding& f) {
        std::vector<VertexId> ids;
        for (const auto& w : f.witnesses) ids.push_back(w.vertex);
        return std::make_pair(f.rule, ids);
    };
    std::stable_sort(fs.begin(), fs.end(), [&](const Finding& a, const Finding& b) { return key(a) < key(b); });
}

/// Non-discarded flows grouped by the block that issued the carrying invocation.
std::map<VertexId, std::vector<const TrackedFlow*>> flows_by_block(const Subject& s) {
    std::map<VertexId, std::vector<const TrackedFlow*>> out;
    const auto& rec = s.replay.records;
    for (const auto& f : rec.flows) {
        if (s.replay.frames.discarded(f.frame)) continue;
        auto cb = rec.call_blocks.find(f.frame);
        if (cb == rec.call_blocks.end()) continue;
        out[s.epg.registry.by_block.at(cb->second)].push_back(&f);
    }
    return out;
}

/// Source references named by a tag plus everything they depend on in the graph.
std::set<RefId> tag_closure(const Subject& s, TagId tag) {
    const auto& refs = s.replay.records.tags.refs(tag);
    std::set<RefId> out(refs.begin(), refs.end());
    VertexSet seeds;
    for (auto r : refs)
        if (auto v = s.epg.source_vertex(r)) seeds.insert(*v);
    for (auto v : repeat(in(LabelSet{Label::Dependency}))(s.epg.graph, seeds)) out.insert(s.epg.source_ref.at(v));
    return out;
}

long double to_real(const Word& w) { return w.convert_to<long double>(); }

std::string fmt(long double x) {
    std::ostringstream os;
    os.precision(6);
    os << static_cast<double>(x);
    return os.str();
}

}  // namespace

std::string_view to_string(Rule r) noexcept {
    switch (r) {
        case Rule::Reentrancy: return "Reentrancy";
        case Rule::ReentrancyR1: return "ReentrancyR1";
        case Rule::FaultyAccessControl: return "FaultyAccessControl";
        case Rule::PriceManipulation: return "PriceManipulation";
    }
    return "?";
}

const Witness* Finding::witness(std::string_view role) const {
    for (const auto& w : witnesses)
        if (w.role == role) return &w;
    return nullptr;
}

void DetectorConfig::validate() const {
    if (!(p1_threshold > 0.0 && p1_threshold <= 1.0))
        throw Error(ErrorKind::BadThreshold, "p1_threshold must lie in (0, 1], got " + fmt(p1_threshold));
    if (!(p2_usd_threshold >= 0.0) || std::isinf(p2_usd_threshold))
        throw Error(ErrorKind::BadThreshold, "p2_usd_threshold must be a non-negative amount, got " +
                                                 fmt(p2_usd_threshold));
}

// ---------------------------------------------------------------------------
// traversal building blocks

VertexSet frame_vertices(const Subject& s) {
    VertexSet out;
    for (const auto& [v, f] : s.epg.contract_frame) out.insert(v);
    return out;
}

VertexSet reentrant(const Subject& s, VertexId v0) {
    const auto addr = address_of(s, v0);
    auto same_address = [&](const Vertex& v) {
        return v.id != v0 && v.kind == VertexKind::Contract &&
               parse_address(std::get<std::string>(v.props.at("addr"))) == addr;
    };
    return compose({filter(same_address), tcon()})(s.epg.graph, {v0});
}

VertexSet control_block(const Subject& s, VertexId v) {
    const auto t = compose({in(LabelSet{Label::Write}), repeat(out(LabelSet{Label::Transition})),
                            in(LabelSet{Label::Control}), repeat(out(kCfg))});
    return blocks_only()(s.epg.graph, t(s.epg.graph, {v}));
}

VertexSet succ_block_1(const Subject& s, VertexId v_prime) {
    const auto& g = s.epg.graph;
    const auto after = compose({repeat_exclusive(out(kCfg)), in(LabelSet::CT())})(g, {v_prime});
    const auto inside = repeat(out(kCfg))(g, {v_prime});
    return blocks_only()(g, minus(after, inside));
}

VertexSet succ_block(const Subject& s, VertexId v0, VertexId v) {
    const auto& g = s.epg.graph;
    if (!tcon()(g, {v0}).contains(v))
        throw Error(ErrorKind::NotDescendant,
                    "vertex " + std::to_string(v) + " is not an invocation below " + std::to_string(v0));
    const auto up = repeat(in(LabelSet::T()));
    VertexSet out;
    for (auto vp : minus(up(g, {v}), up(g, {v0}))) {
        auto part = succ_block_1(s, vp);
        out.insert(part.begin(), part.end());
    }
    return out;
}

VertexSet control_source(const Subject& s, const VertexSet& blocks) {
    return compose({repeat(in(LabelSet{Label::Dependency})), in(LabelSet{Label::Control}), repeat(in(kCfg))})(
        s.epg.graph, blocks);
}

VertexSet transfer_blocks(const Subject& s) {
    const auto& g = s.epg.graph;
    auto has_transfer = [&g](const Vertex& b) {
        if (b.kind != VertexKind::BasicBlock) return false;
        bool any = false;
        g.for_each_out(b.id, LabelSet::CT(), [&](const Edge& e) {
            auto it = e.props.find("assetFlow");
            if (it != e.props.end() && !std::get<std::vector<AssetFlow>>(it->second).empty()) any = true;
        });
        return any;
    };
    return compose({filter(has_transfer), in(LabelSet::CT())})(g, frame_vertices(s));
}

VertexSet write_control(const Subject& s, const VertexSet& blocks) {
    return control_source(s, in(LabelSet{Label::Write})(s.epg.graph, control_source(s, blocks)));
}

// ---------------------------------------------------------------------------
// reentrancy

std::set<Triple> reentrancy_triples(const Subject& s) {
    std::set<Triple> out;
    for (auto v0 : frame_vertices(s)) {
        for (auto v : reentrant(s, v0)) {
            const auto cb = control_block(s, v);
            if (cb.empty()) continue;
            const auto sb = succ_block(s, v0, v);
            for (auto b : cb)
                if (sb.contains(b)) out.emplace(v0, v, b);
        }
    }
    return out;
}

namespace {

std::vector<Finding> reentrancy_findings(const Subject& s, Rule rule, const std::set<Triple>& triples,
                                         std::vector<std::string> refinements) {
    // prefer witnesses whose outer invocation belongs to the contract that owns the block
    std::vector<Triple> ordered(triples.begin(), triples.end());
    std::stable_sort(ordered.begin(), ordered.end(), [&](const Triple& a, const Triple& b) {
        const bool sa = address_of(s, std::get<0>(a)) == address_of(s, std::get<2>(a));
        const bool sb = address_of(s, std::get<0>(b)) == address_of(s, std::get<2>(b));
        return sa > sb;
    });
    std::vector<Finding> candidates;
    for (const auto& [v0, v, b] : ordered) {
        Finding f;
        f.rule = rule;
        f.witnesses = {witness(s, "v0", v0), witness(s, "v", v), witness(s, "b", b)};
        f.refinements = refinements;
        f.victim = address_of(s, b);
        f.pc = pc_of(s, b);
        f.note = "state written at pc " + std::to_string(f.pc) + " after a re-entered invocation of " +
                 address_of(s, v).hex();
        candidates.push_back(std::move(f));
    }
    auto out = dedupe(std::move(candidates));
    sort_findings(out);
    return out;
}

}  // namespace

std::vector<Finding> detect_reentrancy(const Subject& s, const DetectorConfig& /*cfg*/) {
    const auto transfers = transfer_blocks(s);
    std::set<Triple> kept;
    std::map<VertexId, bool> moves_assets;
    for (const auto& t : reentrancy_triples(s)) {
        const auto v = std::get<1>(t);
        auto [it, fresh] = moves_assets.try_emplace(v, false);
        if (fresh) {
            const auto subtree = repeat(out(kCfg))(s.epg.graph, {v});
            it->second = std::any_of(subtree.begin(), subtree.end(), [&](VertexId x) { return transfers.contains(x); });
        }
        if (it->second) kept.insert(t);
    }
    return reentrancy_findings(s, Rule::Reentrancy, kept, {});
}

std::vector<Finding> detect_reentrancy_r1(const Subject& s, const DetectorConfig& /*cfg*/) {
    const auto& g = s.epg.graph;
    const auto writable = [&](const Vertex& v) {
        auto it = s.epg.source_ref.find(v.id);
        return it != s.epg.source_ref.end() &&
               s.replay.records.sources.resolve(it->second).identifier.writable();
    };
    std::set<Triple> triples;
    for (auto v0 : frame_vertices(s)) {
        for (auto v : reentrant(s, v0)) {
            const auto subtree = blocks_only()(g, repeat(out(kCfg))(g, {v}));
            auto reads = in(LabelSet{Label::Control})(g, subtree);
            const auto dep = compose({in(LabelSet{Label::Dependency}), out(LabelSet{Label::Write})})(g, subtree);
            reads.insert(dep.begin(), dep.end());
            reads = filter(writable)(g, reads);
            if (reads.empty()) continue;
            const auto later = compose({repeat(out(LabelSet{Label::Transition})), out(LabelSet{Label::Transition})})(
                g, reads);
            const auto writers = in(LabelSet{Label::Write})(g, later);
            if (writers.empty()) continue;
            const auto sb = succ_block(s, v0, v);
            for (auto b : writers)
                if (sb.contains(b)) triples.emplace(v0, v, b);
        }
    }
    return reentrancy_findings(s, Rule::ReentrancyR1, triples, {"R1"});
}

// ---------------------------------------------------------------------------
// faulty access control

std::vector<Finding> detect_faulty_access_control(const Subject& s, const DetectorConfig& cfg) {
    const auto& g = s.epg.graph;
    const auto& frames = s.replay.frames;

    std::set<Address> attackers = cfg.attacker_contracts;
    for (const auto& f : frames.frames())
        if (!frames.discarded(f.id) && (f.opcode == 0xf0 || f.opcode == 0xf5)) attackers.insert(f.callee);
    auto outside_attackers = [&](const Vertex& v) {
        auto it = s.epg.block_frame.find(v.id);
        return it == s.epg.block_frame.end() || !attackers.contains(frames.at(it->second).callee);
    };
    const auto sources_a1 = compose({repeat(in(LabelSet{Label::Dependency})), in(LabelSet{Label::Control}),
                                     filter(outside_attackers), repeat(in(kCfg))});

    const auto transfers = transfer_blocks(s);
    const auto flows = flows_by_block(s);
    std::map<VertexId, bool> controlled;
    for (auto b : transfers) {
        const auto cs = cfg.refinements.a1 ? sources_a1(g, {b}) : control_source(s, {b});
        controlled[b] = origin_controlled(s, cfg, cs);
    }

    // A3: flows grouped by the writable sources their amounts depend on
    std::map<const TrackedFlow*, std::size_t> group_of;
    std::vector<std::size_t> parent;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<bool> group_controlled;
    if (cfg.refinements.a3) {
        std::map<IdentId, std::size_t> owner;
        std::vector<std::pair<const TrackedFlow*, VertexId>> all;
        for (const auto& [b, fs] : flows)
            for (auto* f : fs)
                if (transfers.contains(b)) all.emplace_back(f, b);
        parent.resize(all.size());
        std::iota(parent.begin(), parent.end(), 0);
        for (std::size_t i = 0; i < all.size(); ++i) {
            group_of[all[i].first] = i;
            for (auto ref : tag_closure(s, all[i].first->amount_tag)) {
                const auto ident = s.replay.records.sources.ident_of(ref);
                if (!s.replay.records.sources.identifier(ident).writable()) continue;
                auto [it, fresh] = owner.try_emplace(ident, i);
                if (!fresh) parent[find(i)] = find(it->second);
            }
        }
        group_controlled.assign(all.size(), false);
        for (std::size_t i = 0; i < all.size(); ++i)
            if (controlled[all[i].second]) group_controlled[find(i)] = true;
    }

    std::vector<Finding> candidates;
    for (auto b : transfers) {
        if (controlled[b]) continue;
        Finding f;
        f.rule = Rule::FaultyAccessControl;
        f.victim = address_of(s, b);
        f.pc = pc_of(s, b);
        f.witnesses.push_back(witness(s, "b", b));
        if (auto fv = frame_vertex_of_block(s, b)) f.witnesses.push_back(witness(s, "frame", *fv));
        for (auto h : out(LabelSet::CT())(g, {b})) f.witnesses.push_back(witness(s, "target", h));
        if (cfg.refinements.a1) f.refinements.push_back("A1");
        const auto fit = flows.find(b);
        const std::vector<const TrackedFlow*> fs = fit == flows.end() ? std::vector<const TrackedFlow*>{} : fit->second;

        if (cfg.refinements.a2) {
            f.refinements.push_back("A2");
            bool steerable = false;
            for (auto* fl : fs)
                for (auto ref : tag_closure(s, fl->destination_tag)) {
                    const auto id = s.replay.records.sources.resolve(ref).identifier;
                    if (id.kind == SourceKind::CallData && id.frame == frames.root().id) steerable = true;
                }
            if (!steerable) continue;
        }
        if (cfg.refinements.a3) {
            f.refinements.push_back("A3");
            const bool covered = !fs.empty() && std::all_of(fs.begin(), fs.end(), [&](const TrackedFlow* fl) {
                return group_controlled[find(group_of.at(fl))];
            });
            if (covered) continue;
        }
        f.note = "asset transfer at pc " + std::to_string(f.pc) + " is not guarded by the transaction origin";
        candidates.push_back(std::move(f));
    }
    auto out = dedupe(std::move(candidates));
    sort_findings(out);
    return out;
}

// ---------------------------------------------------------------------------
// price manipulation

namespace {

struct PoolDelta {
    std::map<AssetKind, std::pair<Word, Word>> moves;  // asset -> (inflow, outflow)
};

/// Swap pools: contracts that take in one token and send out a different one,
/// where the outgoing transfer was issued by the contract itself. The issuer
/// condition keeps the trading account (whose outflow the pool pulls) from
/// looking like a pool; the transaction sender is never a pool.
std::map<Address, PoolDelta> swap_pools(const Subject& s) {
    const auto& frames = s.replay.frames;
    std::map<Address, PoolDelta> deltas;
    std::map<Address, std::set<AssetKind>> received;
    std::map<Address, std::set<AssetKind>> pushed;
    for (const auto& f : s.replay.records.flows) {
        if (frames.discarded(f.frame) || f.flow.asset.is_eth) continue;
        deltas[f.flow.to].moves[f.flow.asset].first += f.flow.amount;
        deltas[f.flow.from].moves[f.flow.asset].second += f.flow.amount;
        received[f.flow.to].insert(f.flow.asset);
        const auto parent = frames.at(f.frame).parent;
        if (parent && frames.at(*parent).context == f.flow.from) pushed[f.flow.from].insert(f.flow.asset);
    }
    std::map<Address, PoolDelta> pools;
    for (auto& [a, d] : deltas) {
        if (a == s.replay.trace.envelope.from) continue;
        bool swaps = false;
        for (const auto& out : pushed[a])
            for (const auto& in : received[a]) swaps = swaps || !(in == out);
        if (swaps) pools.emplace(a, std::move(d));
    }
    return pools;
}

}  // namespace

std::vector<Finding> detect_price_manipulation(const Subject& s, const DetectorConfig& cfg, const PriceTable& prices) {
    const auto& g = s.epg.graph;
    const auto& env = s.replay.trace.envelope;
    const auto w = in(LabelSet{Label::Write});

    // transaction-wide refinement verdicts
    std::optional<std::string> p1_note;
    bool p1_pass = true;
    std::optional<std::string> p2_note;
    bool p2_pass = true;
    const auto pools = swap_pools(s);
    if (cfg.refinements.p1) {
        long double best = -1;
        bool missing = false;
        for (const auto& [pool, d] : pools)
            for (const auto& [asset, io] : d.moves) {
                const auto& tb = env.prestate.token_balances;
                auto t = tb.find(asset.token);
                if (t == tb.end() || !t->second.contains(pool)) {
                    missing = true;
                    continue;
                }
                const long double pre = to_real(t->second.at(pool));
                const long double inflow = to_real(io.first);
                const long double delta = std::fabs(inflow - to_real(io.second));
                if (pre + inflow > 0) best = std::max(best, delta / (pre + inflow));
            }
        if (pools.empty()) {
            p1_pass = false;
        } else if (best < 0) {
            p1_note = "P1: no pool prestate, shift unknown";
        } else {
            p1_pass = best >= cfg.p1_threshold;
            p1_note = "P1: largest pool shift " + fmt(best) + (missing ? " (some prestate missing)" : "");
        }
    }
    if (cfg.refinements.p2) {
        long double usd = 0;
        bool missing = false;
        for (const auto& [pool, d] : pools)
            for (const auto& [asset, io] : d.moves) {
                auto price = prices.lookup(asset, env.block_number);
                if (!price) {
                    missing = true;
                    continue;
                }
                usd += (to_real(io.first) - to_real(io.second)) / 1e18L * static_cast<long double>(*price);
            }
        usd = std::fabs(usd);
        if (missing) {
            p2_note = "P2: MissingPrice, degraded confidence (priced change " + fmt(usd) + " USD)";
        } else {
            p2_pass = usd >= cfg.p2_usd_threshold;
            p2_note = "P2: pool value change " + fmt(usd) + " USD";
        }
    }
    if (!p1_pass || !p2_pass) return {};

    std::vector<Finding> candidates;
    for (auto b : transfer_blocks(s)) {
        const auto cs = control_source(s, {b});
        const auto writers = w(g, cs);
        if (writers.empty()) continue;  // not influenced by any earlier write
        const auto wc = control_source(s, writers);
        if (origin_controlled(s, cfg, wc)) continue;
        Finding f;
        f.rule = Rule::PriceManipulation;
        f.victim = address_of(s, b);
        f.pc = pc_of(s, b);
        f.witnesses.push_back(witness(s, "b", b));
        if (auto fv = frame_vertex_of_block(s, b)) f.witnesses.push_back(witness(s, "frame", *fv));
        for (auto h : out(LabelSet::CT())(g, {b})) f.witnesses.push_back(witness(s, "target", h));
        f.witnesses.push_back(witness(s, "writer", *writers.begin()));
        if (cfg.refinements.p1) f.refinements.push_back("P1");
        if (cfg.refinements.p2) f.refinements.push_back("P2");
        f.note = "transfer at pc " + std::to_string(f.pc) + " depends on state written without origin control";
        for (const auto* n : {&p1_note, &p2_note})
            if (*n) f.note += "; " + **n;
        candidates.push_back(std::move(f));
    }
    auto out = dedupe(std::move(candidates));
    sort_findings(out);
    return out;
}

std::vector<Finding> run_detectors(const Subject& s, const DetectorConfig& cfg, const PriceTable& prices) {
    std::vector<Finding> all;
    auto append = [&](std::vector<Finding> fs) {
        for (auto& f : fs) all.push_back(std::move(f));
    };
    if (cfg.detectors.contains("reentrancy")) {
        append(detect_reentrancy(s, cfg));
        if (cfg.refinements.r1) append(detect_reentrancy_r1(s, cfg));
    }
    if (cfg.detectors.contains("fac")) append(detect_faulty_access_control(s, cfg));
    if (cfg.detectors.contains("price")) append(detect_price_manipulation(s, cfg, prices));
    sort_findings(all);
    return all;
}

}  // namespace epg
