// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per headline requirement, thresholds pinned below.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "epg/analysis.hpp"
#include "epg/config.hpp"
#include "epg/export.hpp"
#include "epg/opcodes.hpp"

#include "reentrancy_oracle.hpp"
#include "support.hpp"
#include "tag_oracle.hpp"
#include "traversal_oracle.hpp"

using namespace epg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kEndToEndSeconds = 5.0;
constexpr std::size_t kRandomGraphs = 10'000;
constexpr double kPropertySeconds = 60.0;
constexpr std::size_t kRandomPrograms = 1'000;
constexpr std::size_t kMinFixtures = 12;
constexpr double kPerFixtureSeconds = 1.0;
constexpr double kP1Threshold = 0.5;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] %-22s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

template <typename F>
void guarded(const char* id, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string{"exception: "} + e.what());
    }
}

// pc of the block holding the last SSTORE of the first Foo invocation, read
// straight off the trace: a block starts at frame entry, after JUMP or JUMPI,
// and where control comes back from a nested invocation.
std::uint64_t write_block_pc_from_trace(const ParsedTrace& t, std::uint32_t foo_depth) {
    std::size_t frame_start = 0;
    while (t.steps[frame_start].depth != foo_depth) ++frame_start;
    std::size_t block_start = frame_start, last_store_block = frame_start;
    std::size_t prev = frame_start;
    for (std::size_t i = frame_start; i < t.steps.size(); ++i) {
        if (t.steps[i].depth < foo_depth) break;
        if (t.steps[i].depth != foo_depth) continue;
        if (i != frame_start) {
            const auto& p = t.steps[prev];
            if (p.code == op::JUMP || p.code == op::JUMPI || i != prev + 1) block_start = i;
        }
        if (t.steps[i].code == op::SSTORE) last_store_block = block_start;
        prev = i;
    }
    return t.steps[last_store_block].pc;
}

std::string slurp(const std::string& path) {
    std::ifstream in{path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<Finding> findings(const std::string& name, const std::string& refinements) {
    DetectorConfig cfg;
    cfg.p1_threshold = kP1Threshold;
    if (!refinements.empty()) apply_refinements(cfg, refinements);
    return analyze(epg_test::load_fixture(name), cfg, epg_test::fixture_prices()).findings;
}

}  // namespace

int main() {
    guarded("foo-bar-end-to-end", [] {
        auto t0 = Clock::now();
        auto attack_trace = epg_test::load_fixture("foo_bar_attack");
        auto attack = epg_test::of_rule(analyze(attack_trace, DetectorConfig{}).findings, Rule::Reentrancy);
        auto patched = epg_test::of_rule(analyze(epg_test::load_fixture("foo_bar_patched"), DetectorConfig{}).findings,
                                         Rule::Reentrancy);
        double secs = seconds_since(t0);
        // the EOA enters Bar at depth 1, Bar calls Foo at depth 2
        auto want_pc = write_block_pc_from_trace(attack_trace, 2);
        bool pc_ok = attack.size() == 1 && attack[0].pc == want_pc;
        std::ostringstream os;
        os << "attack findings=" << attack.size() << " b.pc=" << (attack.empty() ? 0 : attack[0].pc)
           << " write-block pc=" << want_pc << "; patched findings=" << patched.size() << "; " << secs << " s (< "
           << kEndToEndSeconds << ")";
        report("foo-bar-end-to-end", pc_ok && patched.empty() && secs < kEndToEndSeconds, os.str());
    });

    guarded("ctg-golden", [] {
        auto r = replay(epg_test::load_fixture("foo_bar_attack"));
        VertexRegistry reg;
        auto got = epg_test::dot_multisets(to_dot(build_ctg(r, reg), "ctg"));
        auto want = epg_test::dot_multisets(slurp(epg_test::golden_path("foo_bar_ctg.dot")));
        const auto foo = fixturegen::foo_addr().hex(), bar = fixturegen::bar_addr().hex();
        bool cycle = false, back = false;
        for (const auto& [t, h, l, v] : got.edges) {
            cycle |= t == bar && h == foo && l == "CALL";
            back |= t == foo && h == bar && l == "CALL";
        }
        std::ostringstream os;
        os << got.vertices.size() << " contract vertices, " << got.edges.size() << " edges, Bar<->Foo cycle="
           << (cycle && back) << ", multisets equal=" << (got == want);
        report("ctg-golden", got.vertices.size() == 3 && cycle && back && got == want, os.str());
    });

    guarded("traversal-properties", [] {
        auto t0 = Clock::now();
        auto res = epg_test::run_traversal_properties(kRandomGraphs, 0x5eed);
        double secs = seconds_since(t0);
        std::ostringstream os;
        os << res.graphs << " graphs, " << res.checks << " checks, " << res.failures << " failures, " << secs
           << " s (< " << kPropertySeconds << ")";
        if (res.failures) os << "; first: " << res.first_failure;
        report("traversal-properties", res.graphs >= kRandomGraphs && res.failures == 0 && secs < kPropertySeconds,
               os.str());
    });

    guarded("tag-oracle", [] {
        auto res = epg_test::run_tag_oracle(kRandomPrograms, 0x7a9);
        std::ostringstream os;
        os << res.programs << " programs, " << res.steps << " steps, " << res.slots_compared << " slots, "
           << res.mismatches << " mismatches";
        if (res.mismatches) os << "; first: " << res.first_mismatch;
        report("tag-oracle", res.programs >= kRandomPrograms && res.mismatches == 0, os.str());
    });

    guarded("reentrancy-brute-force", [] {
        auto names = epg_test::fixture_names();
        std::size_t diverged = 0, triples = 0;
        std::string first;
        for (const auto& name : names) {
            auto p = epg_test::pipeline(name);
            auto want = epg_test::brute_force_triples(p->subject());
            triples += want.size();
            if (reentrancy_triples(p->subject()) != want && diverged++ == 0) first = name;
        }
        std::ostringstream os;
        os << names.size() << " fixtures (>= " << kMinFixtures << "), " << triples << " triples, " << diverged
           << " diverging";
        if (diverged) os << "; first: " << first;
        report("reentrancy-brute-force", names.size() >= kMinFixtures && diverged == 0, os.str());
    });

    guarded("refinements", [] {
        auto r1 = findings("no_asset_flow_reentrancy", "r1");
        bool r1_ok = !epg_test::of_rule(r1, Rule::ReentrancyR1).empty() && epg_test::of_rule(r1, Rule::Reentrancy).empty();
        bool a2_ok = epg_test::of_rule(findings("harvest_fixed_recipient", "a2"), Rule::FaultyAccessControl).empty();
        bool p1_low = epg_test::of_rule(findings("swap_shift_1pct", "p1"), Rule::PriceManipulation).empty();
        bool p1_high = !epg_test::of_rule(findings("swap_shift_99pct", "p1"), Rule::PriceManipulation).empty();
        std::ostringstream os;
        os << "R1 on no-asset-flow=" << r1_ok << ", A2 suppresses harvest=" << a2_ok << ", P1@" << kP1Threshold
           << " suppresses 1%=" << p1_low << ", passes 99%=" << p1_high;
        report("refinements", r1_ok && a2_ok && p1_low && p1_high, os.str());
    });

    guarded("monox-patterns", [] {
        auto has = [](const std::vector<Finding>& fs, const Address& victim, const Address& target) {
            for (const auto& f : fs) {
                const auto* w = f.witness("target");
                if (f.victim == victim && w && w->address == target.hex()) return true;
            }
            return false;
        };
        bool fac = has(epg_test::of_rule(findings("monox_remove_liquidity", ""), Rule::FaultyAccessControl),
                       fixturegen::filled(0x33), fixturegen::filled(0x30));
        bool pm = has(epg_test::of_rule(findings("self_swap_price_pump", ""), Rule::PriceManipulation),
                      fixturegen::filled(0x35), fixturegen::filled(0x3c));
        std::ostringstream os;
        os << "FAC victim pool 0x33.. target MONO 0x30..=" << fac << ", PM victim pool 0x35.. target USDC 0x3c..="
           << pm;
        report("monox-patterns", fac && pm, os.str());
    });

    guarded("detector-performance", [] {
        double worst = 0;
        std::string slowest;
        auto prices = epg_test::fixture_prices();
        DetectorConfig cfg;
        apply_refinements(cfg, "r1,a1,a2,a3,p1,p2");
        for (const auto& name : epg_test::fixture_names()) {
            auto trace = epg_test::load_fixture(name);
            auto t0 = Clock::now();
            analyze(std::move(trace), cfg, prices);
            double secs = seconds_since(t0);
            if (secs > worst) {
                worst = secs;
                slowest = name;
            }
        }
        std::ostringstream os;
        os << "slowest " << slowest << " " << worst << " s (< " << kPerFixtureSeconds << " per transaction)";
        report("detector-performance", worst < kPerFixtureSeconds, os.str());
    });

    guarded("export-round-trip", [] {
        std::size_t graphs = 0, bad = 0;
        std::string first;
        for (auto g : {Granularity::PerAddress, Granularity::PerInvocation}) {
            for (const auto& name : epg_test::fixture_names()) {
                auto a = epg_test::pipeline(name, g);
                auto b = epg_test::pipeline(name, g);
                auto back = from_graphson(nlohmann::json::parse(to_graphson(a->epg.graph).dump()));
                auto diff = epg_test::graph_difference(a->epg.graph, back);
                bool ok = diff.empty() && to_dot(a->epg.graph) == to_dot(b->epg.graph);
                ++graphs;
                if (!ok && bad++ == 0) first = name + ": " + (diff.empty() ? "DOT differs" : diff);
            }
        }
        std::ostringstream os;
        os << graphs << " graphs, " << bad << " failing";
        if (bad) os << "; first: " << first;
        report("export-round-trip", bad == 0, os.str());
    });

    std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
