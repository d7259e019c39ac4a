// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/analysis.hpp"

#include <chrono>

namespace epg {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t millis_since(Clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count());
}

}  // namespace

AnalysisReport analyze(ParsedTrace trace, const DetectorConfig& cfg) {
    PriceTable prices;
    if (cfg.prices) prices = PriceTable::load(*cfg.prices);
    return analyze(std::move(trace), cfg, prices);
}

AnalysisReport analyze(ParsedTrace trace, const DetectorConfig& cfg, const PriceTable& prices) {
    cfg.validate();
    AnalysisReport report;
    report.tx_hash = trace.envelope.tx_hash;

    const auto t0 = Clock::now();
    FlowTrackerOptions options;
    if (cfg.allowlist) options.token_allowlist = load_allowlist(*cfg.allowlist);
    const auto r = replay(std::move(trace), std::move(options));
    const auto e = build_epg(r, Granularity::PerInvocation);
    report.stats.build_millis = millis_since(t0);
    report.stats.vertex_count = e.graph.vertex_count();
    report.stats.edge_count = e.graph.edge_count();

    const auto t1 = Clock::now();
    report.findings = run_detectors(Subject{r, e}, cfg, prices);
    report.stats.traversal_millis = millis_since(t1);

    for (const auto& d : {"reentrancy", "fac", "price"})
        if (cfg.detectors.contains(d)) report.detectors_run.emplace_back(d);
    report.warnings = r.records.warnings;
    if (cfg.refinements.p2 && prices.empty()) report.warnings.emplace_back("P2 enabled without a price table");
    return report;
}

nlohmann::ordered_json to_json(const Finding& f) {
    nlohmann::ordered_json w = nlohmann::ordered_json::array();
    for (const auto& x : f.witnesses)
        w.push_back({{"role", x.role}, {"vertex", x.vertex}, {"address", x.address}});
    return {{"rule", std::string{to_string(f.rule)}},
            {"victim", f.victim.hex()},
            {"pc", f.pc},
            {"witnesses", std::move(w)},
            {"refinementsApplied", f.refinements},
            {"note", f.note}};
}

nlohmann::ordered_json to_json(const AnalysisReport& r) {
    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const auto& f : r.findings) findings.push_back(to_json(f));
    return {{"txHash", r.tx_hash},
            {"detectorsRun", r.detectors_run},
            {"findings", std::move(findings)},
            {"stats",
             {{"vertexCount", r.stats.vertex_count},
              {"edgeCount", r.stats.edge_count},
              {"buildMillis", r.stats.build_millis},
              {"traversalMillis", r.stats.traversal_millis}}},
            {"warnings", r.warnings}};
}

}  // namespace epg
