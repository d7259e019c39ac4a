// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "epg/detectors.hpp"

namespace epg {

struct ReportStats {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::uint64_t build_millis = 0;
    std::uint64_t traversal_millis = 0;
};

struct AnalysisReport {
    std::string tx_hash;
    std::vector<std::string> detectors_run;
    std::vector<Finding> findings;
    ReportStats stats;
    std::vector<std::string> warnings;
};

/// Full pipeline: replay, flow tracking, graph construction, detection.
/// Loads the allowlist and price table named in cfg when present.
AnalysisReport analyze(ParsedTrace trace, const DetectorConfig& cfg);
AnalysisReport analyze(ParsedTrace trace, const DetectorConfig& cfg, const PriceTable& prices);

/// Stable key order; see schema/report.schema.json.
nlohmann::ordered_json to_json(const AnalysisReport& report);
nlohmann::ordered_json to_json(const Finding& finding);

}  // namespace epg
