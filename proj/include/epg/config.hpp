// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "epg/detectors.hpp"

namespace epg {

/// Reads a flat TOML document of the form
///
///   attacker_contracts = ["0x..", "0x.."]
///   p1_threshold = 0.5
///   p2_usd_threshold = 10000
///   allowlist = "tokens.txt"
///   prices = "prices.csv"
///   refinements = ["r1", "a2"]
///   accept_root_caller = false
///   detectors = ["reentrancy", "fac", "price"]
///
/// Missing keys keep their defaults. load_config resolves relative allowlist
/// and prices paths against the directory holding the config file. Throws Error{UnknownKey | BadThreshold | MalformedConfig}.
DetectorConfig parse_config(std::string_view text);
DetectorConfig load_config(const std::string& path);

/// Applies a comma separated refinement list ("r1,a1,a2,a3,p1,p2").
void apply_refinements(DetectorConfig& cfg, std::string_view list);
/// Replaces the detector set from a comma separated list ("reentrancy,fac,price").
void apply_detectors(DetectorConfig& cfg, std::string_view list);

}  // namespace epg
