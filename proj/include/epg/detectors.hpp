// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "epg/epg.hpp"
#include "epg/traversal.hpp"

namespace epg {

enum class Rule : std::uint8_t { Reentrancy, ReentrancyR1, FaultyAccessControl, PriceManipulation };

std::string_view to_string(Rule r) noexcept;

struct Witness {
    std::string role;
    VertexId vertex = 0;
    std::string address;  // contract address for contract and block witnesses

    friend bool operator==(const Witness&, const Witness&) = default;
};

struct Finding {
    Rule rule = Rule::Reentrancy;
    std::vector<Witness> witnesses;
    std::vector<std::string> refinements;
    std::string note;
    Address victim;          // contract that owns the witness block
    std::uint64_t pc = 0;    // pc of the witness block

    [[nodiscard]] const Witness* witness(std::string_view role) const;
    friend bool operator==(const Finding&, const Finding&) = default;
};

struct Refinements {
    bool r1 = false;
    bool a1 = false;
    bool a2 = false;
    bool a3 = false;
    bool p1 = false;
    bool p2 = false;

    friend bool operator==(const Refinements&, const Refinements&) = default;
};

struct DetectorConfig {
    std::set<Address> attacker_contracts;
    double p1_threshold = 0.5;
    double p2_usd_threshold = 10000.0;
    std::optional<std::string> allowlist;
    std::optional<std::string> prices;
    Refinements refinements;
    bool accept_root_caller = false;
    std::set<std::string> detectors{"reentrancy", "fac", "price"};

    /// Throws Error{BadThreshold} when a threshold is out of range.
    void validate() const;
    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// USD prices keyed by asset and block. Lookups take the nearest block at or below.
class PriceTable {
  public:
    void add(const AssetKind& asset, std::uint64_t block, double usd);
    [[nodiscard]] std::optional<double> lookup(const AssetKind& asset, std::uint64_t block) const;
    [[nodiscard]] bool empty() const noexcept { return prices_.empty(); }
    /// CSV with header token,block,usd_price; token "ETH" for ether.
    /// Throws Error{MalformedPriceTable}.
    static PriceTable load(const std::string& path);
    static PriceTable parse(std::string_view csv);

  private:
    std::map<AssetKind, std::map<std::uint64_t, double>> prices_;
};

/// Frozen graph plus the replay it came from. Detectors need the per-invocation graph.
struct Subject {
    const Replay& replay;
    const Epg& epg;
};

// Building blocks (all expressed with traversal combinators).
VertexSet frame_vertices(const Subject& s);
VertexSet reentrant(const Subject& s, VertexId v0);
VertexSet control_block(const Subject& s, VertexId v);
VertexSet succ_block_1(const Subject& s, VertexId v_prime);
/// Throws Error{NotDescendant} if v is not in v0's invocation subtree.
VertexSet succ_block(const Subject& s, VertexId v0, VertexId v);
VertexSet control_source(const Subject& s, const VertexSet& blocks);
VertexSet transfer_blocks(const Subject& s);
VertexSet write_control(const Subject& s, const VertexSet& blocks);

using Triple = std::tuple<VertexId, VertexId, VertexId>;  // v0, v, b

/// Every (v0, v, b) satisfying the three reentrancy conjuncts.
std::set<Triple> reentrancy_triples(const Subject& s);

std::vector<Finding> detect_reentrancy(const Subject& s, const DetectorConfig& cfg);
std::vector<Finding> detect_reentrancy_r1(const Subject& s, const DetectorConfig& cfg);
std::vector<Finding> detect_faulty_access_control(const Subject& s, const DetectorConfig& cfg);
std::vector<Finding> detect_price_manipulation(const Subject& s, const DetectorConfig& cfg, const PriceTable& prices);

/// Runs the detectors named in cfg.detectors; output ordered by rule then witness ids.
std::vector<Finding> run_detectors(const Subject& s, const DetectorConfig& cfg, const PriceTable& prices);

}  // namespace epg
