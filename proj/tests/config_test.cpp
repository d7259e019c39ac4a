// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "epg/config.hpp"
#include "epg/error.hpp"

#include "support.hpp"

using namespace epg;

namespace {

ErrorKind config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error for: " << text);
    return ErrorKind::ObserverFailure;
}

}  // namespace

TEST_CASE("empty config keeps every default") {
    CHECK(parse_config("") == DetectorConfig{});
    CHECK(parse_config("# only a comment\n\n") == DetectorConfig{});
}

TEST_CASE("config values") {
    auto cfg = parse_config(R"(
attacker_contracts = ["0x00000000000000000000000000000000000000aa", "0x00000000000000000000000000000000000000bb"]
p1_threshold = 0.25
p2_usd_threshold = 5000
refinements = ["a1", "p2"]
accept_root_caller = true
detectors = ["fac"]
)");
    CHECK(cfg.attacker_contracts == std::set<Address>{parse_address("0xaa"), parse_address("0xbb")});
    CHECK(cfg.p1_threshold == doctest::Approx(0.25));
    CHECK(cfg.p2_usd_threshold == doctest::Approx(5000));
    CHECK(cfg.refinements == Refinements{false, true, false, false, false, true});
    CHECK(cfg.accept_root_caller);
    CHECK(cfg.detectors == std::set<std::string>{"fac"});
}

TEST_CASE("config errors") {
    CHECK(config_error("p1_threshold = 1.5") == ErrorKind::BadThreshold);
    CHECK(config_error("p2_usd_threshold = -1") == ErrorKind::BadThreshold);
    CHECK(config_error("colour = \"red\"") == ErrorKind::UnknownKey);
    CHECK(config_error("p1_threshold = ") == ErrorKind::MalformedConfig);
    CHECK(config_error("refinements = [\"z9\"]") != ErrorKind::ObserverFailure);
}

TEST_CASE("refinement and detector lists") {
    DetectorConfig cfg;
    apply_refinements(cfg, "r1,a2,p1");
    CHECK(cfg.refinements == Refinements{true, false, true, false, true, false});
    apply_detectors(cfg, "reentrancy");
    CHECK(cfg.detectors == std::set<std::string>{"reentrancy"});
    CHECK_THROWS_AS(apply_refinements(cfg, "x7"), Error);
}

TEST_CASE("load_config resolves the price table next to the config file") {
    auto cfg = load_config(std::string{EPG_FIXTURE_DIR} + "/strict.toml");
    REQUIRE(cfg.prices.has_value());
    CHECK(std::filesystem::exists(*cfg.prices));
    CHECK(cfg.refinements.r1);
}

TEST_CASE("price table lookups") {
    auto t = PriceTable::parse("token,block,usd_price\nETH,10,1500\nETH,20,1600\n0x00000000000000000000000000000000000000cc,0,2.5\n");
    const AssetKind eth{true, {}};
    CHECK_FALSE(t.lookup(eth, 9).has_value());
    CHECK(*t.lookup(eth, 10) == doctest::Approx(1500));
    CHECK(*t.lookup(eth, 19) == doctest::Approx(1500));
    CHECK(*t.lookup(eth, 1000) == doctest::Approx(1600));
    CHECK(*t.lookup(AssetKind{false, parse_address("0xcc")}, 5) == doctest::Approx(2.5));
    CHECK_FALSE(t.lookup(AssetKind{false, parse_address("0xdd")}, 5).has_value());
    CHECK_THROWS_AS(PriceTable::parse("token,block\nETH,1\n"), Error);
    CHECK_THROWS_AS(PriceTable::parse("token,block,usd_price\nETH,x,1\n"), Error);
    CHECK_FALSE(epg_test::fixture_prices().empty());
}
