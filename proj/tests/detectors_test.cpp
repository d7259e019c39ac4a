// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "epg/config.hpp"
#include "epg/detectors.hpp"
#include "epg/error.hpp"

#include "support.hpp"

using namespace epg;
using fixturegen::Asm;
using epg_test::of_rule;

namespace {

VertexId frame_v(const epg_test::Pipeline& p, FrameId f) { return p.epg.registry.by_frame.at(f); }
VertexId block_v(const epg_test::Pipeline& p, BlockId b) { return p.epg.registry.by_block.at(b); }

// Block that wrote the Foo balance slot in the given frame.
VertexId foo_write_block(const epg_test::Pipeline& p, FrameId frame) {
    const auto& rec = p.replay.records;
    const auto id = SourceIdentifier::storage(fixturegen::foo_addr(),
                                              fixturegen::mapping_slot(fixturegen::bar_addr().word(), Word{0}));
    for (const auto& w : rec.writes)
        if (w.frame == frame && rec.sources.resolve(w.target).identifier == id) return block_v(p, *w.block);
    FAIL("no write in frame " << frame);
    return 0;
}

std::set<SourceKind> kinds(const epg_test::Pipeline& p, const VertexSet& vs) {
    std::set<SourceKind> out;
    for (auto v : vs)
        if (auto it = p.epg.source_ref.find(v); it != p.epg.source_ref.end())
            out.insert(p.replay.records.sources.resolve(it->second).identifier.kind);
    return out;
}

VertexId last_block(const epg_test::Pipeline& p) {
    return block_v(p, static_cast<BlockId>(p.replay.records.blocks.size() - 1));
}

std::vector<Finding> run(const std::string& fixture, const std::string& refinements = "") {
    auto p = epg_test::pipeline(fixture);
    auto cfg = epg_test::default_config();
    if (!refinements.empty()) apply_refinements(cfg, refinements);
    return run_detectors(p->subject(), cfg, epg_test::fixture_prices());
}

}  // namespace

TEST_CASE("reentrant invocations") {
    auto p = epg_test::pipeline("foo_bar_attack");
    // frames: 0 Bar, 1 Foo, 2 Bar, 3 Foo, ...
    CHECK(reentrant(p->subject(), frame_v(*p, 1)).count(frame_v(*p, 3)) == 1);
    CHECK(reentrant(p->subject(), frame_v(*p, 3)).count(frame_v(*p, 1)) == 0);

    auto straight = epg_test::pipeline(epg_test::run_code(Asm{}.push(Word{1}).assemble()));
    for (auto v : frame_vertices(straight->subject())) CHECK(reentrant(straight->subject(), v).empty());

    auto mutual = epg_test::pipeline("mutual_recursion");
    std::set<Address> reentered;
    for (auto v0 : frame_vertices(mutual->subject()))
        for (auto v : reentrant(mutual->subject(), v0))
            reentered.insert(mutual->replay.frames.at(mutual->epg.contract_frame.at(v)).callee);
    CHECK(reentered == std::set<Address>{fixturegen::filled(0xa1), fixturegen::filled(0xa2)});
}

TEST_CASE("control blocks") {
    auto p = epg_test::pipeline("foo_bar_attack");
    CHECK(control_block(p->subject(), frame_v(*p, 3)).count(foo_write_block(*p, 1)) == 1);

    auto straight = epg_test::pipeline(epg_test::run_code(Asm{}.push(Word{1}).push(Word{0}).op(op::SSTORE).assemble()));
    CHECK(control_block(straight->subject(), frame_v(*straight, 0)).empty());

    // the write happens before the read it controls; ordering is not this set's concern
    Asm a;
    a.push(Word{1}).push(Word{0}).op(op::SSTORE).push(Word{0}).op(op::SLOAD).jumpi("x").label("x");
    auto before = epg_test::pipeline(epg_test::run_code(a.assemble()));
    CHECK(control_block(before->subject(), frame_v(*before, 0)) == VertexSet{block_v(*before, 0)});
}

TEST_CASE("succeeding blocks") {
    auto p = epg_test::pipeline("foo_bar_attack");
    const auto s = p->subject();
    CHECK(succ_block_1(s, frame_v(*p, 2)).count(foo_write_block(*p, 1)) == 1);
    // nothing runs after the top-level invocation returns
    CHECK(succ_block_1(s, frame_v(*p, 0)).empty());
    // grandchild: the path set is {frame 2, frame 3}
    auto both = succ_block_1(s, frame_v(*p, 2));
    for (auto b : succ_block_1(s, frame_v(*p, 3))) both.insert(b);
    CHECK(succ_block(s, frame_v(*p, 1), frame_v(*p, 3)) == both);
    CHECK(succ_block(s, frame_v(*p, 1), frame_v(*p, 3)).count(foo_write_block(*p, 1)) == 1);
    try {
        succ_block(s, frame_v(*p, 3), frame_v(*p, 1));
        FAIL("expected NotDescendant");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotDescendant);
    }
}

TEST_CASE("control sources") {
    SUBCASE("an owner check names Caller and the owner slot") {
        auto p = epg_test::pipeline("caller_guarded_withdraw");
        auto transfers = transfer_blocks(p->subject());
        REQUIRE(transfers.size() == 1);
        auto k = kinds(*p, control_source(p->subject(), transfers));
        CHECK(k.count(SourceKind::Caller) == 1);
        CHECK(k.count(SourceKind::Storage) == 1);
    }
    SUBCASE("the first block of a frame has none") {
        auto p = epg_test::pipeline(epg_test::run_code(Asm{}.push(Word{1}).assemble()));
        CHECK(control_source(p->subject(), {block_v(*p, 0)}).empty());
    }
    SUBCASE("a slot written from call data pulls in CallData") {
        Asm a;
        a.push(Word{0}).op(op::CALLDATALOAD).push(Word{1}).op(op::SSTORE);
        a.push(Word{1}).op(op::SLOAD).jumpi("x").label("x");
        auto p = epg_test::pipeline(epg_test::run_code(a.assemble(), Bytes(32, 1)));
        auto k = kinds(*p, control_source(p->subject(), {last_block(*p)}));
        CHECK(k == std::set<SourceKind>{SourceKind::Storage, SourceKind::CallData});
    }
}

TEST_CASE("transfer blocks") {
    auto p = epg_test::pipeline("foo_bar_attack");
    auto tb = transfer_blocks(p->subject());
    const auto& calls = p->replay.records.call_blocks;
    CHECK(tb.count(block_v(*p, calls.at(2))) == 1);   // Foo pays Bar
    CHECK(tb.count(block_v(*p, calls.at(1))) == 0);   // Bar calls withdraw without value

    auto m = epg_test::pipeline("monox_remove_liquidity");
    bool token_call = false;
    for (auto b : transfer_blocks(m->subject()))
        for (const auto& ed : m->epg.graph.edges())
            if (ed.tail == b && is_ct(ed.label) &&
                m->replay.frames.at(m->epg.contract_frame.at(ed.head)).callee == fixturegen::filled(0x30))
                token_call = true;
    CHECK(token_call);
}

TEST_CASE("write control") {
    SUBCASE("a store under an origin guard exposes Origin") {
        Asm a;
        a.op(op::ORIGIN).push(fixturegen::eoa()).op(op::EQ).jumpi("ok").op(op::INVALID).label("ok");
        a.push(Word{5}).push(Word{1}).op(op::SSTORE);
        a.push(Word{1}).op(op::SLOAD).jumpi("x").label("x");
        auto p = epg_test::pipeline(epg_test::run_code(a.assemble()));
        CHECK(kinds(*p, write_control(p->subject(), {last_block(*p)})).count(SourceKind::Origin) == 1);
    }
    SUBCASE("no writes behind the controls gives nothing") {
        Asm a;
        a.push(Word{1}).op(op::SLOAD).jumpi("x").label("x");
        auto p = epg_test::pipeline(epg_test::run_code(a.assemble()));
        CHECK(write_control(p->subject(), {last_block(*p)}).empty());
    }
}

TEST_CASE("reentrancy detector") {
    auto attack = of_rule(run("foo_bar_attack"), Rule::Reentrancy);
    REQUIRE(attack.size() == 1);
    auto p = epg_test::pipeline("foo_bar_attack");
    const auto& f = attack[0];
    CHECK(f.witness("v0")->vertex == frame_v(*p, 1));
    CHECK(f.witness("v")->vertex == frame_v(*p, 3));
    CHECK(f.witness("b")->vertex == foo_write_block(*p, 1));
    CHECK(f.victim == fixturegen::foo_addr());
    CHECK(of_rule(run("foo_bar_patched"), Rule::Reentrancy).empty());
    CHECK(of_rule(run("benign_nested"), Rule::Reentrancy).empty());
    CHECK(of_rule(run("create_reentrancy"), Rule::Reentrancy).size() == 1);
    CHECK(of_rule(run("delegatecall_reentrancy"), Rule::Reentrancy).size() == 1);
}

TEST_CASE("R1 refinement") {
    auto quiet = run("no_asset_flow_reentrancy", "r1");
    CHECK(of_rule(quiet, Rule::Reentrancy).empty());
    CHECK_FALSE(of_rule(quiet, Rule::ReentrancyR1).empty());
    CHECK_FALSE(of_rule(run("foo_bar_attack", "r1"), Rule::ReentrancyR1).empty());
    auto straight = epg_test::pipeline(epg_test::run_code(Asm{}.push(Word{1}).assemble()));
    DetectorConfig cfg;
    cfg.refinements.r1 = true;
    CHECK(detect_reentrancy_r1(straight->subject(), cfg).empty());
}

TEST_CASE("faulty access control") {
    auto monox = of_rule(run("monox_remove_liquidity"), Rule::FaultyAccessControl);
    REQUIRE(monox.size() == 1);
    CHECK(monox[0].victim == fixturegen::filled(0x33));
    CHECK(monox[0].witness("target")->address == fixturegen::filled(0x30).hex());
    CHECK(of_rule(run("origin_guarded_withdraw"), Rule::FaultyAccessControl).empty());
    CHECK_FALSE(of_rule(run("caller_guarded_withdraw"), Rule::FaultyAccessControl).empty());
    CHECK_FALSE(of_rule(run("harvest_fixed_recipient"), Rule::FaultyAccessControl).empty());
    CHECK(of_rule(run("harvest_fixed_recipient", "a2"), Rule::FaultyAccessControl).empty());
    CHECK_FALSE(of_rule(run("swap_a3"), Rule::FaultyAccessControl).empty());
    CHECK(of_rule(run("swap_a3", "a3"), Rule::FaultyAccessControl).empty());

    // A1: a listed attacker contract as the caller is excused
    auto p = epg_test::pipeline("caller_guarded_withdraw");
    DetectorConfig cfg;
    cfg.refinements.a1 = true;
    CHECK_FALSE(detect_faulty_access_control(p->subject(), cfg).empty());
}

TEST_CASE("price manipulation") {
    auto pump = of_rule(run("self_swap_price_pump"), Rule::PriceManipulation);
    bool usdc = false;
    for (const auto& f : pump)
        if (f.victim == fixturegen::filled(0x35) && f.witness("target")->address == fixturegen::filled(0x3c).hex())
            usdc = true;
    CHECK(usdc);
    CHECK_FALSE(of_rule(run("swap_shift_1pct"), Rule::PriceManipulation).empty());
    CHECK(of_rule(run("swap_shift_1pct", "p1"), Rule::PriceManipulation).empty());
    CHECK_FALSE(of_rule(run("swap_shift_99pct", "p1"), Rule::PriceManipulation).empty());
    CHECK(of_rule(run("origin_guarded_withdraw"), Rule::PriceManipulation).empty());
}

TEST_CASE("quiet fixtures stay quiet") {
    for (const char* name : {"empty_transfer", "dataflow_total_balance", "mutual_recursion", "revert_child"}) {
        CAPTURE(name);
        CHECK(run(name).empty());
    }
}

TEST_CASE("detector config validation") {
    DetectorConfig cfg;
    cfg.p1_threshold = 2;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.p1_threshold = 0.5;
    cfg.validate();
}
