// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "epg/epg.hpp"
#include "epg/flow.hpp"
#include "epg/keccak.hpp"

#include "support.hpp"

using namespace epg;
using fixturegen::Asm;

namespace {

SourceRef storage_ref(const Address& a, std::uint64_t slot, std::uint32_t version) {
    return {SourceIdentifier::storage(a, Word{slot}), version};
}

SourceRef frame_ref(SourceKind k, FrameId f) { return {SourceIdentifier::per_frame(k, f), 0}; }

std::vector<const WriteRecord*> writes_to(const FlowRecords& rec, const SourceIdentifier& id) {
    std::vector<const WriteRecord*> out;
    for (const auto& w : rec.writes)
        if (rec.sources.resolve(w.target).identifier == id) out.push_back(&w);
    return out;
}

Replay run(const Asm& a, const Bytes& input = {}, fixturegen::World w = {}) {
    return replay(epg_test::run_code(a.assemble(), input, std::move(w)));
}

}  // namespace

TEST_CASE("ADD unites a storage tag with a call data tag") {
    Asm a;
    a.push(Word{7}).push(Word{0}).op(op::SSTORE);        // slot 0 -> version 1
    a.push(Word{0}).op(op::SLOAD);                       // {Storage(c,0)@1}
    a.push(Word{0}).op(op::CALLDATALOAD).op(op::ADD);    // u {CallData(0)}
    a.push(Word{5}).op(op::SSTORE);
    auto r = run(a, Bytes(32, 1));
    auto ws = writes_to(r.records, SourceIdentifier::storage(epg_test::contract_addr(), Word{5}));
    REQUIRE(ws.size() == 1);
    auto tag = r.records.expand(ws[0]->value_tag).sources;
    CHECK(tag == std::set<SourceRef>{storage_ref(epg_test::contract_addr(), 0, 1), frame_ref(SourceKind::CallData, 0)});
}

TEST_CASE("MSTORE8 into the last byte of a word shows up in an MLOAD of that word") {
    Asm a;
    a.push(Word{3}).op(op::SLOAD);              // tagged value
    a.push(Word{31}).op(op::MSTORE8);
    a.push(Word{0}).op(op::MLOAD);
    a.push(Word{9}).op(op::SSTORE);
    auto r = run(a);
    auto ws = writes_to(r.records, SourceIdentifier::storage(epg_test::contract_addr(), Word{9}));
    REQUIRE(ws.size() == 1);
    CHECK(r.records.expand(ws[0]->value_tag).sources.count(storage_ref(epg_test::contract_addr(), 3, 0)) == 1);
}

TEST_CASE("an MLOAD that misses the stored byte stays untagged") {
    Asm a;
    a.push(Word{3}).op(op::SLOAD).push(Word{31}).op(op::MSTORE8);
    a.push(Word{32}).op(op::MLOAD).push(Word{9}).op(op::SSTORE);
    auto r = run(a);
    auto ws = writes_to(r.records, SourceIdentifier::storage(epg_test::contract_addr(), Word{9}));
    REQUIRE(ws.size() == 1);
    CHECK(ws[0]->value_tag == kEmptyTag);
}

TEST_CASE("the balance check in Foo is controlled by the balances slot") {
    auto r = replay(epg_test::load_fixture("foo_bar_attack"));
    const auto slot = fixturegen::mapping_slot(fixturegen::bar_addr().word(), Word{0});
    // frame 1 is the first Foo invocation
    REQUIRE(r.frames.at(1).callee == fixturegen::foo_addr());
    bool found = false;
    for (const auto& c : r.records.controls) {
        if (c.frame != 1) continue;
        for (const auto& ref : r.records.expand(c.condition_tag).sources)
            if (ref.identifier == SourceIdentifier::storage(fixturegen::foo_addr(), slot) && ref.version == 0) {
                found = true;
                // amt > _balance is false, so execution falls through into the transfer
                CHECK_FALSE(c.condition_value);
                REQUIRE(c.taken_block.has_value());
                CHECK(r.records.blocks[*c.taken_block].pc == r.trace.steps[c.jumpi_step].pc + 1);
            }
    }
    CHECK(found);
}

TEST_CASE("JUMPI on a constant zero has an empty condition and falls through") {
    Asm a;
    a.push(Word{0}).jumpi("skip").push(Word{1}).op(op::POP).label("skip");
    auto r = run(a);
    REQUIRE(r.records.controls.size() == 1);
    const auto& c = r.records.controls[0];
    CHECK(c.condition_tag == kEmptyTag);
    CHECK_FALSE(c.condition_value);
    CHECK(c.taken_block_pc == r.trace.steps[c.jumpi_step].pc + 1);
}

TEST_CASE("a CALLER comparison puts Caller into the condition") {
    auto r = replay(epg_test::load_fixture("caller_guarded_withdraw"));
    bool found = false;
    for (const auto& c : r.records.controls)
        for (const auto& ref : r.records.expand(c.condition_tag).sources)
            if (ref.identifier.kind == SourceKind::Caller && ref.identifier.frame == c.frame) found = true;
    CHECK(found);
}

TEST_CASE("Foo's late balance update reads the stale version") {
    auto r = replay(epg_test::load_fixture("foo_bar_attack"));
    const auto id = SourceIdentifier::storage(fixturegen::foo_addr(),
                                              fixturegen::mapping_slot(fixturegen::bar_addr().word(), Word{0}));
    auto ws = writes_to(r.records, id);
    REQUIRE(ws.size() >= 2);
    // the outermost Foo frame writes last, from a value loaded before any re-entry wrote
    auto last = *std::max_element(ws.begin(), ws.end(), [](auto* a, auto* b) { return a->step < b->step; });
    CHECK(last->frame == 1);
    CHECK(r.records.expand(last->value_tag).sources.count({id, 0}) == 1);
    // versions are handed out in execution order
    std::vector<std::uint32_t> versions;
    std::vector<const WriteRecord*> by_step(ws.begin(), ws.end());
    std::sort(by_step.begin(), by_step.end(), [](auto* a, auto* b) { return a->step < b->step; });
    for (auto* w : by_step) versions.push_back(r.records.sources.version_of(w->target));
    for (std::size_t i = 0; i < versions.size(); ++i) CHECK(versions[i] == i + 1);
}

TEST_CASE("a value-carrying CALL writes both balances tagged with CallValue") {
    auto r = replay(epg_test::load_fixture("foo_bar_attack"));
    // frame 2: Foo pays Bar 10 ether
    const auto& f = r.frames.at(2);
    REQUIRE(f.value == fixturegen::ether(10));
    std::vector<const WriteRecord*> ws;
    for (const auto& w : r.records.writes)
        if (w.frame == 2 && r.records.sources.resolve(w.target).identifier.kind == SourceKind::Balance)
            ws.push_back(&w);
    REQUIRE(ws.size() == 2);
    CHECK(r.records.sources.resolve(ws[0]->target).identifier.address == fixturegen::foo_addr());
    CHECK(r.records.sources.resolve(ws[1]->target).identifier.address == fixturegen::bar_addr());
    CHECK(ws[0]->new_value == fixturegen::ether(90));
    for (auto* w : ws) CHECK(r.records.expand(w->value_tag).sources.count(frame_ref(SourceKind::CallValue, 2)) == 1);
}

TEST_CASE("two stores to one slot get versions 1 and 2") {
    Asm a;
    a.push(Word{1}).push(Word{4}).op(op::SSTORE).push(Word{2}).push(Word{4}).op(op::SSTORE);
    auto r = run(a);
    auto ws = writes_to(r.records, SourceIdentifier::storage(epg_test::contract_addr(), Word{4}));
    REQUIRE(ws.size() == 2);
    CHECK(r.records.sources.version_of(ws[0]->target) == 1);
    CHECK(r.records.sources.version_of(ws[1]->target) == 2);
}

TEST_CASE("ETH flows") {
    SUBCASE("Foo pays Bar") {
        auto r = replay(epg_test::load_fixture("foo_bar_attack"));
        REQUIRE_FALSE(r.records.flows.empty());
        const auto& fl = r.records.flows.front().flow;
        CHECK(fl.asset.is_eth);
        CHECK(fl.from == fixturegen::foo_addr());
        CHECK(fl.to == fixturegen::bar_addr());
        CHECK(fl.amount == fixturegen::ether(10));
    }
    SUBCASE("zero-value CALL has no flow") {
        auto r = replay(epg_test::load_fixture("no_asset_flow_reentrancy"));
        CHECK(r.records.flows.empty());
    }
    SUBCASE("SELFDESTRUCT of an empty account has no flow") {
        Asm a;
        a.push(fixturegen::filled(0x77)).op(op::SELFDESTRUCT);
        auto r = run(a);
        CHECK(r.frames.size() == 2);
        CHECK(r.records.flows.empty());
    }
    SUBCASE("SELFDESTRUCT with a balance moves it to the beneficiary") {
        Asm a;
        a.push(fixturegen::filled(0x77)).op(op::SELFDESTRUCT);
        fixturegen::World w;
        w[epg_test::contract_addr()].balance = fixturegen::ether(3);
        auto r = run(a, {}, w);
        REQUIRE(r.records.flows.size() == 1);
        CHECK(r.records.flows[0].flow.to == fixturegen::filled(0x77));
        CHECK(r.records.flows[0].flow.amount == fixturegen::ether(3));
    }
}

TEST_CASE("Transfer topic and keccak vectors") {
    CHECK(erc20_transfer_topic() ==
          parse_word("0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"));
    CHECK(keccak256_word(std::string_view{""}) ==
          parse_word("0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"));
    CHECK(keccak256_word(std::string_view{"abc"}) ==
          parse_word("0x4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"));
}

TEST_CASE("token flows") {
    SUBCASE("Transfer log decodes into a token flow") {
        auto r = replay(epg_test::load_fixture("monox_remove_liquidity"));
        bool found = false;
        for (const auto& f : r.records.flows)
            if (!f.flow.asset.is_eth && f.flow.asset.token == fixturegen::filled(0x30) &&
                f.flow.from == fixturegen::filled(0x33))
                found = true;
        CHECK(found);
    }
    SUBCASE("Transfer inside a reverted frame is recorded but discarded") {
        // token 0x7c transfers then the caller reverts
        auto token = fixturegen::filled(0x7c);
        fixturegen::World w;
        w[token].code = fixturegen::token_code();
        fixturegen::credit(w, token, epg_test::contract_addr(), Word{100});
        Asm a;
        a.call(op::CALL, "transfer(address,uint256)", 2,
               {[](Asm& x) { x.push(fixturegen::filled(0x11)); }, [](Asm& x) { x.push(Word{100}); }},
               [&](Asm& x) { x.push(token); });
        a.push(Word{0}).push(Word{0}).op(op::REVERT);
        auto r = run(a, {}, w);
        REQUIRE(r.records.flows.size() == 1);
        CHECK(r.records.flows[0].flow.amount == Word{100});
        CHECK(r.frames.discarded(r.records.flows[0].frame));
    }
    SUBCASE("short Transfer data is skipped with a warning") {
        Asm a;
        a.push(fixturegen::filled(0x22)).push(fixturegen::filled(0x21)).push(erc20_transfer_topic());
        a.push(Word{16}).push(Word{0}).op(op::LOG3);
        auto r = run(a);
        CHECK(r.records.flows.empty());
        REQUIRE(r.records.warnings.size() == 1);
        CHECK(r.records.warnings[0].find("MalformedLog") != std::string::npos);
    }
}
