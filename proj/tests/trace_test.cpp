// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "epg/error.hpp"
#include "epg/opcodes.hpp"
#include "epg/trace.hpp"

#include "support.hpp"

using namespace epg;

namespace {

// One step copied from a geth debug_traceTransaction dump (a deposit() SSTORE).
constexpr const char* kStoreStep = R"({
  "tx": {"hash": "0x01", "from": "0xf079d7911c13369e7fd85607970036d2883afcfd",
         "to": "0x0000000000000000000000000000000000000abc", "value": "0x0", "input": "0x",
         "blockNumber": 1, "timestamp": 2},
  "trace": {"structLogs": [{
    "pc": 1164, "op": "SSTORE", "gas": 5718423, "gasCost": 20000, "depth": 2,
    "stack": ["0xd0e30db0", "0x3d2", "0x16345785d8a0000", "0x16345785d8a0000",
              "0xbb1cc82d95791a1a9ca876fa9a5c6956b2ce21989bd57cca42dcdd3cbf705c6"],
    "memory": ["000000000000000000000000f079d7911c13369e7fd85607970036d2883afcfd",
               "0000000000000000000000000000000000000000000000000000000000000003",
               "0000000000000000000000000000000000000000000000000000000000000060"],
    "storage": {"0bb1cc82d95791a1a9ca876fa9a5c6956b2ce21989bd57cca42dcdd3cbf705c6":
                "000000000000000000000000000000000000000000000000016345785d8a0000"}}]}})";

std::string envelope_with(const std::string& logs) {
    return R"({"tx": {"from": "0x01", "to": "0x02"}, "trace": {"structLogs": )" + logs + "}}";
}

}  // namespace

TEST_CASE("store step from a real trace parses field by field") {
    auto t = parse_trace(kStoreStep);
    REQUIRE(t.steps.size() == 1);
    const auto& s = t.steps[0];
    CHECK(s.pc == 1164);
    CHECK(s.op == "SSTORE");
    CHECK(s.code == op::SSTORE);
    CHECK(s.gas == 5718423);
    CHECK(s.gas_cost == 20000);
    CHECK(s.depth == 2);
    REQUIRE(s.stack.size() == 5);
    CHECK(s.peek(0) == parse_word("0x0bb1cc82d95791a1a9ca876fa9a5c6956b2ce21989bd57cca42dcdd3cbf705c6"));
    CHECK(s.stack.front() == Word{0xd0e30db0u});
    CHECK(s.memory.size() == 96);
    CHECK(s.memory[95] == 0x60);
    REQUIRE(s.storage.size() == 1);
    CHECK(s.storage.begin()->second == parse_word("0x16345785d8a0000"));
    CHECK(t.envelope.from == parse_address("0xf079d7911c13369e7fd85607970036d2883afcfd"));
}

TEST_CASE("empty structLogs is a plain transfer with zero steps") {
    auto t = parse_trace(envelope_with("[]"));
    CHECK(t.steps.empty());
    CHECK(t.envelope.to.has_value());
}

TEST_CASE("committed Foo/Bar fixture matches a fresh run of the scenario interpreter") {
    auto loaded = epg_test::load_fixture("foo_bar_attack");
    for (auto& f : fixturegen::reentrancy_fixtures()) {
        if (f.name != "foo_bar_attack") continue;
        CHECK(loaded.steps.size() == f.trace.steps.size());
        CHECK(loaded == f.trace);
    }
    CHECK(loaded.steps.size() > 100);
}

TEST_CASE("serialization round trips every fixture") {
    for (const auto& name : epg_test::fixture_names()) {
        CAPTURE(name);
        auto t = epg_test::load_fixture(name);
        CHECK(parse_trace(serialize_trace(t)) == t);
    }
}

TEST_CASE("ingest errors") {
    auto kind_of = [](const std::string& doc) {
        try {
            parse_trace(doc);
        } catch (const Error& e) {
            return e.kind();
        }
        FAIL("no error");
        return ErrorKind::ObserverFailure;
    };
    CHECK(kind_of("{not json") == ErrorKind::MalformedTrace);
    CHECK(kind_of(R"({"trace": {"structLogs": []}})") == ErrorKind::SchemaViolation);
    CHECK(kind_of(envelope_with(R"([{"pc": 0, "op": "STOP", "gas": 1, "gasCost": 0, "depth": 1}])")) ==
          ErrorKind::SchemaViolation);
    CHECK(kind_of(envelope_with(
              R"([{"pc": 0, "op": "STOP", "gas": 1, "gasCost": 0, "depth": 1, "stack": ["0x1)" +
              std::string(64, '0') + R"("], "memory": []}])")) == ErrorKind::WordOverflow);
    CHECK_THROWS_AS(load_trace_file("/nonexistent/trace.json"), Error);
}

TEST_CASE("unknown mnemonics resolve to INVALID") {
    auto t = parse_trace(envelope_with(
        R"([{"pc": 0, "op": "FROBNICATE", "gas": 1, "gasCost": 0, "depth": 1, "stack": [], "memory": []}])"));
    CHECK(t.steps[0].code == op::INVALID);
}

TEST_CASE("every committed fixture is the generator's current output") {
    auto all = fixturegen::reentrancy_fixtures();
    for (auto& f : fixturegen::defi_fixtures()) all.push_back(std::move(f));
    CHECK(all.size() == epg_test::fixture_names().size());
    for (const auto& f : all) {
        CAPTURE(f.name);
        CHECK(epg_test::load_fixture(f.name) == f.trace);
    }
}
