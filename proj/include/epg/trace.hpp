// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epg/word.hpp"

namespace epg {

/// One executed opcode, geth structLog layout. Stack and memory are the
/// machine state *before* the opcode executes; the stack top is the last element.
struct OpStep {
    std::uint64_t pc = 0;
    std::string op;          // mnemonic as it appeared in the trace
    std::uint8_t code = 0;   // resolved opcode byte (INVALID for unknown mnemonics)
    std::uint64_t gas = 0;
    std::uint64_t gas_cost = 0;
    std::uint32_t depth = 1;
    std::vector<Word> stack;
    Bytes memory;
    std::map<Word, Word> storage;

    /// i-th element from the top (0 = top). Caller guarantees i < stack.size().
    [[nodiscard]] const Word& peek(std::size_t i) const { return stack[stack.size() - 1 - i]; }

    friend bool operator==(const OpStep&, const OpStep&) = default;
};

/// Optional pre-transaction state that the trace body itself does not expose.
struct Prestate {
    std::map<Address, Word> balances;
    /// token -> holder -> balance, used for pool-shift estimates.
    std::map<Address, std::map<Address, Word>> token_balances;

    friend bool operator==(const Prestate&, const Prestate&) = default;
};

struct TransactionEnvelope {
    std::string tx_hash;
    Address from;
    std::optional<Address> to;                  // absent for contract creation
    std::optional<Address> contract_address;    // created address when `to` is absent
    Word value{0};
    Bytes input;
    std::uint64_t block_number = 0;
    std::uint64_t timestamp = 0;
    std::optional<std::uint64_t> gas_used;
    Prestate prestate;

    friend bool operator==(const TransactionEnvelope&, const TransactionEnvelope&) = default;
};

struct ParsedTrace {
    TransactionEnvelope envelope;
    std::vector<OpStep> steps;

    friend bool operator==(const ParsedTrace&, const ParsedTrace&) = default;
};

/// Parses `{"tx": {...}, "trace": {"structLogs": [...]}}`.
/// Throws Error{MalformedTrace | SchemaViolation | WordOverflow}.
ParsedTrace parse_trace(std::string_view document);
ParsedTrace parse_trace(std::istream& in);
ParsedTrace load_trace_file(const std::string& path);

/// Canonical serialization; parse_trace(serialize_trace(t)) == t.
std::string serialize_trace(const ParsedTrace& trace, int indent = -1);

}  // namespace epg
