// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epg/trace.hpp"
#include "epg/word.hpp"

namespace fixturegen {

using epg::Address;
using epg::Bytes;
using epg::Word;

struct Account {
    Word balance{0};
    Bytes code;
    std::map<Word, Word> storage;
    std::uint64_t nonce = 0;
};

using World = std::map<Address, Account>;

struct Tx {
    Address from;
    std::optional<Address> to;  // absent: contract creation with `input` as init code
    Word value{0};
    Bytes input;
    std::uint64_t block_number = 15'000'000;
    std::uint64_t timestamp = 1'660'000'000;
    std::uint64_t gas_limit = 3'000'000;
};

/// Small interpreter covering the opcodes the fixtures use. It records a
/// geth-style structLog (stack and memory before each op) while it runs.
/// Gas is a flat per-opcode schedule, not the real fee model. Call-like steps
/// report only their base cost, so the costs of all steps add up to gasUsed
/// minus the 21000 intrinsic charge.
class Evm {
  public:
    explicit Evm(World world) : world_{std::move(world)} {}

    /// Executes one transaction against the world and returns its trace.
    /// Prestate balances are the balances before the transaction.
    epg::ParsedTrace run(const Tx& tx, const std::string& tx_hash);

    [[nodiscard]] World& world() noexcept { return world_; }

  private:
    struct Context {
        Address self;     // storage / balance owner
        Address caller;
        Word value{0};
        Bytes code;
        Bytes calldata;
        std::uint32_t depth = 1;
    };
    struct Result {
        bool success = false;
        Bytes output;
        std::uint64_t gas_left = 0;
    };

    Result exec(const Context& ctx, std::uint64_t gas);
    Account& account(const Address& a) { return world_[a]; }

    World world_;
    Tx tx_;
    std::vector<epg::OpStep> steps_;
    std::map<Address, std::map<Word, Word>> touched_;
};

/// keccak(rlp([sender, nonce]))[12:]
Address create_address(const Address& sender, std::uint64_t nonce);
/// keccak(0xff . sender . salt . keccak(init))[12:]
Address create2_address(const Address& sender, const Word& salt, epg::ByteView init);

}  // namespace fixturegen
