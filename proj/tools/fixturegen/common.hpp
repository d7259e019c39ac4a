// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "asm.hpp"
#include "evm.hpp"

namespace fixturegen {

inline const Word kEther{1'000'000'000'000'000'000ULL};

inline Word ether(std::uint64_t n) { return Word{n} * kEther; }

/// Address made of one repeated byte, e.g. 0xbaba...ba.
Address filled(std::uint8_t byte);
Address from_hex(std::string_view hex);
Word mapping_slot(const Word& key, const Word& slot);
Bytes calldata(std::string_view signature, const std::vector<Word>& args = {});

// shared actors
Address eoa();        // 0xabab...abcd
Address foo_addr();   // 0xf0f0...f0
Address bar_addr();   // 0xbaba...ba

/// Minimal ERC-20: balances in mapping slot 0, no allowances.
/// transfer(address,uint256), transferFrom(address,address,uint256), balanceOf(address).
Bytes token_code();
void credit(World& w, const Address& token, const Address& holder, const Word& amount);

struct Fixture {
    std::string name;
    epg::ParsedTrace trace;
};

/// Runs the transaction; prestate token balances are captured for `tokens`.
Fixture execute(const std::string& name, World world, const Tx& tx, const std::vector<Address>& tokens = {});

std::vector<Fixture> reentrancy_fixtures();
std::vector<Fixture> defi_fixtures();

}  // namespace fixturegen
