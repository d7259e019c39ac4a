// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "epg/word.hpp"

namespace epg {

/// Ethereum Keccak-256 (original padding, not NIST SHA3-256).
std::array<std::uint8_t, 32> keccak256(ByteView data);
Word keccak256_word(ByteView data);
Word keccak256_word(std::string_view text);

/// keccak256("Transfer(address,address,uint256)")
const Word& erc20_transfer_topic();

}  // namespace epg
