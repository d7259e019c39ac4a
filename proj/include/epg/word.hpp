// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace epg {

using Word = boost::multiprecision::uint256_t;
using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 20-byte account address. Stored in the low 160 bits of a word.
class Address {
  public:
    Address() = default;
    explicit Address(const Word& w);

    [[nodiscard]] const Word& word() const noexcept { return value_; }
    [[nodiscard]] std::string hex() const;

    friend bool operator==(const Address&, const Address&) = default;
    friend std::strong_ordering operator<=>(const Address& a, const Address& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

  private:
    Word value_{0};
};

// Hex helpers. Parsers accept an optional 0x prefix and either case.
Word parse_word(std::string_view hex);
Address parse_address(std::string_view hex);
Bytes parse_bytes(std::string_view hex);

/// Minimal 0x-prefixed lowercase form ("0x0" for zero).
std::string to_hex(const Word& w);
/// 64 lowercase hex digits, no prefix.
std::string to_hex64(const Word& w);
std::string to_hex(ByteView bytes, bool prefix = true);

Word word_from_bytes(ByteView bytes);  // big-endian, at most 32 bytes
std::array<std::uint8_t, 32> word_to_bytes(const Word& w);

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept;
};

struct AddressHash {
    std::size_t operator()(const Address& a) const noexcept { return WordHash{}(a.word()); }
};

}  // namespace epg
