// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/word.hpp"

#include <algorithm>

#include "epg/error.hpp"

namespace epg {
namespace {

constexpr char kDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view strip_prefix(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    return hex;
}

const Word kAddressMask = (Word{1} << 160) - 1;

}  // namespace

Address::Address(const Word& w) : value_{w & kAddressMask} {}

std::string Address::hex() const {
    auto bytes = word_to_bytes(value_);
    return to_hex(ByteView{bytes.data() + 12, 20});
}

Word parse_word(std::string_view hex) {
    hex = strip_prefix(hex);
    while (hex.size() > 1 && hex.front() == '0') hex.remove_prefix(1);
    if (hex.empty()) throw Error(ErrorKind::MalformedTrace, "empty hex word");
    if (hex.size() > 64) throw Error(ErrorKind::WordOverflow, "value exceeds 256 bits: 0x" + std::string{hex});
    Word w = 0;
    for (char c : hex) {
        int v = hex_value(c);
        if (v < 0) throw Error(ErrorKind::MalformedTrace, "invalid hex digit in '" + std::string{hex} + "'");
        w = (w << 4) | static_cast<unsigned>(v);
    }
    return w;
}

Address parse_address(std::string_view hex) {
    Word w = parse_word(hex);
    if (w > kAddressMask) throw Error(ErrorKind::WordOverflow, "address exceeds 160 bits: " + std::string{hex});
    return Address{w};
}

Bytes parse_bytes(std::string_view hex) {
    hex = strip_prefix(hex);
    if (hex.size() % 2 != 0) throw Error(ErrorKind::MalformedTrace, "odd-length hex byte string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(ErrorKind::MalformedTrace, "invalid hex digit in byte string");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string to_hex(const Word& w) {
    if (w == 0) return "0x0";
    std::string digits;
    Word v = w;
    while (v != 0) {
        digits.push_back(kDigits[static_cast<unsigned>(v & 0xf)]);
        v >>= 4;
    }
    std::reverse(digits.begin(), digits.end());
    return "0x" + digits;
}

std::string to_hex64(const Word& w) {
    auto bytes = word_to_bytes(w);
    return to_hex(ByteView{bytes}, false);
}

std::string to_hex(ByteView bytes, bool prefix) {
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefix) out = "0x";
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

Word word_from_bytes(ByteView bytes) {
    Word w = 0;
    for (auto b : bytes.first(std::min<std::size_t>(bytes.size(), 32))) w = (w << 8) | b;
    return w;
}

std::array<std::uint8_t, 32> word_to_bytes(const Word& w) {
    std::array<std::uint8_t, 32> out{};
    Word v = w;
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int i = 0; i < 4; ++i) {
        h ^= static_cast<std::size_t>(static_cast<std::uint64_t>(w >> (64 * i)));
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace epg
