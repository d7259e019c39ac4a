// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/keccak.hpp"

#include <cstring>

namespace epg {
namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr std::array<int, 24> kRotations = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                            27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7, 11, 17, 18, 3, 5, 16, 8, 21, 24, 4,
                                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9, 6, 1};

inline std::uint64_t rotl(std::uint64_t x, int n) { return (x << n) | (x >> (64 - n)); }

void keccak_f1600(std::array<std::uint64_t, 25>& st) {
    for (auto rc : kRoundConstants) {
        std::array<std::uint64_t, 5> bc{};
        for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            auto t = bc[(i + 4) % 5] ^ rotl(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
        }
        auto t = st[1];
        for (int i = 0; i < 24; ++i) {
            auto j = kPi[i];
            auto tmp = st[j];
            st[j] = rotl(t, kRotations[i]);
            t = tmp;
        }
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
        }
        st[0] ^= rc;
    }
}

}  // namespace

std::array<std::uint8_t, 32> keccak256(ByteView data) {
    constexpr std::size_t kRate = 136;
    std::array<std::uint64_t, 25> st{};
    auto absorb = [&](const std::uint8_t* block) {
        for (std::size_t i = 0; i < kRate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int b = 7; b >= 0; --b) lane = (lane << 8) | block[i * 8 + static_cast<std::size_t>(b)];
            st[i] ^= lane;
        }
        keccak_f1600(st);
    };
    std::size_t off = 0;
    for (; off + kRate <= data.size(); off += kRate) absorb(data.data() + off);
    std::array<std::uint8_t, kRate> last{};
    std::memcpy(last.data(), data.data() + off, data.size() - off);
    last[data.size() - off] ^= 0x01;
    last[kRate - 1] ^= 0x80;
    absorb(last.data());

    std::array<std::uint8_t, 32> out{};
    for (std::size_t i = 0; i < 32; ++i) out[i] = static_cast<std::uint8_t>(st[i / 8] >> (8 * (i % 8)));
    return out;
}

Word keccak256_word(ByteView data) {
    auto h = keccak256(data);
    return word_from_bytes(h);
}

Word keccak256_word(std::string_view text) {
    return keccak256_word(ByteView{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

const Word& erc20_transfer_topic() {
    static const Word topic = keccak256_word(std::string_view{"Transfer(address,address,uint256)"});
    return topic;
}

}  // namespace epg
