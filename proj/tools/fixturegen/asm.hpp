// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "epg/opcodes.hpp"
#include "epg/word.hpp"

namespace fixturegen {

using epg::Address;
using epg::Bytes;
using epg::Word;
namespace op = epg::op;

/// 4-byte function selector of a signature such as "withdraw(uint256)".
std::uint32_t selector(std::string_view signature);

/// Tiny assembler with forward labels. Memory layout: locals at 0x80 + 32 * i
/// (at most six), outgoing call data staged at 0x140, call results at 0x200,
/// and a two-word scratch area at 0x240 for return values and log data.
class Asm {
  public:
    static constexpr std::uint64_t kLocals = 0x80;
    static constexpr std::uint64_t kCallData = 0x140;
    static constexpr std::uint64_t kReturn = 0x200;
    static constexpr std::uint64_t kScratch = 0x240;

    Asm& op(std::uint8_t code);
    Asm& push(const Word& v);
    Asm& push(const Address& a);
    Asm& label(const std::string& name);        // emits JUMPDEST
    Asm& push_label(const std::string& name);   // PUSH2 placeholder
    Asm& jump(const std::string& name);
    Asm& jumpi(const std::string& name);        // consumes the condition on the stack

    // structured helpers; stack effects are noted as [before] -> [after]
    Asm& store(int local);                      // [v] -> []
    Asm& load(int local);                       // [] -> [v]
    Asm& arg(int index);                        // [] -> [calldata word]
    Asm& dispatch(const std::vector<std::pair<std::string, std::string>>& routes, const std::string& fallback);
    Asm& mapping(const Word& slot);             // [key] -> [keccak(key . slot)]
    Asm& mapping2(const Word& slot);            // [k2, k1] -> [keccak(k2 . keccak(k1 . slot))]
    Asm& require(const std::string& fail = "fail");  // [cond] -> []
    Asm& fail_block(const std::string& name = "fail");
    Asm& stop();
    Asm& return_word();                         // [v] -> halts returning v
    /// Stages selector + args (args pushed by the callback, last arg first on the stack)
    /// at kCallData and performs the call. [value?] handled by the callback order.
    /// After: [success].
    Asm& call(std::uint8_t kind, std::string_view signature, int nargs,
              const std::vector<std::function<void(Asm&)>>& args, const std::function<void(Asm&)>& target,
              const std::function<void(Asm&)>& value = {}, std::uint64_t ret_size = 0x20);
    Asm& erc20_transfer_log();                  // [to, from, amount] -> [] (amount on top)

    [[nodiscard]] Bytes assemble() const;

  private:
    std::vector<std::uint8_t> code_;
    std::map<std::string, std::size_t> labels_;
    std::vector<std::pair<std::size_t, std::string>> fixups_;
};

}  // namespace fixturegen
