// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "common.hpp"

#include "epg/keccak.hpp"

namespace fixturegen {

Address filled(std::uint8_t byte) {
    Word w = 0;
    for (int i = 0; i < 20; ++i) w = (w << 8) | byte;
    return Address{w};
}

Address from_hex(std::string_view hex) { return epg::parse_address(hex); }

Word mapping_slot(const Word& key, const Word& slot) {
    Bytes buf;
    for (const auto& w : {key, slot}) {
        const auto b = epg::word_to_bytes(w);
        buf.insert(buf.end(), b.begin(), b.end());
    }
    return epg::keccak256_word(buf);
}

Bytes calldata(std::string_view signature, const std::vector<Word>& args) {
    const auto sel = selector(signature);
    Bytes out{static_cast<std::uint8_t>(sel >> 24), static_cast<std::uint8_t>(sel >> 16),
              static_cast<std::uint8_t>(sel >> 8), static_cast<std::uint8_t>(sel)};
    for (const auto& a : args) {
        const auto b = epg::word_to_bytes(a);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

Address eoa() { return from_hex("0xabababababababababababababababababababcd"); }
Address foo_addr() { return filled(0xf0); }
Address bar_addr() { return filled(0xba); }

Bytes token_code() {
    Asm a;
    a.dispatch({{"transfer(address,uint256)", "transfer"},
                {"transferFrom(address,address,uint256)", "transferFrom"},
                {"balanceOf(address)", "balanceOf"}},
               "fail");
    a.label("transfer");
    a.op(op::CALLER).store(0).arg(0).store(1).arg(1).store(2).jump("move");
    a.label("transferFrom");
    a.arg(0).store(0).arg(1).store(1).arg(2).store(2).jump("move");
    a.label("balanceOf");
    a.arg(0).mapping(0).op(op::SLOAD).return_word();

    // locals: 0 = from, 1 = to, 2 = amount
    a.label("move");
    a.load(0).mapping(0).op(op::SLOAD);
    a.op(op::DUP1).load(2).op(op::GT).jumpi("fail");
    a.load(2).op(op::SWAP1).op(op::SUB).load(0).mapping(0).op(op::SSTORE);
    a.load(1).mapping(0).op(op::SLOAD).load(2).op(op::ADD).load(1).mapping(0).op(op::SSTORE);
    a.load(1).load(0).load(2).erc20_transfer_log();
    a.push(Word{1}).return_word();
    a.fail_block();
    return a.assemble();
}

void credit(World& w, const Address& token, const Address& holder, const Word& amount) {
    w[token].storage[mapping_slot(holder.word(), 0)] += amount;
}

Fixture execute(const std::string& name, World world, const Tx& tx, const std::vector<Address>& tokens) {
    std::map<Address, std::map<Address, Word>> token_balances;
    for (const auto& token : tokens) {
        const auto& st = world[token].storage;
        for (const auto& [holder, acct] : world) {
            if (holder == token) continue;
            auto it = st.find(mapping_slot(holder.word(), 0));
            token_balances[token][holder] = it == st.end() ? Word{0} : it->second;
        }
    }
    Evm evm{std::move(world)};
    Fixture f{name, evm.run(tx, "0x" + epg::to_hex64(epg::keccak256_word(name)))};
    f.trace.envelope.prestate.token_balances = std::move(token_balances);
    return f;
}

}  // namespace fixturegen
