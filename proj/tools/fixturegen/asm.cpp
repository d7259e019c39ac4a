// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "asm.hpp"

#include <stdexcept>

#include "epg/keccak.hpp"

namespace fixturegen {

std::uint32_t selector(std::string_view signature) {
    const auto h = epg::keccak256(epg::ByteView{reinterpret_cast<const std::uint8_t*>(signature.data()), signature.size()});
    return (std::uint32_t{h[0]} << 24) | (std::uint32_t{h[1]} << 16) | (std::uint32_t{h[2]} << 8) | h[3];
}

Asm& Asm::op(std::uint8_t code) {
    code_.push_back(code);
    return *this;
}

Asm& Asm::push(const Word& v) {
    const auto bytes = epg::word_to_bytes(v);
    std::size_t first = 0;
    while (first < 31 && bytes[first] == 0) ++first;
    const auto n = 32 - first;
    code_.push_back(static_cast<std::uint8_t>(op::PUSH1 + n - 1));
    code_.insert(code_.end(), bytes.begin() + static_cast<std::ptrdiff_t>(first), bytes.end());
    return *this;
}

Asm& Asm::push(const Address& a) {
    const auto bytes = epg::word_to_bytes(a.word());
    code_.push_back(static_cast<std::uint8_t>(op::PUSH1 + 19));
    code_.insert(code_.end(), bytes.begin() + 12, bytes.end());
    return *this;
}

Asm& Asm::label(const std::string& name) {
    if (!labels_.emplace(name, code_.size()).second) throw std::logic_error("duplicate label " + name);
    return op(op::JUMPDEST);
}

Asm& Asm::push_label(const std::string& name) {
    code_.push_back(op::PUSH1 + 1);
    fixups_.emplace_back(code_.size(), name);
    code_.push_back(0);
    code_.push_back(0);
    return *this;
}

Asm& Asm::jump(const std::string& name) { return push_label(name).op(op::JUMP); }
Asm& Asm::jumpi(const std::string& name) { return push_label(name).op(op::JUMPI); }

Asm& Asm::store(int local) {
    if (local < 0 || local > 5) throw std::logic_error("local index out of range");
    return push(Word{kLocals + 32u * static_cast<unsigned>(local)}).op(op::MSTORE);
}

Asm& Asm::load(int local) { return push(Word{kLocals + 32u * static_cast<unsigned>(local)}).op(op::MLOAD); }
Asm& Asm::arg(int index) { return push(Word{4u + 32u * static_cast<unsigned>(index)}).op(op::CALLDATALOAD); }

Asm& Asm::dispatch(const std::vector<std::pair<std::string, std::string>>& routes, const std::string& fallback) {
    push(Word{0}).op(op::CALLDATALOAD).push(Word{224}).op(op::SHR);
    for (const auto& [sig, target] : routes) {
        op(op::DUP1).push(Word{selector(sig)}).op(op::EQ).jumpi(target);
    }
    return jump(fallback);
}

Asm& Asm::mapping(const Word& slot) {
    push(Word{0}).op(op::MSTORE);
    push(slot).push(Word{32}).op(op::MSTORE);
    return push(Word{64}).push(Word{0}).op(op::SHA3);
}

Asm& Asm::mapping2(const Word& slot) {
    // [k2, k1] -> [k2, h1] -> [h2]
    mapping(slot);
    push(Word{32}).op(op::MSTORE);
    push(Word{0}).op(op::MSTORE);
    return push(Word{64}).push(Word{0}).op(op::SHA3);
}

Asm& Asm::require(const std::string& fail) { return op(op::ISZERO).jumpi(fail); }

Asm& Asm::fail_block(const std::string& name) { return label(name).push(Word{0}).push(Word{0}).op(op::REVERT); }

Asm& Asm::stop() { return op(op::STOP); }

Asm& Asm::return_word() {
    push(Word{kScratch}).op(op::MSTORE);
    return push(Word{32}).push(Word{kScratch}).op(op::RETURN);
}

Asm& Asm::call(std::uint8_t kind, std::string_view signature, int nargs,
               const std::vector<std::function<void(Asm&)>>& args, const std::function<void(Asm&)>& target,
               const std::function<void(Asm&)>& value, std::uint64_t ret_size) {
    std::uint64_t args_len = 0;
    if (!signature.empty()) {
        push(Word{selector(signature)} << 224).push(Word{kCallData}).op(op::MSTORE);
        args_len = 4;
    }
    const std::uint64_t base = kCallData + args_len;
    for (int i = 0; i < nargs; ++i) {
        args.at(static_cast<std::size_t>(i))(*this);
        push(Word{base + 32u * static_cast<unsigned>(i)}).op(op::MSTORE);
        args_len += 32;
    }
    push(Word{ret_size}).push(Word{kReturn}).push(Word{args_len}).push(Word{kCallData});
    if (kind == op::CALL || kind == op::CALLCODE) {
        if (value) value(*this);
        else push(Word{0});
    }
    target(*this);
    return op(op::GAS).op(kind);
}

Asm& Asm::erc20_transfer_log() {
    push(Word{kScratch}).op(op::MSTORE);
    push(epg::erc20_transfer_topic()).push(Word{32}).push(Word{kScratch});
    return op(op::LOG3);
}

Bytes Asm::assemble() const {
    Bytes out = code_;
    for (const auto& [at, name] : fixups_) {
        auto it = labels_.find(name);
        if (it == labels_.end()) throw std::logic_error("undefined label " + name);
        out[at] = static_cast<std::uint8_t>(it->second >> 8);
        out[at + 1] = static_cast<std::uint8_t>(it->second & 0xff);
    }
    return out;
}

}  // namespace fixturegen
