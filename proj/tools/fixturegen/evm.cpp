// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "evm.hpp"

#include <algorithm>
#include <stdexcept>

#include "epg/keccak.hpp"
#include "epg/opcodes.hpp"

namespace fixturegen {
namespace op = epg::op;
namespace {

constexpr std::size_t kMaxSteps = 1'000'000;
constexpr std::uint64_t kCallBase = 700;

std::uint64_t base_cost(std::uint8_t c) {
    switch (c) {
        case op::STOP:
        case op::RETURN:
        case op::REVERT:
        case op::INVALID:
            return 0;
        case op::JUMPDEST:
            return 1;
        case op::JUMP:
            return 8;
        case op::JUMPI:
            return 10;
        case op::SLOAD:
            return 2100;
        case op::SHA3:
            return 36;
        case op::BALANCE:
            return 700;
        case op::CALL:
        case op::CALLCODE:
        case op::DELEGATECALL:
        case op::STATICCALL:
            return kCallBase;
        case op::CREATE:
        case op::CREATE2:
            return 32000;
        case op::SELFDESTRUCT:
            return 5000;
        default:
            break;
    }
    if (c >= op::LOG0 && c <= op::LOG4) return 375u * (c - op::LOG0 + 1u);
    return 3;
}

Address to_address(const Word& w) { return Address{w}; }

Word exp_word(Word base, Word e) {
    Word r = 1;
    while (e != 0) {
        if ((e & 1) != 0) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

void ensure(Bytes& mem, const Word& offset, const Word& size) {
    if (size == 0) return;
    const auto end = static_cast<std::size_t>(offset + size);
    if (end > (1u << 20)) throw std::logic_error("fixture memory access too large");
    const auto words = (end + 31) / 32;
    if (mem.size() < words * 32) mem.resize(words * 32, 0);
}

Bytes slice(const Bytes& src, const Word& offset, const Word& size) {
    Bytes out(static_cast<std::size_t>(size), 0);
    if (offset >= src.size()) return out;
    const auto off = static_cast<std::size_t>(offset);
    const auto n = std::min(out.size(), src.size() - off);
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(off), n, out.begin());
    return out;
}

}  // namespace

Address create_address(const Address& sender, std::uint64_t nonce) {
    Bytes rlp;
    const auto a = epg::word_to_bytes(sender.word());
    Bytes n;
    if (nonce == 0) {
        n.push_back(0x80);
    } else if (nonce < 0x80) {
        n.push_back(static_cast<std::uint8_t>(nonce));
    } else {
        Bytes be;
        for (auto v = nonce; v != 0; v >>= 8) be.insert(be.begin(), static_cast<std::uint8_t>(v & 0xff));
        n.push_back(static_cast<std::uint8_t>(0x80 + be.size()));
        n.insert(n.end(), be.begin(), be.end());
    }
    rlp.push_back(static_cast<std::uint8_t>(0xc0 + 21 + n.size()));
    rlp.push_back(0x94);
    rlp.insert(rlp.end(), a.begin() + 12, a.end());
    rlp.insert(rlp.end(), n.begin(), n.end());
    return Address{epg::keccak256_word(rlp)};
}

Address create2_address(const Address& sender, const Word& salt, epg::ByteView init) {
    Bytes buf{0xff};
    const auto a = epg::word_to_bytes(sender.word());
    buf.insert(buf.end(), a.begin() + 12, a.end());
    const auto s = epg::word_to_bytes(salt);
    buf.insert(buf.end(), s.begin(), s.end());
    const auto h = epg::keccak256(init);
    buf.insert(buf.end(), h.begin(), h.end());
    return Address{epg::keccak256_word(buf)};
}

epg::ParsedTrace Evm::run(const Tx& tx, const std::string& tx_hash) {
    tx_ = tx;
    steps_.clear();
    touched_.clear();

    epg::ParsedTrace out;
    auto& env = out.envelope;
    env.tx_hash = tx_hash;
    env.from = tx.from;
    env.to = tx.to;
    env.value = tx.value;
    env.input = tx.input;
    env.block_number = tx.block_number;
    env.timestamp = tx.timestamp;
    for (const auto& [addr, acct] : world_) env.prestate.balances[addr] = acct.balance;

    const auto snapshot = world_;
    auto& sender = account(tx.from);
    const auto nonce = sender.nonce++;
    if (sender.balance < tx.value) throw std::logic_error("sender cannot fund the transaction value");

    Context ctx;
    ctx.caller = tx.from;
    ctx.value = tx.value;
    if (tx.to) {
        ctx.self = *tx.to;
        ctx.code = account(*tx.to).code;
        ctx.calldata = tx.input;
    } else {
        ctx.self = create_address(tx.from, nonce);
        env.contract_address = ctx.self;
        ctx.code = tx.input;
        account(ctx.self).nonce = 1;
    }
    account(tx.from).balance -= tx.value;
    account(ctx.self).balance += tx.value;

    const auto gas = tx.gas_limit - 21000;
    Result r = ctx.code.empty() ? Result{true, {}, gas} : exec(ctx, gas);
    if (!r.success) {
        world_ = snapshot;
        account(tx.from).nonce = nonce + 1;
    } else if (!tx.to) {
        account(ctx.self).code = r.output;
    }
    env.gas_used = tx.gas_limit - r.gas_left;
    out.steps = std::move(steps_);
    return out;
}

Evm::Result Evm::exec(const Context& ctx, std::uint64_t gas) {
    std::vector<Word> stack;
    Bytes mem;
    Bytes returndata;
    std::uint64_t pc = 0;
    const auto& code = ctx.code;

    auto pop = [&]() {
        if (stack.empty()) throw std::logic_error("fixture stack underflow at pc " + std::to_string(pc));
        Word w = stack.back();
        stack.pop_back();
        return w;
    };
    auto push = [&](const Word& w) { stack.push_back(w); };

    while (true) {
        if (steps_.size() > kMaxSteps) throw std::logic_error("fixture exceeded the step budget");
        const std::uint8_t c = pc < code.size() ? code[pc] : op::STOP;
        const auto& info = epg::opcode_info(c);
        const std::uint64_t cost = base_cost(c);
        if (gas < cost) throw std::logic_error("fixture ran out of gas");

        epg::OpStep s;
        s.pc = pc;
        s.op = std::string(info.name);
        s.code = c;
        s.gas = gas;
        s.gas_cost = cost;
        s.depth = ctx.depth;
        s.stack = stack;
        s.memory = mem;
        const auto step_index = steps_.size();
        steps_.push_back(s);
        gas -= cost;

        if (c >= op::PUSH1 && c <= op::PUSH32) {
            const std::size_t n = c - op::PUSH1 + 1u;
            Word v = 0;
            for (std::size_t i = 0; i < n; ++i) v = (v << 8) | (pc + 1 + i < code.size() ? code[pc + 1 + i] : 0);
            push(v);
            pc += 1 + n;
            continue;
        }
        if (c >= op::DUP1 && c <= op::DUP16) {
            const std::size_t n = c - op::DUP1 + 1u;
            push(stack.at(stack.size() - n));
            ++pc;
            continue;
        }
        if (c >= op::SWAP1 && c <= op::SWAP16) {
            const std::size_t n = c - op::SWAP1 + 1u;
            std::swap(stack.back(), stack.at(stack.size() - 1 - n));
            ++pc;
            continue;
        }
        if (c >= op::LOG0 && c <= op::LOG4) {
            const Word off = pop();
            const Word size = pop();
            ensure(mem, off, size);
            for (int i = 0; i < c - op::LOG0; ++i) pop();
            ++pc;
            continue;
        }

        switch (c) {
            case op::STOP:
                return {true, {}, gas};
            case op::ADD: { auto a = pop(), b = pop(); push(a + b); break; }
            case op::MUL: { auto a = pop(), b = pop(); push(a * b); break; }
            case op::SUB: { auto a = pop(), b = pop(); push(a - b); break; }
            case op::DIV: { auto a = pop(), b = pop(); push(b == 0 ? Word{0} : a / b); break; }
            case op::MOD: { auto a = pop(), b = pop(); push(b == 0 ? Word{0} : a % b); break; }
            case op::EXP: { auto a = pop(), b = pop(); push(exp_word(a, b)); break; }
            case op::LT: { auto a = pop(), b = pop(); push(a < b ? 1 : 0); break; }
            case op::GT: { auto a = pop(), b = pop(); push(a > b ? 1 : 0); break; }
            case op::EQ: { auto a = pop(), b = pop(); push(a == b ? 1 : 0); break; }
            case op::ISZERO: { auto a = pop(); push(a == 0 ? 1 : 0); break; }
            case op::AND: { auto a = pop(), b = pop(); push(a & b); break; }
            case op::OR: { auto a = pop(), b = pop(); push(a | b); break; }
            case op::XOR: { auto a = pop(), b = pop(); push(a ^ b); break; }
            case op::NOT: { auto a = pop(); push(~a); break; }
            case op::SHL: { auto sh = pop(), v = pop(); push(sh >= 256 ? Word{0} : Word{v << static_cast<unsigned>(sh)}); break; }
            case op::SHR: { auto sh = pop(), v = pop(); push(sh >= 256 ? Word{0} : Word{v >> static_cast<unsigned>(sh)}); break; }
            case op::SHA3: {
                auto off = pop(), size = pop();
                ensure(mem, off, size);
                push(epg::keccak256_word(slice(mem, off, size)));
                break;
            }
            case op::ADDRESS: push(ctx.self.word()); break;
            case op::BALANCE: { auto a = pop(); push(account(to_address(a)).balance); break; }
            case op::ORIGIN: push(tx_.from.word()); break;
            case op::CALLER: push(ctx.caller.word()); break;
            case op::CALLVALUE: push(ctx.value); break;
            case op::CALLDATALOAD: { auto off = pop(); push(epg::word_from_bytes(slice(ctx.calldata, off, 32))); break; }
            case op::CALLDATASIZE: push(ctx.calldata.size()); break;
            case op::CODESIZE: push(code.size()); break;
            case op::RETURNDATASIZE: push(returndata.size()); break;
            case op::CALLDATACOPY:
            case op::CODECOPY:
            case op::RETURNDATACOPY: {
                auto dst = pop(), off = pop(), size = pop();
                ensure(mem, dst, size);
                const Bytes& src = c == op::CALLDATACOPY ? ctx.calldata : c == op::CODECOPY ? code : returndata;
                const auto data = slice(src, off, size);
                std::copy(data.begin(), data.end(), mem.begin() + static_cast<std::ptrdiff_t>(dst));
                break;
            }
            case op::TIMESTAMP: push(tx_.timestamp); break;
            case op::NUMBER: push(tx_.block_number); break;
            case op::CHAINID: push(1); break;
            case op::SELFBALANCE: push(account(ctx.self).balance); break;
            case op::EXTCODESIZE: { auto a = pop(); push(account(to_address(a)).code.size()); break; }
            case op::POP: pop(); break;
            case op::MLOAD: {
                auto off = pop();
                ensure(mem, off, 32);
                push(epg::word_from_bytes(slice(mem, off, 32)));
                break;
            }
            case op::MSTORE: {
                auto off = pop(), v = pop();
                ensure(mem, off, 32);
                const auto b = epg::word_to_bytes(v);
                std::copy(b.begin(), b.end(), mem.begin() + static_cast<std::ptrdiff_t>(off));
                break;
            }
            case op::MSTORE8: {
                auto off = pop(), v = pop();
                ensure(mem, off, 1);
                mem[static_cast<std::size_t>(off)] = static_cast<std::uint8_t>(v & 0xff);
                break;
            }
            case op::SLOAD: {
                auto slot = pop();
                auto& st = account(ctx.self).storage;
                auto it = st.find(slot);
                const Word v = it == st.end() ? Word{0} : it->second;
                auto& t = touched_[ctx.self];
                t[slot] = v;
                steps_[step_index].storage = t;
                push(v);
                break;
            }
            case op::SSTORE: {
                auto slot = pop(), v = pop();
                auto& st = account(ctx.self).storage;
                const bool fresh = !st.contains(slot) || st[slot] == 0;
                const std::uint64_t extra = fresh ? 20000 - 3 : 5000 - 3;
                if (gas < extra) throw std::logic_error("fixture ran out of gas on SSTORE");
                gas -= extra;
                steps_[step_index].gas_cost += extra;
                st[slot] = v;
                auto& t = touched_[ctx.self];
                t[slot] = v;
                steps_[step_index].storage = t;
                break;
            }
            case op::JUMP: {
                auto dst = pop();
                if (dst >= code.size() || code[static_cast<std::size_t>(dst)] != op::JUMPDEST)
                    throw std::logic_error("fixture jumps to a non-JUMPDEST");
                pc = static_cast<std::uint64_t>(dst);
                continue;
            }
            case op::JUMPI: {
                auto dst = pop(), cond = pop();
                if (cond != 0) {
                    if (dst >= code.size() || code[static_cast<std::size_t>(dst)] != op::JUMPDEST)
                        throw std::logic_error("fixture jumps to a non-JUMPDEST");
                    pc = static_cast<std::uint64_t>(dst);
                    continue;
                }
                break;
            }
            case op::PC: push(pc); break;
            case op::MSIZE: push(mem.size()); break;
            case op::GAS: push(gas); break;
            case op::JUMPDEST: break;
            case op::PUSH0: push(0); break;
            case op::RETURN:
            case op::REVERT: {
                auto off = pop(), size = pop();
                ensure(mem, off, size);
                return {c == op::RETURN, slice(mem, off, size), gas};
            }
            case op::CALL:
            case op::CALLCODE:
            case op::DELEGATECALL:
            case op::STATICCALL: {
                const auto g = pop();
                (void)g;
                const auto target = to_address(pop());
                const Word value = (c == op::CALL || c == op::CALLCODE) ? pop() : Word{0};
                const auto in_off = pop(), in_size = pop(), out_off = pop(), out_size = pop();
                ensure(mem, in_off, in_size);
                ensure(mem, out_off, out_size);
                const std::uint64_t child_gas = gas - gas / 64;
                gas -= child_gas;

                Context child;
                child.depth = ctx.depth + 1;
                child.calldata = slice(mem, in_off, in_size);
                child.code = account(target).code;
                switch (c) {
                    case op::DELEGATECALL:
                        child.self = ctx.self;
                        child.caller = ctx.caller;
                        child.value = ctx.value;
                        break;
                    case op::CALLCODE:
                        child.self = ctx.self;
                        child.caller = ctx.self;
                        child.value = value;
                        break;
                    default:
                        child.self = target;
                        child.caller = ctx.self;
                        child.value = value;
                        break;
                }
                Result r;
                if (value != 0 && account(ctx.self).balance < value) {
                    r = {false, {}, child_gas};
                } else {
                    const auto snapshot = world_;
                    if (c == op::CALL && value != 0) {
                        account(ctx.self).balance -= value;
                        account(target).balance += value;
                    }
                    r = child.code.empty() ? Result{true, {}, child_gas} : exec(child, child_gas);
                    if (!r.success) world_ = snapshot;
                }
                gas += r.gas_left;
                returndata = r.output;
                const auto n = std::min<std::size_t>(static_cast<std::size_t>(out_size), returndata.size());
                std::copy_n(returndata.begin(), n, mem.begin() + static_cast<std::ptrdiff_t>(out_off));
                push(r.success ? 1 : 0);
                break;
            }
            case op::CREATE:
            case op::CREATE2: {
                const auto value = pop(), off = pop(), size = pop();
                const Word salt = c == op::CREATE2 ? pop() : Word{0};
                ensure(mem, off, size);
                const auto init = slice(mem, off, size);
                auto& me = account(ctx.self);
                const auto nonce = me.nonce++;
                const auto addr = c == op::CREATE ? create_address(ctx.self, nonce) : create2_address(ctx.self, salt, init);
                const std::uint64_t child_gas = gas - gas / 64;
                gas -= child_gas;
                returndata.clear();
                if (value != 0 && me.balance < value) {
                    gas += child_gas;
                    push(0);
                    break;
                }
                const auto snapshot = world_;
                account(ctx.self).balance -= value;
                account(addr).balance += value;
                account(addr).nonce = 1;
                Context child;
                child.depth = ctx.depth + 1;
                child.self = addr;
                child.caller = ctx.self;
                child.value = value;
                child.code = init;
                Result r = init.empty() ? Result{true, {}, child_gas} : exec(child, child_gas);
                gas += r.gas_left;
                if (r.success) {
                    account(addr).code = r.output;
                    push(addr.word());
                } else {
                    world_ = snapshot;
                    returndata = r.output;
                    push(0);
                }
                break;
            }
            case op::SELFDESTRUCT: {
                const auto beneficiary = to_address(pop());
                auto& me = account(ctx.self);
                const Word all = me.balance;
                me.balance = 0;
                account(beneficiary).balance += all;
                return {true, {}, gas};
            }
            case op::INVALID:
                return {false, {}, 0};
            default:
                throw std::logic_error("fixture EVM does not implement " + std::string(info.name));
        }
        ++pc;
    }
}

}  // namespace fixturegen
