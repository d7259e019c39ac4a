// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

// Access-control and price scenarios modeled on the MonoX incident and on
// common swap-then-borrow shapes.

#include "common.hpp"

namespace fixturegen {
namespace {

using Fn = std::function<void(Asm&)>;

Fn push_of(const Word& w) {
    return [w](Asm& a) { a.push(w); };
}
Fn push_of(const Address& addr) {
    return [addr](Asm& a) { a.push(addr); };
}
Fn opcode(std::uint8_t c) {
    return [c](Asm& a) { a.op(c); };
}
Fn local(int i) {
    return [i](Asm& a) { a.load(i); };
}
Fn argument(int i) {
    return [i](Asm& a) { a.arg(i); };
}

Address mono() { return filled(0x30); }
Address usdc() { return filled(0x3c); }

// removeLiquidity(token, provider, liquidity, to) with no check that the
// caller is the provider.
Fixture monox_remove_liquidity() {
    const auto pool = filled(0x33);
    const auto attacker = filled(0x3a);
    const auto provider = filled(0x3b);
    World w;
    w[eoa()].balance = ether(1);
    w[mono()].code = token_code();
    credit(w, mono(), pool, ether(1000));
    w[provider].balance = 0;

    Asm p;
    p.dispatch({{"removeLiquidity(address,address,uint256,address)", "remove"}}, "fail");
    p.label("remove");
    p.arg(1).arg(0).mapping2(1).op(op::DUP1).store(0).op(op::SLOAD).store(1);  // lp[token][provider]
    p.load(1).arg(2).op(op::GT).jumpi("fail");
    p.arg(2).load(1).op(op::SUB).load(0).op(op::SSTORE);
    p.call(op::CALL, "transfer(address,uint256)", 2, {argument(3), argument(2)}, argument(0))
        .op(op::ISZERO)
        .jumpi("fail");
    p.stop();
    p.fail_block();
    w[pool].code = p.assemble();
    {
        const auto inner = mapping_slot(mono().word(), 1);
        w[pool].storage[mapping_slot(provider.word(), inner)] = ether(400);
    }

    // exploit(provider, liquidity): drains the provider's position back to the provider
    Asm a;
    a.dispatch({{"exploit(address,uint256)", "exploit"}}, "fail");
    a.label("exploit");
    a.call(op::CALL, "removeLiquidity(address,address,uint256,address)", 4,
           {push_of(mono()), argument(0), argument(1), argument(0)}, push_of(pool))
        .op(op::POP)
        .stop();
    a.fail_block();
    w[attacker].code = a.assemble();

    Tx tx{eoa(), attacker, 0, calldata("exploit(address,uint256)", {provider.word(), ether(400)})};
    return execute("monox_remove_liquidity", std::move(w), tx, {mono()});
}

// withdraw(amount) guarded by the owner slot compared against `who`.
Fixture guarded_withdraw(const std::string& name, std::uint8_t who) {
    const auto vault = filled(0x7a);
    World w;
    w[eoa()].balance = ether(1);
    Asm v;
    v.dispatch({{"withdraw(uint256)", "withdraw"}}, "fail");
    v.label("withdraw");
    v.push(Word{0}).op(op::SLOAD).op(who).op(op::EQ).op(op::ISZERO).jumpi("fail");
    v.call(op::CALL, "", 0, {}, opcode(who), argument(0), 0).op(op::POP).stop();
    v.fail_block();
    w[vault].code = v.assemble();
    w[vault].balance = ether(20);
    w[vault].storage[Word{0}] = eoa().word();
    Tx tx{eoa(), vault, 0, calldata("withdraw(uint256)", {ether(5)})};
    return execute(name, std::move(w), tx);
}

// harvest() sends pending rewards to a treasury address baked into the code.
Fixture harvest_fixed_recipient() {
    const auto strategy = filled(0x4a);
    const auto treasury = filled(0x4b);
    const auto reward = filled(0x4c);
    World w;
    w[eoa()].balance = ether(1);
    w[treasury].balance = 0;
    w[reward].code = token_code();
    credit(w, reward, strategy, ether(100));
    Asm s;
    s.dispatch({{"harvest()", "harvest"}}, "fail");
    s.label("harvest");
    s.push(Word{1}).op(op::SLOAD).store(0);
    s.push(Word{0}).push(Word{1}).op(op::SSTORE);
    s.call(op::CALL, "transfer(address,uint256)", 2, {push_of(treasury), local(0)}, push_of(reward))
        .op(op::ISZERO)
        .jumpi("fail");
    s.stop();
    s.fail_block();
    w[strategy].code = s.assemble();
    w[strategy].storage[Word{1}] = ether(7);
    Tx tx{eoa(), strategy, 0, calldata("harvest()")};
    return execute("harvest_fixed_recipient", std::move(w), tx, {reward});
}

// Monoswap-style pool. swap(tokenIn, tokenOut, amountIn) quotes from the stored
// prices, checks the output reserve, moves tokens unless both sides are the same
// token, then lowers price[tokenIn] and raises price[tokenOut]. With
// tokenIn == tokenOut the second write wins, so a self-swap pumps the price.
Bytes monoswap_code() {
    Asm p;
    p.dispatch({{"swap(address,address,uint256)", "swap"}}, "fail");
    p.label("swap");
    p.arg(0).mapping(2).op(op::SLOAD).store(0);  // pIn
    p.arg(1).mapping(2).op(op::SLOAD).store(1);  // pOut
    p.load(1).load(0).arg(2).op(op::MUL).op(op::DIV).store(2);  // amountOut = amountIn * pIn / pOut
    p.arg(1).mapping(3).op(op::SLOAD).load(2).op(op::GT).jumpi("fail");  // amountOut > reserve[out]
    p.arg(0).arg(1).op(op::EQ).jumpi("reprice");
    p.call(op::CALL, "transferFrom(address,address,uint256)", 3, {opcode(op::CALLER), opcode(op::ADDRESS), argument(2)},
           argument(0))
        .op(op::ISZERO)
        .jumpi("fail");
    p.call(op::CALL, "transfer(address,uint256)", 2, {opcode(op::CALLER), local(2)}, argument(1))
        .op(op::ISZERO)
        .jumpi("fail");
    p.label("reprice");
    p.push(Word{10}).load(0).op(op::DIV).load(0).op(op::SUB).arg(0).mapping(2).op(op::SSTORE);  // pIn - pIn/10
    p.push(Word{5}).load(1).op(op::DIV).load(1).op(op::ADD).arg(1).mapping(2).op(op::SSTORE);   // pOut + pOut/5
    p.stop();
    p.fail_block();
    return p.assemble();
}

Fixture self_swap_price_pump() {
    const auto pool = filled(0x35);
    const auto attacker = filled(0x3e);
    World w;
    w[eoa()].balance = ether(1);
    w[mono()].code = token_code();
    w[usdc()].code = token_code();
    credit(w, mono(), pool, ether(100000));
    credit(w, usdc(), pool, ether(100000));
    credit(w, mono(), attacker, ether(50));
    w[pool].code = monoswap_code();
    for (const auto& t : {mono(), usdc()}) {
        w[pool].storage[mapping_slot(t.word(), 2)] = kEther;
        w[pool].storage[mapping_slot(t.word(), 3)] = ether(100000);
    }

    Asm a;
    a.dispatch({{"pump()", "pump"}}, "fail");
    a.label("pump");
    for (int i = 0; i < 3; ++i)
        a.call(op::CALL, "swap(address,address,uint256)", 3, {push_of(mono()), push_of(mono()), push_of(kEther)},
               push_of(pool))
            .op(op::ISZERO)
            .jumpi("fail");
    a.call(op::CALL, "swap(address,address,uint256)", 3, {push_of(mono()), push_of(usdc()), push_of(ether(10))},
           push_of(pool))
        .op(op::ISZERO)
        .jumpi("fail");
    a.stop();
    a.fail_block();
    w[attacker].code = a.assemble();
    Tx tx{eoa(), attacker, 0, calldata("pump()")};
    return execute("self_swap_price_pump", std::move(w), tx, {mono(), usdc()});
}

Address tka() { return filled(0x61); }
Address tkb() { return filled(0x62); }

// Constant-product pair for (tka, tkb). swap(amountIn) sells tka for tkb;
// getReserves() returns (reserveA, reserveB) from slots 0 and 1.
Bytes pair_code() {
    Asm p;
    p.dispatch({{"swap(uint256)", "swap"}, {"getReserves()", "reserves"}}, "fail");
    p.label("swap");
    p.push(Word{0}).op(op::SLOAD).store(0).push(Word{1}).op(op::SLOAD).store(1);
    p.arg(0).load(0).op(op::ADD).load(1).arg(0).op(op::MUL).op(op::DIV).store(2);  // out = in*rB/(rA+in)
    p.call(op::CALL, "transferFrom(address,address,uint256)", 3, {opcode(op::CALLER), opcode(op::ADDRESS), argument(0)},
           push_of(tka()))
        .op(op::ISZERO)
        .jumpi("fail");
    p.call(op::CALL, "transfer(address,uint256)", 2, {opcode(op::CALLER), local(2)}, push_of(tkb()))
        .op(op::ISZERO)
        .jumpi("fail");
    p.arg(0).load(0).op(op::ADD).push(Word{0}).op(op::SSTORE);
    p.load(2).load(1).op(op::SUB).push(Word{1}).op(op::SSTORE);
    p.stop();
    p.label("reserves");
    p.push(Word{0}).op(op::SLOAD).push(Word{Asm::kScratch}).op(op::MSTORE);
    p.push(Word{1}).op(op::SLOAD).push(Word{Asm::kScratch + 32}).op(op::MSTORE);
    p.push(Word{64}).push(Word{Asm::kScratch}).op(op::RETURN);
    p.fail_block();
    return p.assemble();
}

// Lender valuing tkb collateral at the pair's spot price: borrow(amount) pays
// tka when amount <= collateral * reserveA / reserveB.
Bytes lender_code(const Address& pair) {
    Asm l;
    l.dispatch({{"borrow(uint256)", "borrow"}}, "fail");
    l.label("borrow");
    l.call(op::STATICCALL, "getReserves()", 0, {}, push_of(pair), {}, 64).op(op::ISZERO).jumpi("fail");
    l.push(Word{Asm::kReturn + 32}).op(op::MLOAD).push(Word{Asm::kReturn}).op(op::MLOAD);  // [rB, rA]
    l.op(op::CALLER).mapping(0).op(op::SLOAD).op(op::MUL).op(op::DIV).store(0);  // collateral*rA/rB
    l.load(0).arg(0).op(op::GT).jumpi("fail");
    l.call(op::CALL, "transfer(address,uint256)", 2, {opcode(op::CALLER), argument(0)}, push_of(tka()))
        .op(op::ISZERO)
        .jumpi("fail");
    l.stop();
    l.fail_block();
    return l.assemble();
}

Fixture swap_shift(const std::string& name, const Word& amount_in) {
    const auto pair = filled(0x63);
    const auto lender = filled(0x64);
    const auto attacker = filled(0x65);
    World w;
    w[eoa()].balance = ether(1);
    w[tka()].code = token_code();
    w[tkb()].code = token_code();
    credit(w, tka(), pair, ether(1000));
    credit(w, tkb(), pair, ether(1000));
    credit(w, tka(), lender, ether(1000000));
    credit(w, tka(), attacker, ether(200000));
    w[pair].code = pair_code();
    w[pair].storage[Word{0}] = ether(1000);
    w[pair].storage[Word{1}] = ether(1000);
    w[lender].code = lender_code(pair);
    w[lender].storage[mapping_slot(attacker.word(), 0)] = ether(10);

    Asm a;
    a.dispatch({{"run(uint256,uint256)", "run"}}, "fail");
    a.label("run");
    a.call(op::CALL, "swap(uint256)", 1, {argument(0)}, push_of(pair)).op(op::ISZERO).jumpi("fail");
    a.call(op::CALL, "borrow(uint256)", 1, {argument(1)}, push_of(lender)).op(op::ISZERO).jumpi("fail");
    a.stop();
    a.fail_block();
    w[attacker].code = a.assemble();
    Tx tx{eoa(), attacker, 0, calldata("run(uint256,uint256)", {amount_in, ether(10)})};
    return execute(name, std::move(w), tx, {tka(), tkb()});
}

// flashSwap(payer): pays reserveB/10 of tkb up front, then requires
// tx.origin == payer and pulls reserveB/10 + 1 of tka from the payer. Both
// amounts come from the same reserve slot.
Fixture swap_a3() {
    const auto pair = filled(0x66);
    World w;
    w[eoa()].balance = ether(1);
    w[tka()].code = token_code();
    w[tkb()].code = token_code();
    credit(w, tkb(), pair, ether(1000));
    credit(w, tka(), eoa(), ether(1000));
    Asm p;
    p.dispatch({{"flashSwap(address)", "flash"}}, "fail");
    p.label("flash");
    p.push(Word{10}).push(Word{1}).op(op::SLOAD).op(op::DIV).store(0);
    p.call(op::CALL, "transfer(address,uint256)", 2, {opcode(op::CALLER), local(0)}, push_of(tkb()))
        .op(op::ISZERO)
        .jumpi("fail");
    p.arg(0).op(op::ORIGIN).op(op::EQ).op(op::ISZERO).jumpi("fail");
    p.call(op::CALL, "transferFrom(address,address,uint256)", 3,
           {argument(0), opcode(op::ADDRESS), [](Asm& x) { x.push(Word{1}).load(0).op(op::ADD); }}, push_of(tka()))
        .op(op::ISZERO)
        .jumpi("fail");
    p.stop();
    p.fail_block();
    w[pair].code = p.assemble();
    w[pair].storage[Word{1}] = ether(1000);
    Tx tx{eoa(), pair, 0, calldata("flashSwap(address)", {eoa().word()})};
    return execute("swap_a3", std::move(w), tx, {tka(), tkb()});
}

}  // namespace

std::vector<Fixture> defi_fixtures() {
    std::vector<Fixture> out;
    out.push_back(monox_remove_liquidity());
    out.push_back(guarded_withdraw("origin_guarded_withdraw", op::ORIGIN));
    out.push_back(guarded_withdraw("caller_guarded_withdraw", op::CALLER));
    out.push_back(harvest_fixed_recipient());
    out.push_back(self_swap_price_pump());
    // 10.1 of 1000 in: about a 1% move of the tka reserve
    out.push_back(swap_shift("swap_shift_1pct", ether(101) / 10));
    // 99000 in on top of 1000: a 99% move
    out.push_back(swap_shift("swap_shift_99pct", ether(99000)));
    out.push_back(swap_a3());
    return out;
}

}  // namespace fixturegen
