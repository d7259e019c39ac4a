// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

// Reentrancy-shaped scenarios and a few plain traces that exercise the
// replay machinery (empty root, reverted child, implicit balance flow).

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

// Foo from the running example. `patched` moves the balance update before the transfer.
Bytes foo_code(bool patched) {
    Asm a;
    a.dispatch({{"withdraw(uint256)", "withdraw"}, {"deposit()", "deposit"}}, "fail");
    a.label("withdraw");
    a.op(op::CALLER).mapping(0).op(op::SLOAD).store(0);  // _balance
    a.load(0).arg(0).op(op::GT).jumpi("fail");          // amt > _balance
    auto update = [](Asm& x) { x.arg(0).load(0).op(op::SUB).op(op::CALLER).mapping(0).op(op::SSTORE); };
    if (patched) update(a);
    a.call(op::CALL, "", 0, {}, opcode(op::CALLER), [](Asm& x) { x.arg(0); }, 0).op(op::POP);
    if (!patched) update(a);
    a.stop();
    a.label("deposit");
    a.op(op::CALLER).mapping(0).op(op::SLOAD).op(op::CALLVALUE).op(op::ADD).op(op::CALLER).mapping(0).op(op::SSTORE);
    a.stop();
    a.fail_block();
    return a.assemble();
}

// Bar: callWithdraw(foo) and a fallback that re-enters while its balance is below 20 ether.
Bytes bar_code() {
    Asm a;
    a.dispatch({{"callWithdraw(address)", "callWithdraw"}}, "fallback");
    a.label("callWithdraw");
    a.arg(0).store(0).jump("withdraw");
    a.label("fallback");
    a.push(ether(20)).op(op::SELFBALANCE).op(op::LT).op(op::ISZERO).jumpi("done");
    a.op(op::CALLER).store(0);
    a.label("withdraw");
    a.call(op::CALL, "withdraw(uint256)", 1, {push_of(ether(10))}, local(0)).op(op::POP).stop();
    a.label("done").stop();
    return a.assemble();
}

Fixture foo_bar(bool patched) {
    World w;
    w[eoa()].balance = ether(1000);
    auto& foo = w[foo_addr()];
    foo.code = foo_code(patched);
    foo.balance = ether(100);
    foo.storage[mapping_slot(bar_addr().word(), 0)] = ether(10);
    w[bar_addr()].code = bar_code();
    Tx tx{eoa(), bar_addr(), 0, calldata("callWithdraw(address)", {foo_addr().word()})};
    return execute(patched ? "foo_bar_patched" : "foo_bar_attack", std::move(w), tx);
}

Fixture empty_transfer() {
    World w;
    w[eoa()].balance = ether(10);
    Tx tx{eoa(), filled(0x0e), ether(1), {}};
    return execute("empty_transfer", std::move(w), tx);
}

// Router bumps a nonce, pays a token and some ether, never calls back into itself.
Fixture benign_nested() {
    const auto router = filled(0x71);
    const auto token = filled(0x7c);
    const auto payee = filled(0x0d);
    World w;
    w[eoa()].balance = ether(10);
    w[token].code = token_code();
    credit(w, token, router, ether(500));
    Asm a;
    a.dispatch({{"payout(address)", "payout"}}, "fail");
    a.label("payout");
    a.push(Word{0}).op(op::SLOAD).push(Word{1}).op(op::ADD).push(Word{0}).op(op::SSTORE);
    a.call(op::CALL, "transfer(address,uint256)", 2, {[](Asm& x) { x.arg(0); }, push_of(ether(5))}, push_of(token))
        .op(op::ISZERO)
        .jumpi("fail");
    a.call(op::CALL, "", 0, {}, [](Asm& x) { x.arg(0); }, push_of(ether(1)), 0).op(op::POP).stop();
    a.fail_block();
    w[router].code = a.assemble();
    w[router].balance = ether(3);
    Tx tx{eoa(), router, 0, calldata("payout(address)", {payee.word()})};
    return execute("benign_nested", std::move(w), tx, {token});
}

// Two contracts calling each other with a decreasing counter; each writes before it calls.
Fixture mutual_recursion() {
    const auto ping = filled(0xa1);
    const auto pong = filled(0xa2);
    auto code = [](const Address& peer) {
        Asm a;
        a.dispatch({{"step(uint256)", "step"}}, "fail");
        a.label("step");
        a.arg(0).push(Word{0}).op(op::SSTORE);
        a.arg(0).op(op::ISZERO).jumpi("done");
        a.call(op::CALL, "step(uint256)", 1, {[](Asm& x) { x.push(Word{1}).arg(0).op(op::SUB); }}, push_of(peer))
            .op(op::POP)
            .stop();
        a.label("done").stop();
        a.fail_block();
        return a.assemble();
    };
    World w;
    w[eoa()].balance = ether(1);
    w[ping].code = code(pong);
    w[pong].code = code(ping);
    Tx tx{eoa(), ping, 0, calldata("step(uint256)", {Word{3}})};
    return execute("mutual_recursion", std::move(w), tx);
}

// Attacker contract: attack() calls victim.<sig>; the named hook re-enters once.
Bytes reentering_attacker(const Address& victim, std::string_view sig, std::string_view hook) {
    Asm a;
    std::vector<std::pair<std::string, std::string>> routes{{"attack()", "attack"}};
    if (!hook.empty()) routes.emplace_back(std::string(hook), "hook");
    a.dispatch(routes, "hook");
    a.label("attack");
    a.call(op::CALL, sig, 0, {}, push_of(victim)).op(op::POP).stop();
    a.label("hook");
    a.push(Word{0}).op(op::SLOAD).jumpi("done");
    a.push(Word{1}).push(Word{0}).op(op::SSTORE);
    a.call(op::CALL, sig, 0, {}, push_of(victim)).op(op::POP).stop();
    a.label("done").stop();
    return a.assemble();
}

// Victim pays through a library reached by DELEGATECALL, then clears the balance.
Fixture delegatecall_reentrancy() {
    const auto victim = filled(0xd1);
    const auto lib = filled(0xd2);
    const auto attacker = filled(0xd3);
    World w;
    w[eoa()].balance = ether(1);

    Asm v;
    v.dispatch({{"withdraw()", "withdraw"}}, "fail");
    v.label("withdraw");
    v.op(op::CALLER).mapping(0).op(op::SLOAD).store(0);
    v.load(0).op(op::ISZERO).jumpi("fail");
    v.call(op::DELEGATECALL, "pay(address,uint256)", 2, {opcode(op::CALLER), local(0)}, push_of(lib))
        .op(op::ISZERO)
        .jumpi("fail");
    v.push(Word{0}).op(op::CALLER).mapping(0).op(op::SSTORE).stop();
    v.fail_block();
    w[victim].code = v.assemble();
    w[victim].balance = ether(50);
    w[victim].storage[mapping_slot(attacker.word(), 0)] = ether(5);

    Asm l;
    l.dispatch({{"pay(address,uint256)", "pay"}}, "fail");
    l.label("pay");
    l.call(op::CALL, "", 0, {}, [](Asm& x) { x.arg(0); }, [](Asm& x) { x.arg(1); }, 0).op(op::POP).stop();
    l.fail_block();
    w[lib].code = l.assemble();

    w[attacker].code = reentering_attacker(victim, "withdraw()", "");
    Tx tx{eoa(), attacker, 0, calldata("attack()")};
    return execute("delegatecall_reentrancy", std::move(w), tx);
}

// Victim pays out by creating an escrow whose init code pings the attacker.
Fixture create_reentrancy() {
    const auto victim = filled(0xc1);
    const auto attacker = filled(0xc3);
    World w;
    w[eoa()].balance = ether(1);

    Asm init;
    init.op(op::PUSH0).op(op::PUSH0).op(op::PUSH0).op(op::PUSH0).op(op::PUSH0).push(attacker).op(op::GAS);
    init.op(op::CALL).op(op::POP).op(op::STOP);
    const auto init_code = init.assemble();
    Bytes padded = init_code;
    padded.resize(32, 0);

    Asm v;
    v.dispatch({{"withdraw()", "withdraw"}}, "fail");
    v.label("withdraw");
    v.op(op::CALLER).mapping(0).op(op::SLOAD).store(0);
    v.load(0).op(op::ISZERO).jumpi("fail");
    v.push(epg::word_from_bytes(padded)).push(Word{Asm::kScratch}).op(op::MSTORE);
    v.push(Word{init_code.size()}).push(Word{Asm::kScratch}).load(0).op(op::CREATE).op(op::ISZERO).jumpi("fail");
    v.push(Word{0}).op(op::CALLER).mapping(0).op(op::SSTORE).stop();
    v.fail_block();
    w[victim].code = v.assemble();
    w[victim].balance = ether(50);
    w[victim].storage[mapping_slot(attacker.word(), 0)] = ether(5);

    w[attacker].code = reentering_attacker(victim, "withdraw()", "");
    Tx tx{eoa(), attacker, 0, calldata("attack()")};
    return execute("create_reentrancy", std::move(w), tx);
}

// A counter guard is read, a value-less hook runs, and the stale counter is written back.
Fixture no_asset_flow_reentrancy() {
    const auto victim = filled(0xe1);
    const auto attacker = filled(0xe3);
    World w;
    w[eoa()].balance = ether(1);

    Asm v;
    v.dispatch({{"execute()", "execute"}}, "fail");
    v.label("execute");
    v.push(Word{0}).op(op::SLOAD).store(0);
    v.push(Word{2}).load(0).op(op::LT).op(op::ISZERO).jumpi("fail");
    v.call(op::CALL, "onHook()", 0, {}, opcode(op::CALLER)).op(op::POP);
    v.push(Word{1}).load(0).op(op::ADD).push(Word{0}).op(op::SSTORE).stop();
    v.fail_block();
    w[victim].code = v.assemble();

    w[attacker].code = reentering_attacker(victim, "execute()", "onHook()");
    Tx tx{eoa(), attacker, 0, calldata("attack()")};
    return execute("no_asset_flow_reentrancy", std::move(w), tx);
}

// The child writes storage and moves ether, then reverts; the parent carries on.
Fixture revert_child() {
    const auto parent = filled(0x51);
    const auto child = filled(0x52);
    World w;
    w[eoa()].balance = ether(1);
    Asm p;
    p.call(op::CALL, "doit()", 0, {}, push_of(child)).op(op::POP);
    p.push(Word{2}).push(Word{0}).op(op::SSTORE).stop();
    w[parent].code = p.assemble();
    Asm c;
    c.push(Word{1}).push(Word{0}).op(op::SSTORE);
    c.call(op::CALL, "", 0, {}, push_of(eoa()), push_of(ether(1)), 0).op(op::POP);
    c.push(Word{0}).push(Word{0}).op(op::REVERT);
    w[child].code = c.assemble();
    w[child].balance = ether(2);
    Tx tx{eoa(), parent, 0, calldata("run()")};
    return execute("revert_child", std::move(w), tx);
}

// DataFlow fallback: totalBalance = this.balance; balances[sender] += value; callee.call(totalBalance).
Fixture dataflow_total_balance() {
    const auto dataflow = filled(0x4d);
    const auto sink = filled(0x4e);
    World w;
    w[eoa()].balance = ether(10);
    Asm d;
    d.op(op::SELFBALANCE).push(Word{0}).op(op::SSTORE);
    d.op(op::CALLER).mapping(1).op(op::SLOAD).op(op::CALLVALUE).op(op::ADD).op(op::CALLER).mapping(1).op(op::SSTORE);
    d.call(op::CALL, "", 1, {[](Asm& x) { x.push(Word{0}).op(op::SLOAD); }}, [](Asm& x) {
        x.push(Word{2}).op(op::SLOAD);
    }, {}, 0);
    d.op(op::POP).stop();
    w[dataflow].code = d.assemble();
    w[dataflow].balance = ether(4);
    w[dataflow].storage[Word{2}] = sink.word();
    Asm s;
    s.push(Word{0}).op(op::CALLDATALOAD).push(Word{0}).op(op::SSTORE).stop();
    w[sink].code = s.assemble();
    Tx tx{eoa(), dataflow, ether(1), {}};
    return execute("dataflow_total_balance", std::move(w), tx);
}

}  // namespace

std::vector<Fixture> reentrancy_fixtures() {
    std::vector<Fixture> out;
    out.push_back(foo_bar(false));
    out.push_back(foo_bar(true));
    out.push_back(empty_transfer());
    out.push_back(benign_nested());
    out.push_back(mutual_recursion());
    out.push_back(delegatecall_reentrancy());
    out.push_back(create_reentrancy());
    out.push_back(no_asset_flow_reentrancy());
    out.push_back(revert_child());
    out.push_back(dataflow_total_balance());
    return out;
}

}  // namespace fixturegen
