// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/flow.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "epg/error.hpp"
#include "epg/keccak.hpp"
#include "epg/opcodes.hpp"

namespace epg {
namespace {

constexpr std::uint64_t kMaxShadowBytes = 1ull << 26;

std::size_t checked_size(const Word& offset, const Word& size) {
    if (size == 0) return 0;
    if (offset + size > kMaxShadowBytes)
        throw Error(ErrorKind::SchemaViolation, "memory access beyond the shadow memory limit");
    return static_cast<std::size_t>(size);
}

std::string_view chain_name(std::uint8_t code) {
    return opcode_info(code).name;
}

}  // namespace

// ---------------------------------------------------------------------------
// identifiers and interning

SourceIdentifier SourceIdentifier::storage(const Address& owner, const Word& slot) {
    SourceIdentifier s;
    s.kind = SourceKind::Storage;
    s.address = owner;
    s.slot = slot;
    return s;
}

SourceIdentifier SourceIdentifier::balance(const Address& holder) {
    SourceIdentifier s;
    s.kind = SourceKind::Balance;
    s.address = holder;
    return s;
}

SourceIdentifier SourceIdentifier::per_frame(SourceKind kind, FrameId frame) {
    SourceIdentifier s;
    s.kind = kind;
    s.frame = frame;
    return s;
}

SourceIdentifier SourceIdentifier::global(SourceKind kind) {
    SourceIdentifier s;
    s.kind = kind;
    return s;
}

SourceIdentifier SourceIdentifier::chain(std::string name) {
    SourceIdentifier s;
    s.kind = SourceKind::ChainContext;
    s.name = std::move(name);
    return s;
}

bool operator<(const SourceIdentifier& a, const SourceIdentifier& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.address != b.address) return a.address < b.address;
    if (a.slot != b.slot) return a.slot < b.slot;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.name < b.name;
}

std::string SourceIdentifier::to_string() const {
    switch (kind) {
        case SourceKind::Storage: return "storage:" + address.hex() + ":" + to_hex(slot);
        case SourceKind::Balance: return "balance:" + address.hex();
        case SourceKind::CallData: return "calldata:" + std::to_string(frame);
        case SourceKind::CallValue: return "callvalue:" + std::to_string(frame);
        case SourceKind::Origin: return "origin";
        case SourceKind::Caller: return "caller:" + std::to_string(frame);
        case SourceKind::BlockNumber: return "number";
        case SourceKind::Timestamp: return "timestamp";
        case SourceKind::ChainContext: return "chain:" + name;
        case SourceKind::ReturnData: return "returndata:" + std::to_string(frame);
    }
    return "unknown";
}

IdentId SourceTable::intern(const SourceIdentifier& id) {
    auto [it, inserted] = ident_index_.try_emplace(id, static_cast<IdentId>(idents_.size()));
    if (inserted) idents_.push_back(id);
    return it->second;
}

RefId SourceTable::ref(IdentId ident, std::uint32_t version) {
    auto key = std::make_pair(ident, version);
    auto [it, inserted] = ref_index_.try_emplace(key, static_cast<RefId>(refs_.size()));
    if (inserted) refs_.push_back(key);
    return it->second;
}

std::size_t TagPool::VecHash::operator()(const std::vector<RefId>& v) const noexcept {
    std::size_t h = v.size();
    for (auto r : v) h = h * 1000003u ^ r;
    return h;
}

TagPool::TagPool() {
    tags_.emplace_back();
    index_.emplace(std::vector<RefId>{}, kEmptyTag);
}

TagId TagPool::make(std::vector<RefId> refs) {
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    auto it = index_.find(refs);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<TagId>(tags_.size());
    index_.emplace(refs, id);
    tags_.push_back(std::move(refs));
    return id;
}

TagId TagPool::unite(TagId a, TagId b) {
    if (a == b || b == kEmptyTag) return a;
    if (a == kEmptyTag) return b;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (auto it = union_cache_.find(key); it != union_cache_.end()) return it->second;
    const auto& x = tags_[a];
    const auto& y = tags_[b];
    std::vector<RefId> merged;
    merged.reserve(x.size() + y.size());
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(merged));
    const TagId t = make(std::move(merged));
    union_cache_.emplace(key, t);
    return t;
}

DataTag FlowRecords::expand(TagId t) const {
    DataTag out;
    for (auto r : tags.refs(t)) out.sources.insert(sources.resolve(r));
    return out;
}

// ---------------------------------------------------------------------------
// tracker

FlowTracker::FlowTracker(const TransactionEnvelope& env, const FrameTree& frames, FlowTrackerOptions options)
    : env_{env}, frames_{frames}, options_{std::move(options)} {
    balances_ = env.prestate.balances;
    for (const auto& f : frames.frames())
        if (f.call_step) child_of_step_[*f.call_step] = f.id;
}

const ShadowFrame* FlowTracker::shadow(FrameId id) const {
    auto it = shadows_.find(id);
    return it == shadows_.end() ? nullptr : &it->second;
}

TagId FlowTracker::source_tag(const SourceIdentifier& id) {
    const auto ident = rec_.sources.intern(id);
    if (ident >= current_version_.size()) {
        current_version_.resize(ident + 1, 0);
        next_version_.resize(ident + 1, 0);
    }
    return rec_.tags.single(rec_.sources.ref(ident, current_version_[ident]));
}

TagId FlowTracker::load(const SourceIdentifier& id) {
    TagId t = source_tag(id);
    const RefId ref = rec_.tags.refs(t).front();
    if (id.kind == SourceKind::Balance) {
        if (auto it = implicit_.find(ref); it != implicit_.end()) t = rec_.tags.unite(t, it->second);
        if (!rec_.values.contains(ref))
            if (auto b = balances_.find(id.address); b != balances_.end()) rec_.values.emplace(ref, b->second);
    }
    return t;
}

TagId FlowTracker::range_tag(const std::vector<TagId>& bytes, const Word& offset, const Word& size, TagId fill) {
    const auto n = checked_size(offset, size);
    if (n == 0) return kEmptyTag;
    const auto off = static_cast<std::size_t>(offset);
    TagId t = kEmptyTag;
    for (std::size_t k = 0; k < n; ++k) {
        const auto at = off + k;
        t = rec_.tags.unite(t, at < bytes.size() ? bytes[at] : kEmptyTag);
    }
    return rec_.tags.unite(t, fill);
}

void FlowTracker::write_range(std::vector<TagId>& bytes, const Word& offset, std::span<const TagId> tags) {
    const auto n = checked_size(offset, Word{tags.size()});
    if (n == 0) return;
    const auto off = static_cast<std::size_t>(offset);
    if (bytes.size() < off + n) bytes.resize(off + n, kEmptyTag);
    std::copy(tags.begin(), tags.end(), bytes.begin() + static_cast<std::ptrdiff_t>(off));
}

void FlowTracker::fill_range(std::vector<TagId>& bytes, const Word& offset, const Word& size, TagId tag) {
    const auto n = checked_size(offset, size);
    if (n == 0) return;
    const auto off = static_cast<std::size_t>(offset);
    if (bytes.size() < off + n) bytes.resize(off + n, kEmptyTag);
    std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(off), n, tag);
}

Word FlowTracker::balance_of(const Address& a) const {
    auto it = balances_.find(a);
    return it == balances_.end() ? Word{0} : it->second;
}

WriteRecord FlowTracker::record_write(IdentId target, TagId value_tag, TagId slot_tag, const Word& new_value,
                                      FrameId frame, std::size_t step, std::optional<BlockId> block) {
    if (target >= current_version_.size()) {
        current_version_.resize(target + 1, 0);
        next_version_.resize(target + 1, 0);
    }
    undo_.push_back({false, target, current_version_[target], {}, {}});
    const auto version = ++next_version_[target];
    current_version_[target] = version;
    WriteRecord w;
    w.frame = frame;
    w.step = step;
    w.target = rec_.sources.ref(target, version);
    w.value_tag = value_tag;
    w.slot_tag = slot_tag;
    w.block = block;
    w.new_value = new_value;
    rec_.values[w.target] = new_value;
    rec_.writes.push_back(w);
    return w;
}

void FlowTracker::balance_write(const Address& holder, const Word& new_value, TagId value_tag, FrameId frame,
                                std::size_t step, std::optional<BlockId> block) {
    Undo u;
    u.is_balance = true;
    u.holder = holder;
    if (auto it = balances_.find(holder); it != balances_.end()) u.old_balance = it->second;
    undo_.push_back(u);
    balances_[holder] = new_value;
    const auto ident = rec_.sources.intern(SourceIdentifier::balance(holder));
    auto w = record_write(ident, value_tag, kEmptyTag, new_value, frame, step, block);
    implicit_[w.target] = value_tag;
}

std::optional<TrackedFlow> FlowTracker::extract_eth_flow(const CallFrame& child, std::size_t step) {
    if (child.value == 0) return std::nullopt;
    if (child.opcode != op::CALL && child.opcode != op::CREATE && child.opcode != op::CREATE2 &&
        child.opcode != op::SELFDESTRUCT)
        return std::nullopt;
    TrackedFlow f;
    f.frame = child.id;
    f.step = step;
    f.flow.asset = AssetKind{true, {}};
    if (child.opcode == op::SELFDESTRUCT) {
        f.flow.from = child.caller;
        f.flow.to = child.callee;
    } else {
        f.flow.from = child.parent ? frames_.at(*child.parent).context : env_.from;
        f.flow.to = child.context;
    }
    f.flow.amount = child.value;
    if (auto it = pending_calls_.find(child.id); it != pending_calls_.end()) {
        f.destination_tag = it->second.destination_tag;
        f.amount_tag = it->second.value_tag;
    }
    if (!child.parent) f.amount_tag = source_tag(SourceIdentifier::per_frame(SourceKind::CallValue, child.id));
    return f;
}

std::optional<TrackedFlow> FlowTracker::extract_token_flow(std::size_t index, const OpStep& step,
                                                           const CallFrame& frame, const ShadowFrame& shadow) {
    if (step.code != op::LOG3 && step.code != op::LOG4) return std::nullopt;
    if (step.stack.size() < 5 || shadow.stack.size() < 5) return std::nullopt;
    if (step.peek(2) != erc20_transfer_topic()) return std::nullopt;
    const Address emitter = frame.context;
    if (options_.token_allowlist && !options_.token_allowlist->contains(emitter)) return std::nullopt;
    const auto data = read_memory(step.memory, step.peek(0), step.peek(1));
    if (data.size() < 32) {
        rec_.warnings.push_back("MalformedLog: Transfer event from " + emitter.hex() + " at step " +
                                std::to_string(index) + " carries " + std::to_string(data.size()) + " data bytes");
        return std::nullopt;
    }
    TrackedFlow f;
    f.frame = frame.id;
    f.step = index;
    f.flow.asset = AssetKind{false, emitter};
    f.flow.from = Address{step.peek(3)};
    f.flow.to = Address{step.peek(4)};
    f.flow.amount = word_from_bytes(ByteView{data}.first(32));
    if (f.flow.amount == 0) return std::nullopt;
    f.destination_tag = shadow.stack[shadow.stack.size() - 5];
    f.amount_tag = range_tag(shadow.memory, step.peek(0), Word{32}, kEmptyTag);
    return f;
}

ControlRecord FlowTracker::record_control(std::size_t index, const OpStep& step, const ShadowFrame& shadow) {
    if (step.stack.size() < 2 || shadow.stack.size() < 2)
        throw Error(ErrorKind::ShadowDesync, "JUMPI with fewer than two operands at step " + std::to_string(index));
    ControlRecord c;
    c.frame = shadow.frame;
    c.jumpi_step = index;
    c.condition_tag = shadow.stack[shadow.stack.size() - 2];
    c.condition_value = step.peek(1) != 0;
    c.taken_block_pc = c.condition_value ? static_cast<std::uint64_t>(step.peek(0)) : step.pc + 1;
    return c;
}

void FlowTracker::start_block(ShadowFrame& sf, std::size_t index, const OpStep& step, BlockEntry entry,
                              std::optional<bool> condition) {
    auto& cur = cursors_[sf.frame];
    BlockVisit b;
    b.id = static_cast<BlockId>(rec_.blocks.size());
    b.frame = sf.frame;
    b.pc = step.pc;
    b.index = cur.visits[step.pc]++;
    b.first_step = index;
    b.predecessor = cur.current;
    b.entry = entry;
    b.condition = condition;
    cur.current = b.id;
    rec_.frame_blocks[sf.frame].push_back(b.id);
    if (cur.pending_control) {
        rec_.controls[*cur.pending_control].taken_block = b.id;
        cur.pending_control.reset();
    }
    rec_.blocks.push_back(b);
}

void FlowTracker::on_frame_enter(const CallFrame& frame) {
    undo_marks_[frame.id] = undo_.size();
    ShadowFrame sf;
    sf.frame = frame.id;
    const auto calldata_src = source_tag(SourceIdentifier::per_frame(SourceKind::CallData, frame.id));
    const auto callvalue_src = source_tag(SourceIdentifier::per_frame(SourceKind::CallValue, frame.id));
    PendingCall pending;
    if (auto it = pending_calls_.find(frame.id); it != pending_calls_.end()) pending = it->second;

    const bool is_create = frame.opcode == op::CREATE || frame.opcode == op::CREATE2;
    if (!frame.parent) {
        sf.calldata.assign(is_create ? 0 : frame.input.size(), calldata_src);
        sf.callvalue = callvalue_src;
    } else {
        if (!is_create) {
            sf.calldata.resize(frame.input.size(), calldata_src);
            for (std::size_t k = 0; k < sf.calldata.size() && k < pending.args.size(); ++k)
                sf.calldata[k] = rec_.tags.unite(pending.args[k], calldata_src);
        }
        if (frame.opcode == op::DELEGATECALL) {
            if (auto* p = shadow(*frame.parent)) sf.callvalue = p->callvalue;
        } else {
            sf.callvalue = rec_.tags.unite(callvalue_src, pending.value_tag);
        }
    }

    std::optional<BlockId> issuing_block;
    if (frame.parent) {
        if (auto it = cursors_.find(*frame.parent); it != cursors_.end()) issuing_block = it->second.current;
        if (issuing_block) rec_.call_blocks[frame.id] = *issuing_block;
    }
    const std::size_t at_step = frame.call_step.value_or(0);
    const bool leaf_failed = !frame.has_steps() && frame.reverted;

    if (!leaf_failed && frame.value != 0) {
        if (frame.opcode == op::SELFDESTRUCT) {
            const auto drained = load(SourceIdentifier::balance(frame.caller));
            const Word amount = frame.value;
            balance_write(frame.caller, Word{0}, drained, frame.id, at_step, issuing_block);
            balance_write(frame.callee, balance_of(frame.callee) + amount, drained, frame.id, at_step, issuing_block);
        } else if (frame.opcode == op::CALL || is_create) {
            const Address from = frame.parent ? frames_.at(*frame.parent).context : env_.from;
            const TagId vt = rec_.tags.unite(callvalue_src, pending.value_tag);
            const Word from_balance = balance_of(from);
            balance_write(from, from_balance >= frame.value ? from_balance - frame.value : Word{0}, vt, frame.id,
                          at_step, issuing_block);
            balance_write(frame.context, balance_of(frame.context) + frame.value, vt, frame.id, at_step,
                          issuing_block);
        }
        if (auto flow = extract_eth_flow(frame, at_step)) rec_.flows.push_back(*flow);
    }

    shadows_[frame.id] = std::move(sf);
    cursors_[frame.id];
}

void FlowTracker::on_frame_exit(const CallFrame& frame) {
    if (frame.reverted) {
        const auto mark = undo_marks_[frame.id];
        while (undo_.size() > mark) {
            const auto& u = undo_.back();
            if (u.is_balance) {
                if (u.old_balance) balances_[u.holder] = *u.old_balance;
                else balances_.erase(u.holder);
            } else {
                current_version_[u.ident] = u.version;
            }
            undo_.pop_back();
        }
    }
    if (frame.parent) {
        auto& parent = shadows_.at(*frame.parent);
        const auto rd_src = source_tag(SourceIdentifier::per_frame(SourceKind::ReturnData, frame.id));
        const bool is_create = frame.opcode == op::CREATE || frame.opcode == op::CREATE2;
        std::vector<TagId> out;
        if (auto it = shadows_.find(frame.id); it != shadows_.end() && !(is_create && !frame.reverted))
            out = it->second.output;
        for (auto& t : out) t = rec_.tags.unite(t, rd_src);
        parent.returndata = out;
        auto pit = pending_calls_.find(frame.id);
        if (!is_create && frame.opcode != op::SELFDESTRUCT && pit != pending_calls_.end()) {
            const auto n = std::min<std::size_t>(out.size(), checked_size(pit->second.ret_offset, pit->second.ret_size));
            write_range(parent.memory, pit->second.ret_offset, std::span<const TagId>{out.data(), n});
        }
        cursors_[*frame.parent].last_child = frame.id;
        shadows_.erase(frame.id);
        cursors_.erase(frame.id);
    }
}

void FlowTracker::on_step(std::size_t index, const OpStep& step, const CallFrame& frame) {
    auto& sf = shadows_.at(frame.id);
    auto& cur = cursors_[frame.id];
    if (sf.stack.size() != step.stack.size())
        throw Error(ErrorKind::ShadowDesync, "shadow stack holds " + std::to_string(sf.stack.size()) +
                                                 " tags but step " + std::to_string(index) + " (" + step.op + ") has " +
                                                 std::to_string(step.stack.size()) + " words");
    if (cur.observe) {
        if (!step.stack.empty() && !rec_.values.contains(cur.observe->ref))
            rec_.values.emplace(cur.observe->ref, step.peek(0));
        cur.observe.reset();
    }
    if (!cur.current) {
        start_block(sf, index, step, BlockEntry::Entry, std::nullopt);
    } else if (cur.pending_entry) {
        start_block(sf, index, step, *cur.pending_entry, cur.pending_condition);
    }
    cur.pending_entry.reset();
    cur.pending_condition.reset();

    transfer_tags(index, step, frame, sf);

    const auto code = step.code;
    if (code == op::JUMP) {
        cur.pending_entry = BlockEntry::Jump;
    } else if (code == op::JUMPI) {
        cur.pending_entry = BlockEntry::JumpI;
        cur.pending_condition = step.peek(1) != 0;
    } else if (is_call_like(code)) {
        cur.pending_entry = BlockEntry::CallReturn;
    }
}

void FlowTracker::transfer_tags(std::size_t index, const OpStep& step, const CallFrame& frame, ShadowFrame& sf) {
    auto& st = sf.stack;
    auto& tags = rec_.tags;
    if (st.size() != step.stack.size())
        throw Error(ErrorKind::ShadowDesync, "shadow/concrete stack mismatch at step " + std::to_string(index));
    const auto code = step.code;
    const auto& info = opcode_info(code);
    if (!info.defined || code == op::INVALID) return;  // exceptional halt, nothing moves
    if (st.size() < info.pops)
        throw Error(ErrorKind::ShadowDesync, "stack underflow for " + step.op + " at step " + std::to_string(index));

    auto arg = [&](std::size_t i) -> TagId { return st[st.size() - 1 - i]; };
    auto val = [&](std::size_t i) -> const Word& { return step.peek(i); };
    auto pop = [&](std::size_t n) { st.resize(st.size() - n); };
    auto push = [&](TagId t) { st.push_back(t); };
    auto observe_top = [&](TagId loaded) {
        const RefId r = tags.refs(loaded).front();
        if (!rec_.values.contains(r)) cursors_[frame.id].observe = Observe{r, index};
    };

    if (is_push(code)) return push(kEmptyTag);
    if (is_dup(code)) return push(arg(code - op::DUP1));
    if (is_swap(code)) {
        std::swap(st[st.size() - 1], st[st.size() - 2 - (code - op::SWAP1)]);
        return;
    }
    if (is_log(code)) {
        if (auto flow = extract_token_flow(index, step, frame, sf)) rec_.flows.push_back(*flow);
        return pop(info.pops);
    }

    switch (code) {
        case op::STOP:
        case op::JUMPDEST:
            return;
        case op::ADDRESS:
        case op::PC:
        case op::MSIZE:
        case op::GAS:
        case op::CODESIZE:
            return push(kEmptyTag);
        case op::POP:
            return pop(1);
        case op::SHA3: {
            const auto t = range_tag(sf.memory, val(0), val(1), kEmptyTag);
            pop(2);
            return push(t);
        }
        case op::BALANCE: {
            const auto t = load(SourceIdentifier::balance(Address{val(0)}));
            pop(1);
            push(t);
            return observe_top(t);
        }
        case op::SELFBALANCE: {
            const auto t = load(SourceIdentifier::balance(frame.context));
            push(t);
            return observe_top(t);
        }
        case op::ORIGIN:
            return push(source_tag(SourceIdentifier::global(SourceKind::Origin)));
        case op::CALLER:
            return push(source_tag(SourceIdentifier::per_frame(SourceKind::Caller, frame.id)));
        case op::CALLVALUE:
            return push(sf.callvalue);
        case op::CALLDATALOAD: {
            const auto src = source_tag(SourceIdentifier::per_frame(SourceKind::CallData, frame.id));
            const auto t = range_tag(sf.calldata, val(0), Word{32}, src);
            pop(1);
            return push(t);
        }
        case op::CALLDATASIZE:
            return push(source_tag(SourceIdentifier::per_frame(SourceKind::CallData, frame.id)));
        case op::CALLDATACOPY: {
            const auto src = source_tag(SourceIdentifier::per_frame(SourceKind::CallData, frame.id));
            const auto n = checked_size(val(0), val(2));
            std::vector<TagId> bytes(n, src);
            if (val(1) < sf.calldata.size()) {
                const auto from = static_cast<std::size_t>(val(1));
                for (std::size_t k = 0; k < n && from + k < sf.calldata.size(); ++k) bytes[k] = sf.calldata[from + k];
            }
            write_range(sf.memory, val(0), bytes);
            return pop(3);
        }
        case op::CODECOPY:
            fill_range(sf.memory, val(0), val(2), kEmptyTag);
            return pop(3);
        case op::EXTCODECOPY:
            fill_range(sf.memory, val(1), val(3), source_tag(SourceIdentifier::chain("EXTCODECOPY")));
            return pop(4);
        case op::RETURNDATASIZE: {
            const auto& last = cursors_[frame.id].last_child;
            return push(last ? source_tag(SourceIdentifier::per_frame(SourceKind::ReturnData, *last)) : kEmptyTag);
        }
        case op::RETURNDATACOPY: {
            const auto n = checked_size(val(0), val(2));
            std::vector<TagId> bytes(n, kEmptyTag);
            if (val(1) < sf.returndata.size()) {
                const auto from = static_cast<std::size_t>(val(1));
                for (std::size_t k = 0; k < n && from + k < sf.returndata.size(); ++k)
                    bytes[k] = sf.returndata[from + k];
            }
            write_range(sf.memory, val(0), bytes);
            return pop(3);
        }
        case op::EXTCODESIZE:
        case op::EXTCODEHASH:
        case op::BLOCKHASH:
        case op::BLOBHASH:
            pop(1);
            return push(source_tag(SourceIdentifier::chain(std::string{chain_name(code)})));
        case op::GASPRICE:
        case op::COINBASE:
        case op::PREVRANDAO:
        case op::GASLIMIT:
        case op::CHAINID:
        case op::BASEFEE:
        case op::BLOBBASEFEE:
            return push(source_tag(SourceIdentifier::chain(std::string{chain_name(code)})));
        case op::NUMBER:
            return push(source_tag(SourceIdentifier::global(SourceKind::BlockNumber)));
        case op::TIMESTAMP:
            return push(source_tag(SourceIdentifier::global(SourceKind::Timestamp)));
        case op::MLOAD: {
            const auto t = range_tag(sf.memory, val(0), Word{32}, kEmptyTag);
            pop(1);
            return push(t);
        }
        case op::MSTORE:
            fill_range(sf.memory, val(0), Word{32}, arg(1));
            return pop(2);
        case op::MSTORE8:
            fill_range(sf.memory, val(0), Word{1}, arg(1));
            return pop(2);
        case op::MCOPY: {
            const auto n = checked_size(val(1), val(2));
            checked_size(val(0), val(2));
            std::vector<TagId> bytes(n, kEmptyTag);
            const auto from = static_cast<std::size_t>(val(1));
            for (std::size_t k = 0; k < n; ++k) bytes[k] = sf.memory_tag(from + k);
            write_range(sf.memory, val(0), bytes);
            return pop(3);
        }
        case op::SLOAD: {
            const auto t = load(SourceIdentifier::storage(frame.context, val(0)));
            pop(1);
            push(t);
            return observe_top(t);
        }
        case op::SSTORE: {
            const auto ident = rec_.sources.intern(SourceIdentifier::storage(frame.context, val(0)));
            const auto& cur = cursors_[frame.id];
            record_write(ident, arg(1), arg(0), val(1), frame.id, index, cur.current);
            return pop(2);
        }
        case op::TLOAD: {
            auto it = transient_.find({frame.context, val(0)});
            pop(1);
            return push(it == transient_.end() ? kEmptyTag : it->second);
        }
        case op::TSTORE:
            transient_[{frame.context, val(0)}] = arg(1);
            return pop(2);
        case op::JUMP:
            return pop(1);
        case op::JUMPI: {
            auto c = record_control(index, step, sf);
            rec_.controls.push_back(c);
            cursors_[frame.id].pending_control = rec_.controls.size() - 1;
            return pop(2);
        }
        case op::CALL:
        case op::CALLCODE:
        case op::DELEGATECALL:
        case op::STATICCALL:
        case op::CREATE:
        case op::CREATE2: {
            PendingCall pc;
            Word args_off = 0;
            Word args_len = 0;
            if (code == op::CALL || code == op::CALLCODE) {
                pc.destination_tag = arg(1);
                pc.value_tag = arg(2);
                args_off = val(3);
                args_len = val(4);
                pc.ret_offset = val(5);
                pc.ret_size = val(6);
            } else if (code == op::DELEGATECALL || code == op::STATICCALL) {
                pc.destination_tag = arg(1);
                args_off = val(2);
                args_len = val(3);
                pc.ret_offset = val(4);
                pc.ret_size = val(5);
            } else {
                pc.value_tag = arg(0);
                args_off = val(1);
                args_len = val(2);
            }
            const auto n = checked_size(args_off, args_len);
            pc.args.resize(n);
            const auto off = n ? static_cast<std::size_t>(args_off) : 0;
            for (std::size_t k = 0; k < n; ++k) pc.args[k] = sf.memory_tag(off + k);
            if (auto it = child_of_step_.find(index); it != child_of_step_.end())
                pending_calls_[it->second] = std::move(pc);
            pop(info.pops);
            return push(kEmptyTag);
        }
        case op::RETURN:
        case op::REVERT: {
            const auto n = checked_size(val(0), val(1));
            sf.output.assign(n, kEmptyTag);
            const auto off = n ? static_cast<std::size_t>(val(0)) : 0;
            for (std::size_t k = 0; k < n; ++k) sf.output[k] = sf.memory_tag(off + k);
            return pop(2);
        }
        case op::SELFDESTRUCT: {
            if (auto it = child_of_step_.find(index); it != child_of_step_.end()) {
                PendingCall pc;
                pc.destination_tag = arg(0);
                pending_calls_[it->second] = std::move(pc);
            }
            return pop(1);
        }
        default:
            break;
    }

    // arithmetic, comparison, bitwise: result carries the union of operand tags
    TagId t = kEmptyTag;
    for (std::size_t i = 0; i < info.pops; ++i) t = tags.unite(t, arg(i));
    pop(info.pops);
    for (std::size_t i = 0; i < info.pushes; ++i) push(t);
}

FlowRecords track_flows(const ParsedTrace& trace, const FrameTree& frames, FlowTrackerOptions options) {
    FlowTracker tracker{trace.envelope, frames, std::move(options)};
    simulate(trace.envelope, trace.steps, frames, tracker);
    return tracker.take_records();
}

std::set<Address> load_allowlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MalformedConfig, "cannot open allowlist '" + path + "'");
    std::set<Address> out;
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto e = line.find_last_not_of(" \t\r");
        out.insert(parse_address(line.substr(b, e - b + 1)));
    }
    return out;
}

}  // namespace epg
