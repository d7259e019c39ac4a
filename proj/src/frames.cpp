// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/frames.hpp"

#include <algorithm>
#include <map>

#include "epg/error.hpp"
#include "epg/opcodes.hpp"

namespace epg {
namespace {

constexpr std::uint64_t kMaxSlice = 1u << 24;

bool ends_successfully(std::uint8_t code) {
    return code == op::STOP || code == op::RETURN || code == op::SELFDESTRUCT;
}

class Builder {
  public:
    Builder(const TransactionEnvelope& env, std::span<const OpStep> steps) : env_{env}, steps_{steps} {
        balances_ = env.prestate.balances;
    }

    FrameTree run() {
        open_root();
        if (steps_.empty()) {
            close_leaf_root();
            return finish();
        }
        if (steps_.front().depth != 1)
            throw Error(ErrorKind::InconsistentDepth, "first step must be at depth 1");

        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const auto& s = steps_[i];
            if (s.depth != open_.size())
                throw Error(ErrorKind::InconsistentDepth, "step " + std::to_string(i) + " at depth " +
                                                              std::to_string(s.depth) + " but " +
                                                              std::to_string(open_.size()) + " frames are open");
            const FrameId cur = open_.back();
            step_frame_.push_back(cur);
            auto& frame = frames_[cur];
            if (!frame.first_step) frame.first_step = i;
            frame.last_step = i;

            const OpStep* next = i + 1 < steps_.size() ? &steps_[i + 1] : nullptr;
            resolve_pending(i, cur);
            observe_balance(i, next);

            if (is_call_like(s.code)) {
                if (!next) throw Error(ErrorKind::TruncatedTrace, "trace ends on a call instruction");
                if (next->depth == s.depth + 1) {
                    open_child(i, cur, /*leaf=*/false);
                    continue;
                }
                if (next->depth != s.depth)
                    throw Error(ErrorKind::InconsistentDepth, "call at step " + std::to_string(i) + " followed by depth " +
                                                                  std::to_string(next->depth));
                open_child(i, cur, /*leaf=*/true);
                continue;
            }
            if (s.code == op::SELFDESTRUCT) open_selfdestruct(i, cur);

            if (!next) break;
            if (next->depth > s.depth)
                throw Error(ErrorKind::InconsistentDepth,
                            "depth increases after non-call opcode " + s.op + " at step " + std::to_string(i));
            if (next->depth < s.depth) {
                while (open_.size() > next->depth) close_top(i + 1);
            } else if (is_halting(s.code)) {
                throw Error(ErrorKind::InconsistentDepth,
                            "frame halted at step " + std::to_string(i) + " but the next step stays at the same depth");
            }
        }
        if (open_.size() > 1)
            throw Error(ErrorKind::TruncatedTrace, std::to_string(open_.size() - 1) + " call frame(s) left open");
        close_top(steps_.size());
        return finish();
    }

  private:
    struct Pending {
        FrameId frame;       // frame waiting for its result
        FrameId resume_in;   // caller frame whose next step carries the result
    };

    void open_root() {
        CallFrame root;
        root.id = 0;
        root.caller = env_.from;
        root.sender = env_.from;
        if (env_.to) {
            root.opcode = op::CALL;
            root.callee = *env_.to;
        } else {
            root.opcode = op::CREATE;
            root.callee = env_.contract_address.value_or(Address{});
        }
        root.context = root.callee;
        root.value = env_.value;
        root.apparent_value = env_.value;
        root.input = env_.input;
        frames_.push_back(std::move(root));
        snapshots_.push_back(balances_);
        transfer(env_.from, frames_[0].callee, env_.value);
        open_.push_back(0);
    }

    void close_leaf_root() {
        open_.clear();
    }

    void open_child(std::size_t step_index, FrameId parent_id, bool leaf) {
        const auto& s = steps_[step_index];
        const auto& parent = frames_[parent_id];
        CallFrame f;
        f.id = static_cast<FrameId>(frames_.size());
        f.parent = parent_id;
        f.opcode = s.code;
        f.call_step = step_index;
        f.index_in_parent = static_cast<std::uint32_t>(parent.children.size());
        f.caller = parent.callee;
        Word args_off = 0;
        Word args_len = 0;
        switch (s.code) {
            case op::CALL:
            case op::CALLCODE:
                require_stack(s, 7, step_index);
                f.callee = Address{s.peek(1)};
                f.value = s.peek(2);
                args_off = s.peek(3);
                args_len = s.peek(4);
                break;
            case op::DELEGATECALL:
            case op::STATICCALL:
                require_stack(s, 6, step_index);
                f.callee = Address{s.peek(1)};
                args_off = s.peek(2);
                args_len = s.peek(3);
                break;
            case op::CREATE:
            case op::CREATE2:
                require_stack(s, s.code == op::CREATE ? 3 : 4, step_index);
                f.value = s.peek(0);
                args_off = s.peek(1);
                args_len = s.peek(2);
                break;
            default:
                break;
        }
        f.input = read_memory(s.memory, args_off, args_len);
        f.apparent_value = f.value;
        switch (s.code) {
            case op::CALLCODE:
                f.context = parent.context;
                f.sender = parent.context;
                break;
            case op::DELEGATECALL:
                f.context = parent.context;
                f.sender = parent.sender;
                f.apparent_value = parent.apparent_value;
                break;
            default:
                f.context = f.callee;  // CREATE targets are filled in when the caller resumes
                f.sender = parent.context;
                break;
        }

        const FrameId id = f.id;
        frames_[parent_id].children.push_back(id);
        frames_.push_back(std::move(f));
        const bool is_create = s.code == op::CREATE || s.code == op::CREATE2;

        if (leaf) {
            // No code ran: success is visible on the caller's next stack.
            const auto& next = steps_[step_index + 1];
            if (next.stack.empty())
                throw Error(ErrorKind::InconsistentDepth, "missing call result after step " + std::to_string(step_index));
            const Word& result = next.peek(0);
            auto& child = frames_[id];
            if (is_create) {
                child.callee = Address{result};
                child.context = child.callee;
                child.reverted = result == 0;
            } else {
                child.reverted = result == 0;
            }
            if (!child.reverted) transfer_for(child, parent_id);
            return;
        }
        snapshots_.push_back(balances_);
        transfer_for(frames_[id], parent_id);
        open_.push_back(id);
        if (is_create) pending_.push_back({id, parent_id});
    }

    void open_selfdestruct(std::size_t step_index, FrameId parent_id) {
        const auto& s = steps_[step_index];
        require_stack(s, 1, step_index);
        const auto& parent = frames_[parent_id];
        CallFrame f;
        f.id = static_cast<FrameId>(frames_.size());
        f.parent = parent_id;
        f.opcode = op::SELFDESTRUCT;
        f.call_step = step_index;
        f.index_in_parent = static_cast<std::uint32_t>(parent.children.size());
        f.caller = parent.context;
        f.callee = Address{s.peek(0)};
        f.context = f.callee;
        f.sender = parent.context;
        f.value = balance_of(parent.context);
        f.apparent_value = f.value;
        transfer(f.caller, f.callee, f.value);
        frames_[parent_id].children.push_back(f.id);
        frames_.push_back(std::move(f));
    }

    void close_top(std::size_t resume_step) {
        const FrameId id = open_.back();
        open_.pop_back();
        auto& f = frames_[id];
        const auto& last = steps_[*f.last_step];
        f.reverted = !ends_successfully(last.code);
        if ((last.code == op::RETURN || last.code == op::REVERT) && last.stack.size() >= 2)
            f.output = read_memory(last.memory, last.peek(0), last.peek(1));
        auto snapshot = std::move(snapshots_.back());
        snapshots_.pop_back();
        if (f.reverted) balances_ = std::move(snapshot);
        (void)resume_step;
    }

    // CREATE results are pushed onto the caller's stack when it resumes.
    void resolve_pending(std::size_t step_index, FrameId cur) {
        if (pending_.empty() || pending_.back().resume_in != cur) return;
        const auto& s = steps_[step_index];
        auto& child = frames_[pending_.back().frame];
        if (!s.stack.empty()) {
            Address created{s.peek(0)};
            if (created.word() != 0) {
                child.callee = created;
                child.context = created;
                // the value moved to a placeholder address before the target was known
                if (child.value != 0 && !child.reverted) {
                    move_balance(Address{}, created, child.value);
                }
            }
        }
        pending_.pop_back();
    }

    void observe_balance(std::size_t i, const OpStep* next) {
        const auto& s = steps_[i];
        if (!next || next->depth != s.depth || next->stack.empty()) return;
        if (s.code == op::SELFBALANCE) {
            balances_[frames_[step_frame_[i]].context] = next->peek(0);
        } else if (s.code == op::BALANCE && !s.stack.empty()) {
            balances_[Address{s.peek(0)}] = next->peek(0);
        }
    }

    void transfer_for(const CallFrame& child, FrameId parent_id) {
        if (child.value == 0) return;
        if (child.opcode == op::CALL || child.opcode == op::CREATE || child.opcode == op::CREATE2)
            transfer(frames_[parent_id].context, child.context, child.value);
    }

    void transfer(const Address& from, const Address& to, const Word& amount) {
        if (amount == 0) return;
        move_balance(from, to, amount);
    }

    void move_balance(const Address& from, const Address& to, const Word& amount) {
        auto& f = balances_[from];
        f = f >= amount ? f - amount : Word{0};
        balances_[to] += amount;
    }

    Word balance_of(const Address& a) const {
        auto it = balances_.find(a);
        return it == balances_.end() ? Word{0} : it->second;
    }

    static void require_stack(const OpStep& s, std::size_t n, std::size_t index) {
        if (s.stack.size() < n)
            throw Error(ErrorKind::SchemaViolation, "step " + std::to_string(index) + " (" + s.op +
                                                        ") has fewer stack operands than the opcode requires");
    }

    FrameTree finish() { return FrameTree{std::move(frames_), std::move(step_frame_)}; }

    const TransactionEnvelope& env_;
    std::span<const OpStep> steps_;
    std::vector<CallFrame> frames_;
    std::vector<FrameId> open_;
    std::vector<FrameId> step_frame_;
    std::vector<Pending> pending_;
    std::map<Address, Word> balances_;
    std::vector<std::map<Address, Word>> snapshots_;
};

}  // namespace

FrameTree::FrameTree(std::vector<CallFrame> frames, std::vector<FrameId> step_frame)
    : frames_{std::move(frames)}, step_frame_{std::move(step_frame)}, discarded_(frames_.size(), false) {
    for (const auto& f : frames_) {
        bool d = f.reverted;
        if (f.parent) d = d || discarded_[*f.parent];  // parents precede children
        discarded_[f.id] = d;
    }
}

bool FrameTree::is_ancestor(FrameId ancestor, FrameId id) const {
    auto p = frames_.at(id).parent;
    while (p) {
        if (*p == ancestor) return true;
        p = frames_[*p].parent;
    }
    return false;
}

FrameTree reconstruct_frames(const TransactionEnvelope& env, std::span<const OpStep> steps) {
    return Builder{env, steps}.run();
}

void simulate(const TransactionEnvelope& /*env*/, std::span<const OpStep> steps, const FrameTree& frames,
              TraceObserver& observer) {
    const auto& all = frames.frames();
    // child opened by each step, and frames whose last step it is
    std::vector<std::optional<FrameId>> opens(steps.size());
    std::vector<std::vector<FrameId>> closes(steps.size());
    for (const auto& f : all) {
        if (f.call_step) opens[*f.call_step] = f.id;
        if (f.last_step) closes[*f.last_step].push_back(f.id);
    }
    for (auto& c : closes) std::sort(c.rbegin(), c.rend());  // innermost (latest opened) first

    observer.on_frame_enter(frames.root());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& frame = frames.at(frames.frame_of_step(i));
        observer.on_step(i, steps[i], frame);
        if (opens[i]) {
            const auto& child = frames.at(*opens[i]);
            observer.on_frame_enter(child);
            if (!child.has_steps()) observer.on_frame_exit(child);
        }
        for (auto id : closes[i]) observer.on_frame_exit(frames.at(id));
    }
    if (!frames.root().has_steps()) observer.on_frame_exit(frames.root());
}

Bytes read_memory(ByteView memory, const Word& offset, const Word& size) {
    if (size == 0) return {};
    if (size > kMaxSlice) throw Error(ErrorKind::SchemaViolation, "memory slice too large");
    const auto len = static_cast<std::size_t>(size);
    Bytes out(len, 0);
    if (offset >= memory.size()) return out;
    const auto off = static_cast<std::size_t>(offset);
    const auto n = std::min(len, memory.size() - off);
    std::copy_n(memory.begin() + static_cast<std::ptrdiff_t>(off), n, out.begin());
    return out;
}

}  // namespace epg
