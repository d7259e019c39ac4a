// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "epg/trace.hpp"

namespace epg {

using FrameId = std::uint32_t;

/// One dynamic invocation: the quintuple (caller, callee, opcode, value, input)
/// plus what the trace tells us about how it ended.
struct CallFrame {
    FrameId id = 0;
    std::optional<FrameId> parent;
    Address caller;     // invoking account (destructed contract for SELFDESTRUCT)
    Address callee;     // invoked account (beneficiary for SELFDESTRUCT)
    Address context;    // account whose storage and balance the code operates on
    Address sender;     // value CALLER observes inside the frame
    std::uint8_t opcode = 0;
    Word value{0};            // ETH moved by this invocation
    Word apparent_value{0};   // value CALLVALUE observes (differs under DELEGATECALL)
    Bytes input;
    Bytes output;
    bool reverted = false;
    std::uint32_t index_in_parent = 0;
    std::optional<std::size_t> call_step;   // step in the parent that issued the invocation
    std::optional<std::size_t> first_step;  // absent when the callee executed no code
    std::optional<std::size_t> last_step;
    std::vector<FrameId> children;

    [[nodiscard]] bool has_steps() const noexcept { return first_step.has_value(); }
};

/// Call-frame tree with a step -> frame index. Frame ids follow opening order;
/// the root is frame 0.
class FrameTree {
  public:
    FrameTree() = default;
    FrameTree(std::vector<CallFrame> frames, std::vector<FrameId> step_frame);

    [[nodiscard]] const CallFrame& root() const { return frames_.front(); }
    [[nodiscard]] const CallFrame& at(FrameId id) const { return frames_.at(id); }
    [[nodiscard]] std::span<const CallFrame> frames() const noexcept { return frames_; }
    [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
    [[nodiscard]] FrameId frame_of_step(std::size_t step) const { return step_frame_.at(step); }

    /// True if the frame or any ancestor reverted; its effects never persisted.
    [[nodiscard]] bool discarded(FrameId id) const { return discarded_.at(id); }
    [[nodiscard]] bool is_ancestor(FrameId ancestor, FrameId id) const;  // strict

  private:
    std::vector<CallFrame> frames_;
    std::vector<FrameId> step_frame_;
    std::vector<bool> discarded_;
};

/// Rebuilds the invocation tree from depth transitions.
/// Throws Error{InconsistentDepth | TruncatedTrace}.
FrameTree reconstruct_frames(const TransactionEnvelope& env, std::span<const OpStep> steps);

/// Per-step callback driven as if the transaction were executing live.
class TraceObserver {
  public:
    virtual ~TraceObserver() = default;
    virtual void on_frame_enter(const CallFrame& /*frame*/) {}
    virtual void on_step(std::size_t /*index*/, const OpStep& /*step*/, const CallFrame& /*frame*/) {}
    virtual void on_frame_exit(const CallFrame& /*frame*/) {}
};

/// Replays steps in trace order with properly nested enter/exit events.
/// Observer exceptions abort the replay and propagate.
void simulate(const TransactionEnvelope& env, std::span<const OpStep> steps, const FrameTree& frames,
              TraceObserver& observer);

/// Reads [offset, offset+size) from a memory snapshot, zero-filling past its end.
Bytes read_memory(ByteView memory, const Word& offset, const Word& size);

}  // namespace epg
