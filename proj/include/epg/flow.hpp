// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "epg/frames.hpp"
#include "epg/trace.hpp"

namespace epg {

enum class SourceKind : std::uint8_t {
    Storage,
    Balance,
    CallData,
    CallValue,
    Origin,
    Caller,
    BlockNumber,
    Timestamp,
    ChainContext,
    ReturnData,
};

/// Identity of a data source. Storage and Balance are writable; the rest are contextual.
struct SourceIdentifier {
    SourceKind kind = SourceKind::Origin;
    Address address;      // Storage owner, Balance holder
    Word slot{0};         // Storage slot
    FrameId frame = 0;    // CallData, CallValue, Caller, ReturnData
    std::string name;     // ChainContext

    [[nodiscard]] bool writable() const noexcept {
        return kind == SourceKind::Storage || kind == SourceKind::Balance;
    }
    [[nodiscard]] std::string to_string() const;

    static SourceIdentifier storage(const Address& owner, const Word& slot);
    static SourceIdentifier balance(const Address& holder);
    static SourceIdentifier per_frame(SourceKind kind, FrameId frame);
    static SourceIdentifier global(SourceKind kind);
    static SourceIdentifier chain(std::string name);

    friend bool operator==(const SourceIdentifier&, const SourceIdentifier&) = default;
    friend bool operator<(const SourceIdentifier& a, const SourceIdentifier& b);
};

/// A data source at one point of its history. Contextual sources are always version 0.
struct SourceRef {
    SourceIdentifier identifier;
    std::uint32_t version = 0;

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
    friend bool operator<(const SourceRef& a, const SourceRef& b) {
        if (a.identifier == b.identifier) return a.version < b.version;
        return a.identifier < b.identifier;
    }
};

using IdentId = std::uint32_t;
using RefId = std::uint32_t;
using TagId = std::uint32_t;
inline constexpr TagId kEmptyTag = 0;

/// Interning tables: identifiers, (identifier, version) refs, and tags (sorted ref sets).
class SourceTable {
  public:
    IdentId intern(const SourceIdentifier& id);
    RefId ref(IdentId ident, std::uint32_t version);

    [[nodiscard]] const SourceIdentifier& identifier(IdentId id) const { return idents_.at(id); }
    [[nodiscard]] IdentId ident_of(RefId r) const { return refs_.at(r).first; }
    [[nodiscard]] std::uint32_t version_of(RefId r) const { return refs_.at(r).second; }
    [[nodiscard]] SourceRef resolve(RefId r) const { return {identifier(ident_of(r)), version_of(r)}; }
    [[nodiscard]] std::size_t ident_count() const noexcept { return idents_.size(); }
    [[nodiscard]] std::size_t ref_count() const noexcept { return refs_.size(); }

  private:
    std::vector<SourceIdentifier> idents_;
    std::map<SourceIdentifier, IdentId> ident_index_;
    std::vector<std::pair<IdentId, std::uint32_t>> refs_;
    std::map<std::pair<IdentId, std::uint32_t>, RefId> ref_index_;
};

/// Hash-consed data tags. Tag 0 is the empty tag (a constant).
class TagPool {
  public:
    TagPool();
    TagId make(std::vector<RefId> refs);
    TagId single(RefId r) { return make({r}); }
    TagId unite(TagId a, TagId b);
    [[nodiscard]] const std::vector<RefId>& refs(TagId t) const { return tags_.at(t); }
    [[nodiscard]] std::size_t size() const noexcept { return tags_.size(); }

  private:
    struct VecHash {
        std::size_t operator()(const std::vector<RefId>& v) const noexcept;
    };
    std::vector<std::vector<RefId>> tags_;
    std::unordered_map<std::vector<RefId>, TagId, VecHash> index_;
    std::unordered_map<std::uint64_t, TagId> union_cache_;
};

/// A tag expanded into source references.
struct DataTag {
    std::set<SourceRef> sources;
};

struct ShadowFrame {
    FrameId frame = 0;
    std::vector<TagId> stack;
    std::vector<TagId> memory;      // byte granular
    std::vector<TagId> calldata;    // byte granular
    std::vector<TagId> returndata;  // byte granular, last child's output
    std::vector<TagId> output;      // bytes passed to RETURN/REVERT
    TagId callvalue = kEmptyTag;

    [[nodiscard]] TagId memory_tag(std::size_t offset) const {
        return offset < memory.size() ? memory[offset] : kEmptyTag;
    }
};

using BlockId = std::uint32_t;

enum class BlockEntry : std::uint8_t { Entry, Jump, JumpI, CallReturn };

/// One dynamic basic-block visit.
struct BlockVisit {
    BlockId id = 0;
    FrameId frame = 0;
    std::uint64_t pc = 0;
    std::uint32_t index = 0;        // visit counter of this pc within the frame
    std::size_t first_step = 0;
    std::optional<BlockId> predecessor;
    BlockEntry entry = BlockEntry::Entry;
    std::optional<bool> condition;  // for JumpI entries
};

struct ControlRecord {
    FrameId frame = 0;
    std::size_t jumpi_step = 0;
    TagId condition_tag = kEmptyTag;
    bool condition_value = false;
    std::uint64_t taken_block_pc = 0;
    std::optional<BlockId> taken_block;  // filled once the next block starts
};

struct WriteRecord {
    FrameId frame = 0;
    std::size_t step = 0;
    RefId target = 0;   // the new version
    TagId value_tag = kEmptyTag;
    TagId slot_tag = kEmptyTag;
    std::optional<BlockId> block;  // absent for the top-level value transfer
    Word new_value{0};
};

struct AssetKind {
    bool is_eth = true;
    Address token;

    friend bool operator==(const AssetKind&, const AssetKind&) = default;
    friend bool operator<(const AssetKind& a, const AssetKind& b) {
        if (a.is_eth != b.is_eth) return a.is_eth;
        return a.token < b.token;
    }
    [[nodiscard]] std::string to_string() const { return is_eth ? "ETH" : token.hex(); }
};

struct AssetFlow {
    AssetKind asset;
    Address from;
    Address to;
    Word amount{0};

    friend bool operator==(const AssetFlow&, const AssetFlow&) = default;
};

struct TrackedFlow {
    AssetFlow flow;
    FrameId frame = 0;          // invocation whose CTG edge carries the flow
    std::size_t step = 0;
    TagId destination_tag = kEmptyTag;
    TagId amount_tag = kEmptyTag;
};

struct FlowTrackerOptions {
    std::optional<std::set<Address>> token_allowlist;
};

/// Everything the shadow machine learned from one replay.
struct FlowRecords {
    SourceTable sources;
    TagPool tags;
    std::vector<BlockVisit> blocks;
    std::vector<ControlRecord> controls;
    std::vector<WriteRecord> writes;   // every write, including those later discarded
    std::vector<TrackedFlow> flows;    // every flow, including those later discarded
    std::map<FrameId, BlockId> call_blocks;     // block that issued each invocation
    std::map<FrameId, std::vector<BlockId>> frame_blocks;
    std::map<RefId, Word> values;               // concrete values known per version
    std::vector<std::string> warnings;

    [[nodiscard]] DataTag expand(TagId t) const;
};

/// Shadow machine run as a trace observer.
class FlowTracker : public TraceObserver {
  public:
    FlowTracker(const TransactionEnvelope& env, const FrameTree& frames, FlowTrackerOptions options = {});

    void on_frame_enter(const CallFrame& frame) override;
    void on_step(std::size_t index, const OpStep& step, const CallFrame& frame) override;
    void on_frame_exit(const CallFrame& frame) override;

    /// Applies the opcode's tag semantics to the frame's shadow state.
    /// Throws Error{ShadowDesync} if shadow and concrete stack lengths differ.
    void transfer_tags(std::size_t index, const OpStep& step, const CallFrame& frame, ShadowFrame& shadow);

    ControlRecord record_control(std::size_t index, const OpStep& step, const ShadowFrame& shadow);
    WriteRecord record_write(IdentId target, TagId value_tag, TagId slot_tag, const Word& new_value, FrameId frame,
                             std::size_t step, std::optional<BlockId> block);
    std::optional<TrackedFlow> extract_eth_flow(const CallFrame& child, std::size_t step);
    std::optional<TrackedFlow> extract_token_flow(std::size_t index, const OpStep& step, const CallFrame& frame,
                                                  const ShadowFrame& shadow);

    [[nodiscard]] const ShadowFrame* shadow(FrameId id) const;
    [[nodiscard]] const FlowRecords& records() const noexcept { return rec_; }
    FlowRecords take_records() { return std::move(rec_); }

  private:
    struct PendingCall {
        std::vector<TagId> args;
        TagId value_tag = kEmptyTag;
        TagId destination_tag = kEmptyTag;
        Word ret_offset{0};
        Word ret_size{0};
    };
    struct Undo {
        bool is_balance = false;
        IdentId ident = 0;
        std::uint32_t version = 0;
        Address holder;
        std::optional<Word> old_balance;
    };
    struct Observe {
        RefId ref;
        std::size_t step;
    };

    TagId source_tag(const SourceIdentifier& id);
    TagId load(const SourceIdentifier& id);
    TagId range_tag(const std::vector<TagId>& bytes, const Word& offset, const Word& size, TagId fill);
    void write_range(std::vector<TagId>& bytes, const Word& offset, std::span<const TagId> tags);
    void fill_range(std::vector<TagId>& bytes, const Word& offset, const Word& size, TagId tag);
    void balance_write(const Address& holder, const Word& new_value, TagId value_tag, FrameId frame, std::size_t step,
                       std::optional<BlockId> block);
    Word balance_of(const Address& a) const;
    void start_block(ShadowFrame& sf, std::size_t index, const OpStep& step, BlockEntry entry,
                     std::optional<bool> condition);

    const TransactionEnvelope& env_;
    const FrameTree& frames_;
    FlowTrackerOptions options_;
    FlowRecords rec_;

    std::map<FrameId, ShadowFrame> shadows_;
    std::map<FrameId, PendingCall> pending_calls_;
    std::map<FrameId, std::size_t> undo_marks_;
    std::vector<Undo> undo_;
    std::vector<std::uint32_t> current_version_;   // by IdentId
    std::vector<std::uint32_t> next_version_;      // by IdentId
    std::map<RefId, TagId> implicit_;               // balance version -> call-value provenance
    std::map<Address, Word> balances_;
    std::map<std::pair<Address, Word>, TagId> transient_;

    // per-frame control-flow bookkeeping
    struct FrameCursor {
        std::optional<BlockId> current;
        std::map<std::uint64_t, std::uint32_t> visits;
        std::optional<BlockEntry> pending_entry;
        std::optional<bool> pending_condition;
        std::optional<std::size_t> pending_control;  // index into controls
        std::optional<Observe> observe;
        std::optional<FrameId> last_child;
    };
    std::map<FrameId, FrameCursor> cursors_;
    std::map<std::size_t, FrameId> child_of_step_;
};

/// Convenience: replay the trace through a fresh tracker.
FlowRecords track_flows(const ParsedTrace& trace, const FrameTree& frames, FlowTrackerOptions options = {});

std::set<Address> load_allowlist(const std::string& path);

}  // namespace epg
