// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epg/flow.hpp"

namespace epg {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class VertexKind : std::uint8_t { Contract, BasicBlock, DataSource };

std::string_view to_string(VertexKind k) noexcept;
VertexKind vertex_kind_from_string(std::string_view s);

/// Edge alphabet. The first seven are the invocation labels, the next seven
/// their retargeted copies produced when merging, then control and data labels.
enum class Label : std::uint8_t {
    Call,
    DelegateCall,
    CallCode,
    StaticCall,
    Create,
    Create2,
    SelfDestruct,
    CallCt,
    DelegateCallCt,
    CallCodeCt,
    StaticCallCt,
    CreateCt,
    Create2Ct,
    SelfDestructCt,
    Entry,
    Jump,
    JumpI,
    Write,
    Transition,
    Control,
    Dependency,
};
inline constexpr std::size_t kLabelCount = 21;

std::string_view to_string(Label l) noexcept;
/// Accepts the canonical names ("CALL", "CALL_CT", "JUMPI", ...). Throws Error{UnknownLabel}.
Label label_from_string(std::string_view s);
Label invocation_label(std::uint8_t opcode);
Label ct_variant(Label invocation) noexcept;
bool is_invocation(Label l) noexcept;
bool is_ct(Label l) noexcept;

class LabelSet {
  public:
    constexpr LabelSet() = default;
    constexpr LabelSet(std::initializer_list<Label> ls) {
        for (auto l : ls) bits_ |= bit(l);
    }
    static constexpr LabelSet all() { return LabelSet{(1u << kLabelCount) - 1}; }
    /// Invocation labels.
    static constexpr LabelSet T() { return LabelSet{0x7Fu}; }
    /// Retargeted invocation labels.
    static constexpr LabelSet CT() { return LabelSet{0x7Fu << 7}; }
    /// Control-flow labels.
    static constexpr LabelSet C() { return LabelSet{Label::Entry, Label::Jump, Label::JumpI}; }
    /// Data-flow labels.
    static constexpr LabelSet D() {
        return LabelSet{Label::Write, Label::Transition, Label::Control, Label::Dependency};
    }
    /// Parses a comma separated list of names or group names (T, CT, C, D).
    static LabelSet parse(std::string_view text);

    [[nodiscard]] constexpr bool contains(Label l) const noexcept { return (bits_ & bit(l)) != 0; }
    [[nodiscard]] constexpr bool empty() const noexcept { return bits_ == 0; }
    [[nodiscard]] constexpr std::uint32_t bits() const noexcept { return bits_; }
    constexpr LabelSet operator|(LabelSet o) const noexcept { return LabelSet{bits_ | o.bits_}; }
    friend constexpr bool operator==(LabelSet, LabelSet) = default;

  private:
    constexpr explicit LabelSet(std::uint32_t b) : bits_{b} {}
    static constexpr std::uint32_t bit(Label l) { return 1u << static_cast<unsigned>(l); }
    std::uint32_t bits_ = 0;
};

using PropertyValue = std::variant<bool, std::uint64_t, std::string, std::vector<AssetFlow>>;
using Properties = std::map<std::string, PropertyValue>;

std::string property_to_string(const PropertyValue& v);

struct Vertex {
    VertexId id = 0;
    VertexKind kind = VertexKind::Contract;
    Properties props;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    EdgeId id = 0;
    VertexId tail = 0;
    VertexId head = 0;
    Label label = Label::Call;
    Properties props;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Multi-relational labeled property graph with per-label adjacency.
/// Vertex ids may be sparse so component graphs can share one id space.
class PropertyGraph {
  public:
    /// Appends a vertex with the next free id.
    VertexId add_vertex(VertexKind kind, Properties props = {});
    /// Inserts a vertex with a caller-chosen id. Re-inserting an identical vertex is a no-op.
    void insert_vertex(const Vertex& v);
    EdgeId add_edge(VertexId tail, VertexId head, Label label, Properties props = {});

    [[nodiscard]] bool has_vertex(VertexId id) const noexcept {
        return id < slot_.size() && slot_[id] >= 0;
    }
    [[nodiscard]] const Vertex& vertex(VertexId id) const;
    [[nodiscard]] const Edge& edge(EdgeId id) const { return edges_.at(id); }
    /// Vertices in ascending id order.
    [[nodiscard]] std::vector<VertexId> vertex_ids() const;
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] VertexId id_bound() const noexcept { return static_cast<VertexId>(slot_.size()); }

    [[nodiscard]] const std::vector<EdgeId>& out_edges(VertexId v, Label l) const;
    [[nodiscard]] const std::vector<EdgeId>& in_edges(VertexId v, Label l) const;
    [[nodiscard]] std::vector<EdgeId> out_edges(VertexId v, LabelSet ls) const;
    [[nodiscard]] std::vector<EdgeId> in_edges(VertexId v, LabelSet ls) const;

    template <typename F>
    void for_each_out(VertexId v, LabelSet ls, F&& f) const {
        const auto& a = adjacency(v);
        for (std::size_t l = 0; l < kLabelCount; ++l)
            if (ls.contains(static_cast<Label>(l)))
                for (auto e : a.out[l]) f(edges_[e]);
    }
    template <typename F>
    void for_each_in(VertexId v, LabelSet ls, F&& f) const {
        const auto& a = adjacency(v);
        for (std::size_t l = 0; l < kLabelCount; ++l)
            if (ls.contains(static_cast<Label>(l)))
                for (auto e : a.in[l]) f(edges_[e]);
    }

  private:
    struct Adjacency {
        std::array<std::vector<EdgeId>, kLabelCount> out;
        std::array<std::vector<EdgeId>, kLabelCount> in;
    };
    [[nodiscard]] const Adjacency& adjacency(VertexId v) const;

    std::vector<Vertex> vertices_;
    std::vector<Adjacency> adj_;
    std::vector<std::int64_t> slot_;
    std::vector<Edge> edges_;
};

}  // namespace epg
