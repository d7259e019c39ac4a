// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/graph.hpp"

#include <algorithm>

#include "epg/error.hpp"
#include "epg/opcodes.hpp"

namespace epg {
namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames{
    "CALL",    "DELEGATECALL",    "CALLCODE",    "STATICCALL",    "CREATE",    "CREATE2",    "SELFDESTRUCT",
    "CALL_CT", "DELEGATECALL_CT", "CALLCODE_CT", "STATICCALL_CT", "CREATE_CT", "CREATE2_CT", "SELFDESTRUCT_CT",
    "ENTRY",   "JUMP",            "JUMPI",       "WRITE",         "TRANSITION", "CONTROL",   "DEPENDENCY",
};

const std::vector<EdgeId> kNoEdges;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(VertexKind k) noexcept {
    switch (k) {
        case VertexKind::Contract: return "Contract";
        case VertexKind::BasicBlock: return "BasicBlock";
        case VertexKind::DataSource: return "DataSource";
    }
    return "?";
}

VertexKind vertex_kind_from_string(std::string_view s) {
    if (s == "Contract") return VertexKind::Contract;
    if (s == "BasicBlock") return VertexKind::BasicBlock;
    if (s == "DataSource") return VertexKind::DataSource;
    throw Error(ErrorKind::SchemaViolation, "unknown vertex kind '" + std::string{s} + "'");
}

std::string_view to_string(Label l) noexcept { return kLabelNames[static_cast<std::size_t>(l)]; }

Label label_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kLabelCount; ++i)
        if (kLabelNames[i] == s) return static_cast<Label>(i);
    throw Error(ErrorKind::UnknownLabel, "unknown edge label '" + std::string{s} + "'");
}

Label invocation_label(std::uint8_t opcode) {
    switch (opcode) {
        case op::CALL: return Label::Call;
        case op::DELEGATECALL: return Label::DelegateCall;
        case op::CALLCODE: return Label::CallCode;
        case op::STATICCALL: return Label::StaticCall;
        case op::CREATE: return Label::Create;
        case op::CREATE2: return Label::Create2;
        case op::SELFDESTRUCT: return Label::SelfDestruct;
        default: break;
    }
    throw Error(ErrorKind::UnknownLabel, "opcode 0x" + to_hex(ByteView{&opcode, 1}, false) + " is not an invocation");
}

Label ct_variant(Label invocation) noexcept {
    return static_cast<Label>(static_cast<unsigned>(invocation) + 7);
}

bool is_invocation(Label l) noexcept { return static_cast<unsigned>(l) < 7; }
bool is_ct(Label l) noexcept {
    const auto v = static_cast<unsigned>(l);
    return v >= 7 && v < 14;
}

LabelSet LabelSet::parse(std::string_view text) {
    LabelSet out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;
        if (item == "T") out = out | T();
        else if (item == "CT") out = out | CT();
        else if (item == "C") out = out | C();
        else if (item == "D") out = out | D();
        else if (item == "*") out = out | all();
        else out = out | LabelSet{label_from_string(item)};
    }
    return out;
}

std::string property_to_string(const PropertyValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::uint64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<T, std::string>) return x;
            else {
                std::string s = "[";
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (i) s += ", ";
                    s += x[i].asset.to_string() + " " + x[i].from.hex() + "->" + x[i].to.hex() + " " +
                         to_hex(x[i].amount);
                }
                return s + "]";
            }
        },
        v);
}

VertexId PropertyGraph::add_vertex(VertexKind kind, Properties props) {
    Vertex v{id_bound(), kind, std::move(props)};
    insert_vertex(v);
    return v.id;
}

void PropertyGraph::insert_vertex(const Vertex& v) {
    if (has_vertex(v.id)) {
        if (vertex(v.id) != v)
            throw Error(ErrorKind::SchemaViolation, "conflicting definitions for vertex " + std::to_string(v.id));
        return;
    }
    if (v.id >= slot_.size()) slot_.resize(static_cast<std::size_t>(v.id) + 1, -1);
    slot_[v.id] = static_cast<std::int64_t>(vertices_.size());
    vertices_.push_back(v);
    adj_.emplace_back();
}

EdgeId PropertyGraph::add_edge(VertexId tail, VertexId head, Label label, Properties props) {
    if (!has_vertex(tail) || !has_vertex(head))
        throw Error(ErrorKind::SchemaViolation, "edge endpoint " + std::to_string(has_vertex(tail) ? head : tail) +
                                                    " does not exist");
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(Edge{id, tail, head, label, std::move(props)});
    const auto l = static_cast<std::size_t>(label);
    adj_[static_cast<std::size_t>(slot_[tail])].out[l].push_back(id);
    adj_[static_cast<std::size_t>(slot_[head])].in[l].push_back(id);
    return id;
}

const Vertex& PropertyGraph::vertex(VertexId id) const {
    if (!has_vertex(id)) throw Error(ErrorKind::SchemaViolation, "no vertex " + std::to_string(id));
    return vertices_[static_cast<std::size_t>(slot_[id])];
}

std::vector<VertexId> PropertyGraph::vertex_ids() const {
    std::vector<VertexId> ids;
    ids.reserve(vertices_.size());
    for (VertexId i = 0; i < slot_.size(); ++i)
        if (slot_[i] >= 0) ids.push_back(i);
    return ids;
}

const PropertyGraph::Adjacency& PropertyGraph::adjacency(VertexId v) const {
    if (!has_vertex(v)) throw Error(ErrorKind::SchemaViolation, "no vertex " + std::to_string(v));
    return adj_[static_cast<std::size_t>(slot_[v])];
}

const std::vector<EdgeId>& PropertyGraph::out_edges(VertexId v, Label l) const {
    return has_vertex(v) ? adjacency(v).out[static_cast<std::size_t>(l)] : kNoEdges;
}

const std::vector<EdgeId>& PropertyGraph::in_edges(VertexId v, Label l) const {
    return has_vertex(v) ? adjacency(v).in[static_cast<std::size_t>(l)] : kNoEdges;
}

std::vector<EdgeId> PropertyGraph::out_edges(VertexId v, LabelSet ls) const {
    std::vector<EdgeId> out;
    for_each_out(v, ls, [&](const Edge& e) { out.push_back(e.id); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<EdgeId> PropertyGraph::in_edges(VertexId v, LabelSet ls) const {
    std::vector<EdgeId> out;
    for_each_in(v, ls, [&](const Edge& e) { out.push_back(e.id); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace epg
