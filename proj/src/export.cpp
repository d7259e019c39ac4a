// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/export.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "epg/error.hpp"

namespace epg {
namespace {

using ojson = nlohmann::ordered_json;

std::string dot_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string_view shape_of(VertexKind k) {
    switch (k) {
        case VertexKind::Contract: return "box";
        case VertexKind::BasicBlock: return "ellipse";
        case VertexKind::DataSource: return "cylinder";
    }
    return "plain";
}

std::string vertex_caption(const Vertex& v) {
    auto prop = [&](const char* k) {
        auto it = v.props.find(k);
        return it == v.props.end() ? std::string{} : property_to_string(it->second);
    };
    switch (v.kind) {
        case VertexKind::Contract: return prop("addr");
        case VertexKind::BasicBlock: return "pc " + prop("pc") + " #" + prop("index");
        case VertexKind::DataSource: return prop("identifier") + " @" + prop("index");
    }
    return {};
}

void write_props(std::ostringstream& os, const Properties& props) {
    for (const auto& [k, v] : props) os << ", " << k << "=\"" << dot_escape(property_to_string(v)) << '"';
}

ojson typed(const char* type, ojson value) { return ojson{{"@type", type}, {"@value", std::move(value)}}; }

ojson encode_value(const PropertyValue& v) {
    return std::visit(
        [](const auto& x) -> ojson {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) return x;
            else if constexpr (std::is_same_v<T, std::uint64_t>) return typed("g:Int64", x);
            else if constexpr (std::is_same_v<T, std::string>) return x;
            else {
                ojson list = ojson::array();
                for (const auto& f : x)
                    list.push_back(typed("g:Map", ojson::array({"asset", f.asset.to_string(), "from", f.from.hex(),
                                                                "to", f.to.hex(), "amount", to_hex(f.amount)})));
                return typed("g:List", std::move(list));
            }
        },
        v);
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::SchemaViolation, "GraphSON: " + what); }

const nlohmann::json& value_of(const nlohmann::json& j, const char* type) {
    if (!j.is_object() || j.value("@type", "") != type || !j.contains("@value")) bad(std::string{"expected "} + type);
    return j.at("@value");
}

std::uint64_t decode_id(const nlohmann::json& j) {
    const auto& v = value_of(j, "g:Int64");
    if (!v.is_number_unsigned()) bad("identifier is not a non-negative integer");
    return v.get<std::uint64_t>();
}

PropertyValue decode_value(const nlohmann::json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_object() && j.value("@type", "") == "g:Int64") return decode_id(j);
    if (j.is_object() && j.value("@type", "") == "g:List") {
        std::vector<AssetFlow> flows;
        for (const auto& m : value_of(j, "g:List")) {
            const auto& kv = value_of(m, "g:Map");
            if (!kv.is_array() || kv.size() % 2 != 0) bad("malformed asset flow map");
            std::map<std::string, std::string> fields;
            for (std::size_t i = 0; i < kv.size(); i += 2) fields[kv[i].get<std::string>()] = kv[i + 1].get<std::string>();
            AssetFlow f;
            const auto& asset = fields["asset"];
            f.asset = asset == "ETH" ? AssetKind{true, {}} : AssetKind{false, parse_address(asset)};
            f.from = parse_address(fields["from"]);
            f.to = parse_address(fields["to"]);
            f.amount = parse_word(fields["amount"]);
            flows.push_back(f);
        }
        return flows;
    }
    bad("unsupported property value " + j.dump());
}

}  // namespace

GraphFormat graph_format_from_string(std::string_view s) {
    if (s == "dot") return GraphFormat::Dot;
    if (s == "graphson") return GraphFormat::GraphSON;
    throw Error(ErrorKind::SchemaViolation, "unknown graph format '" + std::string{s} + "'");
}

std::string to_dot(const PropertyGraph& g, std::string_view name) {
    std::ostringstream os;
    os << "digraph " << name << " {\n";
    for (auto id : g.vertex_ids()) {
        const auto& v = g.vertex(id);
        os << "  n" << id << " [shape=" << shape_of(v.kind) << ", label=\"" << dot_escape(vertex_caption(v))
           << "\", kind=\"" << to_string(v.kind) << '"';
        write_props(os, v.props);
        os << "];\n";
    }
    for (const auto& e : g.edges()) {
        os << "  n" << e.tail << " -> n" << e.head << " [label=\"" << to_string(e.label) << '"';
        write_props(os, e.props);
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

ojson to_graphson(const PropertyGraph& g) {
    ojson vertices = ojson::array();
    std::uint64_t prop_id = 0;
    for (auto id : g.vertex_ids()) {
        const auto& v = g.vertex(id);
        ojson props = ojson::object();
        for (const auto& [k, val] : v.props) {
            props[k] = ojson::array({typed("g:VertexProperty", ojson{{"id", typed("g:Int64", prop_id++)},
                                                                     {"value", encode_value(val)},
                                                                     {"label", k}})});
        }
        vertices.push_back(typed("g:Vertex", ojson{{"id", typed("g:Int64", std::uint64_t{id})},
                                                   {"label", std::string{to_string(v.kind)}},
                                                   {"properties", std::move(props)}}));
    }
    ojson edges = ojson::array();
    for (const auto& e : g.edges()) {
        ojson props = ojson::object();
        for (const auto& [k, val] : e.props)
            props[k] = typed("g:Property", ojson{{"key", k}, {"value", encode_value(val)}});
        edges.push_back(typed("g:Edge", ojson{{"id", typed("g:Int64", std::uint64_t{e.id})},
                                              {"label", std::string{to_string(e.label)}},
                                              {"inVLabel", std::string{to_string(g.vertex(e.head).kind)}},
                                              {"outVLabel", std::string{to_string(g.vertex(e.tail).kind)}},
                                              {"inV", typed("g:Int64", std::uint64_t{e.head})},
                                              {"outV", typed("g:Int64", std::uint64_t{e.tail})},
                                              {"properties", std::move(props)}}));
    }
    return typed("tinker:graph", ojson{{"vertices", std::move(vertices)}, {"edges", std::move(edges)}});
}

PropertyGraph from_graphson(const nlohmann::json& doc) {
    const auto& body = value_of(doc, "tinker:graph");
    PropertyGraph g;
    for (const auto& jv : body.at("vertices")) {
        const auto& v = value_of(jv, "g:Vertex");
        Vertex out;
        out.id = static_cast<VertexId>(decode_id(v.at("id")));
        out.kind = vertex_kind_from_string(v.at("label").get<std::string>());
        if (v.contains("properties"))
            for (const auto& [k, list] : v.at("properties").items()) {
                if (!list.is_array() || list.size() != 1) bad("vertex property '" + k + "' must hold one value");
                out.props[k] = decode_value(value_of(list[0], "g:VertexProperty").at("value"));
            }
        g.insert_vertex(out);
    }
    std::vector<std::pair<std::uint64_t, Edge>> edges;
    for (const auto& je : body.at("edges")) {
        const auto& e = value_of(je, "g:Edge");
        Edge out;
        out.tail = static_cast<VertexId>(decode_id(e.at("outV")));
        out.head = static_cast<VertexId>(decode_id(e.at("inV")));
        out.label = label_from_string(e.at("label").get<std::string>());
        if (e.contains("properties"))
            for (const auto& [k, p] : e.at("properties").items())
                out.props[k] = decode_value(value_of(p, "g:Property").at("value"));
        edges.emplace_back(decode_id(e.at("id")), std::move(out));
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first != i) bad("edge ids must be dense from 0");
        auto& e = edges[i].second;
        g.add_edge(e.tail, e.head, e.label, std::move(e.props));
    }
    return g;
}

void export_graph(const PropertyGraph& g, GraphFormat format, std::ostream& sink) {
    if (format == GraphFormat::Dot) sink << to_dot(g);
    else sink << to_graphson(g).dump(1) << '\n';
    sink.flush();
    if (!sink) throw Error(ErrorKind::SinkFailure, "failed to write the graph document");
}

}  // namespace epg
