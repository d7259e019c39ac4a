// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "epg/graph.hpp"

namespace epg {

enum class GraphFormat : std::uint8_t { Dot, GraphSON };

GraphFormat graph_format_from_string(std::string_view s);

/// GraphViz rendering. Vertices and edges are written in id order and
/// properties in key order, so equal graphs give byte-identical output.
std::string to_dot(const PropertyGraph& g, std::string_view name = "epg");

/// GraphSON 3 ("tinker:graph") document; vertex labels carry the vertex kind.
nlohmann::ordered_json to_graphson(const PropertyGraph& g);
/// Inverse of to_graphson. Throws Error{SchemaViolation} on unexpected shapes.
PropertyGraph from_graphson(const nlohmann::json& doc);

/// Writes the graph to a stream. Throws Error{SinkFailure} if the stream fails.
void export_graph(const PropertyGraph& g, GraphFormat format, std::ostream& sink);

}  // namespace epg
