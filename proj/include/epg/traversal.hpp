// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <initializer_list>
#include <set>
#include <string_view>
#include <vector>

#include "epg/graph.hpp"

namespace epg {

using VertexSet = std::set<VertexId>;

/// A function from vertex sets to vertex sets over one frozen graph.
/// Traversals hold no graph state, so one value can be applied to many graphs.
class Traversal {
  public:
    using Fn = std::function<VertexSet(const PropertyGraph&, const VertexSet&)>;

    Traversal() : fn_{[](const PropertyGraph&, const VertexSet& v) { return v; }} {}
    explicit Traversal(Fn fn) : fn_{std::move(fn)} {}

    VertexSet operator()(const PropertyGraph& g, const VertexSet& v) const { return fn_(g, v); }

  private:
    Fn fn_;
};

using VertexPredicate = std::function<bool(const Vertex&)>;

/// Keeps the vertices satisfying pred. A throwing predicate becomes Error{PredicateError}.
Traversal filter(VertexPredicate pred);
/// Heads of edges with a label in ls whose tail is in the input.
Traversal out(LabelSet ls);
/// Tails of edges with a label in ls whose head is in the input.
Traversal in(LabelSet ls);
/// Label names are parsed with LabelSet::parse. Throws Error{UnknownLabel}.
Traversal out(std::string_view labels);
Traversal in(std::string_view labels);
/// Least set containing the input and closed under t (worklist accumulation).
Traversal repeat(Traversal t);
/// repeat(t)(V) minus V.
Traversal repeat_exclusive(Traversal t);
/// All descendant invocations: repeat(out(T)).
Traversal tcon();
/// Right-to-left: compose({t1, t2})(V) = t1(t2(V)).
Traversal compose(std::initializer_list<Traversal> ts);
Traversal compose(std::vector<Traversal> ts);

inline Traversal operator*(Traversal a, Traversal b) { return compose({std::move(a), std::move(b)}); }

/// Set difference helper used by the detector formulas.
VertexSet minus(const VertexSet& a, const VertexSet& b);

}  // namespace epg
