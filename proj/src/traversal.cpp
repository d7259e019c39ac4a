// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "epg/traversal.hpp"

#include <algorithm>
#include <iterator>

#include "epg/error.hpp"

namespace epg {

Traversal filter(VertexPredicate pred) {
    return Traversal{[pred = std::move(pred)](const PropertyGraph& g, const VertexSet& in) {
        VertexSet out;
        for (auto v : in) {
            bool keep = false;
            try {
                keep = pred(g.vertex(v));
            } catch (const std::exception& e) {
                throw Error(ErrorKind::PredicateError,
                            "predicate failed on vertex " + std::to_string(v) + ": " + e.what());
            }
            if (keep) out.insert(out.end(), v);
        }
        return out;
    }};
}

Traversal out(LabelSet ls) {
    return Traversal{[ls](const PropertyGraph& g, const VertexSet& in) {
        VertexSet out;
        for (auto v : in) g.for_each_out(v, ls, [&](const Edge& e) { out.insert(e.head); });
        return out;
    }};
}

Traversal in(LabelSet ls) {
    return Traversal{[ls](const PropertyGraph& g, const VertexSet& in) {
        VertexSet out;
        for (auto v : in) g.for_each_in(v, ls, [&](const Edge& e) { out.insert(e.tail); });
        return out;
    }};
}

Traversal out(std::string_view labels) { return out(LabelSet::parse(labels)); }
Traversal in(std::string_view labels) { return in(LabelSet::parse(labels)); }

Traversal repeat(Traversal t) {
    return Traversal{[t = std::move(t)](const PropertyGraph& g, const VertexSet& in) {
        VertexSet result = in;
        VertexSet frontier = in;
        while (!frontier.empty()) {
            VertexSet next;
            for (auto v : t(g, frontier))
                if (result.insert(v).second) next.insert(v);
            frontier = std::move(next);
        }
        return result;
    }};
}

Traversal repeat_exclusive(Traversal t) {
    return Traversal{[r = repeat(std::move(t))](const PropertyGraph& g, const VertexSet& in) {
        return minus(r(g, in), in);
    }};
}

Traversal tcon() { return repeat(out(LabelSet::T())); }

Traversal compose(std::vector<Traversal> ts) {
    return Traversal{[ts = std::move(ts)](const PropertyGraph& g, const VertexSet& in) {
        VertexSet cur = in;
        for (auto it = ts.rbegin(); it != ts.rend(); ++it) cur = (*it)(g, cur);
        return cur;
    }};
}

Traversal compose(std::initializer_list<Traversal> ts) { return compose(std::vector<Traversal>(ts)); }

VertexSet minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

}  // namespace epg
