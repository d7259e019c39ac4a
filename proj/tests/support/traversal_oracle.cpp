// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

#include "traversal_oracle.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "epg/traversal.hpp"

namespace epg_test {

namespace {

using epg::Label;
using epg::LabelSet;
using epg::VertexSet;

struct RawEdge {
    std::uint32_t tail, head;
    Label label;
};

// The reference never touches PropertyGraph adjacency; it scans the edge list.
struct Naive {
    std::uint32_t n = 0;
    std::vector<RawEdge> edges;

    VertexSet out(LabelSet ls, const VertexSet& v) const {
        VertexSet r;
        for (const auto& e : edges)
            if (ls.contains(e.label) && v.count(e.tail)) r.insert(e.head);
        return r;
    }
    VertexSet in(LabelSet ls, const VertexSet& v) const {
        VertexSet r;
        for (const auto& e : edges)
            if (ls.contains(e.label) && v.count(e.head)) r.insert(e.tail);
        return r;
    }
    // Kleene iteration: X_{k+1} = V u f(X_k) until nothing changes.
    VertexSet repeat(const std::function<VertexSet(const VertexSet&)>& f, const VertexSet& v) const {
        VertexSet x = v;
        for (;;) {
            VertexSet next = v;
            for (auto u : f(x)) next.insert(u);
            for (auto u : x) next.insert(u);
            if (next == x) return x;
            x = std::move(next);
        }
    }
};

LabelSet random_labels(std::mt19937_64& rng) {
    static const LabelSet groups[] = {LabelSet::T(), LabelSet::CT(), LabelSet::C(), LabelSet::D(),
                                      LabelSet::all()};
    std::uniform_int_distribution<int> pick(0, 9);
    int k = pick(rng);
    if (k < 5) return groups[k];
    LabelSet ls;
    std::uniform_int_distribution<int> lab(0, static_cast<int>(epg::kLabelCount) - 1);
    int count = 1 + k % 3;
    for (int i = 0; i < count; ++i) ls = ls | LabelSet{static_cast<Label>(lab(rng))};
    return ls;
}

VertexSet random_subset(std::mt19937_64& rng, std::uint32_t n) {
    VertexSet s;
    std::bernoulli_distribution coin(0.35);
    for (std::uint32_t v = 0; v < n; ++v)
        if (coin(rng)) s.insert(v);
    return s;
}

bool subset(const VertexSet& a, const VertexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string show(const VertexSet& s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto v : s) {
        os << (first ? "" : ",") << v;
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace

PropertyResult run_traversal_properties(std::size_t graphs, std::uint64_t seed) {
    PropertyResult res;
    std::mt19937_64 rng{seed};
    std::uniform_int_distribution<std::uint32_t> nv(1, 6);
    std::uniform_int_distribution<std::uint32_t> ne(0, 10);
    std::uniform_int_distribution<int> lab(0, static_cast<int>(epg::kLabelCount) - 1);

    for (std::size_t gi = 0; gi < graphs; ++gi) {
        Naive ref;
        ref.n = nv(rng);
        epg::PropertyGraph g;
        std::vector<std::uint64_t> colour(ref.n);
        std::uniform_int_distribution<std::uint64_t> col(0, 2);
        for (std::uint32_t v = 0; v < ref.n; ++v) {
            colour[v] = col(rng);
            g.add_vertex(epg::VertexKind::Contract, {{"colour", colour[v]}});
        }
        std::uniform_int_distribution<std::uint32_t> vx(0, ref.n - 1);
        auto m = ne(rng);
        for (std::uint32_t i = 0; i < m; ++i) {
            RawEdge e{vx(rng), vx(rng), static_cast<Label>(lab(rng))};
            ref.edges.push_back(e);
            g.add_edge(e.tail, e.head, e.label);
        }
        ++res.graphs;

        auto check = [&](bool ok, const std::string& what) {
            ++res.checks;
            if (!ok && res.failures++ == 0) {
                std::ostringstream os;
                os << "graph " << gi << " (" << ref.n << " vertices, " << ref.edges.size() << " edges): " << what;
                res.first_failure = os.str();
            }
        };

        for (int trial = 0; trial < 3; ++trial) {
            auto ls = random_labels(rng);
            auto ls2 = random_labels(rng);
            auto v = random_subset(rng, ref.n);
            auto w = v;
            for (auto u : random_subset(rng, ref.n)) w.insert(u);
            std::uint64_t keep = col(rng);

            auto t_out = epg::out(ls);
            auto t_in = epg::in(ls);
            auto t_filter = epg::filter([keep](const epg::Vertex& x) {
                return std::get<std::uint64_t>(x.props.at("colour")) != keep;
            });
            auto naive_filter = [&](const VertexSet& s) {
                VertexSet r;
                for (auto u : s)
                    if (colour[u] != keep) r.insert(u);
                return r;
            };
            auto naive_out = [&](const VertexSet& s) { return ref.out(ls, s); };
            auto naive_in = [&](const VertexSet& s) { return ref.in(ls, s); };
            auto naive_in2 = [&](const VertexSet& s) { return ref.in(ls2, s); };

            check(t_out(g, v) == naive_out(v), "out " + show(v));
            check(t_in(g, v) == naive_in(v), "in " + show(v));
            check(t_filter(g, v) == naive_filter(v), "filter " + show(v));

            // composition is right to left: compose({a, b})(V) = a(b(V))
            auto comp = epg::compose({epg::in(ls2), epg::out(ls)});
            check(comp(g, v) == naive_in2(naive_out(v)), "compose " + show(v));
            auto comp3 = epg::compose({t_filter, epg::in(ls2), epg::out(ls)});
            check(comp3(g, v) == naive_filter(naive_in2(naive_out(v))), "compose3 " + show(v));

            auto rep = epg::repeat(t_out);
            auto rv = rep(g, v);
            check(rv == ref.repeat(naive_out, v), "repeat(out) " + show(v));
            auto rep_in = epg::repeat(epg::compose({t_filter, t_in}));
            check(rep_in(g, v) == ref.repeat([&](const VertexSet& s) { return naive_filter(naive_in(s)); }, v),
                  "repeat(filter.in) " + show(v));

            auto rex = epg::repeat_exclusive(t_out);
            auto xv = rex(g, v);
            VertexSet expect_x;
            for (auto u : ref.repeat(naive_out, v))
                if (!v.count(u)) expect_x.insert(u);
            check(xv == expect_x, "repeat_exclusive " + show(v));
            bool disjoint = std::none_of(xv.begin(), xv.end(), [&](auto u) { return v.count(u) > 0; });
            check(disjoint, "repeat_exclusive disjoint " + show(v));

            LabelSet t_labels = LabelSet::T();
            check(epg::tcon()(g, v) == ref.repeat([&](const VertexSet& s) { return ref.out(t_labels, s); }, v),
                  "tcon " + show(v));

            // closure laws
            check(rep(g, rv) == rv, "repeat idempotent " + show(v));
            check(epg::repeat(rep)(g, v) == rv, "repeat(repeat) " + show(v));
            check(subset(v, rv), "repeat extensive " + show(v));
            check(subset(rv, rep(g, w)), "repeat monotone " + show(v) + " <= " + show(w));
            check(epg::minus(w, v) == [&] {
                VertexSet r;
                for (auto u : w)
                    if (!v.count(u)) r.insert(u);
                return r;
            }(), "minus");
        }
    }
    return res;
}

}  // namespace epg_test
