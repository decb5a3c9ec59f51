#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/realize.hpp"
#include "matchgate/signature.hpp"
#include "matchgate/skew.hpp"
#include "matchgate/symmetric.hpp"

namespace matchgate {

/// General (not necessarily planar) matchgate: a labeled weighted graph with
/// input nodes X, output nodes Y and omittable nodes T. Labels obey
/// X < T < Y; the remaining nodes U may be interspersed anywhere.
struct GeneralMatchgate {
    std::vector<int> nodes;                                 // ascending
    std::map<std::pair<int, int>, GaussianRational> edges;  // key u < v, weight != 0
    std::vector<int> inputs;     // X, ascending
    std::vector<int> outputs;    // Y, ascending
    std::vector<int> omittable;  // T, ascending

    bool has_node(int v) const { return std::binary_search(nodes.begin(), nodes.end(), v); }

    /// X then Y; thanks to the label ordering this is ascending label order.
    std::vector<int> externals() const {
        std::vector<int> out = inputs;
        out.insert(out.end(), outputs.begin(), outputs.end());
        return out;
    }
    int arity() const { return static_cast<int>(inputs.size() + outputs.size()); }

    void add_node(int v) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
        if (it == nodes.end() || *it != v) nodes.insert(it, v);
    }
    void add_edge(int u, int v, GaussianRational w) { edges[edge_key(u, v)] = std::move(w); }

    void validate() const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i] <= 0) throw std::invalid_argument("node labels must be positive");
            if (i > 0 && nodes[i] <= nodes[i - 1])
                throw std::invalid_argument("node list not strictly ascending");
        }
        for (const auto& [key, w] : edges) {
            if (key.first >= key.second) throw std::invalid_argument("edge key not ordered");
            if (!has_node(key.first) || !has_node(key.second))
                throw std::invalid_argument("edge endpoint not a node");
            if (w.is_zero()) throw std::invalid_argument("zero-weight edge");
        }
        std::set<int> seen;
        for (const auto* group : {&inputs, &outputs, &omittable}) {
            for (std::size_t i = 0; i < group->size(); ++i) {
                int v = (*group)[i];
                if (!has_node(v)) throw std::invalid_argument("designated node not in graph");
                if (!seen.insert(v).second)
                    throw std::invalid_argument("input/output/omittable sets must be disjoint");
                if (i > 0 && (*group)[i] <= (*group)[i - 1])
                    throw std::invalid_argument("designated node list not ascending");
            }
        }
        for (int x : inputs)
            for (int t : omittable)
                if (x >= t) throw std::invalid_argument("inputs must precede omittable nodes");
        for (int t : omittable)
            for (int y : outputs)
                if (t >= y) throw std::invalid_argument("omittable nodes must precede outputs");
        for (int x : inputs)
            for (int y : outputs)
                if (x >= y) throw std::invalid_argument("inputs must precede outputs");
    }
};

/// Canonical skew matrix of an undirected labeled graph: M[i,j] = w({i,j})
/// for i < j, absent edges zero.
inline SkewMatrix canonical_skew(const std::vector<int>& nodes,
                                 const std::map<std::pair<int, int>, GaussianRational>& edges) {
    return SkewMatrix(nodes, edges);
}

inline GaussianRational pfaffian_of_graph(const std::vector<int>& nodes,
                                          const std::map<std::pair<int, int>, GaussianRational>& edges) {
    return pfaffian(canonical_skew(nodes, edges));
}

inline GaussianRational pfaffian_of_graph(const GeneralMatchgate& g) {
    return pfaffian_of_graph(g.nodes, g.edges);
}

namespace detail {

inline std::set<int> removal_set(const GeneralMatchgate& g, const RemovalPattern& alpha) {
    std::vector<int> ext = g.externals();
    if (alpha.arity != static_cast<int>(ext.size()))
        throw std::invalid_argument("pattern arity does not match |X| + |Y|");
    std::set<int> removed;
    for (int i = 1; i <= alpha.arity; ++i)
        if (alpha.bit(i)) removed.insert(ext[static_cast<std::size_t>(i - 1)]);
    return removed;
}

/// Embedding-free skeleton used for matching searches.
inline PlaneGraph skeleton_without(const GeneralMatchgate& g, const std::set<int>& removed) {
    PlaneGraph out;
    for (int v : g.nodes)
        if (!removed.count(v)) out.nodes.push_back(v);
    for (const auto& [key, w] : g.edges)
        if (!removed.count(key.first) && !removed.count(key.second)) out.edges[key] = w;
    return out;
}

}  // namespace detail

/// PfS(G) = sum over all subsets W of the omittable nodes of Pf(G - W).
inline GaussianRational pfaffian_sum(const GeneralMatchgate& g, const std::set<int>& removed = {}) {
    SkewMatrix m = canonical_skew(g.nodes, g.edges);
    PfaffianEvaluator ev(m);
    const std::size_t t = g.omittable.size();
    GaussianRational sum;
    for (std::uint32_t w = 0; w < ((std::uint32_t)1 << t); ++w) {
        std::set<int> gone = removed;
        for (std::size_t s = 0; s < t; ++s)
            if (w >> s & 1) gone.insert(g.omittable[s]);
        std::vector<int> keep;
        for (int v : g.nodes)
            if (!gone.count(v)) keep.push_back(v);
        sum += ev.minor(keep);
    }
    return sum;
}

/// Naked character: the PfaffianSum of G - Z, with Z the external subset
/// selected by alpha.
inline GaussianRational naked_character(const GeneralMatchgate& g, const RemovalPattern& alpha) {
    return pfaffian_sum(g, detail::removal_set(g, alpha));
}

/// Modifier value: with external edges running from Z-inputs to nested
/// virtual nodes below all labels and from Z-outputs to nested virtual nodes
/// above, the overlap parity reduces to straddle counts. mu = (-1)^p where
/// p sums, over z in Z, the matched edges {x,y} of one witness matching with
/// x < z < y. When no removal subgraph over any omittable subset has a
/// perfect matching, mu is +1 by convention (the character is then 0).
inline int modifier(const GeneralMatchgate& g, const RemovalPattern& alpha) {
    std::set<int> z_set = detail::removal_set(g, alpha);
    const std::size_t t = g.omittable.size();
    std::optional<int> value;
    for (std::uint32_t w = 0; w < ((std::uint32_t)1 << t); ++w) {
        std::set<int> gone = z_set;
        for (std::size_t s = 0; s < t; ++s)
            if (w >> s & 1) gone.insert(g.omittable[s]);
        PlaneGraph skeleton = detail::skeleton_without(g, gone);
#ifndef NDEBUG
        auto matchings = enumerate_perfect_matchings(skeleton, 2);
#else
        auto matchings = enumerate_perfect_matchings(skeleton, 1);
#endif
        for (const Matching& m : matchings) {
            int straddles = 0;
            for (int z : z_set)
                for (auto [x, y] : m)
                    if (x < z && z < y) ++straddles;
            int sign = straddles % 2 == 0 ? 1 : -1;
            if (!value) {
                value = sign;
#ifdef NDEBUG
                return sign;
#endif
            } else {
                assert(*value == sign && "modifier is not independent of the witness matching");
            }
        }
    }
    return value.value_or(1);
}

inline GaussianRational character(const GeneralMatchgate& g, const RemovalPattern& alpha) {
    GaussianRational naked = naked_character(g, alpha);
    if (naked.is_zero()) return naked;
    int mu = modifier(g, alpha);
    return mu > 0 ? naked : -naked;
}

/// chi^alpha and naked chi^alpha over all 2^(|X|+|Y|) removal patterns.
struct CharacterVector {
    int arity = 0;
    std::vector<GaussianRational> naked;
    std::vector<GaussianRational> modified;
};

inline CharacterVector character_vector(const GeneralMatchgate& g) {
    CharacterVector out;
    out.arity = g.arity();
    const std::uint32_t n = (std::uint32_t)1 << out.arity;
    out.naked.resize(n);
    out.modified.resize(n);
    for (std::uint32_t a = 0; a < n; ++a) {
        RemovalPattern alpha = RemovalPattern::from_index(out.arity, a);
        out.naked[a] = naked_character(g, alpha);
        out.modified[a] = character(g, alpha);
    }
    return out;
}

/// The two planar matchgates of the equivalence theorem: the naked character
/// of G splits as the sum of their signatures, chi^alpha = G1^alpha + G2^alpha.
struct CharacterSplit {
    PlaneGraph g1;  // parity gadget H attached: catches even node-count patterns
    PlaneGraph g2;  // parity gadget H' attached: catches odd node-count patterns
};

namespace detail {

/// Attach an arity-t parity gadget to the omittable nodes on the outer side
/// of the arc: omittable node s is wired to gadget external t+1-s so the
/// connecting edges nest without crossing.
inline PlaneGraph attach_parity_gadget(const PlaneGraph& planarized,
                                       const std::vector<int>& omittable_nodes,
                                       const PlaneGraph& gadget,
                                       const std::vector<int>& new_externals) {
    const int offset = std::max(planarized.max_label(), gadget.max_label());
    std::map<int, int> shift;
    for (int v : gadget.nodes) shift[v] = v + offset;
    PlaneGraph moved = relabel_nodes(gadget, shift);

    // Corners planned on the untouched halves: omittable nodes at their
    // matched slots of the planarized outer walk, gadget externals likewise.
    std::map<int, int> arc_corners = plan_external_corners(planarized, planarized.externals);
    std::map<int, int> gadget_corners = plan_external_corners(moved, moved.externals);

    PlaneGraph out = planarized;
    out.externals.clear();
    out = merge_disjoint(out, moved);
    out.externals = new_externals;

    auto corner = [](const std::map<int, int>& corners, int v) {
        std::optional<int> arrival;
        if (auto it = corners.find(v); it != corners.end()) arrival = it->second;
        return arrival;
    };
    const std::size_t t = omittable_nodes.size();
    for (std::size_t s = 0; s < t; ++s) {
        int arc_node = omittable_nodes[s];
        int gadget_node = moved.externals[t - 1 - s];
        insert_at_corner(out, arc_node, corner(arc_corners, arc_node), gadget_node);
        insert_at_corner(out, gadget_node, corner(gadget_corners, gadget_node), arc_node);
        out.add_edge(arc_node, gadget_node, GaussianRational(1));
    }

    // The wires pocket off parts of the old outer face along the omittable
    // run (the old outer dart may now lie inside a pocket), but the X and Y
    // externals sit outside that run, so their corners still bound the
    // unbounded face. Re-designate the outer dart there.
    for (int e : new_externals) {
        if (auto a = corner(arc_corners, e)) {
            out.outer = Dart{*a, e};
            break;
        }
    }
    out.validate();
    return out;
}

}  // namespace detail

/// Semicircle construction: place all nodes of G on an arc in label order,
/// planarize the chord crossings with crossover gadgets, treat X, T and Y as
/// externals of the intermediate graph, then absorb the omittable nodes with
/// an even parity gadget (G1) and an odd one (G2).
inline CharacterSplit character_to_signatures(const GeneralMatchgate& g) {
    std::vector<int> intermediate_externals;
    {
        std::set<int> ext(g.inputs.begin(), g.inputs.end());
        ext.insert(g.outputs.begin(), g.outputs.end());
        ext.insert(g.omittable.begin(), g.omittable.end());
        intermediate_externals.assign(ext.begin(), ext.end());
    }
    PlanarizedGraph planar = detail::planarize_chords(g.nodes, g.edges, intermediate_externals);
    planar.graph.validate();

    const int t = static_cast<int>(g.omittable.size());
    CharacterSplit out;
    if (t == 0) {
        out.g1 = planar.graph;
        out.g1.externals = g.externals();
        out.g1.validate();
        out.g2 = detail::zero_matchgate(g.arity());
    } else {
        out.g1 = detail::attach_parity_gadget(planar.graph, g.omittable,
                                              parity_gadget(t, GadgetParity::Even), g.externals());
        out.g2 = detail::attach_parity_gadget(planar.graph, g.omittable,
                                              parity_gadget(t, GadgetParity::Odd), g.externals());
    }
    return out;
}

}  // namespace matchgate
