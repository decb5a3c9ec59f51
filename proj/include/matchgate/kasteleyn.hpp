#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/signature.hpp"
#include "matchgate/skew.hpp"

namespace matchgate {

/// Plane graph with a chosen direction per edge. The invariant is the
/// Pfaffian orientation condition: every inner face has an odd number of
/// clockwise oriented edges. A chosen direction dart is clockwise on a face
/// exactly when that face lies to the dart's right, i.e. when the face walk
/// (which keeps its face on the left) contains the reversed dart.
struct OrientedPlaneGraph {
    PlaneGraph base;
    std::map<std::pair<int, int>, bool> low_to_high;  // key u < v; true = directed u -> v

    bool directed_low_to_high(int u, int v) const { return low_to_high.at(edge_key(u, v)); }

    Dart direction(int u, int v) const {
        auto key = edge_key(u, v);
        return low_to_high.at(key) ? Dart{key.first, key.second} : Dart{key.second, key.first};
    }
};

namespace detail {

/// Number of clockwise oriented edges seen along one face walk: darts in the
/// walk whose edge is directed against the walk. A bridge contributes both
/// darts to the walk and always counts exactly once.
inline int clockwise_count(const OrientedPlaneGraph& h, const std::vector<Dart>& walk) {
    int count = 0;
    for (const Dart& d : walk)
        if (h.direction(d.first, d.second) != d) ++count;
    return count;
}

}  // namespace detail

inline bool verify_kasteleyn(const OrientedPlaneGraph& h) {
    FaceSet fs = faces(h.base);
    for (std::size_t i = 0; i < fs.walks.size(); ++i) {
        if (static_cast<int>(i) == fs.outer_index) continue;
        if (detail::clockwise_count(h, fs.walks[i]) % 2 == 0) return false;
    }
    return true;
}

/// Constructs a Pfaffian orientation: orient a spanning tree low-to-high
/// (this covers every bridge), then peel inner faces of the dual tree formed
/// by the non-tree edges, each face fixing its one undecided edge so its
/// clockwise count becomes odd.
inline OrientedPlaneGraph kasteleyn_orient(const PlaneGraph& g) {
    if (!is_connected(g))
        throw std::invalid_argument("kasteleyn_orient requires a connected graph; preprocess first");

    OrientedPlaneGraph h;
    h.base = g;
    if (g.edges.empty()) return h;

    // Spanning tree by BFS from the smallest node, neighbors in label order.
    std::set<std::pair<int, int>> tree;
    {
        std::set<int> visited;
        std::queue<int> queue;
        queue.push(g.nodes.front());
        visited.insert(g.nodes.front());
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop();
            std::vector<int> nb = g.neighbors(u);
            std::sort(nb.begin(), nb.end());
            for (int v : nb) {
                if (visited.count(v)) continue;
                visited.insert(v);
                tree.insert(edge_key(u, v));
                queue.push(v);
            }
        }
    }
    for (const auto& [key, w] : g.edges) {
        (void)w;
        if (tree.count(key)) h.low_to_high[key] = true;
    }

    FaceSet fs = faces(g);
    const std::size_t nfaces = fs.walks.size();
    std::vector<std::vector<std::pair<int, int>>> undecided(nfaces);
    std::map<std::pair<int, int>, std::vector<std::size_t>> face_of_edge;
    for (std::size_t f = 0; f < nfaces; ++f) {
        for (const Dart& d : fs.walks[f]) {
            auto key = edge_key(d.first, d.second);
            if (!tree.count(key)) face_of_edge[key].push_back(f);
        }
    }
    for (const auto& [key, fsids] : face_of_edge) {
        for (std::size_t f : fsids)
            if (static_cast<int>(f) != fs.outer_index) undecided[f].push_back(key);
    }

    std::queue<std::size_t> ready;
    for (std::size_t f = 0; f < nfaces; ++f)
        if (static_cast<int>(f) != fs.outer_index && undecided[f].size() == 1) ready.push(f);

    std::set<std::pair<int, int>> decided;
    while (!ready.empty()) {
        std::size_t f = ready.front();
        ready.pop();
        std::vector<std::pair<int, int>> pending;
        for (const auto& key : undecided[f])
            if (!decided.count(key) && !h.low_to_high.count(key)) pending.push_back(key);
        if (pending.empty()) continue;
        assert(pending.size() == 1);
        auto key = pending.front();

        // Count clockwise edges from the already decided ones, then orient
        // the last edge to make the count odd.
        int count = 0;
        Dart walk_dart{0, 0};
        for (const Dart& d : fs.walks[f]) {
            auto dk = edge_key(d.first, d.second);
            if (dk == key) {
                walk_dart = d;
                continue;
            }
            if (h.direction(d.first, d.second) != d) ++count;
        }
        // Directing against the walk dart makes this edge clockwise here.
        Dart chosen = (count % 2 == 0) ? reversed(walk_dart) : walk_dart;
        h.low_to_high[key] = chosen.first < chosen.second;
        decided.insert(key);

        for (std::size_t other : face_of_edge[key]) {
            if (other == f || static_cast<int>(other) == fs.outer_index) continue;
            std::size_t left = 0;
            for (const auto& k2 : undecided[other])
                if (!decided.count(k2) && !tree.count(k2)) ++left;
            if (left == 1) ready.push(other);
        }
    }

    assert(h.low_to_high.size() == g.edges.size());
    assert(verify_kasteleyn(h));
    return h;
}

/// Skew adjacency matrix of the oriented graph: A[u,v] = w for a directed
/// edge (u,v), A[v,u] = -w.
inline SkewMatrix skew_of(const OrientedPlaneGraph& h) {
    std::map<std::pair<int, int>, GaussianRational> upper;
    for (const auto& [key, w] : h.base.edges)
        upper[key] = h.low_to_high.at(key) ? w : -w;
    return SkewMatrix(h.base.nodes, std::move(upper));
}

/// The vector (Pf^alpha) of Pfaffians of the skew matrices of all removal
/// subgraphs, under the induced orientations.
struct PfaffianSignature {
    int arity = 0;
    std::vector<GaussianRational> values;

    const GaussianRational& at(std::uint32_t index) const { return values[index]; }
    std::size_t size() const { return values.size(); }
};

inline PfaffianSignature pfaffian_signature(const OrientedPlaneGraph& h) {
    const int k = h.base.arity();
    PfaffianSignature out;
    out.arity = k;
    out.values.resize((std::size_t)1 << k);
    SkewMatrix a = skew_of(h);
    PfaffianEvaluator ev(a);
    for (std::uint32_t index = 0; index < out.values.size(); ++index) {
        RemovalPattern alpha = RemovalPattern::from_index(k, index);
        std::set<int> removed;
        for (int i = 1; i <= k; ++i)
            if (alpha.bit(i)) removed.insert(h.base.externals[static_cast<std::size_t>(i - 1)]);
        std::vector<int> keep;
        for (int v : h.base.nodes)
            if (!removed.count(v)) keep.push_back(v);
        out.values[index] = ev.minor(keep);
    }
    return out;
}

namespace detail {

inline int matching_orientation_sign(const OrientedPlaneGraph& h, const Matching& m) {
    int sign = overlap_sign(m);
    for (auto [u, v] : m)
        if (!h.directed_low_to_high(u, v)) sign = -sign;
    return sign;
}

}  // namespace detail

/// delta(alpha): the ratio between the Pfaffian term and the perfect matching
/// term of any one matching of G^alpha; undefined (nullopt) when G^alpha has
/// no perfect matching. Computed from an explicit witness so it stays defined
/// when cancellation makes Pf^alpha itself zero. Requires a verified Pfaffian
/// orientation, which makes the value independent of the witness.
inline std::optional<int> delta(const OrientedPlaneGraph& h, const RemovalPattern& alpha) {
    PlaneGraph sub = remove_externals(h.base, alpha);
    auto matchings = enumerate_perfect_matchings(sub, 2);
    if (matchings.empty()) return std::nullopt;
    int sign = detail::matching_orientation_sign(h, matchings.front());
#ifndef NDEBUG
    if (matchings.size() > 1)
        assert(sign == detail::matching_orientation_sign(h, matchings[1]) &&
               "delta is not well defined: orientation is not Pfaffian");
#endif
    return sign;
}

inline std::optional<int> delta(const OrientedPlaneGraph& h, std::uint32_t index) {
    return delta(h, RemovalPattern::from_index(h.base.arity(), index));
}

/// Theorem: flipping the bits at two fixed positions i < j changes delta by a
/// factor that does not depend on the surrounding context bits. Checked as
/// the quadruple product delta(ubvcw) delta(ub'vc'w) delta(~ubvc~w)
/// delta(~ub'vc'~w) = 1 over every pair of contexts where all four values are
/// defined. The caller provides a preprocessed, Pfaffian-oriented matchgate.
inline bool check_quadruple_product(const OrientedPlaneGraph& h, int i, int j) {
    const int k = h.base.arity();
    if (!(1 <= i && i < j && j <= k)) throw std::invalid_argument("need 1 <= i < j <= k");
    assert(verify_kasteleyn(h));

    const std::uint32_t bit_i = (std::uint32_t)1 << (k - i);
    const std::uint32_t bit_j = (std::uint32_t)1 << (k - j);

    // Spread a (k-2)-bit context over the positions other than i and j.
    std::vector<std::uint32_t> free_bits;
    for (int p = k; p >= 1; --p) {
        std::uint32_t b = (std::uint32_t)1 << (k - p);
        if (b != bit_i && b != bit_j) free_bits.push_back(b);
    }

    for (std::uint32_t bc : {0u, 1u}) {
        std::uint32_t low = (bc == 0) ? 0 : bit_i;            // (b,c) = (0,0) or (1,0)
        std::uint32_t high = (bc == 0) ? (bit_i | bit_j) : bit_j;
        std::optional<int> reference;
        for (std::uint32_t ctx = 0; ctx < ((std::uint32_t)1 << free_bits.size()); ++ctx) {
            std::uint32_t base = 0;
            for (std::size_t t = 0; t < free_bits.size(); ++t)
                if (ctx >> t & 1) base |= free_bits[t];
            std::optional<int> d1 = delta(h, base | low);
            if (!d1) continue;
            std::optional<int> d2 = delta(h, base | high);
            if (!d2) continue;
            int product = *d1 * *d2;
            if (!reference)
                reference = product;
            else if (*reference != product)
                return false;
        }
    }
    return true;
}

/// Theorem: the Pfaffian signature of a Pfaffian-oriented plane graph
/// satisfies the same quadratic identities as matchgate signatures.
inline bool check_pfaffian_signature_identities(const PfaffianSignature& p) {
    const std::uint32_t n = static_cast<std::uint32_t>(p.size());
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (a != b && !detail::mgi_residual(p.values, p.arity, a, b).is_zero()) return false;
    return true;
}

}  // namespace matchgate
