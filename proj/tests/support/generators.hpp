#pragma once

// Shared test fixtures: seeded random instances and the independent oracles
// the unit and acceptance suites check the library against. Everything here
// is test-only and must stay independent of the implementation paths under
// test (the Pfaffian oracle enumerates pair partitions, the determinant does
// plain elimination).

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "matchgate/matchgate.hpp"

namespace testsupport {

using matchgate::Dart;
using matchgate::FaceSet;
using matchgate::GaussianRational;
using matchgate::GeneralMatchgate;
using matchgate::PlaneGraph;
using matchgate::SkewMatrix;

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

inline GaussianRational random_gaussian(Rng& rng, bool allow_zero = false) {
    for (;;) {
        mpq_class re(pick(rng, 9) - 4, pick(rng, 4) + 1);
        mpq_class im(0);
        if (pick(rng, 3) == 0) im = mpq_class(pick(rng, 7) - 3, pick(rng, 3) + 1);
        GaussianRational w{re, im};
        if (allow_zero || !w.is_zero()) return w;
    }
}

// ---------------------------------------------------------------------------
// Random plane matchgates: a clockwise cycle with chords split into faces,
// plus pendant nodes and paths, all with random nonzero weights.

struct MatchgateOptions {
    int arity_max = 5;
    int mutations_max = 7;
    bool allow_relabel = true;
};

inline PlaneGraph random_plane_matchgate(Rng& rng, const MatchgateOptions& opt = {}) {
    const int k = pick(rng, opt.arity_max + 1);
    const int cycle = std::max(3, k) + pick(rng, 4);

    PlaneGraph g;
    for (int v = 1; v <= cycle; ++v) g.add_node(v);
    for (int v = 1; v <= cycle; ++v) {
        int next = v == cycle ? 1 : v + 1;
        g.add_edge(v, next, random_gaussian(rng));
        g.rotation[v] = {v == 1 ? cycle : v - 1, next};
    }
    g.outer = Dart{1, 2};

    // Externals: an ascending sample of cycle nodes, which is their clockwise
    // order on the outer walk.
    {
        std::vector<int> all(static_cast<std::size_t>(cycle));
        for (int v = 1; v <= cycle; ++v) all[static_cast<std::size_t>(v - 1)] = v;
        for (int i = 0; i < k; ++i) {
            int j = pick(rng, static_cast<int>(all.size()));
            g.externals.push_back(all[static_cast<std::size_t>(j)]);
            all.erase(all.begin() + j);
        }
        std::sort(g.externals.begin(), g.externals.end());
    }

    const int mutations = pick(rng, opt.mutations_max + 1);
    for (int m = 0; m < mutations; ++m) {
        FaceSet fs = matchgate::faces(g);
        int op = pick(rng, 10);
        if (op < 5) {
            // Chord inside an inner face.
            std::vector<std::size_t> inner;
            for (std::size_t f = 0; f < fs.walks.size(); ++f)
                if (static_cast<int>(f) != fs.outer_index && fs.walks[f].size() >= 4) inner.push_back(f);
            if (inner.empty()) continue;
            const auto& walk = fs.walks[inner[static_cast<std::size_t>(pick(rng, static_cast<int>(inner.size())))]];
            Dart du = walk[static_cast<std::size_t>(pick(rng, static_cast<int>(walk.size())))];
            Dart dv = walk[static_cast<std::size_t>(pick(rng, static_cast<int>(walk.size())))];
            int u = du.second, v = dv.second;
            if (u == v || g.has_edge(u, v)) continue;
            matchgate::insert_at_corner(g, u, du.first, v);
            matchgate::insert_at_corner(g, v, dv.first, u);
            g.add_edge(u, v, random_gaussian(rng));
        } else {
            // Pendant node (sometimes a length-two path) inside any face.
            const auto& walk = fs.walks[static_cast<std::size_t>(pick(rng, static_cast<int>(fs.walks.size())))];
            Dart d = walk[static_cast<std::size_t>(pick(rng, static_cast<int>(walk.size())))];
            int x = g.max_label() + 1;
            matchgate::insert_at_corner(g, d.second, d.first, x);
            g.add_node(x);
            g.rotation[x] = {d.second};
            g.add_edge(d.second, x, random_gaussian(rng));
            if (op >= 8) {
                int y = x + 1;
                g.add_node(y);
                g.rotation[x].push_back(y);
                g.rotation[y] = {x};
                g.add_edge(x, y, random_gaussian(rng));
            }
        }
    }

    if (opt.allow_relabel && pick(rng, 3) == 0) {
        std::map<int, int> remap;
        int next = 1;
        for (int v : g.nodes) {
            next += pick(rng, 3);
            remap[v] = next++;
        }
        g = matchgate::relabel_nodes(g, remap);
    }

    g.validate();
    return g;
}

/// Two disjoint matchgates merged into one (relabeled apart); externals of
/// the first component come first.
inline PlaneGraph random_disconnected_matchgate(Rng& rng, const MatchgateOptions& opt = {}) {
    MatchgateOptions half = opt;
    half.arity_max = std::max(1, opt.arity_max / 2);
    half.allow_relabel = false;
    PlaneGraph a = random_plane_matchgate(rng, half);
    PlaneGraph b = random_plane_matchgate(rng, half);
    std::map<int, int> shift;
    for (int v : b.nodes) shift[v] = v + a.max_label();
    return matchgate::merge_disjoint(a, matchgate::relabel_nodes(b, shift));
}

// ---------------------------------------------------------------------------
// Random skew matrices and general matchgates.

inline SkewMatrix random_skew(Rng& rng, int n, bool non_consecutive_labels = false) {
    std::vector<int> labels;
    int next = 1;
    for (int i = 0; i < n; ++i) {
        if (non_consecutive_labels) next += pick(rng, 3);
        labels.push_back(next++);
    }
    std::map<std::pair<int, int>, GaussianRational> upper;
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if (pick(rng, 5) != 0) upper[{labels[i], labels[j]}] = random_gaussian(rng);
    return SkewMatrix(labels, std::move(upper));
}

inline GeneralMatchgate random_general_matchgate(Rng& rng, int max_nodes = 8, int max_omittable = 3) {
    const int n = 3 + pick(rng, max_nodes - 2);
    const int x = pick(rng, 3);
    const int t = pick(rng, max_omittable + 1);
    const int y = pick(rng, 3);
    GeneralMatchgate g;
    for (int v = 1; v <= n; ++v) g.add_node(v);
    if (x + t + y <= n) {
        std::vector<int> all;
        for (int v = 1; v <= n; ++v) all.push_back(v);
        std::vector<int> chosen;
        for (int i = 0; i < x + t + y; ++i) {
            int j = pick(rng, static_cast<int>(all.size()));
            chosen.push_back(all[static_cast<std::size_t>(j)]);
            all.erase(all.begin() + j);
        }
        std::sort(chosen.begin(), chosen.end());
        g.inputs.assign(chosen.begin(), chosen.begin() + x);
        g.omittable.assign(chosen.begin() + x, chosen.begin() + x + t);
        g.outputs.assign(chosen.begin() + x + t, chosen.end());
    }
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (pick(rng, 9) < 4) g.add_edge(u, v, random_gaussian(rng));
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Independent oracles.

/// Definitional Pfaffian: the signed sum over all pair partitions of the
/// label set, signs by overlap parity.
inline GaussianRational pfaffian_by_partitions(const SkewMatrix& m) {
    const std::vector<int>& labels = m.labels();
    if (labels.size() % 2 == 1) return GaussianRational();
    if (labels.empty()) return GaussianRational(1);

    GaussianRational total;
    std::vector<int> rest(labels.begin(), labels.end());
    matchgate::PairPartition pairs;
    auto rec = [&](auto&& self) -> void {
        if (rest.empty()) {
            GaussianRational term(1);
            for (auto [u, v] : pairs) term *= m.at(u, v);
            if (!term.is_zero()) {
                total += matchgate::overlap_sign(pairs) > 0 ? term : -term;
            }
            return;
        }
        int first = rest.front();
        for (std::size_t j = 1; j < rest.size(); ++j) {
            int partner = rest[j];
            std::vector<int> saved = rest;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
            rest.erase(rest.begin());
            pairs.emplace_back(first, partner);
            self(self);
            pairs.pop_back();
            rest = std::move(saved);
        }
    };
    rec(rec);
    return total;
}

/// Exact determinant by plain Gaussian elimination over Q(i).
inline GaussianRational determinant(const SkewMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<GaussianRational>> a(n, std::vector<GaussianRational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m.at(m.labels()[i], m.labels()[j]);

    GaussianRational det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return GaussianRational();
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        GaussianRational inv = a[col][col].inv();
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col].is_zero()) continue;
            GaussianRational factor = a[row][col] * inv;
            for (std::size_t j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    return det;
}

/// The example graph used throughout: an inner 4-cycle 1-2-3-4 with one
/// external tip on each side (5 top, 6 right, 7 bottom, 8 left), arrows as
/// printed, externals 5,6,7,8 clockwise.
inline matchgate::OrientedPlaneGraph oriented_square_with_tips() {
    PlaneGraph g;
    for (int v = 1; v <= 8; ++v) g.add_node(v);
    GaussianRational one(1);
    const int edges[12][2] = {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 5}, {2, 5},
                              {2, 6}, {3, 6}, {3, 7}, {4, 7}, {4, 8}, {8, 1}};
    for (const auto& e : edges) g.add_edge(e[0], e[1], one);
    g.rotation[1] = {2, 5, 8, 4};
    g.rotation[2] = {5, 1, 3, 6};
    g.rotation[3] = {6, 2, 4, 7};
    g.rotation[4] = {3, 1, 8, 7};
    g.rotation[5] = {1, 2};
    g.rotation[6] = {2, 3};
    g.rotation[7] = {3, 4};
    g.rotation[8] = {1, 4};
    g.outer = Dart{5, 2};
    g.externals = {5, 6, 7, 8};
    g.validate();

    matchgate::OrientedPlaneGraph h;
    h.base = std::move(g);
    for (const auto& [key, w] : h.base.edges) {
        (void)w;
        h.low_to_high[key] = true;
    }
    h.low_to_high[matchgate::edge_key(1, 8)] = false;  // the one high-to-low arrow
    return h;
}

}  // namespace testsupport
