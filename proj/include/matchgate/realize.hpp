#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/signature.hpp"
#include "matchgate/skew.hpp"

namespace matchgate {

/// The 6-node planar crossing gadget: externals 1,2,3,4 clockwise around a
/// hexagonal ring 1-2-g2-3-4-g1 with inner chord {g1,g2} of weight -1 (g1 is
/// node 5, g2 is node 6). Its signature is 1 on 0000, 0101 and 1010, -1 on
/// 1111 and 0 elsewhere, so splicing it into an edge crossing lets matchings
/// pass straight through while unmatched crossings cancel.
inline PlaneGraph crossover_gadget() {
    PlaneGraph g;
    const int g1 = 5, g2 = 6;
    for (int v = 1; v <= 6; ++v) g.add_node(v);
    GaussianRational one(1);
    g.add_edge(1, 2, one);
    g.add_edge(2, g2, one);
    g.add_edge(g2, 3, one);
    g.add_edge(3, 4, one);
    g.add_edge(4, g1, one);
    g.add_edge(g1, 1, one);
    g.add_edge(g1, g2, GaussianRational(-1));
    g.rotation[1] = {2, g1};
    g.rotation[2] = {1, g2};
    g.rotation[3] = {g2, 4};
    g.rotation[4] = {3, g1};
    g.rotation[g1] = {g2, 1, 4};
    g.rotation[g2] = {2, g1, 3};
    g.outer = Dart{1, 2};
    g.externals = {1, 2, 3, 4};
    return g;
}

/// Complete graph on k labeled nodes placed on a convex curve in clockwise
/// label order, with one weight per chord. Chords {u,v} and {x,y} cross in
/// the drawing exactly when their labels overlap (u<x<v<y or x<u<y<v), giving
/// one crossing per 4-subset {a<b<c<d} (chords {a,c} and {b,d}).
struct ConvexCompleteGraph {
    int k = 0;
    std::map<std::pair<int, int>, GaussianRational> weights;  // key i < j

    /// Weights from a normalized signature: w({i,j}) = Gamma'^([k]-{i,j}).
    static ConvexCompleteGraph from_signature(const SignatureVector& normalized) {
        ConvexCompleteGraph out;
        out.k = normalized.arity;
        const std::uint32_t full = ((std::uint32_t)1 << out.k) - 1;
        for (int i = 1; i <= out.k; ++i) {
            for (int j = i + 1; j <= out.k; ++j) {
                std::uint32_t index =
                    full ^ ((std::uint32_t)1 << (out.k - i)) ^ ((std::uint32_t)1 << (out.k - j));
                out.weights[{i, j}] = normalized.at(index);
            }
        }
        return out;
    }

    std::vector<std::array<int, 4>> crossings() const {
        std::vector<std::array<int, 4>> out;
        for (int a = 1; a <= k; ++a)
            for (int b = a + 1; b <= k; ++b)
                for (int c = b + 1; c <= k; ++c)
                    for (int d = c + 1; d <= k; ++d) out.push_back({a, b, c, d});
        return out;
    }
};

struct GadgetInfo {
    std::array<int, 4> crossing;  // {a < b < c < d}: chords {a,c} and {b,d}
    std::array<int, 4> ports;     // port nodes facing a, b, c, d
    std::array<int, 2> inner;     // the two internal gadget nodes
};

struct PlanarizedGraph {
    PlaneGraph graph;
    // Non-gadget edges, chord by chord: the i-j-passages. Their disjoint
    // union is the edge set I outside all gadget copies.
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> passages;
    std::vector<GadgetInfo> gadgets;
};

namespace detail {

/// Planarize a set of weighted chords between nodes placed on a convex arc in
/// ascending label order (clockwise). Every crossing becomes a crossover
/// gadget copy; each chord turns into a passage whose edge adjacent to the
/// lower endpoint carries the chord weight, all other passage edges weight 1.
inline PlanarizedGraph planarize_chords(const std::vector<int>& arc,
                                        const std::map<std::pair<int, int>, GaussianRational>& chords,
                                        const std::vector<int>& externals) {
    PlanarizedGraph out;
    PlaneGraph& g = out.graph;
    for (int v : arc) g.add_node(v);
    g.externals = externals;

    std::map<int, int> pos;
    for (std::size_t i = 0; i < arc.size(); ++i) pos[arc[i]] = static_cast<int>(i);
    const int n = static_cast<int>(arc.size());

    std::map<std::pair<int, int>, GaussianRational> active;
    for (const auto& [key, w] : chords)
        if (!w.is_zero()) active.emplace(key, w);

    auto overlaps = [&](std::pair<int, int> e, std::pair<int, int> f) {
        int a = pos.at(e.first), b = pos.at(e.second), c = pos.at(f.first), d = pos.at(f.second);
        return (a < c && c < b && b < d) || (c < a && a < d && d < b);
    };

    // One gadget per crossing pair, numbered in lexicographic chord order.
    int next_label = arc.empty() ? 1 : arc.back() + 1;
    std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, std::size_t> gadget_at;
    for (auto it = active.begin(); it != active.end(); ++it) {
        for (auto jt = std::next(it); jt != active.end(); ++jt) {
            if (!overlaps(it->first, jt->first)) continue;
            // Sorted positions {a < b < c < d}; the chords are {a,c} and {b,d}.
            std::array<int, 4> q = {it->first.first, it->first.second, jt->first.first,
                                    jt->first.second};
            std::sort(q.begin(), q.end(), [&](int x, int y) { return pos.at(x) < pos.at(y); });
            GadgetInfo info;
            info.crossing = q;
            info.ports = {next_label, next_label + 1, next_label + 2, next_label + 3};
            info.inner = {next_label + 4, next_label + 5};
            next_label += 6;
            gadget_at[{it->first, jt->first}] = out.gadgets.size();
            gadget_at[{jt->first, it->first}] = out.gadgets.size();
            out.gadgets.push_back(info);
        }
    }

    // Ring and chord of each gadget copy; rotations get the passage stubs
    // appended once the passages are wired.
    GaussianRational one(1);
    for (const GadgetInfo& info : out.gadgets) {
        auto [p1, p2, p3, p4] = info.ports;
        auto [i1, i2] = info.inner;
        for (int v : {p1, p2, p3, p4, i1, i2}) g.add_node(v);
        g.add_edge(p1, p2, one);
        g.add_edge(p2, i2, one);
        g.add_edge(i2, p3, one);
        g.add_edge(p3, p4, one);
        g.add_edge(p4, i1, one);
        g.add_edge(i1, p1, one);
        g.add_edge(i1, i2, GaussianRational(-1));
        g.rotation[i1] = {i2, p1, p4};
        g.rotation[i2] = {p2, i1, p3};
    }

    // Crossing order along each chord comes from exact coordinates on a
    // strictly convex curve (nodes at (x_p, x_p^2)): combinatorial rules on
    // the endpoint labels alone cannot order the crossings of three pairwise
    // crossing chords. Interleaving chords never have equal slope sums, so
    // the intersection abscissa is always defined; the rare concurrency of
    // three chords is resolved by deterministically retrying with perturbed
    // node positions until every chord sees distinct crossing points.
    std::vector<mpq_class> xs(static_cast<std::size_t>(n));
    std::map<std::pair<int, int>, std::vector<std::pair<mpq_class, std::pair<int, int>>>> lines;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 32) throw EmbeddingError("could not find concurrency-free node positions");
        mpq_class spread(1, (n + 3) * (n + 3) * (n + 3) * (attempt + 1));
        for (int p = 0; p < n; ++p) {
            long t = p + 1;
            xs[static_cast<std::size_t>(p)] = mpq_class(t) + mpq_class(t * t * t) * spread;
        }
        auto chord_line = [&](const std::pair<int, int>& c) {
            const mpq_class& xa = xs[static_cast<std::size_t>(pos.at(c.first))];
            const mpq_class& xb = xs[static_cast<std::size_t>(pos.at(c.second))];
            return std::make_pair(xa + xb, xa * xb);  // y = s x - p
        };
        lines.clear();
        bool ties = false;
        for (const auto& [chord, w] : active) {
            (void)w;
            auto [s1, p1] = chord_line(chord);
            auto& line = lines[chord];
            for (const auto& [other, w2] : active) {
                (void)w2;
                if (other == chord || !overlaps(chord, other)) continue;
                auto [s2, p2] = chord_line(other);
                line.emplace_back(mpq_class((p1 - p2) / (s1 - s2)), other);
            }
            std::sort(line.begin(), line.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t t = 0; t + 1 < line.size(); ++t)
                if (line[t].first == line[t + 1].first) ties = true;
        }
        if (!ties) break;
    }

    std::map<int, std::vector<std::pair<int, int>>> hull_stub;  // hull node -> (partner, neighbor)
    for (const auto& [chord, w] : active) {
        int u = chord.first, v = chord.second;
        if (pos.at(u) > pos.at(v)) std::swap(u, v);
        struct Crossing {
            std::pair<int, int> other;
            std::size_t gid;
        };
        std::vector<Crossing> line;
        for (const auto& [x, other] : lines.at(chord)) {
            (void)x;
            line.push_back({other, gadget_at.at({chord, other})});
        }

        // Entry/exit ports seen travelling u -> v: ports face the sorted
        // crossing corners (a,b,c,d), so the chord {a,c} runs port1 -> port3
        // and the chord {b,d} runs port2 -> port4.
        std::vector<int> points;
        points.push_back(u);
        for (const Crossing& c : line) {
            const GadgetInfo& info = out.gadgets[c.gid];
            bool low_chord = info.crossing[0] == u;
            points.push_back(low_chord ? info.ports[0] : info.ports[1]);
            points.push_back(low_chord ? info.ports[2] : info.ports[3]);
        }
        points.push_back(v);

        std::vector<std::pair<int, int>>& passage = out.passages[chord];
        for (std::size_t t = 0; t + 1 < points.size(); t += 2) {
            int x = points[t], y = points[t + 1];
            g.add_edge(x, y, t == 0 ? w : one);
            passage.emplace_back(x, y);
        }
        hull_stub[u].emplace_back(v, points[1]);
        hull_stub[v].emplace_back(u, points[points.size() - 2]);

        // Port rotations, with the stub at each port pointing along the
        // passage: derived from the crossover drawing, CCW.
        for (std::size_t t = 0; t < line.size(); ++t) {
            const GadgetInfo& info = out.gadgets[line[t].gid];
            auto [p1, p2, p3, p4] = info.ports;
            auto [i1, i2] = info.inner;
            bool low_chord = info.crossing[0] == u;
            int in_stub = points[2 * t];       // neighbor before the entry port
            int out_stub = points[2 * t + 3];  // neighbor after the exit port
            if (low_chord) {
                g.rotation[p1] = {p2, in_stub, i1};
                g.rotation[p3] = {i2, p4, out_stub};
            } else {
                g.rotation[p2] = {in_stub, p1, i2};
                g.rotation[p4] = {p3, i1, out_stub};
            }
        }
    }

    // Hull rotations: chords leave a convex-position node in clockwise order
    // of their far endpoints, so the CCW rotation is that fan reversed.
    for (auto& [v, stubs] : hull_stub) {
        std::sort(stubs.begin(), stubs.end(), [&](const auto& a, const auto& b) {
            int ra = (pos.at(a.first) - pos.at(v) - 1 + n) % n;
            int rb = (pos.at(b.first) - pos.at(v) - 1 + n) % n;
            return ra > rb;
        });
        std::vector<int> rot;
        for (auto& [partner, nb] : stubs) {
            (void)partner;
            rot.push_back(nb);
        }
        g.rotation[v] = std::move(rot);
    }

    // Outer dart: from the first hull node with an edge toward its most
    // clockwise-adjacent partner, the unbounded face lies on the left.
    for (int v : arc) {
        auto it = hull_stub.find(v);
        if (it == hull_stub.end()) continue;
        g.outer = Dart{v, it->second.back().second};
        break;
    }
    return out;
}

}  // namespace detail

/// Planarization of the weighted convex K_k: every crossing replaced by a
/// fresh crossover gadget copy; zero-weight chords are dropped (a zero
/// weighted edge contributes nothing and can be deleted).
inline PlanarizedGraph planarize_convex(const ConvexCompleteGraph& K) {
    std::vector<int> arc(static_cast<std::size_t>(K.k));
    for (int i = 0; i < K.k; ++i) arc[static_cast<std::size_t>(i)] = i + 1;
    PlanarizedGraph out = detail::planarize_chords(arc, K.weights, arc);
    out.graph.validate();
    return out;
}

/// Gamma^alpha := Pf(M^alpha), the Pfaffian of M with the rows and columns
/// selected by alpha removed. Every vector of this form satisfies the
/// Matchgate Identities, and Gamma^(1..1) = 1.
inline SignatureVector generate_mgi_vector(const SkewMatrix& m) {
    const int k = static_cast<int>(m.size());
    if (k > 24) throw std::invalid_argument("generate_mgi_vector: arity too large");
    SignatureVector out = SignatureVector::zeros(k);
    PfaffianEvaluator ev(m);
    for (std::uint32_t index = 0; index < out.size(); ++index) {
        std::vector<int> keep;
        for (int i = 1; i <= k; ++i)
            if (!(index >> (k - i) & 1)) keep.push_back(m.labels()[static_cast<std::size_t>(i - 1)]);
        out.at(index) = ev.minor(keep);
    }
    return out;
}

struct NormalizedSignature {
    SignatureVector gamma;      // Gamma'^alpha = Gamma^(alpha xor ~beta) / s, Gamma'^(1..1) = 1
    std::uint32_t beta = 0;     // lexicographically least index with Gamma^beta != 0
    GaussianRational scale;     // s = Gamma^beta
};

inline NormalizedSignature normalize(const SignatureVector& s) {
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    std::optional<std::uint32_t> beta;
    for (std::uint32_t a = 0; a < n; ++a) {
        if (!s.at(a).is_zero()) {
            beta = a;
            break;
        }
    }
    if (!beta) throw std::domain_error("normalize: all-zero signature");
    const std::uint32_t full = n - 1;
    NormalizedSignature out;
    out.beta = *beta;
    out.scale = s.at(*beta);
    out.gamma = SignatureVector::zeros(s.arity);
    std::uint32_t beta_bar = *beta ^ full;
    for (std::uint32_t a = 0; a < n; ++a) out.gamma.at(a) = s.at(a ^ beta_bar) / out.scale;
    return out;
}

/// Eq.-style check that the convex K_k weights already determine the whole
/// vector: the Pfaffian minor of the skew matrix with A[i,j] = Gamma'^([k]-{i,j})
/// on the surviving labels equals Gamma'^alpha for every alpha.
inline bool verify_pfaffian_minor_formula(const ConvexCompleteGraph& K,
                                          const SignatureVector& normalized) {
    if (K.k != normalized.arity) throw std::invalid_argument("arity mismatch");
    if (!normalized.at(((std::uint32_t)1 << K.k) - 1).is_one())
        throw std::invalid_argument("verify_pfaffian_minor_formula needs Gamma'^(1..1) = 1");
    std::vector<int> labels(static_cast<std::size_t>(K.k));
    for (int i = 0; i < K.k; ++i) labels[static_cast<std::size_t>(i)] = i + 1;
    std::map<std::pair<int, int>, GaussianRational> upper;
    for (const auto& [key, w] : K.weights)
        if (!w.is_zero()) upper[key] = w;
    SkewMatrix m(labels, std::move(upper));
    SignatureVector pf = generate_mgi_vector(m);
    return pf == normalized;
}

namespace detail {

/// All-zero signatures get a two-node core {u,v} with no edge plus weight-1
/// pendants: node u stays isolated in every removal subgraph, so every
/// PerfMatch vanishes.
inline PlaneGraph zero_matchgate(int k) {
    PlaneGraph g;
    const int center = k + 1;     // v, carries the pendants
    const int isolated = k + 2;   // u
    for (int i = 1; i <= k + 2; ++i) g.add_node(i);
    std::vector<int> fan;
    for (int i = k; i >= 1; --i) fan.push_back(i);
    if (k > 0) g.rotation[center] = std::move(fan);
    for (int i = 1; i <= k; ++i) {
        g.add_edge(i, center, GaussianRational(1));
        g.rotation[i] = {center};
        g.externals.push_back(i);
    }
    if (k > 0) g.outer = Dart{1, center};
    (void)isolated;
    return g;
}

}  // namespace detail

/// Theorem: any vector satisfying the Matchgate Identities is the signature
/// of a planar matchgate with O(k^4) nodes. Pipeline: normalize, weight the
/// convex K_k by the Hamming-weight-(k-2) entries, planarize the crossings,
/// then denormalize with an isolated scaling edge of weight s and a weight-1
/// pendant at each external where ~beta has a 1 bit.
inline PlaneGraph realize(const SignatureVector& s) {
    if (auto violation = check_mgi(s)) {
        throw std::invalid_argument(
            "realize: input violates the Matchgate Identities at (" +
            RemovalPattern::from_index(s.arity, violation->alpha).str() + ", " +
            RemovalPattern::from_index(s.arity, violation->beta).str() +
            "), residual " + violation->residual.str());
    }
    const int k = s.arity;

    bool all_zero = true;
    for (std::uint32_t a = 0; a < s.size(); ++a)
        if (!s.at(a).is_zero()) all_zero = false;

    PlaneGraph g;
    if (all_zero) {
        g = detail::zero_matchgate(k);
    } else {
        NormalizedSignature norm = normalize(s);
        ConvexCompleteGraph K = ConvexCompleteGraph::from_signature(norm.gamma);
        g = planarize_convex(K).graph;

        // Isolated scaling edge {u,v} of weight s; it multiplies every
        // perfect matching term and nothing else.
        int u = std::max(g.max_label(), k) + 1;
        int v = u + 1;
        g.add_node(u);
        g.add_node(v);
        g.add_edge(u, v, norm.scale);
        g.rotation[u] = {v};
        g.rotation[v] = {u};
        if (!g.outer) g.outer = Dart{u, v};

        // Pendant extensions where ~beta is 1: the fresh endpoint becomes the
        // external, flipping that bit of the realized signature.
        std::uint32_t beta_bar = norm.beta ^ (((std::uint32_t)1 << k) - 1);
        std::map<int, int> corners = plan_external_corners(g, g.externals);
        int next = v + 1;
        for (int i = 1; i <= k; ++i) {
            if (!(beta_bar >> (k - i) & 1)) continue;
            int old_external = g.externals[static_cast<std::size_t>(i - 1)];
            int fresh = next++;
            std::optional<int> arrival;
            if (auto it = corners.find(old_external); it != corners.end()) arrival = it->second;
            insert_at_corner(g, old_external, arrival, fresh);
            g.add_node(fresh);
            g.rotation[fresh] = {old_external};
            g.add_edge(old_external, fresh, GaussianRational(1));
            g.externals[static_cast<std::size_t>(i - 1)] = fresh;
        }
    }
    g.validate();
#ifndef NDEBUG
    if (k <= 6) assert(signature(g) == s && "realize produced a wrong signature");
#endif
    return g;
}

}  // namespace matchgate
