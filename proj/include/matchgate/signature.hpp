#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/skew.hpp"

namespace matchgate {

/// Perfect matching: disjoint edges (stored u < v, sorted) saturating all
/// nodes of the target graph.
using Matching = std::vector<std::pair<int, int>>;

namespace detail {

/// Node-indexed adjacency snapshot of a graph, for mask-based recursions.
struct IndexedGraph {
    std::vector<int> nodes;                                 // ascending
    std::vector<std::vector<std::pair<int, const GaussianRational*>>> adj;  // by node index

    explicit IndexedGraph(const PlaneGraph& g) : nodes(g.nodes) {
        adj.resize(nodes.size());
        for (const auto& [key, w] : g.edges) {
            int iu = index_of(key.first);
            int iv = index_of(key.second);
            adj[static_cast<std::size_t>(iu)].emplace_back(iv, &w);
            adj[static_cast<std::size_t>(iv)].emplace_back(iu, &w);
        }
        for (auto& row : adj) std::sort(row.begin(), row.end());
    }

    int index_of(int label) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), label);
        return static_cast<int>(it - nodes.begin());
    }

    std::uint64_t full_mask() const {
        if (nodes.size() > 63) throw std::invalid_argument("graph too large (more than 63 nodes)");
        return (nodes.size() == 0) ? 0 : (((std::uint64_t)1 << nodes.size()) - 1);
    }
};

/// Active-node set over up to 512 nodes.
struct ActiveMask {
    std::array<std::uint64_t, 8> words{};

    bool test(int i) const { return words[static_cast<std::size_t>(i >> 6)] >> (i & 63) & 1; }
    void set(int i) { words[static_cast<std::size_t>(i >> 6)] |= (std::uint64_t)1 << (i & 63); }
    void clear(int i) { words[static_cast<std::size_t>(i >> 6)] &= ~((std::uint64_t)1 << (i & 63)); }
    int count() const {
        int c = 0;
        for (std::uint64_t w : words) c += __builtin_popcountll(w);
        return c;
    }
    bool empty() const {
        for (std::uint64_t w : words)
            if (w) return false;
        return true;
    }
    int first() const {
        for (std::size_t i = 0; i < words.size(); ++i)
            if (words[i]) return static_cast<int>(i) * 64 + __builtin_ctzll(words[i]);
        return -1;
    }
    friend bool operator==(const ActiveMask& a, const ActiveMask& b) { return a.words == b.words; }
};

struct ActiveMaskHash {
    std::size_t operator()(const ActiveMask& m) const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t w : m.words) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return h;
    }
};

inline void enumerate_rec(const IndexedGraph& ig, std::uint64_t active, Matching& current,
                          std::vector<Matching>& out, std::size_t limit) {
    if (out.size() >= limit) return;
    if (active == 0) {
        out.push_back(current);
        return;
    }
    int u = __builtin_ctzll(active);
    std::uint64_t rest = active & ~((std::uint64_t)1 << u);
    for (const auto& [v, w] : ig.adj[static_cast<std::size_t>(u)]) {
        (void)w;
        if (!(rest >> v & 1)) continue;
        current.emplace_back(ig.nodes[static_cast<std::size_t>(u)],
                             ig.nodes[static_cast<std::size_t>(v)]);
        enumerate_rec(ig, rest & ~((std::uint64_t)1 << v), current, out, limit);
        current.pop_back();
        if (out.size() >= limit) return;
    }
}

}  // namespace detail

/// Complete, duplicate-free enumeration of the perfect matchings of G.
/// Branches on the lowest-labeled unmatched node with neighbors in ascending
/// label order, so the enumeration order is reproducible. An optional limit
/// caps the number of matchings produced.
inline std::vector<Matching> enumerate_perfect_matchings(
    const PlaneGraph& g, std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    detail::IndexedGraph ig(g);
    std::vector<Matching> out;
    if (g.nodes.size() % 2 == 1) return out;
    Matching current;
    detail::enumerate_rec(ig, ig.full_mask(), current, out, limit);
    return out;
}

inline std::optional<Matching> find_perfect_matching(const PlaneGraph& g) {
    auto ms = enumerate_perfect_matchings(g, 1);
    if (ms.empty()) return std::nullopt;
    return ms.front();
}

inline GaussianRational matching_weight(const PlaneGraph& g, const Matching& m) {
    GaussianRational w(1);
    for (auto [u, v] : m) w *= g.weight(u, v);
    return w;
}

/// Memoized PerfMatch over subsets of active nodes; one evaluator can serve
/// all 2^k removal patterns of a matchgate and shares its table across them.
/// Forced degree-one edges are contracted eagerly and connected pieces of the
/// active subgraph are evaluated independently, which keeps the recursion
/// tractable on gadget-heavy planarized graphs (several hundred nodes).
class PerfMatchEvaluator {
public:
    explicit PerfMatchEvaluator(const PlaneGraph& g) : ig_(g) {
        if (ig_.nodes.size() > 512) throw std::invalid_argument("graph too large (more than 512 nodes)");
    }

    GaussianRational all() {
        detail::ActiveMask mask;
        for (int i = 0; i < static_cast<int>(ig_.nodes.size()); ++i) mask.set(i);
        return eval(mask);
    }

    GaussianRational without(const std::set<int>& removed_labels) {
        detail::ActiveMask mask;
        for (int i = 0; i < static_cast<int>(ig_.nodes.size()); ++i) mask.set(i);
        for (int label : removed_labels) mask.clear(ig_.index_of(label));
        return eval(mask);
    }

private:
    GaussianRational eval(const detail::ActiveMask& entry) {
        if (entry.count() % 2 == 1) return GaussianRational();
        if (entry.empty()) return GaussianRational(1);
        if (auto it = memo_.find(entry); it != memo_.end()) return it->second;

        detail::ActiveMask mask = entry;
        GaussianRational factor(1);
        GaussianRational result;

        // Strip isolated and forced nodes.
        bool stuck = false;
        for (bool changed = true; changed && !stuck;) {
            changed = false;
            for (int i = 0; i < static_cast<int>(ig_.nodes.size()) && !stuck; ++i) {
                if (!mask.test(i)) continue;
                int degree = 0;
                int partner = -1;
                const GaussianRational* via = nullptr;
                for (const auto& [v, w] : ig_.adj[static_cast<std::size_t>(i)]) {
                    if (!mask.test(v)) continue;
                    ++degree;
                    partner = v;
                    via = w;
                }
                if (degree == 0) {
                    stuck = true;  // unmatched node: no perfect matchings
                } else if (degree == 1) {
                    factor *= *via;
                    mask.clear(i);
                    mask.clear(partner);
                    changed = true;
                }
            }
        }

        if (stuck) {
            result = GaussianRational();
        } else if (mask.empty()) {
            result = factor;
        } else {
            // Evaluate one connected piece; the rest recurses (and memoizes).
            detail::ActiveMask piece;
            {
                std::vector<int> queue = {mask.first()};
                piece.set(queue[0]);
                while (!queue.empty()) {
                    int u = queue.back();
                    queue.pop_back();
                    for (const auto& [v, w] : ig_.adj[static_cast<std::size_t>(u)]) {
                        (void)w;
                        if (mask.test(v) && !piece.test(v)) {
                            piece.set(v);
                            queue.push_back(v);
                        }
                    }
                }
            }
            if (piece == mask) {
                // Branch on a node of minimum active degree.
                int best = -1, best_degree = 0;
                for (int i = 0; i < static_cast<int>(ig_.nodes.size()); ++i) {
                    if (!mask.test(i)) continue;
                    int degree = 0;
                    for (const auto& [v, w] : ig_.adj[static_cast<std::size_t>(i)]) {
                        (void)w;
                        if (mask.test(v)) ++degree;
                    }
                    if (best < 0 || degree < best_degree) {
                        best = i;
                        best_degree = degree;
                    }
                }
                detail::ActiveMask rest = mask;
                rest.clear(best);
                GaussianRational sum;
                for (const auto& [v, w] : ig_.adj[static_cast<std::size_t>(best)]) {
                    if (!rest.test(v)) continue;
                    detail::ActiveMask next = rest;
                    next.clear(v);
                    GaussianRational sub = eval(next);
                    if (!sub.is_zero()) sum += *w * sub;
                }
                result = factor * sum;
            } else {
                detail::ActiveMask remainder = mask;
                for (int i = 0; i < static_cast<int>(ig_.nodes.size()); ++i)
                    if (piece.test(i)) remainder.clear(i);
                GaussianRational left = eval(piece);
                if (left.is_zero()) {
                    result = GaussianRational();
                } else {
                    result = factor * left * eval(remainder);
                }
            }
        }
        memo_.emplace(entry, result);
        return result;
    }

    detail::IndexedGraph ig_;
    std::unordered_map<detail::ActiveMask, GaussianRational, detail::ActiveMaskHash> memo_;
};

/// PerfMatch(G) = sum over perfect matchings of the product of edge weights;
/// zero when the node count is odd, one for the empty graph.
inline GaussianRational perfmatch(const PlaneGraph& g) {
    PerfMatchEvaluator ev(g);
    return ev.all();
}

/// Length-2^k vector indexed by removal patterns, entry index
/// sum_i alpha_i 2^(k-i) (first external = most significant bit).
struct SignatureVector {
    int arity = 0;
    std::vector<GaussianRational> values;

    static SignatureVector zeros(int arity) {
        SignatureVector s;
        s.arity = arity;
        s.values.assign((std::size_t)1 << arity, GaussianRational());
        return s;
    }

    GaussianRational& at(std::uint32_t index) { return values[index]; }
    const GaussianRational& at(std::uint32_t index) const { return values[index]; }
    std::size_t size() const { return values.size(); }

    friend bool operator==(const SignatureVector& a, const SignatureVector& b) {
        return a.arity == b.arity && a.values == b.values;
    }
    friend bool operator!=(const SignatureVector& a, const SignatureVector& b) { return !(a == b); }
};

/// Gamma_G: all 2^k PerfMatch values of the removal subgraphs G^alpha.
inline SignatureVector signature(const PlaneGraph& g) {
    const int k = g.arity();
    SignatureVector out = SignatureVector::zeros(k);
    PerfMatchEvaluator ev(g);
    for (std::uint32_t index = 0; index < out.size(); ++index) {
        RemovalPattern alpha = RemovalPattern::from_index(k, index);
        std::set<int> removed;
        for (int i = 1; i <= k; ++i)
            if (alpha.bit(i)) removed.insert(g.externals[static_cast<std::size_t>(i - 1)]);
        out.at(index) = ev.without(removed);
    }
    return out;
}

/// Parity Condition: the support lies entirely on even-weight indices or
/// entirely on odd-weight indices.
inline bool check_parity(const SignatureVector& s) {
    bool even_support = false, odd_support = false;
    for (std::uint32_t index = 0; index < s.size(); ++index) {
        if (s.at(index).is_zero()) continue;
        (__builtin_popcount(index) % 2 == 0 ? even_support : odd_support) = true;
    }
    return !(even_support && odd_support);
}

namespace detail {

/// One Matchgate Identity instance: with P = positions where alpha and beta
/// differ (ascending), sum_i (-1)^i G[alpha^e_{p_i}] G[beta^e_{p_i}].
inline GaussianRational mgi_residual(const std::vector<GaussianRational>& v, int k,
                                     std::uint32_t alpha, std::uint32_t beta) {
    std::uint32_t diff = alpha ^ beta;
    GaussianRational sum;
    int sign = -1;  // (-1)^i, i starting at 1
    for (int p = 1; p <= k; ++p) {
        std::uint32_t bit = (std::uint32_t)1 << (k - p);
        if (!(diff & bit)) continue;
        GaussianRational term = v[alpha ^ bit] * v[beta ^ bit];
        if (!term.is_zero()) sum += sign > 0 ? term : -term;
        sign = -sign;
    }
    return sum;
}

}  // namespace detail

struct MgiViolation {
    std::uint32_t alpha = 0;
    std::uint32_t beta = 0;
    GaussianRational residual;
};

/// Checks every ordered pair (alpha, beta); empty result means all 4^k
/// residuals vanish exactly. On failure the first violation is reported.
inline std::optional<MgiViolation> check_mgi(const SignatureVector& s) {
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = 0; b < n; ++b) {
            if (a == b) continue;
            GaussianRational r = detail::mgi_residual(s.values, s.arity, a, b);
            if (!r.is_zero()) return MgiViolation{a, b, std::move(r)};
        }
    }
    return std::nullopt;
}

/// Parity-violation witness: the executable form of the proof that MGI imply
/// the Parity Condition. The returned instance (alpha, beta) indexes the
/// shifted vector G~[gamma] = G[gamma ^ shift] and has nonzero residual.
struct ParityWitness {
    std::uint32_t shift = 0;
    std::uint32_t alpha = 0;
    std::uint32_t beta = 0;
    GaussianRational residual;
};

inline std::optional<ParityWitness> mgi_implies_parity_witness(const SignatureVector& s) {
    if (check_parity(s)) return std::nullopt;
    const std::uint32_t n = static_cast<std::uint32_t>(s.size());
    std::uint32_t shift = 0;
    for (std::uint32_t a = 0; a < n; ++a) {
        if (!s.at(a).is_zero() && __builtin_popcount(a) % 2 == 0) {
            shift = a;
            break;
        }
    }
    std::vector<GaussianRational> shifted(n);
    for (std::uint32_t gmm = 0; gmm < n; ++gmm) shifted[gmm] = s.at(gmm ^ shift);

    // Minimal odd-weight nonzero index of the shifted vector; the instance
    // (e_{p1}, beta' ^ e_{p1}) then has the single surviving term
    // -G~[0] G~[beta'].
    std::uint32_t beta_prime = 0;
    int best_weight = s.arity + 1;
    for (std::uint32_t b = 0; b < n; ++b) {
        int w = __builtin_popcount(b);
        if (w % 2 == 1 && !shifted[b].is_zero() && w < best_weight) {
            best_weight = w;
            beta_prime = b;
        }
    }
    std::uint32_t p1 = (std::uint32_t)1 << (31 - __builtin_clz(beta_prime));  // highest bit = lowest position
    ParityWitness w;
    w.shift = shift;
    w.alpha = p1;
    w.beta = beta_prime ^ p1;
    w.residual = detail::mgi_residual(shifted, s.arity, w.alpha, w.beta);
    return w;
}

}  // namespace matchgate
