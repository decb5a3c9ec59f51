#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchgate/rational.hpp"

namespace matchgate {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered node pair along an edge. The face to the *left* of a dart (under
/// the counterclockwise rotation convention) is the face it belongs to.
using Dart = std::pair<int, int>;

inline Dart reversed(const Dart& d) { return {d.second, d.first}; }

inline std::pair<int, int> edge_key(int u, int v) {
    return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

/// Removal pattern alpha for a matchgate of arity k. Bit 1 is the most
/// significant: index(alpha) = sum_i alpha_i 2^(k-i).
struct RemovalPattern {
    int arity = 0;
    std::uint32_t bits = 0;

    static RemovalPattern from_index(int arity, std::uint32_t index) {
        return RemovalPattern{arity, index};
    }
    /// "-" denotes the empty (arity-0) bitstring.
    static RemovalPattern from_string(const std::string& s) {
        if (s == "-") return RemovalPattern{0, 0};
        RemovalPattern p{static_cast<int>(s.size()), 0};
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring: " + s);
            p.bits = (p.bits << 1) | static_cast<std::uint32_t>(c - '0');
        }
        return p;
    }

    /// 1-based position, position 1 = first external node.
    bool bit(int position) const { return (bits >> (arity - position)) & 1u; }

    int weight() const { return __builtin_popcount(bits); }

    std::string str() const {
        if (arity == 0) return "-";
        std::string s(static_cast<std::size_t>(arity), '0');
        for (int i = 1; i <= arity; ++i)
            if (bit(i)) s[static_cast<std::size_t>(i - 1)] = '1';
        return s;
    }
};

/// Weighted plane graph with a combinatorial embedding (counterclockwise
/// rotation system), a designated outer dart and an ordered list of external
/// nodes. Node labels are arbitrary positive integers; instances are treated
/// as immutable values once validated.
struct PlaneGraph {
    std::vector<int> nodes;                                    // ascending
    std::map<std::pair<int, int>, GaussianRational> edges;     // key u < v, weight != 0
    std::map<int, std::vector<int>> rotation;                  // CCW neighbor order
    std::optional<Dart> outer;                                 // left face is the outer face
    std::vector<int> externals;                                // clockwise on the outer face

    int arity() const { return static_cast<int>(externals.size()); }

    bool has_node(int v) const {
        return std::binary_search(nodes.begin(), nodes.end(), v);
    }
    bool has_edge(int u, int v) const { return edges.count(edge_key(u, v)) != 0; }
    const GaussianRational& weight(int u, int v) const { return edges.at(edge_key(u, v)); }

    const std::vector<int>& neighbors(int v) const {
        static const std::vector<int> none;
        auto it = rotation.find(v);
        return it == rotation.end() ? none : it->second;
    }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

    void add_node(int v) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
        if (it == nodes.end() || *it != v) nodes.insert(it, v);
    }
    void add_edge(int u, int v, GaussianRational w) { edges[edge_key(u, v)] = std::move(w); }

    int max_label() const { return nodes.empty() ? 0 : nodes.back(); }

    void validate() const;
};

/// Successor of `d` on the face walk to its left: take the reversed dart and
/// rotate one step clockwise (the predecessor in the CCW order).
inline Dart next_in_face(const PlaneGraph& g, const Dart& d) {
    const std::vector<int>& rot = g.neighbors(d.second);
    auto it = std::find(rot.begin(), rot.end(), d.first);
    if (it == rot.end())
        throw EmbeddingError("rotation at node " + std::to_string(d.second) +
                             " does not list neighbor " + std::to_string(d.first));
    std::size_t idx = static_cast<std::size_t>(it - rot.begin());
    int w = rot[(idx + rot.size() - 1) % rot.size()];
    return {d.second, w};
}

struct FaceSet {
    std::vector<std::vector<Dart>> walks;
    int outer_index = -1;  // walk containing the designated outer dart
};

/// Trace all face walks of the rotation system. Each dart appears in exactly
/// one walk; both darts of a bridge edge land in the same walk.
inline FaceSet faces(const PlaneGraph& g) {
    FaceSet out;
    std::set<Dart> seen;
    for (const auto& [key, w] : g.edges) {
        (void)w;
        for (Dart start : {Dart{key.first, key.second}, Dart{key.second, key.first}}) {
            if (seen.count(start)) continue;
            std::vector<Dart> walk;
            Dart d = start;
            do {
                if (!seen.insert(d).second)
                    throw EmbeddingError("inconsistent rotation system: dart revisited");
                walk.push_back(d);
                d = next_in_face(g, d);
            } while (d != start);
            out.walks.push_back(std::move(walk));
        }
    }
    if (g.outer) {
        for (std::size_t i = 0; i < out.walks.size(); ++i) {
            const auto& walk = out.walks[i];
            if (std::find(walk.begin(), walk.end(), *g.outer) != walk.end()) {
                out.outer_index = static_cast<int>(i);
                break;
            }
        }
        if (out.outer_index < 0) throw EmbeddingError("outer dart not found in any face walk");
    }
    return out;
}

namespace detail {

struct UnionFind {
    std::map<int, int> parent;
    int find(int x) {
        if (!parent.count(x)) parent[x] = x;
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

inline std::vector<std::vector<int>> components(const PlaneGraph& g) {
    detail::UnionFind uf;
    for (int v : g.nodes) uf.find(v);
    for (const auto& [key, w] : g.edges) {
        (void)w;
        uf.unite(key.first, key.second);
    }
    std::map<int, std::vector<int>> by_root;
    for (int v : g.nodes) by_root[uf.find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [root, comp] : by_root) {
        (void)root;
        out.push_back(std::move(comp));
    }
    return out;
}

inline bool is_connected(const PlaneGraph& g) { return components(g).size() <= 1; }

namespace detail {

/// Greedy cyclic-subsequence test: can the externals (restricted to nodes on
/// the walk) be read off the walk in order from some anchor? Node repeats on
/// the walk (cut vertices) are tolerated.
inline bool externals_in_cyclic_order(const std::vector<int>& walk_nodes,
                                      const std::vector<int>& externals) {
    if (externals.size() <= 1) return true;
    std::size_t n = walk_nodes.size();
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        if (walk_nodes[anchor] != externals[0]) continue;
        std::size_t pos = anchor;
        std::size_t matched = 1;
        std::size_t steps = 0;
        while (matched < externals.size() && steps < n) {
            pos = (pos + 1) % n;
            ++steps;
            if (walk_nodes[pos] == externals[matched]) ++matched;
        }
        if (matched == externals.size()) return true;
    }
    return false;
}

}  // namespace detail

inline void PlaneGraph::validate() const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] <= 0) throw EmbeddingError("node labels must be positive");
        if (i > 0 && nodes[i] <= nodes[i - 1]) throw EmbeddingError("node list not strictly ascending");
    }
    std::map<int, std::set<int>> adj;
    for (const auto& [key, w] : edges) {
        auto [u, v] = key;
        if (u >= v) throw EmbeddingError("edge key not ordered");
        if (u == v) throw EmbeddingError("self loops not allowed");
        if (!has_node(u) || !has_node(v)) throw EmbeddingError("edge endpoint not a node");
        if (w.is_zero())
            throw EmbeddingError("zero-weight edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for (const auto& [v, rot] : rotation) {
        if (!has_node(v)) throw EmbeddingError("rotation for unknown node " + std::to_string(v));
        std::set<int> listed(rot.begin(), rot.end());
        if (listed.size() != rot.size())
            throw EmbeddingError("rotation at node " + std::to_string(v) + " repeats a neighbor");
        if (listed != adj[v])
            throw EmbeddingError("rotation at node " + std::to_string(v) +
                                 " does not match the incident edges");
    }
    for (const auto& [v, nb] : adj) {
        if (!rotation.count(v) && !nb.empty())
            throw EmbeddingError("missing rotation for node " + std::to_string(v));
    }

    if (outer) {
        if (!has_edge(outer->first, outer->second))
            throw EmbeddingError("outer dart is not along an edge");
    } else if (!edges.empty()) {
        throw EmbeddingError("graph with edges needs a designated outer dart");
    }

    // Genus check: every component must trace the face count of a sphere
    // embedding, V - E + W = C + C_e with W the number of face walks and
    // C_e the number of components containing an edge.
    FaceSet fs = faces(*this);
    auto comps = components(*this);
    std::size_t with_edges = 0;
    std::map<int, int> comp_of;
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (int v : comps[i]) comp_of[v] = static_cast<int>(i);
    std::set<int> edgeful;
    for (const auto& [key, w] : edges) {
        (void)w;
        edgeful.insert(comp_of[key.first]);
    }
    with_edges = edgeful.size();
    long lhs = static_cast<long>(nodes.size()) - static_cast<long>(edges.size()) +
               static_cast<long>(fs.walks.size());
    if (lhs != static_cast<long>(comps.size() + with_edges))
        throw EmbeddingError("rotation system is not a plane embedding (Euler check failed)");

    std::set<int> ext_seen;
    for (int e : externals) {
        if (!has_node(e)) throw EmbeddingError("external node " + std::to_string(e) + " not in graph");
        if (!ext_seen.insert(e).second) throw EmbeddingError("duplicate external node");
    }

    // External nodes must sit on the outer face and appear there in the given
    // clockwise order. Isolated externals and externals in components other
    // than the outer dart's are exempt (their outer walk is not designated).
    if (outer && !externals.empty()) {
        const auto& walk = fs.walks[static_cast<std::size_t>(fs.outer_index)];
        std::vector<int> walk_nodes;
        walk_nodes.reserve(walk.size());
        std::set<int> on_walk;
        for (const Dart& d : walk) {
            walk_nodes.push_back(d.first);
            on_walk.insert(d.first);
        }
        int outer_comp = comp_of[outer->first];
        std::vector<int> constrained;
        for (int e : externals) {
            if (on_walk.count(e)) {
                constrained.push_back(e);
            } else if (degree(e) != 0 && comp_of[e] == outer_comp) {
                throw EmbeddingError("external node " + std::to_string(e) +
                                     " is not on the outer face");
            }
        }
        if (!detail::externals_in_cyclic_order(walk_nodes, constrained))
            throw EmbeddingError("external nodes are not in clockwise order on the outer face");
    }
}

/// G^alpha: remove the external nodes selected by `alpha` together with their
/// incident edges. Surviving nodes keep labels; the rotation system is the
/// induced one; surviving externals stay in order.
inline PlaneGraph remove_externals(const PlaneGraph& g, const RemovalPattern& alpha) {
    if (alpha.arity != g.arity())
        throw std::invalid_argument("removal pattern arity does not match matchgate arity");
    std::set<int> removed;
    for (int i = 1; i <= alpha.arity; ++i)
        if (alpha.bit(i)) removed.insert(g.externals[static_cast<std::size_t>(i - 1)]);

    PlaneGraph out;
    for (int v : g.nodes)
        if (!removed.count(v)) out.nodes.push_back(v);
    for (const auto& [key, w] : g.edges)
        if (!removed.count(key.first) && !removed.count(key.second)) out.edges[key] = w;
    for (const auto& [v, rot] : g.rotation) {
        if (removed.count(v)) continue;
        std::vector<int> kept;
        for (int u : rot)
            if (!removed.count(u)) kept.push_back(u);
        if (!kept.empty()) out.rotation[v] = std::move(kept);
    }
    for (int e : g.externals)
        if (!removed.count(e)) out.externals.push_back(e);

    if (!out.edges.empty()) {
        auto alive = [&](const Dart& d) {
            return !removed.count(d.first) && !removed.count(d.second) &&
                   out.has_edge(d.first, d.second);
        };
        if (g.outer && alive(*g.outer)) {
            out.outer = g.outer;
        } else if (g.outer) {
            FaceSet fs = faces(g);
            for (const Dart& d : fs.walks[static_cast<std::size_t>(fs.outer_index)]) {
                if (alive(d)) {
                    out.outer = d;
                    break;
                }
            }
        }
        if (!out.outer) {
            auto first = out.edges.begin()->first;
            out.outer = Dart{first.first, first.second};
        }
    }
    return out;
}

/// Arrival neighbor of the first outer-walk visit to `v`: the node `a` of the
/// dart (a -> v) on the outer face walk.
inline std::optional<int> outer_corner_arrival(const PlaneGraph& g, int v) {
    if (!g.outer) return std::nullopt;
    FaceSet fs = faces(g);
    for (const Dart& d : fs.walks[static_cast<std::size_t>(fs.outer_index)])
        if (d.second == v) return d.first;
    return std::nullopt;
}

/// Insert `x` as a new neighbor of `u` at the corner just after the arrival
/// dart (arrive_from -> u); the new edge is embedded inside the face that
/// corner belongs to. For an isolated `u` the rotation becomes [x].
inline void insert_at_corner(PlaneGraph& g, int u, std::optional<int> arrive_from, int x) {
    std::vector<int>& rot = g.rotation[u];
    if (rot.empty()) {
        rot.push_back(x);
        return;
    }
    if (!arrive_from) throw EmbeddingError("corner insertion at a non-isolated node needs an arrival");
    auto it = std::find(rot.begin(), rot.end(), *arrive_from);
    if (it == rot.end()) throw EmbeddingError("arrival neighbor not present in rotation");
    rot.insert(it, x);
}

/// Relabel all nodes through `map` (must be injective on the node set).
inline PlaneGraph relabel_nodes(const PlaneGraph& g, const std::map<int, int>& map) {
    auto m = [&](int v) { return map.at(v); };
    PlaneGraph out;
    for (int v : g.nodes) out.add_node(m(v));
    for (const auto& [key, w] : g.edges) out.add_edge(m(key.first), m(key.second), w);
    for (const auto& [v, rot] : g.rotation) {
        std::vector<int> r;
        for (int u : rot) r.push_back(m(u));
        out.rotation[m(v)] = std::move(r);
    }
    if (g.outer) out.outer = Dart{m(g.outer->first), m(g.outer->second)};
    for (int e : g.externals) out.externals.push_back(m(e));
    return out;
}

/// Disjoint union; node sets must not intersect. Keeps a's outer dart and
/// concatenates the external lists.
inline PlaneGraph merge_disjoint(const PlaneGraph& a, const PlaneGraph& b) {
    PlaneGraph out = a;
    for (int v : b.nodes) {
        if (out.has_node(v)) throw std::invalid_argument("merge_disjoint: label collision");
        out.add_node(v);
    }
    for (const auto& [key, w] : b.edges) out.edges[key] = w;
    for (const auto& [v, rot] : b.rotation) out.rotation[v] = rot;
    if (!out.outer) out.outer = b.outer;
    for (int e : b.externals) out.externals.push_back(e);
    return out;
}

namespace detail {

/// Outer walk of one component. The component holding the designated outer
/// dart uses that walk. A separate component may be re-embedded so that any
/// of its faces becomes the outer boundary, so we pick deterministically: the
/// face walk containing all of the component's external nodes (they must
/// share a face to face outward), or the walk through the smallest dart when
/// the component has no externals.
inline std::vector<Dart> component_outer_walk(const PlaneGraph& g, const FaceSet& fs,
                                              const std::set<int>& comp_nodes) {
    if (g.outer && comp_nodes.count(g.outer->first))
        return fs.walks[static_cast<std::size_t>(fs.outer_index)];

    std::vector<const std::vector<Dart>*> comp_walks;
    for (const auto& walk : fs.walks)
        if (!walk.empty() && comp_nodes.count(walk.front().first)) comp_walks.push_back(&walk);
    if (comp_walks.empty()) return {};

    std::vector<int> comp_externals;
    for (int e : g.externals)
        if (comp_nodes.count(e) && g.degree(e) > 0) comp_externals.push_back(e);

    const std::vector<Dart>* best = nullptr;
    for (const auto* walk : comp_walks) {
        std::set<int> on_walk;
        for (const Dart& d : *walk) on_walk.insert(d.first);
        bool all = true;
        for (int e : comp_externals)
            if (!on_walk.count(e)) all = false;
        if (!all) continue;
        if (!best || *std::min_element(walk->begin(), walk->end()) <
                         *std::min_element(best->begin(), best->end()))
            best = walk;
    }
    if (!best) {
        if (!comp_externals.empty())
            throw EmbeddingError("externals of a detached component do not share a face");
        best = comp_walks.front();
    }
    return *best;
}

}  // namespace detail

/// Like outer_corner_arrival, but falls back to the node's own component
/// outer walk when the node lives away from the designated outer dart.
inline std::optional<int> component_outer_arrival(const PlaneGraph& g, int v) {
    if (g.degree(v) == 0) return std::nullopt;
    FaceSet fs = faces(g);
    for (const auto& comp : components(g)) {
        if (std::find(comp.begin(), comp.end(), v) == comp.end()) continue;
        std::set<int> comp_nodes(comp.begin(), comp.end());
        std::vector<Dart> walk = detail::component_outer_walk(g, fs, comp_nodes);
        for (const Dart& d : walk)
            if (d.second == v) return d.first;
    }
    throw EmbeddingError("node " + std::to_string(v) + " is not on its component's outer walk");
}

namespace detail {

/// Arrival neighbors for a set of walk occurrences that realize the given
/// node order around the walk. A cut vertex visits the walk several times;
/// attaching at an arbitrary occurrence can scramble the external order, so
/// corners must come from one consistent anchored traversal.
inline std::map<int, int> matched_walk_corners(const std::vector<Dart>& walk,
                                               const std::vector<int>& ordered_nodes) {
    const std::size_t n = walk.size();
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        if (walk[anchor].second != ordered_nodes[0]) continue;
        std::map<int, int> corners;
        corners[ordered_nodes[0]] = walk[anchor].first;
        std::size_t pos = anchor;
        std::size_t matched = 1;
        std::size_t steps = 0;
        while (matched < ordered_nodes.size() && steps < n) {
            pos = (pos + 1) % n;
            ++steps;
            if (walk[pos].second == ordered_nodes[matched]) {
                corners[ordered_nodes[matched]] = walk[pos].first;
                ++matched;
            }
        }
        if (matched == ordered_nodes.size()) return corners;
    }
    throw EmbeddingError("nodes are not in the requested order on the walk");
}

}  // namespace detail

/// Order-consistent outer corners for the given externals (a subsequence of
/// g.externals): for each listed external with edges, the arrival neighbor of
/// its matched outer-walk occurrence; isolated externals get no entry.
inline std::map<int, int> plan_external_corners(const PlaneGraph& g,
                                                const std::vector<int>& externals) {
    std::map<int, int> corners;
    if (g.edges.empty()) return corners;
    FaceSet fs = faces(g);
    for (const auto& comp : components(g)) {
        std::set<int> comp_nodes(comp.begin(), comp.end());
        std::vector<int> here;
        for (int e : externals)
            if (comp_nodes.count(e) && g.degree(e) > 0) here.push_back(e);
        if (here.empty()) continue;
        std::vector<Dart> walk = detail::component_outer_walk(g, fs, comp_nodes);
        for (auto& [node, arrival] : detail::matched_walk_corners(walk, here))
            corners[node] = arrival;
    }
    return corners;
}

/// The preprocessing step used before orientation arguments: every external
/// node gets a fresh pendant path of length two (new external node i, inner
/// neighbor labeled 2k+1-i), original nodes are relabeled from 2k+1 upward in
/// ascending order, and disconnected components are joined by weight-1
/// three-edge gadgets. The signature is unchanged.
inline PlaneGraph preprocess(const PlaneGraph& g) {
    const int k = g.arity();
    std::map<int, int> relabel;
    int next = 2 * k + 1;
    for (int v : g.nodes) relabel[v] = next++;

    PlaneGraph out = relabel_nodes(g, relabel);
    out.externals.clear();

    // Plan every pendant corner against the untouched graph; insertions at
    // distinct nodes do not invalidate each other.
    std::vector<int> relabeled_externals;
    for (int e : g.externals) relabeled_externals.push_back(relabel.at(e));
    std::map<int, int> corners = plan_external_corners(out, relabeled_externals);

    for (int i = 1; i <= k; ++i) {
        int old_external = relabeled_externals[static_cast<std::size_t>(i - 1)];
        int hat = 2 * k + 1 - i;
        std::optional<int> arrival;
        if (auto it = corners.find(old_external); it != corners.end()) arrival = it->second;
        insert_at_corner(out, old_external, arrival, hat);
        out.add_node(hat);
        out.rotation[hat] = {old_external, i};
        out.add_node(i);
        out.rotation[i] = {hat};
        out.add_edge(old_external, hat, GaussianRational(1));
        out.add_edge(hat, i, GaussianRational(1));
        out.externals.push_back(i);
    }
    if (!out.outer && !out.edges.empty()) out.outer = Dart{1, 2 * k};

    // Join components with the weight-1 gadget u - w - v plus pendant w'.
    // In any perfect matching w pairs with w', so the signature is unchanged.
    while (true) {
        auto comps = components(out);
        if (comps.size() <= 1) break;
        std::sort(comps.begin(), comps.end(),
                  [](const auto& a, const auto& b) { return a[0] < b[0]; });
        FaceSet fs = faces(out);
        // Joints go into the gap of the outer walk after a component's last
        // external and before its first, so the merged walk keeps each
        // component's external block contiguous and in order.
        auto anchor_of = [&](const std::vector<int>& comp) {
            std::set<int> comp_nodes(comp.begin(), comp.end());
            std::vector<Dart> walk = detail::component_outer_walk(out, fs, comp_nodes);
            std::vector<int> here;
            for (int e : out.externals)
                if (comp_nodes.count(e)) here.push_back(e);

            std::optional<int> best;
            std::optional<int> arrival;
            if (here.empty()) {
                for (const Dart& d : walk) {
                    if (d.second > k && (!best || d.second < *best)) {
                        best = d.second;
                        arrival = d.first;
                    }
                }
            } else {
                const std::size_t n = walk.size();
                for (std::size_t anchor = 0; anchor < n && !best; ++anchor) {
                    if (walk[anchor].second != here[0]) continue;
                    std::size_t pos = anchor;
                    std::size_t matched = 1;
                    std::size_t steps = 0;
                    while (matched < here.size() && steps < n) {
                        pos = (pos + 1) % n;
                        ++steps;
                        if (walk[pos].second == here[matched]) ++matched;
                    }
                    if (matched != here.size()) continue;
                    // Scan the gap from the last matched external back to the
                    // anchor for a non-external attachment node.
                    for (std::size_t q = (pos + 1) % n; q != anchor; q = (q + 1) % n) {
                        if (walk[q].second > k) {
                            best = walk[q].second;
                            arrival = walk[q].first;
                            break;
                        }
                    }
                }
            }
            if (!best) {
                // Single isolated node.
                best = comp[0];
                arrival = std::nullopt;
            }
            return std::make_pair(*best, arrival);
        };
        auto [u, u_arrival] = anchor_of(comps[0]);
        auto [v, v_arrival] = anchor_of(comps[1]);
        int w = out.max_label() + 1;
        int wp = w + 1;
        insert_at_corner(out, u, u_arrival, w);
        insert_at_corner(out, v, v_arrival, w);
        out.add_node(w);
        out.add_node(wp);
        out.rotation[w] = {u, wp, v};
        out.rotation[wp] = {w};
        out.add_edge(u, w, GaussianRational(1));
        out.add_edge(w, v, GaussianRational(1));
        out.add_edge(w, wp, GaussianRational(1));
        if (!out.outer) out.outer = Dart{u, w};
    }
    out.validate();
    return out;
}

}  // namespace matchgate
