#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matchgate/plane_graph.hpp"
#include "matchgate/rational.hpp"
#include "matchgate/realize.hpp"
#include "matchgate/signature.hpp"

namespace matchgate {

/// Symmetric arity-k signature [z_0, ..., z_k]: z_i is the common value at
/// every index of Hamming weight i.
struct SymmetricSignature {
    std::vector<GaussianRational> entries;

    int arity() const { return static_cast<int>(entries.size()) - 1; }
    const GaussianRational& z(int i) const { return entries[static_cast<std::size_t>(i)]; }
};

/// The induced dense vector: value z_|alpha| at every index alpha.
inline SignatureVector dense(const SymmetricSignature& z) {
    SignatureVector out = SignatureVector::zeros(z.arity());
    for (std::uint32_t a = 0; a < out.size(); ++a) out.at(a) = z.z(__builtin_popcount(a));
    return out;
}

enum class SymmetricClass { EvenForm, OddForm, Zero, NotRealizable };

struct SymmetricCheck {
    SymmetricClass cls = SymmetricClass::Zero;
    GaussianRational r1, r2;  // witnesses with r1 * z_(i-2) = r2 * z_i on the supported class
};

/// Realizability test: alternate entries vanish and the others obey a
/// two-term recurrence r1 z_(i-2) = r2 z_i with (r1, r2) != (0, 0). The
/// degenerate accepted shapes are a single nonzero extremal entry of the
/// supported class; a nonzero non-extremal entry forces full support in a
/// geometric progression.
inline SymmetricCheck check_symmetric_realizable(const SymmetricSignature& z) {
    const int k = z.arity();
    bool even_support = false, odd_support = false;
    for (int i = 0; i <= k; ++i) {
        if (z.z(i).is_zero()) continue;
        (i % 2 == 0 ? even_support : odd_support) = true;
    }
    if (!even_support && !odd_support) return {SymmetricClass::Zero, GaussianRational(), GaussianRational()};
    if (even_support && odd_support)
        return {SymmetricClass::NotRealizable, GaussianRational(), GaussianRational()};

    const int p = even_support ? 0 : 1;
    const SymmetricClass form = even_support ? SymmetricClass::EvenForm : SymmetricClass::OddForm;
    std::vector<GaussianRational> w;
    for (int i = p; i <= k; i += 2) w.push_back(z.z(i));
    const std::size_t m = w.size() - 1;

    std::vector<std::size_t> nz;
    for (std::size_t t = 0; t <= m; ++t)
        if (!w[t].is_zero()) nz.push_back(t);

    if (nz.size() == m + 1) {
        if (m == 0) return {form, GaussianRational(1), GaussianRational(1)};
        GaussianRational ratio = w[1] / w[0];
        for (std::size_t t = 1; t <= m; ++t)
            if (w[t] != ratio * w[t - 1])
                return {SymmetricClass::NotRealizable, GaussianRational(), GaussianRational()};
        return {form, ratio, GaussianRational(1)};
    }
    if (nz.size() == 1 && nz[0] == 0) return {form, GaussianRational(), GaussianRational(1)};
    if (nz.size() == 1 && nz[0] == m) return {form, GaussianRational(1), GaussianRational()};
    return {SymmetricClass::NotRealizable, GaussianRational(), GaussianRational()};
}

/// Cycle of k triangles sharing base corners: triangle i has external tip a_i
/// (label i), weight-x legs {a_i, b_i}, {a_i, b_(i+1)} and weight-y base
/// {b_i, b_(i+1)}, with b labels k+1..2k. Zero-weight edges are omitted. The
/// signature is 2 x^(k-|alpha|) y^(|alpha|/2) at even |alpha| and 0 at odd.
inline PlaneGraph triangle_cycle(int k, const GaussianRational& x, const GaussianRational& y) {
    if (k < 3) throw std::domain_error("triangle_cycle needs arity >= 3");
    PlaneGraph g;
    auto b = [&](int i) { return k + ((i - 1) % k + k) % k + 1; };
    for (int i = 1; i <= 2 * k; ++i) g.add_node(i);
    for (int i = 1; i <= k; ++i) {
        if (!x.is_zero()) {
            g.add_edge(i, b(i), x);
            g.add_edge(i, b(i + 1), x);
        }
        if (!y.is_zero()) g.add_edge(b(i), b(i + 1), y);
    }
    for (int i = 1; i <= k; ++i) {
        if (!x.is_zero()) g.rotation[i] = {b(i), b(i + 1)};
        std::vector<int> rot;
        if (!x.is_zero()) {
            rot.push_back(i);
            rot.push_back(i == 1 ? k : i - 1);
        }
        if (!y.is_zero()) {
            rot.push_back(b(i - 1));
            rot.push_back(b(i + 1));
        }
        if (!rot.empty()) g.rotation[b(i)] = std::move(rot);
    }
    if (!x.is_zero())
        g.outer = Dart{b(1), 1};
    else if (!y.is_zero())
        g.outer = Dart{b(1), b(2)};
    for (int i = 1; i <= k; ++i) g.externals.push_back(i);
    g.validate();
    return g;
}

namespace detail {

inline void add_scaling_edge(PlaneGraph& g, const GaussianRational& weight) {
    int u = g.max_label() + 1;
    int v = u + 1;
    g.add_node(u);
    g.add_node(v);
    g.add_edge(u, v, weight);
    g.rotation[u] = {v};
    g.rotation[v] = {u};
    if (!g.outer) g.outer = Dart{u, v};
}

/// Hub with k weight-w spokes: exactly one external survives a removal
/// pattern iff the hub can be matched, so the signature is w precisely at
/// Hamming weight k-1.
inline PlaneGraph star_matchgate(int k, const GaussianRational& w) {
    PlaneGraph g;
    int hub = k + 1;
    for (int i = 1; i <= k + 1; ++i) g.add_node(i);
    std::vector<int> fan;
    for (int i = k; i >= 1; --i) fan.push_back(i);
    g.rotation[hub] = std::move(fan);
    for (int i = 1; i <= k; ++i) {
        g.add_edge(i, hub, w);
        g.rotation[i] = {hub};
        g.externals.push_back(i);
    }
    g.outer = Dart{1, hub};
    return g;
}

/// Weight-1 pendant on every external, with the fresh endpoints becoming the
/// externals; this maps the signature through alpha -> alpha xor 1..1.
inline PlaneGraph pendant_on_all_externals(PlaneGraph g) {
    const int k = g.arity();
    std::map<int, int> corners = plan_external_corners(g, g.externals);
    int next = g.max_label() + 1;
    for (int i = 1; i <= k; ++i) {
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
    return g;
}

/// Scaling edge of the given weight plus a weight-1 pendant per external:
/// nonzero only at alpha = 0..0.
inline PlaneGraph all_present_gadget(int k, const GaussianRational& value) {
    PlaneGraph g;
    for (int i = 1; i <= 2 * k; ++i) g.add_node(i);
    for (int i = 1; i <= k; ++i) {
        g.add_edge(i, k + i, GaussianRational(1));
        g.rotation[i] = {k + i};
        g.rotation[k + i] = {i};
        g.externals.push_back(i);
    }
    if (k > 0) g.outer = Dart{1, k + 1};
    add_scaling_edge(g, value);
    return g;
}

/// Scaling edge plus a length-two pendant path per external: a surviving
/// external strands the path tip, so only alpha = 1..1 is nonzero.
inline PlaneGraph all_removed_gadget(int k, const GaussianRational& value) {
    PlaneGraph g;
    for (int i = 1; i <= 3 * k; ++i) g.add_node(i);
    for (int i = 1; i <= k; ++i) {
        int p = k + 2 * i - 1, q = k + 2 * i;
        g.add_edge(i, p, GaussianRational(1));
        g.add_edge(p, q, GaussianRational(1));
        g.rotation[i] = {p};
        g.rotation[p] = {i, q};
        g.rotation[q] = {p};
        g.externals.push_back(i);
    }
    if (k > 0) g.outer = Dart{1, k + 1};
    add_scaling_edge(g, value);
    return g;
}

/// Single weighted edge between two externals plus a scaling edge.
inline PlaneGraph two_external_edge(const GaussianRational& z0, const GaussianRational& z2) {
    PlaneGraph g;
    g.add_node(1);
    g.add_node(2);
    g.add_edge(1, 2, z0 / z2);
    g.rotation[1] = {2};
    g.rotation[2] = {1};
    g.outer = Dart{1, 2};
    g.externals = {1, 2};
    add_scaling_edge(g, z2);
    return g;
}

/// Delete the external at 1-based `position` from the graph entirely (node
/// and incident edges); the remaining externals keep their order.
inline PlaneGraph delete_external(const PlaneGraph& g, int position) {
    RemovalPattern alpha{g.arity(), (std::uint32_t)1 << (g.arity() - position)};
    return remove_externals(g, alpha);
}

}  // namespace detail

/// Direct constructions realizing every accepted symmetric signature. Even
/// forms come from the triangle cycle with x = 1, y = the common ratio and an
/// isolated scaling edge absorbing the factor 2; odd forms delete one
/// external from the even realization of arity k+1. Degenerate single-entry
/// forms use x = 0 or y = 0 cycles, the spoke hub, or pendant gadgets when
/// the cycle shape cannot express them (weights 1 and k-1, and arities < 3).
inline PlaneGraph realize_symmetric(const SymmetricSignature& z) {
    SymmetricCheck check = check_symmetric_realizable(z);
    if (check.cls == SymmetricClass::NotRealizable)
        throw std::invalid_argument("realize_symmetric: vector is not a symmetric matchgate signature");

    const int k = z.arity();
    PlaneGraph g;
    if (check.cls == SymmetricClass::Zero) {
        g = detail::zero_matchgate(k);
    } else {
        const int p = check.cls == SymmetricClass::EvenForm ? 0 : 1;
        std::vector<int> support;
        for (int i = p; i <= k; i += 2)
            if (!z.z(i).is_zero()) support.push_back(i);

        GaussianRational two(2);
        if (support.size() == 1) {
            const int h = support.front();
            const GaussianRational& value = z.z(h);
            if (h == 0) {
                g = k >= 3 ? [&] {
                    PlaneGraph cyc = triangle_cycle(k, GaussianRational(1), GaussianRational());
                    detail::add_scaling_edge(cyc, value / two);
                    return cyc;
                }()
                           : detail::all_present_gadget(k, value);
            } else if (h == k) {
                if (k >= 4 && k % 2 == 0) {
                    g = triangle_cycle(k, GaussianRational(), GaussianRational(1));
                    detail::add_scaling_edge(g, value / two);
                } else if (k >= 3) {
                    g = triangle_cycle(k + 1, GaussianRational(), GaussianRational(1));
                    detail::add_scaling_edge(g, value / two);
                    g = detail::delete_external(g, k + 1);
                } else {
                    g = detail::all_removed_gadget(k, value);
                }
            } else if (h == k - 1) {
                g = detail::star_matchgate(k, value);
            } else if (h == 1) {
                g = detail::pendant_on_all_externals(detail::star_matchgate(k, value));
            } else {
                throw std::logic_error("unreachable symmetric case");
            }
        } else {
            GaussianRational ratio = check.r1 / check.r2;
            const GaussianRational& first = z.z(support.front());
            if (p == 0) {
                if (k >= 3) {
                    g = triangle_cycle(k, GaussianRational(1), ratio);
                    detail::add_scaling_edge(g, first / two);
                } else {
                    g = detail::two_external_edge(z.z(0), z.z(2));
                }
            } else {
                g = triangle_cycle(k + 1, GaussianRational(1), ratio);
                detail::add_scaling_edge(g, first / (ratio * two));
                g = detail::delete_external(g, k + 1);
            }
        }
    }
    g.validate();
    if (k <= 8 && signature(g) != dense(z))
        throw std::logic_error("realize_symmetric produced a wrong signature");
    return g;
}

enum class GadgetParity { Even, Odd };

/// Arity-t matchgate whose signature is 1 on every pattern of the chosen
/// Hamming-weight parity and 0 elsewhere.
inline PlaneGraph parity_gadget(int t, GadgetParity parity) {
    if (t < 1) throw std::domain_error("parity_gadget needs arity >= 1");
    SymmetricSignature z;
    z.entries.resize(static_cast<std::size_t>(t) + 1);
    for (int i = 0; i <= t; ++i)
        if (i % 2 == (parity == GadgetParity::Even ? 0 : 1)) z.entries[static_cast<std::size_t>(i)] = GaussianRational(1);
    return realize_symmetric(z);
}

}  // namespace matchgate
