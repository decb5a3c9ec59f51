#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "matchgate/rational.hpp"

namespace matchgate {

/// Partition of an even label set into disjoint pairs.
using PairPartition = std::vector<std::pair<int, int>>;

/// (-1)^(number of overlapping pairs): {a,b},{c,d} overlap iff a<c<b<d or
/// c<a<d<b. This equals the permutation sign of the canonical Pfaffian term
/// and extends verbatim to non-consecutive label sets.
inline int overlap_sign(const PairPartition& pairs) {
    std::vector<std::pair<int, int>> p;
    p.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        if (a == b) throw std::invalid_argument("pair with equal endpoints");
        p.emplace_back(std::min(a, b), std::max(a, b));
    }
    int overlaps = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            auto [a, b] = p[i];
            auto [c, d] = p[j];
            if ((a < c && c < b && b < d) || (c < a && a < d && d < b)) ++overlaps;
        }
    }
    return overlaps % 2 == 0 ? 1 : -1;
}

/// Skew-symmetric matrix over Q(i) with an ordered, not necessarily
/// consecutive label set. Only the upper triangle is stored; absent entries
/// are zero.
class SkewMatrix {
public:
    SkewMatrix() = default;

    SkewMatrix(std::vector<int> labels, std::map<std::pair<int, int>, GaussianRational> upper)
        : labels_(std::move(labels)), upper_(std::move(upper)) {
        std::sort(labels_.begin(), labels_.end());
        if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
            throw std::invalid_argument("SkewMatrix: duplicate labels");
        for (const auto& [key, w] : upper_) {
            (void)w;
            if (key.first >= key.second)
                throw std::invalid_argument("SkewMatrix: entries must be given for u < v");
            if (!has_label(key.first) || !has_label(key.second))
                throw std::invalid_argument("SkewMatrix: entry outside the label set");
        }
    }

    /// Build from a dense matrix in label order; rejects non-skew input.
    static SkewMatrix from_dense(std::vector<int> labels,
                                 const std::vector<std::vector<GaussianRational>>& dense) {
        std::size_t n = labels.size();
        if (dense.size() != n) throw std::invalid_argument("SkewMatrix: dense size mismatch");
        std::map<std::pair<int, int>, GaussianRational> upper;
        std::vector<int> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (dense[i].size() != n) throw std::invalid_argument("SkewMatrix: dense size mismatch");
            if (!dense[i][i].is_zero())
                throw std::invalid_argument("SkewMatrix: nonzero diagonal entry");
            for (std::size_t j = i + 1; j < n; ++j) {
                if (dense[i][j] != -dense[j][i])
                    throw std::invalid_argument("SkewMatrix: matrix is not skew-symmetric");
                if (!dense[i][j].is_zero()) upper[{sorted[i], sorted[j]}] = dense[i][j];
            }
        }
        return SkewMatrix(std::move(sorted), std::move(upper));
    }

    const std::vector<int>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    bool has_label(int u) const { return std::binary_search(labels_.begin(), labels_.end(), u); }

    GaussianRational at(int u, int v) const {
        if (u == v) return GaussianRational();
        auto it = upper_.find(edge_key_(u, v));
        if (it == upper_.end()) return GaussianRational();
        return u < v ? it->second : -it->second;
    }

    const std::map<std::pair<int, int>, GaussianRational>& upper() const { return upper_; }

    void set(int u, int v, GaussianRational w) {
        if (u == v) throw std::invalid_argument("SkewMatrix: diagonal entry");
        if (!has_label(u) || !has_label(v)) throw std::invalid_argument("SkewMatrix: unknown label");
        if (u > v) {
            std::swap(u, v);
            w = -w;
        }
        if (w.is_zero())
            upper_.erase({u, v});
        else
            upper_[{u, v}] = std::move(w);
    }

private:
    static std::pair<int, int> edge_key_(int u, int v) {
        return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
    }

    std::vector<int> labels_;
    std::map<std::pair<int, int>, GaussianRational> upper_;
};

/// Memoized Pfaffian-minor evaluator: expansion along the lowest remaining
/// label over label subsets, so repeated minor queries against one matrix
/// share work. Not safe for concurrent use; make one per thread.
class PfaffianEvaluator {
public:
    explicit PfaffianEvaluator(const SkewMatrix& matrix) : m_(matrix) {
        if (m_.size() > 63) throw std::invalid_argument("Pfaffian evaluator supports at most 63 labels");
        for (std::size_t i = 0; i < m_.size(); ++i) pos_[m_.labels()[i]] = static_cast<int>(i);
    }

    GaussianRational full() { return eval_mask(((std::uint64_t)1 << m_.size()) - 1); }

    /// Pfaffian of the principal submatrix on `keep` (any order; sorted internally).
    GaussianRational minor(const std::vector<int>& keep) {
        std::uint64_t mask = 0;
        for (int label : keep) {
            auto it = pos_.find(label);
            if (it == pos_.end())
                throw std::out_of_range("pfaffian_minor: unknown label " + std::to_string(label));
            mask |= (std::uint64_t)1 << it->second;
        }
        return eval_mask(mask);
    }

    /// Signed Pfaffian of an arbitrarily ordered index list:
    /// Pf(i1,i2,...) = -Pf(i2,i1,...); duplicate indices give 0.
    GaussianRational signed_list(const std::vector<int>& list) {
        std::set<int> distinct(list.begin(), list.end());
        if (distinct.size() != list.size()) return GaussianRational();
        // Parity of the permutation sorting the list.
        int swaps = 0;
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j)
                if (list[i] > list[j]) ++swaps;
        GaussianRational value = minor(list);
        return swaps % 2 == 0 ? value : -value;
    }

    GaussianRational eval_mask(std::uint64_t mask) {
        int count = __builtin_popcountll(mask);
        if (count == 0) return GaussianRational(1);
        if (count % 2 == 1) return GaussianRational();
        auto it = memo_.find(mask);
        if (it != memo_.end()) return it->second;

        int first = __builtin_ctzll(mask);
        std::uint64_t rest = mask & ~((std::uint64_t)1 << first);
        GaussianRational sum;
        int sign = 1;  // (-1)^j for the j-th remaining label, j counted from 2
        for (std::uint64_t bits = rest; bits; bits &= bits - 1) {
            int j = __builtin_ctzll(bits);
            GaussianRational a = m_.at(m_.labels()[static_cast<std::size_t>(first)],
                                       m_.labels()[static_cast<std::size_t>(j)]);
            if (!a.is_zero()) {
                GaussianRational sub = eval_mask(rest & ~((std::uint64_t)1 << j));
                if (!sub.is_zero()) {
                    GaussianRational term = a * sub;
                    sum += sign > 0 ? term : -term;
                }
            }
            sign = -sign;
        }
        memo_.emplace(mask, sum);
        return sum;
    }

private:
    const SkewMatrix& m_;
    std::map<int, int> pos_;
    std::unordered_map<std::uint64_t, GaussianRational> memo_;
};

/// Pf(A) with the conventions Pf of the empty matrix = 1 and Pf = 0 for odd
/// sizes.
inline GaussianRational pfaffian(const SkewMatrix& a) {
    PfaffianEvaluator ev(a);
    return ev.full();
}

inline GaussianRational pfaffian_minor(const SkewMatrix& a, const std::vector<int>& keep) {
    PfaffianEvaluator ev(a);
    return ev.minor(keep);
}

/// Grassmann-Pluecker row expansion identity: for ascending index lists
/// I = (i_1..i_K), J = (j_1..j_L),
///   sum_l (-1)^(l-1) Pf(j_l, i_1..i_K) Pf(j_1.. ^j_l ..j_L)
/// + sum_k (-1)^(k-1) Pf(i_1.. ^i_k ..i_K) Pf(i_k, j_1..j_L) = 0.
inline bool check_gp_row_expansion(const SkewMatrix& a, const std::vector<int>& I,
                                   const std::vector<int>& J) {
    if (!std::is_sorted(I.begin(), I.end()) || !std::is_sorted(J.begin(), J.end()))
        throw std::invalid_argument("index lists must be ascending");
    PfaffianEvaluator ev(a);
    GaussianRational sum;
    for (std::size_t l = 0; l < J.size(); ++l) {
        std::vector<int> left;
        left.push_back(J[l]);
        left.insert(left.end(), I.begin(), I.end());
        std::vector<int> right = J;
        right.erase(right.begin() + static_cast<std::ptrdiff_t>(l));
        GaussianRational term = ev.signed_list(left) * ev.signed_list(right);
        sum += (l % 2 == 0) ? term : -term;
    }
    for (std::size_t k = 0; k < I.size(); ++k) {
        std::vector<int> left = I;
        left.erase(left.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<int> right;
        right.push_back(I[k]);
        right.insert(right.end(), J.begin(), J.end());
        GaussianRational term = ev.signed_list(left) * ev.signed_list(right);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum.is_zero();
}

/// Symmetric-difference form: with D = I xor J = {k_1 < ... < k_m},
///   sum_s (-1)^(s-1) Pf(I xor {k_s}) Pf(J xor {k_s}) = 0,
/// all index sets listed ascending.
inline bool check_gp_symmetric_difference(const SkewMatrix& a, const std::vector<int>& I,
                                          const std::vector<int>& J) {
    std::set<int> si(I.begin(), I.end()), sj(J.begin(), J.end());
    std::vector<int> diff;
    for (int x : si)
        if (!sj.count(x)) diff.push_back(x);
    for (int x : sj)
        if (!si.count(x)) diff.push_back(x);
    std::sort(diff.begin(), diff.end());

    PfaffianEvaluator ev(a);
    auto toggled = [](const std::set<int>& s, int x) {
        std::set<int> t = s;
        if (!t.erase(x)) t.insert(x);
        return std::vector<int>(t.begin(), t.end());
    };
    GaussianRational sum;
    for (std::size_t s = 0; s < diff.size(); ++s) {
        GaussianRational term = ev.minor(toggled(si, diff[s])) * ev.minor(toggled(sj, diff[s]));
        sum += (s % 2 == 0) ? term : -term;
    }
    return sum.is_zero();
}

}  // namespace matchgate
