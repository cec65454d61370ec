#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "tripnet/core.hpp"

namespace tripnet {

/// Symmetric nonnegative distances over an ordered taxon set.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(std::vector<Taxon> taxa) : taxa_(std::move(taxa)) {
        for (const auto& t : taxa_)
            if (!index_.emplace(t, index_.size()).second)
                throw input_error("duplicate taxon '" + t + "' in distance matrix");
        d_.assign(taxa_.size() * taxa_.size(), 0.0);
    }

    const std::vector<Taxon>& taxa() const { return taxa_; }
    std::size_t size() const { return taxa_.size(); }
    bool has(const Taxon& t) const { return index_.count(t) != 0; }

    void set(const Taxon& a, const Taxon& b, double v) {
        if (!std::isfinite(v) || v < 0)
            throw input_error("distance must be finite and nonnegative");
        std::size_t i = index_.at(a), j = index_.at(b);
        if (i == j) {
            if (v != 0)
                throw input_error("diagonal distance must be zero");
            return;
        }
        d_[i * size() + j] = v;
        d_[j * size() + i] = v;
    }

    double at(const Taxon& a, const Taxon& b) const {
        auto i = index_.find(a), j = index_.find(b);
        if (i == index_.end() || j == index_.end())
            throw input_error("taxon not in distance matrix");
        return d_[i->second * size() + j->second];
    }

private:
    std::vector<Taxon> taxa_;
    std::map<Taxon, std::size_t> index_;
    std::vector<double> d_;
};

/// Unrooted four-leaf topology ab|cd, canonical: each side ordered, sides
/// ordered by their first taxon.
struct Quartet {
    Pair side_a;
    Pair side_b;

    Quartet() = default;
    Quartet(const Pair& x, const Pair& y) {
        if (x.contains(y.first) || x.contains(y.second))
            throw input_error("quartet taxa must be distinct");
        if (y < x) {
            side_a = y;
            side_b = x;
        } else {
            side_a = x;
            side_b = y;
        }
    }

    bool contains(const Taxon& t) const { return side_a.contains(t) || side_b.contains(t); }

    /// The side holding t, as a pair.
    const Pair& side_of(const Taxon& t) const {
        if (side_a.contains(t))
            return side_a;
        if (side_b.contains(t))
            return side_b;
        throw internal_error("taxon not in quartet");
    }
    const Pair& other_side(const Taxon& t) const {
        return side_a.contains(t) ? side_b : side_a;
    }

    auto operator<=>(const Quartet&) const = default;

    std::string str() const { return side_a.str() + "|" + side_b.str(); }
};

/// Four-point test on exactly four taxa: of the three pair-sums, the
/// topology whose own sum is strictly smallest wins; its inner edge weight
/// is half the gap. `tol` is relative (scaled by the largest sum, floor 1),
/// so tol = 0 reproduces exact rational comparison. Returns nullopt when no
/// sum beats both others by more than the tolerance (non-informative).
inline std::optional<Quartet> infer_quartet(const DistanceMatrix& D, double tol = 1e-9) {
    if (D.size() != 4)
        throw input_error("infer_quartet needs exactly 4 taxa, got " +
                          std::to_string(D.size()));
    const auto& t = D.taxa();
    struct Cand {
        double sum;
        Quartet q;
    };
    std::vector<Cand> cands = {
        {D.at(t[0], t[1]) + D.at(t[2], t[3]), Quartet(Pair(t[0], t[1]), Pair(t[2], t[3]))},
        {D.at(t[0], t[2]) + D.at(t[1], t[3]), Quartet(Pair(t[0], t[2]), Pair(t[1], t[3]))},
        {D.at(t[0], t[3]) + D.at(t[1], t[2]), Quartet(Pair(t[0], t[3]), Pair(t[1], t[2]))}};
    double scale = std::max({1.0, cands[0].sum, cands[1].sum, cands[2].sum});
    double margin = tol * scale;
    for (int i = 0; i < 3; ++i) {
        bool wins = true;
        for (int j = 0; j < 3 && wins; ++j)
            if (j != i && !(cands[j].sum - cands[i].sum > margin))
                wins = false;
        if (wins)
            return cands[i].q;
    }
    return std::nullopt;
}

namespace detail {

inline DistanceMatrix submatrix(const DistanceMatrix& D, const std::vector<Taxon>& subset) {
    DistanceMatrix S(subset);
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            S.set(subset[i], subset[j], D.at(subset[i], subset[j]));
    return S;
}

} // namespace detail

/// Quartet-with-outgroup triplet extraction: for every 3-subset of the
/// non-outgroup taxa, infer the quartet on the subset plus the outgroup.
/// An informative xy|z,o yields xy|z; when the outgroup instead pairs with
/// one taxon (xo|yz) the rooted reading is yz|x. At most one triplet per
/// 3-subset by construction.
inline TripletSet qot_triplets(const DistanceMatrix& D, const Taxon& outgroup,
                               double tol = 1e-9) {
    if (!D.has(outgroup))
        throw input_error("outgroup '" + outgroup + "' not in matrix");
    std::vector<Taxon> rest;
    for (const auto& t : D.taxa())
        if (t != outgroup)
            rest.push_back(t);
    if (rest.size() < 3)
        throw input_error("need at least 3 non-outgroup taxa");

    TripletSet out;
    for (std::size_t a = 0; a < rest.size(); ++a)
        for (std::size_t b = a + 1; b < rest.size(); ++b)
            for (std::size_t c = b + 1; c < rest.size(); ++c) {
                auto q = infer_quartet(
                    detail::submatrix(D, {rest[a], rest[b], rest[c], outgroup}), tol);
                if (!q)
                    continue;
                const Pair& far = q->other_side(outgroup);
                Taxon partner = q->side_of(outgroup).other(outgroup);
                // xy|partner,o reads as xy|partner; x,o|y,z reads as yz|x
                out.insert(Triplet(far.first, far.second, partner));
            }
    return out;
}

/// Least superset closed under: ij|k and js|i together force js|k.
/// Purely combinatorial, so it applies to arbitrary triplet sets, not just
/// quartet-derived ones.
inline TripletSet closure(const TripletSet& tau) {
    std::set<Triplet> work(tau.begin(), tau.end());
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Triplet> fresh;
        for (const auto& t1 : work) {
            // t1 = ij|k with (i, j) ranging over both left orderings
            for (int flip = 0; flip < 2; ++flip) {
                const Taxon& i = flip ? t1.left2 : t1.left1;
                const Taxon& j = flip ? t1.left1 : t1.left2;
                const Taxon& k = t1.right;
                for (const auto& t2 : work) {
                    // t2 = js|i
                    if (t2.right != i || !t2.left_pair().contains(j))
                        continue;
                    const Taxon& s = t2.left_pair().other(j);
                    if (s == k)
                        continue; // conclusion would be degenerate
                    Triplet conclusion(j, s, k);
                    if (!work.count(conclusion))
                        fresh.push_back(conclusion);
                }
            }
        }
        for (const auto& t : fresh)
            changed |= work.insert(t).second;
    }
    TripletSet out;
    for (const auto& t : work)
        out.insert(t);
    return out;
}

} // namespace tripnet
