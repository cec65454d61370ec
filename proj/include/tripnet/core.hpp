#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tripnet {

/// Thrown for malformed user input (files, CLI arguments, precondition
/// violations on public entry points). Maps to exit code 1 in the CLI.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an internal invariant breaks. Maps to exit code 2.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

using Taxon = std::string;
using TaxonSet = std::set<Taxon>;

/// Unordered pair of taxa, stored with first < second.
struct Pair {
    Taxon first;
    Taxon second;

    Pair() = default;
    Pair(Taxon x, Taxon y) {
        if (x == y)
            throw internal_error("Pair: identical taxa '" + x + "'");
        if (y < x)
            std::swap(x, y);
        first = std::move(x);
        second = std::move(y);
    }

    bool contains(const Taxon& t) const { return t == first || t == second; }

    /// The partner of t, which must be a member.
    const Taxon& other(const Taxon& t) const {
        if (t == first)
            return second;
        if (t == second)
            return first;
        throw internal_error("Pair::other: '" + t + "' not in pair");
    }

    auto operator<=>(const Pair&) const = default;

    std::string str() const { return first + "," + second; }
};

/// All unordered pairs of X in lexicographic order.
inline std::vector<Pair> all_pairs(const TaxonSet& taxa) {
    std::vector<Pair> out;
    for (auto i = taxa.begin(); i != taxa.end(); ++i)
        for (auto j = std::next(i); j != taxa.end(); ++j)
            out.emplace_back(*i, *j);
    return out;
}

/// Rooted triplet "left1 left2 | right": left1 and left2 are closer to each
/// other than to right. Canonical form keeps left1 < left2.
struct Triplet {
    Taxon left1;
    Taxon left2;
    Taxon right;

    Triplet() = default;
    Triplet(Taxon a, Taxon b, Taxon c) {
        if (a == b || a == c || b == c)
            throw input_error("triplet taxa must be distinct: " + a + " " + b + " | " + c);
        if (b < a)
            std::swap(a, b);
        left1 = std::move(a);
        left2 = std::move(b);
        right = std::move(c);
    }

    Pair left_pair() const { return Pair(left1, left2); }
    bool mentions(const Taxon& t) const { return t == left1 || t == left2 || t == right; }

    auto operator<=>(const Triplet&) const = default;

    std::string str() const { return left1 + " " + left2 + " | " + right; }
};

/// A deduplicated set of canonical triplets. Contradictory members
/// (ij|k together with ik|j) are legal input.
class TripletSet {
public:
    TripletSet() = default;
    TripletSet(std::initializer_list<Triplet> ts) {
        for (const auto& t : ts)
            insert(t);
    }

    void insert(const Triplet& t) { triplets_.insert(t); }
    bool contains(const Triplet& t) const { return triplets_.count(t) != 0; }
    std::size_t size() const { return triplets_.size(); }
    bool empty() const { return triplets_.empty(); }

    auto begin() const { return triplets_.begin(); }
    auto end() const { return triplets_.end(); }

    bool operator==(const TripletSet&) const = default;

    /// L(tau): the union of the members' leaf labels.
    TaxonSet taxa() const {
        TaxonSet out;
        for (const auto& t : triplets_) {
            out.insert(t.left1);
            out.insert(t.left2);
            out.insert(t.right);
        }
        return out;
    }

private:
    std::set<Triplet> triplets_;
};

inline TaxonSet leaf_set(const TripletSet& tau) { return tau.taxa(); }

/// The triplets of tau all of whose taxa lie in X.
inline TripletSet restrict_to(const TripletSet& tau, const TaxonSet& X) {
    TripletSet out;
    for (const auto& t : tau)
        if (X.count(t.left1) && X.count(t.left2) && X.count(t.right))
            out.insert(t);
    return out;
}

/// Integer-valued weight on unordered taxon pairs; values are >= 1.
class HeightFunction {
public:
    HeightFunction() = default;

    void set(const Pair& p, int v) {
        if (v < 1)
            throw internal_error("height values must be positive, got " +
                                 std::to_string(v) + " for " + p.str());
        values_[p] = v;
    }
    void set(const Taxon& x, const Taxon& y, int v) { set(Pair(x, y), v); }

    int at(const Pair& p) const {
        auto it = values_.find(p);
        if (it == values_.end())
            throw internal_error("height undefined for pair " + p.str());
        return it->second;
    }
    int at(const Taxon& x, const Taxon& y) const { return at(Pair(x, y)); }

    bool defined(const Pair& p) const { return values_.count(p) != 0; }
    std::size_t size() const { return values_.size(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool operator==(const HeightFunction&) const = default;

    TaxonSet taxa() const {
        TaxonSet out;
        for (const auto& [p, v] : values_) {
            out.insert(p.first);
            out.insert(p.second);
        }
        return out;
    }

    int max_value() const {
        int m = 0;
        for (const auto& [p, v] : values_)
            m = std::max(m, v);
        return m;
    }
    int min_value() const {
        int m = 0;
        for (const auto& [p, v] : values_)
            m = (m == 0) ? v : std::min(m, v);
        return m;
    }

    /// Restriction to the pairs inside X.
    HeightFunction restricted(const TaxonSet& X) const {
        HeightFunction out;
        for (const auto& [p, v] : values_)
            if (X.count(p.first) && X.count(p.second))
                out.set(p, v);
        return out;
    }

private:
    std::map<Pair, int> values_;
};

} // namespace tripnet
