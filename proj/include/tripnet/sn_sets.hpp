#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/hbuild.hpp"

namespace tripnet {

/// S is an SN-set for tau when no triplet ij|k has i outside S while j and
/// k are both inside: nothing outside pulls one member of S below a pair
/// rooted in S. Singletons and the full taxon set always qualify.
inline bool is_sn_set(const TaxonSet& S, const TripletSet& tau) {
    for (const auto& t : tau) {
        if (!S.count(t.right))
            continue;
        bool l1 = S.count(t.left1) != 0, l2 = S.count(t.left2) != 0;
        if (l1 != l2)
            return false;
    }
    return true;
}

/// Disjoint SN-set blocks covering a taxon set, each tagged with the
/// representative it contracts to (its smallest member).
struct SnPartition {
    struct Block {
        TaxonSet members;
        Taxon rep;
    };
    std::vector<Block> blocks;

    std::vector<TaxonSet> block_sets() const {
        std::vector<TaxonSet> out;
        for (const auto& b : blocks)
            out.push_back(b.members);
        return out;
    }
    bool all_singletons() const {
        return std::all_of(blocks.begin(), blocks.end(),
                           [](const Block& b) { return b.members.size() == 1; });
    }
    const Block& block_of(const Taxon& t) const {
        for (const auto& b : blocks)
            if (b.members.count(t))
                return b;
        throw internal_error("taxon '" + t + "' not covered by partition");
    }
};

namespace detail {

// Strip live weight levels (below `ceiling`; higher edges are already gone)
// from the maximum downward until the component disconnects. Always
// succeeds for >= 2 taxa since an edgeless graph is fully disconnected.
// Returns the components and the cut at which they separated.
inline std::pair<std::vector<TaxonSet>, int>
strip_until_disconnected(const TaxonSet& taxa, const HeightFunction& h, int ceiling) {
    int cut = max_weight_within(taxa, h, ceiling);
    while (cut > 0) {
        std::vector<TaxonSet> comps = weight_components(taxa, h, cut);
        if (comps.size() > 1)
            return {comps, cut};
        --cut;
    }
    throw internal_error("strip_until_disconnected: graph never disconnected");
}

inline void sn_decompose_into(const TaxonSet& taxa, const HeightFunction& h,
                              const TripletSet& tau, int ceiling,
                              std::vector<TaxonSet>& out) {
    if (taxa.size() <= 1) {
        out.push_back(taxa);
        return;
    }
    auto [comps, cut] = strip_until_disconnected(taxa, h, ceiling);
    for (const TaxonSet& comp : comps) {
        if (is_sn_set(comp, tau))
            out.push_back(comp);
        else
            sn_decompose_into(comp, h, tau, cut, out);
    }
}

} // namespace detail

/// Height-driven SN-set decomposition: strip maximum-weight edges from the
/// complete graph until it disconnects, keep components that are SN-sets,
/// and re-strip the ones that are not. Terminates because singletons are
/// always SN-sets.
inline SnPartition sn_decomposition(const HeightFunction& h, const TripletSet& tau,
                                    const TaxonSet& taxa) {
    if (taxa.empty())
        return {};
    SnPartition P;
    std::vector<TaxonSet> blocks;
    if (taxa.size() == 1)
        blocks.push_back(taxa);
    else
        detail::sn_decompose_into(taxa, h, tau,
                                  detail::max_weight_within(taxa, h, INT_MAX) + 1, blocks);
    std::sort(blocks.begin(), blocks.end(),
              [](const TaxonSet& a, const TaxonSet& b) { return *a.begin() < *b.begin(); });
    for (auto& b : blocks)
        P.blocks.push_back({b, *b.begin()});
    return P;
}

inline SnPartition sn_decomposition(const HeightFunction& h, const TripletSet& tau) {
    return sn_decomposition(h, tau, h.taxa());
}

/// The contracted problem: complete weighted graph on block representatives
/// plus the projected triplets.
struct ContractedInstance {
    TaxonSet nodes;        // representatives
    HeightFunction w;      // w_S(s_i,s_j) = min cross-block height
    TripletSet triplets;   // s_i s_j | s_k for witnesses spanning 3 blocks
    SnPartition origin;
};

/// Contract each block to its representative: pair weights become the
/// minimum height across the two blocks, and a triplet survives iff its
/// witnesses touch three distinct blocks (anything narrower collapses).
/// Contradictory projections are all kept.
inline ContractedInstance contract(const HeightFunction& h, const TripletSet& tau,
                                   const SnPartition& P) {
    ContractedInstance out;
    out.origin = P;
    std::map<Taxon, Taxon> rep;
    for (const auto& b : P.blocks) {
        out.nodes.insert(b.rep);
        for (const auto& t : b.members)
            rep[t] = b.rep;
    }
    for (const auto& bi : P.blocks)
        for (const auto& bj : P.blocks) {
            if (!(bi.rep < bj.rep))
                continue;
            int best = 0;
            for (const auto& x : bi.members)
                for (const auto& y : bj.members) {
                    int v = h.at(x, y);
                    best = best == 0 ? v : std::min(best, v);
                }
            out.w.set(bi.rep, bj.rep, best);
        }
    for (const auto& t : tau) {
        auto i1 = rep.find(t.left1), i2 = rep.find(t.left2), i3 = rep.find(t.right);
        if (i1 == rep.end() || i2 == rep.end() || i3 == rep.end())
            throw input_error("triplet taxon not covered by partition: " + t.str());
        const Taxon &a = i1->second, &b = i2->second, &c = i3->second;
        if (a == b || a == c || b == c)
            continue;
        out.triplets.insert(Triplet(a, b, c));
    }
    return out;
}

} // namespace tripnet
