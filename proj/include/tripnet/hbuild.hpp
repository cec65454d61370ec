#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/network.hpp"
#include "tripnet/tree.hpp"

namespace tripnet {

/// h_T(i,j) = l_T - depth(lca(i,j)) with unit edge weights; l_T is the
/// longest root-to-node path length.
inline HeightFunction tree_height(const PhyloTree& T) {
    std::vector<int> leaves = T.leaf_ids();
    if (leaves.size() < 2)
        throw input_error("tree_height needs at least 2 leaves");
    int lT = T.height();
    HeightFunction h;
    for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b) {
            int c = T.lca(leaves[a], leaves[b]);
            h.set(T.node(leaves[a]).label, T.node(leaves[b]).label, lT - T.depth(c));
        }
    return h;
}

namespace detail {

// Connected components of the complete graph on `taxa` keeping only edges
// with weight strictly below `cut`.
inline std::vector<TaxonSet> weight_components(const TaxonSet& taxa, const HeightFunction& h,
                                               int cut) {
    std::map<Taxon, int> comp;
    int next = 0;
    for (const auto& t : taxa)
        comp[t] = next++;
    // union-find, tiny scale
    std::vector<int> parent(next);
    for (int i = 0; i < next; ++i)
        parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto i = taxa.begin(); i != taxa.end(); ++i)
        for (auto j = std::next(i); j != taxa.end(); ++j)
            if (h.at(*i, *j) < cut) {
                int a = find(comp[*i]), b = find(comp[*j]);
                if (a != b)
                    parent[a] = b;
            }
    std::map<int, TaxonSet> groups;
    for (const auto& t : taxa)
        groups[find(comp[t])].insert(t);
    std::vector<TaxonSet> out;
    for (auto& [k, v] : groups)
        out.push_back(std::move(v));
    // deterministic order: by smallest member
    std::sort(out.begin(), out.end(),
              [](const TaxonSet& a, const TaxonSet& b) { return *a.begin() < *b.begin(); });
    return out;
}

// Largest weight still live inside the component: edges at or above
// `ceiling` were removed at an enclosing level and no longer exist.
inline int max_weight_within(const TaxonSet& taxa, const HeightFunction& h, int ceiling) {
    int m = 0;
    for (auto i = taxa.begin(); i != taxa.end(); ++i)
        for (auto j = std::next(i); j != taxa.end(); ++j) {
            int v = h.at(*i, *j);
            if (v < ceiling)
                m = std::max(m, v);
        }
    return m;
}

// One HBUILD level: strip this component's maximum live weight; fail if it
// stays connected, otherwise recurse per sub-component.
inline std::optional<PhyloTree> hbuild_component(const TaxonSet& taxa,
                                                 const HeightFunction& h, int ceiling) {
    if (taxa.size() == 1)
        return PhyloTree::leaf(*taxa.begin());
    int cut = max_weight_within(taxa, h, ceiling);
    std::vector<TaxonSet> comps = weight_components(taxa, h, cut);
    if (comps.size() == 1)
        return std::nullopt;
    PhyloTree T;
    int root = T.add_node(-1);
    for (const auto& comp : comps) {
        auto sub = hbuild_component(comp, h, cut);
        if (!sub)
            return std::nullopt;
        T.graft(root, *sub);
    }
    return T;
}

} // namespace detail

/// Reconstruct a tree from a height function by repeatedly stripping the
/// maximum-weight edges of the complete weighted graph; each successful
/// disconnection becomes an internal node over its components. Returns
/// nullopt when some component survives the strip connected, i.e. no tree
/// has this height function.
inline std::optional<PhyloTree> hbuild(const HeightFunction& h) {
    TaxonSet X = h.taxa();
    if (X.empty())
        return std::nullopt;
    return detail::hbuild_component(X, h, h.max_value() + 1);
}

inline std::optional<PhyloTree> hbuild(const HeightFunction& h, const TaxonSet& taxa) {
    if (taxa.empty())
        return std::nullopt;
    if (taxa.size() == 1)
        return PhyloTree::leaf(*taxa.begin());
    return detail::hbuild_component(taxa, h, h.max_value() + 1);
}

/// Build a (relaxed, not necessarily binary) network whose height function
/// is exactly h. Pairs at the maximum hang off the root; every other pair
/// {x,y} hangs under a chain of h_max - h(x,y) edges, which pins its lowest
/// common ancestor depth. One minimum pair additionally reaches its leaf
/// through a path that stretches the longest root-leaf distance to h_max,
/// so the recovered values are not shifted.
inline PhyloNetwork realize_height(const HeightFunction& h) {
    TaxonSet X = h.taxa();
    if (X.size() < 2)
        throw input_error("realize_height needs at least 2 taxa");
    int hmax = h.max_value();
    int hmin = h.min_value();

    PhyloNetwork N;
    N.relaxed = true;
    int root = N.add_node();
    N.set_root(root);
    std::map<Taxon, int> leaf_id;
    for (const auto& t : X)
        leaf_id[t] = N.add_node(t);

    Pair padded = [&] {
        for (const Pair& p : all_pairs(X))
            if (h.at(p) == hmin)
                return p;
        throw internal_error("no minimum pair");
    }();

    std::set<std::pair<int, int>> edges_seen;
    auto link = [&](int u, int v) {
        if (edges_seen.insert({u, v}).second)
            N.add_edge(u, v);
    };
    // hang `leaf` below `anchor`, optionally through `stretch` extra nodes
    auto attach = [&](int anchor, const Taxon& leaf, int stretch) {
        int cur = anchor;
        for (int i = 0; i < stretch; ++i) {
            int w = N.add_node();
            link(cur, w);
            cur = w;
        }
        link(cur, leaf_id[leaf]);
    };

    for (const Pair& p : all_pairs(X)) {
        int anchor = root;
        for (int i = 0; i < hmax - h.at(p); ++i) {
            int w = N.add_node();
            link(anchor, w);
            anchor = w;
        }
        bool pad_first = (p == padded && hmin > 1);
        attach(anchor, p.first, pad_first ? hmin - 1 : 0);
        attach(anchor, p.second, 0);
    }
    return N;
}

} // namespace tripnet
