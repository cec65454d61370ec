#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/network.hpp"
#include "tripnet/tree.hpp"

namespace tripnet {

/// ij|k holds in a tree iff the i,j ancestor lies strictly below the
/// common ancestor of all three.
inline bool triplet_in_tree(const PhyloTree& T, const Triplet& t) {
    int li = T.find_leaf(t.left1), lj = T.find_leaf(t.left2), lk = T.find_leaf(t.right);
    if (li < 0 || lj < 0 || lk < 0)
        throw input_error("triplet taxa not all present in tree: " + t.str());
    int cij = T.lca(li, lj);
    int call = T.lca(cij, lk);
    return T.depth(cij) > T.depth(call);
}

namespace detail {

// Backtracking search for four pairwise internally node-disjoint paths
// u->i, u->j, v->u, v->k. The designated nodes {u,v,i,j,k} may appear only
// as path endpoints; every other node may be used by at most one path.
class DisjointPathSearch {
public:
    DisjointPathSearch(const PhyloNetwork& N, int u, int v, int i, int j, int k)
        : net_(N), used_(N.node_count(), false), designated_(N.node_count(), false) {
        for (int d : {u, v, i, j, k})
            designated_[d] = true;
        specs_ = {{u, i}, {u, j}, {v, u}, {v, k}};
    }

    bool run() { return solve(0); }

private:
    bool solve(std::size_t idx) {
        if (idx == specs_.size())
            return true;
        return extend(specs_[idx].first, specs_[idx].second, idx);
    }

    // Grow the idx-th path from cur toward target, marking internal nodes.
    bool extend(int cur, int target, std::size_t idx) {
        for (int nxt : net_.node(cur).children) {
            if (nxt == target) {
                if (solve(idx + 1))
                    return true;
                continue;
            }
            if (designated_[nxt] || used_[nxt])
                continue;
            used_[nxt] = true;
            if (extend(nxt, target, idx))
                return true;
            used_[nxt] = false;
        }
        return false;
    }

    const PhyloNetwork& net_;
    std::vector<bool> used_;
    std::vector<bool> designated_;
    std::vector<std::pair<int, int>> specs_;
};

} // namespace detail

/// ij|k holds in a network iff it contains a subdivision of the triplet:
/// distinct nodes u, v with pairwise internally node-disjoint paths u->i,
/// u->j, v->u and v->k. Exhaustive over candidate (u,v); exact but
/// exponential in the worst case, fine at the instance sizes this library
/// targets.
inline bool triplet_in_network(const PhyloNetwork& N, const Triplet& t) {
    int li = N.find_leaf(t.left1), lj = N.find_leaf(t.left2), lk = N.find_leaf(t.right);
    if (li < 0 || lj < 0 || lk < 0)
        throw input_error("triplet taxa not all present in network: " + t.str());
    int n = N.node_count();
    std::vector<bool> live = N.reach_set(N.root());
    std::vector<std::vector<bool>> reach(n);
    for (int u = 0; u < n; ++u)
        reach[u] = N.reach_set(u);
    for (int u = 0; u < n; ++u) {
        if (!live[u] || N.node(u).is_leaf() || !reach[u][li] || !reach[u][lj])
            continue;
        for (int v = 0; v < n; ++v) {
            if (v == u || !live[v] || N.node(v).is_leaf() || !reach[v][u] || !reach[v][lk])
                continue;
            if (detail::DisjointPathSearch(N, u, v, li, lj, lk).run())
                return true;
        }
    }
    return false;
}

inline bool triplet_in_network(const PhyloNetwork& N, const Taxon& a, const Taxon& b,
                               const Taxon& c) {
    return triplet_in_network(N, Triplet(a, b, c));
}

/// tau(N): every candidate triplet over the leaves, filtered by the
/// consistency check.
inline TripletSet triplets_of(const PhyloNetwork& N) {
    TaxonSet X = N.leaves();
    std::vector<Taxon> v(X.begin(), X.end());
    TripletSet out;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b)
            for (std::size_t c = 0; c < v.size(); ++c) {
                if (c == a || c == b)
                    continue;
                Triplet t(v[a], v[b], v[c]);
                if (triplet_in_network(N, t))
                    out.insert(t);
            }
    return out;
}

inline TripletSet triplets_of(const PhyloTree& T) {
    TaxonSet X = T.leaves();
    std::vector<Taxon> v(X.begin(), X.end());
    TripletSet out;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b)
            for (std::size_t c = 0; c < v.size(); ++c) {
                if (c == a || c == b)
                    continue;
                Triplet t(v[a], v[b], v[c]);
                if (triplet_in_tree(T, t))
                    out.insert(t);
            }
    return out;
}

inline int consistent_count(const PhyloNetwork& N, const TripletSet& tau) {
    int c = 0;
    for (const auto& t : tau)
        if (triplet_in_network(N, t))
            ++c;
    return c;
}

inline TripletSet inconsistent_triplets(const PhyloNetwork& N, const TripletSet& tau) {
    TripletSet out;
    for (const auto& t : tau)
        if (!triplet_in_network(N, t))
            out.insert(t);
    return out;
}

/// h_N(i,j) = min { l_N - d(c,r) : c a lowest common ancestor of i,j },
/// where d is the longest-path distance from the root and l_N the longest
/// root-to-leaf path length.
inline HeightFunction network_height(const PhyloNetwork& N) {
    int n = N.node_count();
    std::vector<int> depth = N.longest_depths();
    std::vector<int> leaf_ids = N.leaf_ids();
    if (leaf_ids.size() < 2)
        throw input_error("network_height needs at least 2 leaves");
    int lN = 0;
    for (int id : leaf_ids)
        lN = std::max(lN, depth[id]);
    std::vector<bool> live = N.reach_set(N.root());
    std::vector<std::vector<bool>> reach(n);
    for (int u = 0; u < n; ++u)
        reach[u] = N.reach_set(u);

    HeightFunction h;
    for (std::size_t a = 0; a < leaf_ids.size(); ++a) {
        for (std::size_t b = a + 1; b < leaf_ids.size(); ++b) {
            int i = leaf_ids[a], j = leaf_ids[b];
            std::vector<int> common;
            for (int c = 0; c < n; ++c)
                if (live[c] && c != i && c != j && reach[c][i] && reach[c][j])
                    common.push_back(c);
            // keep only the lowest: no other common ancestor reachable from c
            int best = -1;
            for (int c : common) {
                bool lowest = true;
                for (int d : common)
                    if (d != c && reach[c][d]) {
                        lowest = false;
                        break;
                    }
                if (lowest)
                    best = std::max(best, depth[c]);
            }
            if (best < 0)
                throw internal_error("leaves with no common ancestor");
            h.set(N.node(i).label, N.node(j).label, lN - best);
        }
    }
    return h;
}

inline int reticulation_count(const PhyloNetwork& N) {
    int c = 0;
    std::vector<bool> live = N.reach_set(N.root());
    for (int i = 0; i < N.node_count(); ++i)
        if (live[i] && N.node(i).parents.size() >= 2)
            ++c;
    return c;
}

/// Max reticulation count over biconnected components of the underlying
/// undirected graph; trees are level 0.
inline int level(const PhyloNetwork& N) {
    int n = N.node_count();
    // undirected simple adjacency
    std::vector<std::set<int>> adj(n);
    for (auto [u, v] : N.edges()) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    std::vector<int> num(n, -1), low(n, 0);
    std::vector<std::set<int>> comp_nodes;
    std::vector<std::pair<int, int>> stack;
    int timer = 0;

    std::function<void(int, int)> dfs = [&](int u, int parent) {
        num[u] = low[u] = timer++;
        for (int v : adj[u]) {
            if (v == parent)
                continue;
            if (num[v] == -1) {
                stack.emplace_back(u, v);
                dfs(v, u);
                low[u] = std::min(low[u], low[v]);
                if (low[v] >= num[u]) {
                    std::set<int> comp;
                    while (true) {
                        auto [a, b] = stack.back();
                        stack.pop_back();
                        comp.insert(a);
                        comp.insert(b);
                        if (a == u && b == v)
                            break;
                    }
                    comp_nodes.push_back(std::move(comp));
                }
            } else if (num[v] < num[u]) {
                stack.emplace_back(u, v);
                low[u] = std::min(low[u], num[v]);
            }
        }
    };
    for (int i = 0; i < n; ++i)
        if (num[i] == -1 && !adj[i].empty())
            dfs(i, -1);

    int best = 0;
    for (const auto& comp : comp_nodes) {
        int retics = 0;
        for (int u : comp)
            if (N.node(u).parents.size() >= 2)
                ++retics;
        best = std::max(best, retics);
    }
    return best;
}

} // namespace tripnet
