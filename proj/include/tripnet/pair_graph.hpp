#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tripnet/core.hpp"

namespace tripnet {

/// Directed graph on the unordered taxon pairs of a triplet set: each
/// triplet ij|k contributes the edges ij->ik and ij->jk. Every pair of the
/// taxon set is a node even when isolated; edges remember the triplets
/// that support them.
class PairGraph {
public:
    PairGraph() = default;

    explicit PairGraph(const TaxonSet& taxa) : taxa_(taxa) {
        for (const Pair& p : all_pairs(taxa)) {
            index_[p] = static_cast<int>(nodes_.size());
            nodes_.push_back(p);
        }
        adj_.resize(nodes_.size());
    }

    const TaxonSet& taxa() const { return taxa_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const Pair& pair_of(int id) const { return nodes_[id]; }
    int id_of(const Pair& p) const {
        auto it = index_.find(p);
        if (it == index_.end())
            throw internal_error("pair not in graph: " + p.str());
        return it->second;
    }

    void add_edge(const Pair& u, const Pair& v, const Triplet& support) {
        adj_[id_of(u)][id_of(v)].insert(support);
    }

    bool has_edge(const Pair& u, const Pair& v) const {
        auto it = index_.find(u);
        auto jt = index_.find(v);
        if (it == index_.end() || jt == index_.end())
            return false;
        return adj_[it->second].count(jt->second) != 0;
    }

    const std::map<int, std::set<Triplet>>& out(int id) const { return adj_[id]; }

    int edge_count() const {
        int c = 0;
        for (const auto& m : adj_)
            c += static_cast<int>(m.size());
        return c;
    }

    struct Edge {
        Pair from;
        Pair to;
        std::set<Triplet> support;
    };

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int u = 0; u < node_count(); ++u)
            for (const auto& [v, sup] : adj_[u])
                out.push_back({nodes_[u], nodes_[v], sup});
        return out;
    }

    void remove_edge(int u, int v) { adj_[u].erase(v); }

private:
    TaxonSet taxa_;
    std::vector<Pair> nodes_;
    std::map<Pair, int> index_;
    std::vector<std::map<int, std::set<Triplet>>> adj_;
};

/// G_tau over the given taxon set (defaults to L(tau)).
inline PairGraph build_pair_graph(const TripletSet& tau, const TaxonSet& taxa) {
    if (taxa.size() < 2)
        throw input_error("pair graph needs at least 2 taxa");
    for (const auto& t : tau)
        for (const Taxon* x : {&t.left1, &t.left2, &t.right})
            if (!taxa.count(*x))
                throw input_error("triplet taxon '" + *x + "' outside declared taxa");
    PairGraph G(taxa);
    for (const auto& t : tau) {
        Pair ij(t.left1, t.left2);
        G.add_edge(ij, Pair(t.left1, t.right), t);
        G.add_edge(ij, Pair(t.left2, t.right), t);
    }
    return G;
}

inline PairGraph build_pair_graph(const TripletSet& tau) {
    return build_pair_graph(tau, tau.taxa());
}

namespace detail {

// Longest outgoing path length per node, or nullopt if the graph is cyclic.
inline std::optional<std::vector<int>> longest_out_paths(const PairGraph& G) {
    int n = G.node_count();
    std::vector<int> state(n, 0), lp(n, 0);
    bool cyclic = false;
    std::function<void(int)> dfs = [&](int u) {
        state[u] = 1;
        for (const auto& [v, sup] : G.out(u)) {
            if (state[v] == 1) {
                cyclic = true;
                return;
            }
            if (state[v] == 0)
                dfs(v);
            if (cyclic)
                return;
            lp[u] = std::max(lp[u], lp[v] + 1);
        }
        state[u] = 2;
    };
    for (int i = 0; i < n && !cyclic; ++i)
        if (state[i] == 0)
            dfs(i);
    if (cyclic)
        return std::nullopt;
    return lp;
}

} // namespace detail

inline bool is_dag(const PairGraph& G) {
    return detail::longest_out_paths(G).has_value();
}

/// Edge count of the longest directed path; 0 for an edgeless graph.
inline int longest_path_length(const PairGraph& G) {
    auto lp = detail::longest_out_paths(G);
    if (!lp)
        throw input_error("longest_path_length: graph has a cycle");
    int best = 0;
    for (int v : *lp)
        best = std::max(best, v);
    return best;
}

/// Peel the DAG from its sinks: with l the longest path length, sinks get
/// l+1, the next layer l, and so on; equivalently h(p) = l + 1 - LP(p)
/// where LP(p) is the longest path starting at p. Isolated pairs get l+1.
inline HeightFunction dag_height(const PairGraph& G) {
    auto lp = detail::longest_out_paths(G);
    if (!lp)
        throw input_error("dag_height: graph has a cycle");
    int l = 0;
    for (int v : *lp)
        l = std::max(l, v);
    HeightFunction h;
    for (int i = 0; i < G.node_count(); ++i)
        h.set(G.pair_of(i), l + 1 - (*lp)[i]);
    return h;
}

struct RemovedEdge {
    Pair from;
    Pair to;
    std::set<Triplet> support;
};

namespace detail {

// Shortest directed cycle through `start`, restricted to one strongly
// connected component; returns it as a node sequence start -> ... -> start.
inline std::optional<std::vector<int>> shortest_cycle_from(const PairGraph& G, int start,
                                                           const std::vector<int>& comp) {
    int n = G.node_count();
    std::vector<int> prev(n, -2);
    std::deque<int> q;
    q.push_back(start);
    prev[start] = -1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& [v, sup] : G.out(u)) {
            if (comp[v] != comp[start])
                continue;
            if (v == start) {
                std::vector<int> cyc;
                for (int cur = u; cur != -1; cur = prev[cur])
                    cyc.push_back(cur);
                std::reverse(cyc.begin(), cyc.end()); // start, ..., u
                cyc.push_back(start);
                return cyc; // start, ..., u, start
            }
            if (prev[v] == -2) {
                prev[v] = u;
                q.push_back(v);
            }
        }
    }
    return std::nullopt;
}

inline std::vector<int> strongly_connected_components(const PairGraph& G) {
    int n = G.node_count();
    std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
    std::vector<bool> on(n, false);
    int timer = 0, ncomp = 0;
    std::function<void(int)> dfs = [&](int u) {
        num[u] = low[u] = timer++;
        stk.push_back(u);
        on[u] = true;
        for (const auto& [v, sup] : G.out(u)) {
            if (num[v] == -1) {
                dfs(v);
                low[u] = std::min(low[u], low[v]);
            } else if (on[v]) {
                low[u] = std::min(low[u], num[v]);
            }
        }
        if (low[u] == num[u]) {
            while (true) {
                int w = stk.back();
                stk.pop_back();
                on[w] = false;
                comp[w] = ncomp;
                if (w == u)
                    break;
            }
            ++ncomp;
        }
    };
    for (int i = 0; i < n; ++i)
        if (num[i] == -1)
            dfs(i);
    return comp;
}

} // namespace detail

/// Greedy feedback-arc-set repair: while a cycle exists, locate a shortest
/// cycle (BFS inside the strongly connected components, scanning start
/// nodes in pair order) and delete the cycle edge with the fewest
/// supporting triplets; ties go to the lexicographically last (from,to)
/// pair, which reproduces the published worked example. Removed edges keep
/// their supports so lost triplets can be recaptured later.
inline std::pair<PairGraph, std::vector<RemovedEdge>> make_dag(const PairGraph& G) {
    PairGraph H = G;
    std::vector<RemovedEdge> removed;
    while (!is_dag(H)) {
        std::vector<int> comp = detail::strongly_connected_components(H);
        std::optional<std::vector<int>> best;
        for (int s = 0; s < H.node_count(); ++s) {
            // a node can lie on a cycle only if its component has >= 2 nodes
            int members = 0;
            for (int t = 0; t < H.node_count() && members < 2; ++t)
                if (comp[t] == comp[s])
                    ++members;
            if (members < 2)
                continue;
            auto cyc = detail::shortest_cycle_from(H, s, comp);
            if (cyc && (!best || cyc->size() < best->size()))
                best = cyc;
        }
        if (!best)
            throw internal_error("cyclic graph but no cycle found");
        // pick the edge to drop
        int bu = -1, bv = -1;
        std::size_t bsup = 0;
        for (std::size_t i = 0; i + 1 < best->size(); ++i) {
            int u = (*best)[i], v = (*best)[i + 1];
            std::size_t sup = H.out(u).at(v).size();
            bool better = false;
            if (bu < 0)
                better = true;
            else if (sup != bsup)
                better = sup < bsup;
            else
                better = std::make_pair(H.pair_of(u), H.pair_of(v)) >
                         std::make_pair(H.pair_of(bu), H.pair_of(bv));
            if (better) {
                bu = u;
                bv = v;
                bsup = sup;
            }
        }
        removed.push_back({H.pair_of(bu), H.pair_of(bv), H.out(bu).at(bv)});
        H.remove_edge(bu, bv);
    }
    return {std::move(H), std::move(removed)};
}

/// Graphviz rendering of G_tau; edges listed in `removed` come out dashed.
inline std::string pair_graph_dot(const PairGraph& G,
                                  const std::vector<RemovedEdge>& removed = {}) {
    std::ostringstream os;
    os << "digraph pair_graph {\n";
    for (int i = 0; i < G.node_count(); ++i)
        os << "  \"" << G.pair_of(i).str() << "\";\n";
    for (const auto& e : G.edges())
        os << "  \"" << e.from.str() << "\" -> \"" << e.to.str() << "\";\n";
    for (const auto& e : removed)
        os << "  \"" << e.from.str() << "\" -> \"" << e.to.str() << "\" [style=dashed];\n";
    os << "}\n";
    return os.str();
}

} // namespace tripnet
