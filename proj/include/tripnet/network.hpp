#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/tree.hpp"

namespace tripnet {

/// Rooted DAG with leaves labeled bijectively by a taxon set. In strict
/// mode the root has indegree 0 / outdegree 2 and every other node is a
/// reticulation (2,1), a tree node (1,2) or a leaf (1,0). Networks built by
/// the height-function realization are flagged `relaxed` and only promise
/// acyclicity, a unique indegree-0 root and the leaf labeling.
class PhyloNetwork {
public:
    struct Node {
        std::vector<int> parents;
        std::vector<int> children;
        Taxon label; // nonempty exactly on leaves
        bool is_leaf() const { return children.empty(); }
    };

    bool relaxed = false;

    PhyloNetwork() = default;

    static PhyloNetwork single_leaf(const Taxon& t) {
        PhyloNetwork N;
        N.relaxed = true;
        N.root_ = N.add_node(t);
        return N;
    }

    static PhyloNetwork cherry(const Taxon& a, const Taxon& b) {
        PhyloNetwork N;
        int r = N.add_node();
        int x = N.add_node(a);
        int y = N.add_node(b);
        N.add_edge(r, x);
        N.add_edge(r, y);
        N.root_ = r;
        return N;
    }

    int add_node(const Taxon& label = {}) {
        nodes_.push_back(Node{{}, {}, label});
        return static_cast<int>(nodes_.size()) - 1;
    }

    void add_edge(int u, int v) {
        nodes_[u].children.push_back(v);
        nodes_[v].parents.push_back(u);
    }

    void remove_edge(int u, int v) {
        auto& cs = nodes_[u].children;
        auto& ps = nodes_[v].parents;
        auto ci = std::find(cs.begin(), cs.end(), v);
        auto pi = std::find(ps.begin(), ps.end(), u);
        if (ci == cs.end() || pi == ps.end())
            throw internal_error("remove_edge: no such edge");
        cs.erase(ci);
        ps.erase(pi);
    }

    /// Insert a fresh node on the edge u->v and return its id.
    int subdivide(int u, int v) {
        remove_edge(u, v);
        int m = add_node();
        add_edge(u, m);
        add_edge(m, v);
        return m;
    }

    int root() const { return root_; }
    void set_root(int r) { root_ = r; }
    const Node& node(int id) const { return nodes_[id]; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int u = 0; u < node_count(); ++u)
            for (int v : nodes_[u].children)
                out.emplace_back(u, v);
        return out;
    }

    std::vector<int> leaf_ids() const {
        std::vector<bool> live = root_ >= 0 ? reach_set(root_) : std::vector<bool>(node_count(), true);
        std::vector<int> out;
        for (int i = 0; i < node_count(); ++i)
            if (live[i] && nodes_[i].is_leaf())
                out.push_back(i);
        return out;
    }

    TaxonSet leaves() const {
        TaxonSet out;
        for (int id : leaf_ids())
            out.insert(nodes_[id].label);
        return out;
    }

    int find_leaf(const Taxon& t) const {
        for (int id : leaf_ids())
            if (nodes_[id].label == t)
                return id;
        return -1;
    }

    bool has_cycle() const {
        // 0 = unseen, 1 = on stack, 2 = done
        std::vector<int> state(node_count(), 0);
        std::function<bool(int)> dfs = [&](int u) {
            state[u] = 1;
            for (int v : nodes_[u].children) {
                if (state[v] == 1)
                    return true;
                if (state[v] == 0 && dfs(v))
                    return true;
            }
            state[u] = 2;
            return false;
        };
        for (int i = 0; i < node_count(); ++i)
            if (state[i] == 0 && dfs(i))
                return true;
        return false;
    }

    /// Longest-path distance from the root to every node (-1 if unreachable).
    std::vector<int> longest_depths() const {
        std::vector<int> d(node_count(), -1);
        if (root_ < 0)
            return d;
        std::vector<int> order = topo_order();
        d[root_] = 0;
        for (int u : order)
            if (d[u] >= 0)
                for (int v : nodes_[u].children)
                    d[v] = std::max(d[v], d[u] + 1);
        return d;
    }

    std::vector<int> topo_order() const {
        std::vector<int> indeg(node_count(), 0), order;
        for (int u = 0; u < node_count(); ++u)
            for (int v : nodes_[u].children)
                ++indeg[v];
        std::vector<int> q;
        for (int i = 0; i < node_count(); ++i)
            if (indeg[i] == 0)
                q.push_back(i);
        while (!q.empty()) {
            int u = q.back();
            q.pop_back();
            order.push_back(u);
            for (int v : nodes_[u].children)
                if (--indeg[v] == 0)
                    q.push_back(v);
        }
        if (order.size() != nodes_.size())
            throw internal_error("topo_order: graph has a cycle");
        return order;
    }

    /// Node set reachable from id, including id.
    std::vector<bool> reach_set(int id) const {
        std::vector<bool> seen(node_count(), false);
        std::vector<int> stack{id};
        seen[id] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : nodes_[u].children)
                if (!seen[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
        }
        return seen;
    }

    /// Drop nodes not reachable from the root and reindex.
    void compact() {
        if (root_ < 0)
            return;
        std::vector<bool> keep = reach_set(root_);
        std::vector<int> remap(node_count(), -1);
        std::vector<Node> fresh;
        for (int i = 0; i < node_count(); ++i)
            if (keep[i]) {
                remap[i] = static_cast<int>(fresh.size());
                fresh.push_back(nodes_[i]);
            }
        for (auto& n : fresh) {
            std::vector<int> ps, cs;
            for (int p : n.parents)
                if (remap[p] >= 0)
                    ps.push_back(remap[p]);
            for (int c : n.children)
                if (remap[c] >= 0)
                    cs.push_back(remap[c]);
            n.parents = std::move(ps);
            n.children = std::move(cs);
        }
        nodes_ = std::move(fresh);
        root_ = remap[root_];
    }

    std::vector<Node>& raw_nodes() { return nodes_; }
    const std::vector<Node>& raw_nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
};

struct NetworkDiagnostics {
    bool ok = true;
    std::vector<std::string> problems;
    void fail(std::string p) {
        ok = false;
        problems.push_back(std::move(p));
    }
};

/// Check the network invariants. Strict mode enforces the full degree case
/// list; relaxed networks are only checked for acyclicity, a proper root
/// and distinct leaf labels.
inline NetworkDiagnostics validate_network(const PhyloNetwork& N) {
    NetworkDiagnostics diag;
    if (N.node_count() == 0) {
        diag.fail("empty network");
        return diag;
    }
    if (N.has_cycle())
        diag.fail("cycle");
    int root = N.root();
    if (root < 0 || !N.node(root).parents.empty())
        diag.fail("root must have indegree 0");
    std::set<Taxon> seen;
    for (int i = 0; i < N.node_count(); ++i) {
        const auto& n = N.node(i);
        if (n.is_leaf()) {
            if (n.label.empty())
                diag.fail("unlabeled leaf node " + std::to_string(i));
            else if (!seen.insert(n.label).second)
                diag.fail("duplicate leaf label '" + n.label + "'");
        }
    }
    if (N.relaxed)
        return diag;
    if (N.node_count() == 1) {
        diag.fail("single-node network is not a strict network");
        return diag;
    }
    for (int i = 0; i < N.node_count(); ++i) {
        const auto& n = N.node(i);
        std::size_t in = n.parents.size(), out = n.children.size();
        if (i == root) {
            if (out != 2)
                diag.fail("root outdegree " + std::to_string(out) + ", want 2");
            continue;
        }
        bool retic = in == 2 && out == 1;
        bool split = in == 1 && out == 2;
        bool leaf = in == 1 && out == 0;
        if (!retic && !split && !leaf)
            diag.fail("node " + std::to_string(i) + " has indegree " + std::to_string(in) +
                      ", outdegree " + std::to_string(out));
    }
    return diag;
}

inline bool is_valid_network(const PhyloNetwork& N) { return validate_network(N).ok; }

/// Wrap a binary tree as a strict network (single leaves come back relaxed).
inline PhyloNetwork network_from_tree(const PhyloTree& T) {
    if (T.node_count() == 1)
        return PhyloNetwork::single_leaf(T.node(T.root()).label);
    PhyloNetwork N;
    for (int i = 0; i < T.node_count(); ++i)
        N.add_node(T.node(i).label);
    for (int i = 0; i < T.node_count(); ++i)
        for (int c : T.node(i).children)
            N.add_edge(i, c);
    N.set_root(T.root());
    return N;
}

} // namespace tripnet
