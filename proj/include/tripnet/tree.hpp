#pragma once

#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tripnet/core.hpp"

namespace tripnet {

/// Rooted unordered tree with leaves labeled bijectively by a taxon set.
/// Internal nodes carry no labels and have outdegree >= 2 (a one-node tree
/// is the single labeled leaf). Nodes live in an index arena; copying the
/// vector copies the tree.
class PhyloTree {
public:
    struct Node {
        int parent = -1;
        std::vector<int> children;
        Taxon label; // empty for internal nodes
        bool is_leaf() const { return children.empty(); }
    };

    PhyloTree() = default;

    static PhyloTree leaf(const Taxon& t) {
        PhyloTree T;
        T.root_ = T.add_node(-1, t);
        return T;
    }

    int add_node(int parent, const Taxon& label = {}) {
        nodes_.push_back(Node{parent, {}, label});
        int id = static_cast<int>(nodes_.size()) - 1;
        if (parent >= 0)
            nodes_[parent].children.push_back(id);
        else if (root_ < 0)
            root_ = id;
        return id;
    }

    /// Attach another tree as a child of `parent`; returns the grafted root id.
    int graft(int parent, const PhyloTree& sub) {
        int base = static_cast<int>(nodes_.size());
        for (const auto& n : sub.nodes_) {
            Node m = n;
            m.parent = (n.parent < 0) ? parent : n.parent + base;
            for (auto& c : m.children)
                c += base;
            nodes_.push_back(m);
        }
        int sub_root = sub.root_ + base;
        if (parent >= 0)
            nodes_[parent].children.push_back(sub_root);
        else if (root_ < 0)
            root_ = sub_root;
        return sub_root;
    }

    int root() const { return root_; }
    const Node& node(int id) const { return nodes_[id]; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    std::vector<int> leaf_ids() const {
        std::vector<int> out;
        for (int i = 0; i < node_count(); ++i)
            if (nodes_[i].is_leaf())
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
        for (int i = 0; i < node_count(); ++i)
            if (nodes_[i].is_leaf() && nodes_[i].label == t)
                return i;
        return -1;
    }

    /// Edge-count distance from the root.
    int depth(int id) const {
        int d = 0;
        for (int cur = id; nodes_[cur].parent >= 0; cur = nodes_[cur].parent)
            ++d;
        return d;
    }

    /// Length of the longest root-to-node path (in a tree this always ends
    /// at a leaf).
    int height() const {
        int h = 0;
        for (int id : leaf_ids())
            h = std::max(h, depth(id));
        return h;
    }

    int lca(int a, int b) const {
        std::set<int> anc;
        for (int cur = a; cur >= 0; cur = nodes_[cur].parent)
            anc.insert(cur);
        for (int cur = b; cur >= 0; cur = nodes_[cur].parent)
            if (anc.count(cur))
                return cur;
        throw internal_error("lca: nodes in different trees");
    }

    bool is_binary() const {
        for (const auto& n : nodes_)
            if (!n.is_leaf() && n.children.size() != 2)
                return false;
        return true;
    }

    /// Leaf set below each internal node; the hierarchy identifies the tree
    /// up to node identity.
    std::set<TaxonSet> clusters() const {
        std::set<TaxonSet> out;
        std::function<TaxonSet(int)> walk = [&](int id) {
            const Node& n = nodes_[id];
            if (n.is_leaf())
                return TaxonSet{n.label};
            TaxonSet acc;
            for (int c : n.children) {
                TaxonSet sub = walk(c);
                acc.insert(sub.begin(), sub.end());
            }
            out.insert(acc);
            return acc;
        };
        if (root_ >= 0)
            walk(root_);
        return out;
    }

    /// Smallest leaf label reachable from id; used for deterministic child
    /// ordering.
    Taxon min_leaf(int id) const {
        const Node& n = nodes_[id];
        if (n.is_leaf())
            return n.label;
        Taxon best;
        for (int c : n.children) {
            Taxon m = min_leaf(c);
            if (best.empty() || m < best)
                best = m;
        }
        return best;
    }

    /// Newick string with children ordered by smallest reachable leaf.
    std::string newick() const {
        std::function<std::string(int)> walk = [&](int id) -> std::string {
            const Node& n = nodes_[id];
            if (n.is_leaf())
                return n.label;
            std::vector<int> cs = n.children;
            std::sort(cs.begin(), cs.end(), [&](int a, int b) {
                return min_leaf(a) < min_leaf(b);
            });
            std::string s = "(";
            for (std::size_t i = 0; i < cs.size(); ++i) {
                if (i)
                    s += ",";
                s += walk(cs[i]);
            }
            return s + ")";
        };
        if (root_ < 0)
            return ";";
        return walk(root_) + ";";
    }

    std::vector<Node>& raw_nodes() { return nodes_; }
    const std::vector<Node>& raw_nodes() const { return nodes_; }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
};

namespace detail {

// Splits one node with k >= 3 children: the first k-1 children (in the
// given order) move under a fresh node y, which becomes a child of x next
// to the remaining child.
inline void split_node(PhyloTree& T, int x, const std::vector<int>& order) {
    auto& nodes = T.raw_nodes();
    int y = T.add_node(-1);
    nodes[y].parent = x;
    std::vector<int> peel(order.begin(), order.end() - 1);
    for (int c : peel) {
        nodes[c].parent = y;
        nodes[y].children.push_back(c);
    }
    nodes[x].children = {y, order.back()};
}

} // namespace detail

/// Refine every node of outdegree >= 3 into a binary cascade. The default
/// policy orders children by their smallest reachable leaf label and peels
/// the first k-1 under the new node, so results are reproducible.
inline PhyloTree binarize(const PhyloTree& tree) {
    PhyloTree T = tree;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int id = 0; id < T.node_count(); ++id) {
            if (T.node(id).children.size() < 3)
                continue;
            std::vector<int> order = T.node(id).children;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return T.min_leaf(a) < T.min_leaf(b);
            });
            detail::split_node(T, id, order);
            changed = true;
            break;
        }
    }
    return T;
}

/// Randomized variant: child order is shuffled before peeling, so different
/// draws yield different binarizations of the same tree.
inline PhyloTree binarize(const PhyloTree& tree, std::mt19937_64& rng) {
    PhyloTree T = tree;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int id = 0; id < T.node_count(); ++id) {
            if (T.node(id).children.size() < 3)
                continue;
            std::vector<int> order = T.node(id).children;
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng() % i]);
            detail::split_node(T, id, order);
            changed = true;
            break;
        }
    }
    return T;
}

} // namespace tripnet
