#pragma once

// Shared test utilities: random generators, independent oracles and a
// label-respecting graph isomorphism check. Everything here is kept
// independent of the library code paths it is used to verify.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tripnet/tripnet.hpp"

namespace testsup {

using namespace tripnet;

using Rng = std::mt19937_64;

inline std::vector<Taxon> taxa_pool(int n) {
    std::vector<Taxon> out;
    for (int i = 0; i < n; ++i)
        out.push_back(std::string(1, static_cast<char>('a' + i)));
    return out;
}

inline TaxonSet taxa_set(int n) {
    auto v = taxa_pool(n);
    return TaxonSet(v.begin(), v.end());
}

// ---------------------------------------------------------------- trees --

/// Random rooted binary tree: join random subtrees until one remains.
inline PhyloTree random_binary_tree(const std::vector<Taxon>& taxa, Rng& rng) {
    std::vector<PhyloTree> forest;
    for (const auto& t : taxa)
        forest.push_back(PhyloTree::leaf(t));
    while (forest.size() > 1) {
        std::size_t i = rng() % forest.size();
        std::swap(forest[i], forest.back());
        PhyloTree a = std::move(forest.back());
        forest.pop_back();
        std::size_t j = rng() % forest.size();
        std::swap(forest[j], forest.back());
        PhyloTree b = std::move(forest.back());
        forest.pop_back();
        PhyloTree join;
        int r = join.add_node(-1);
        join.graft(r, a);
        join.graft(r, b);
        forest.push_back(std::move(join));
    }
    return forest.front();
}

/// Random tree with occasional multifurcations: contract internal edges of
/// a random binary tree with the given probability.
inline PhyloTree random_tree(const std::vector<Taxon>& taxa, Rng& rng,
                             double contract_prob = 0.3) {
    PhyloTree B = random_binary_tree(taxa, rng);
    PhyloTree T;
    std::function<int(int, int)> copy = [&](int src, int parent) {
        const auto& n = B.node(src);
        if (n.is_leaf())
            return T.add_node(parent, n.label);
        bool contract = parent >= 0 &&
                        std::uniform_real_distribution<>(0, 1)(rng) < contract_prob;
        int dst = contract ? parent : T.add_node(parent);
        for (int c : n.children)
            copy(c, dst);
        return dst;
    };
    copy(B.root(), -1);
    return T;
}

/// All rooted phylogenetic trees on the given taxa (every internal node has
/// outdegree >= 2), enumerated via set partitions.
inline std::vector<PhyloTree> all_trees(const std::vector<Taxon>& taxa) {
    if (taxa.size() == 1)
        return {PhyloTree::leaf(taxa[0])};
    // enumerate partitions of taxa into >= 2 blocks
    std::vector<std::vector<std::vector<Taxon>>> partitions;
    std::vector<std::vector<Taxon>> current;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
        if (i == taxa.size()) {
            if (current.size() >= 2)
                partitions.push_back(current);
            return;
        }
        for (auto& block : current) {
            block.push_back(taxa[i]);
            assign(i + 1);
            block.pop_back();
        }
        current.push_back({taxa[i]});
        assign(i + 1);
        current.pop_back();
    };
    assign(0);

    std::vector<PhyloTree> out;
    for (const auto& part : partitions) {
        std::vector<std::vector<PhyloTree>> choices;
        for (const auto& block : part)
            choices.push_back(all_trees(block));
        std::vector<std::size_t> pick(part.size(), 0);
        while (true) {
            PhyloTree T;
            int r = T.add_node(-1);
            for (std::size_t b = 0; b < part.size(); ++b)
                T.graft(r, choices[b][pick[b]]);
            out.push_back(std::move(T));
            std::size_t k = 0;
            while (k < pick.size() && ++pick[k] == choices[k].size())
                pick[k++] = 0;
            if (k == pick.size())
                break;
        }
    }
    return out;
}

/// Classic BUILD: partition the taxa by the connected components of the
/// graph with an i-j edge per triplet ij|k, recurse per component. Fails
/// when the graph stays in one piece. Independent oracle for HBUILD.
inline std::optional<PhyloTree> build_oracle(const TripletSet& tau, const TaxonSet& X) {
    if (X.empty())
        return std::nullopt;
    if (X.size() == 1)
        return PhyloTree::leaf(*X.begin());
    TripletSet local = restrict_to(tau, X);
    std::map<Taxon, Taxon> parent;
    for (const auto& t : X)
        parent[t] = t;
    std::function<Taxon(Taxon)> find = [&](Taxon x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : local) {
        Taxon a = find(t.left1), b = find(t.left2);
        if (a != b)
            parent[a] = b;
    }
    std::map<Taxon, TaxonSet> comps;
    for (const auto& t : X)
        comps[find(t)].insert(t);
    if (comps.size() == 1)
        return std::nullopt;
    PhyloTree T;
    int r = T.add_node(-1);
    for (const auto& [rep, comp] : comps) {
        auto sub = build_oracle(local, comp);
        if (!sub)
            return std::nullopt;
        T.graft(r, *sub);
    }
    return T;
}

/// Brute-force closure oracle: keep scanning every ordered pair of members
/// for a rule application until nothing new appears.
inline TripletSet closure_oracle(const TripletSet& tau) {
    std::set<Triplet> acc(tau.begin(), tau.end());
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Triplet> members(acc.begin(), acc.end());
        for (const auto& t1 : members) {
            for (const auto& t2 : members) {
                // t1 = ij|k, t2 = js|i with j in t1's left pair
                for (const auto& [i, j] :
                     {std::pair{t1.left1, t1.left2}, std::pair{t1.left2, t1.left1}}) {
                    if (t2.right != i)
                        continue;
                    if (t2.left1 != j && t2.left2 != j)
                        continue;
                    Taxon s = (t2.left1 == j) ? t2.left2 : t2.left1;
                    if (s == t1.right || s == j)
                        continue;
                    if (acc.insert(Triplet(j, s, t1.right)).second)
                        grew = true;
                }
            }
        }
    }
    TripletSet out;
    for (const auto& t : acc)
        out.insert(t);
    return out;
}

// ------------------------------------------------------------- networks --

/// Random strict network: random binary tree plus `retics` reticulation
/// edges added by subdividing two edges and joining them, retried until the
/// result stays acyclic.
inline PhyloNetwork random_network(const std::vector<Taxon>& taxa, int retics, Rng& rng) {
    PhyloNetwork N = network_from_tree(random_binary_tree(taxa, rng));
    for (int k = 0; k < retics; ++k) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            auto edges = N.edges();
            std::size_t a = rng() % edges.size();
            std::size_t b = rng() % edges.size();
            if (a == b)
                continue;
            PhyloNetwork M = N;
            int y1 = M.subdivide(edges[a].first, edges[a].second);
            int y2 = M.subdivide(edges[b].first, edges[b].second);
            M.add_edge(y1, y2);
            if (M.has_cycle())
                continue;
            N = std::move(M);
            break;
        }
    }
    return N;
}

inline HeightFunction random_height(const TaxonSet& taxa, int max_value, Rng& rng) {
    HeightFunction h;
    for (const Pair& p : all_pairs(taxa))
        h.set(p, 1 + static_cast<int>(rng() % max_value));
    return h;
}

/// Random subset of tau(T); the result stays consistent with T.
inline TripletSet sample_triplets(const PhyloTree& T, double keep, Rng& rng) {
    TripletSet full = triplets_of(T);
    TripletSet out;
    for (const auto& t : full)
        if (std::uniform_real_distribution<>(0, 1)(rng) < keep)
            out.insert(t);
    return out;
}

/// Arbitrary (usually tree-inconsistent) triplet set on n taxa.
inline TripletSet random_triplet_set(int n, double keep, Rng& rng) {
    auto pool = taxa_pool(n);
    TripletSet out;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b)
                    continue;
                if (std::uniform_real_distribution<>(0, 1)(rng) < keep)
                    out.insert(Triplet(pool[a], pool[b], pool[c]));
            }
    return out;
}

// ------------------------------------------------------------ distances --

struct WeightedTreeMatrix {
    PhyloTree rooted;    // the ingroup tree the triplets should agree with
    DistanceMatrix D;    // distances over ingroup plus outgroup
    Taxon outgroup;
};

/// Additive matrix from a random edge-weighted binary tree with the
/// outgroup attached beside the ingroup root.
inline WeightedTreeMatrix random_additive_matrix(const std::vector<Taxon>& ingroup,
                                                 const Taxon& outgroup, Rng& rng) {
    WeightedTreeMatrix out;
    out.outgroup = outgroup;
    out.rooted = random_binary_tree(ingroup, rng);

    const PhyloTree& T = out.rooted;
    std::vector<double> up(T.node_count());
    for (int i = 0; i < T.node_count(); ++i)
        up[i] = 1 + static_cast<int>(rng() % 5); // weight of the edge to the parent
    double og_edge = 1 + static_cast<int>(rng() % 5);

    auto dist_to_root = [&](int id) {
        double d = 0;
        for (int cur = id; T.node(cur).parent >= 0; cur = T.node(cur).parent)
            d += up[cur];
        return d;
    };
    std::vector<Taxon> names = ingroup;
    names.push_back(outgroup);
    out.D = DistanceMatrix(names);
    for (std::size_t i = 0; i < ingroup.size(); ++i) {
        int li = T.find_leaf(ingroup[i]);
        for (std::size_t j = i + 1; j < ingroup.size(); ++j) {
            int lj = T.find_leaf(ingroup[j]);
            int c = T.lca(li, lj);
            out.D.set(ingroup[i], ingroup[j],
                      dist_to_root(li) + dist_to_root(lj) - 2 * dist_to_root(c));
        }
        // through the ingroup root and the root edge to the outgroup
        out.D.set(ingroup[i], outgroup, dist_to_root(li) + up[T.root()] + og_edge);
    }
    return out;
}

// ---------------------------------------------------------- isomorphism --

/// Leaf-label-respecting digraph isomorphism, by backtracking. Sizes here
/// are tiny, so no cleverness.
inline bool isomorphic(const PhyloNetwork& A, const PhyloNetwork& B) {
    PhyloNetwork X = A, Y = B;
    X.compact();
    Y.compact();
    int n = X.node_count();
    if (n != Y.node_count() || X.edges().size() != Y.edges().size())
        return false;

    auto key = [](const PhyloNetwork& N, int i) {
        return std::make_tuple(N.node(i).parents.size(), N.node(i).children.size(),
                               N.node(i).label);
    };
    std::vector<int> match(n, -1), rmatch(n, -1);

    std::set<std::pair<int, int>> ey;
    for (auto [u, v] : Y.edges())
        ey.insert({u, v});
    auto edge_y = [&](int u, int v) { return ey.count({u, v}) != 0; };
    std::set<std::pair<int, int>> ex;
    for (auto [u, v] : X.edges())
        ex.insert({u, v});
    auto edge_x = [&](int u, int v) { return ex.count({u, v}) != 0; };

    std::function<bool(int)> assign = [&](int i) {
        if (i == n)
            return true;
        for (int j = 0; j < n; ++j) {
            if (rmatch[j] != -1 || key(X, i) != key(Y, j))
                continue;
            bool ok = true;
            for (int k = 0; k < i && ok; ++k) {
                if (edge_x(i, k) != edge_y(j, match[k]))
                    ok = false;
                if (edge_x(k, i) != edge_y(match[k], j))
                    ok = false;
            }
            if (!ok)
                continue;
            match[i] = j;
            rmatch[j] = i;
            if (assign(i + 1))
                return true;
            match[i] = -1;
            rmatch[j] = -1;
        }
        return false;
    };
    return assign(0);
}

/// Tree fixture from newick text (no hybrid tags).
inline PhyloTree tree_from_newick(const std::string& text) {
    PhyloNetwork N = parse_enewick(text);
    PhyloTree T;
    std::function<int(int, int)> copy = [&](int src, int parent) {
        int dst = T.add_node(parent, N.node(src).label);
        for (int c : N.node(src).children)
            copy(c, dst);
        return dst;
    };
    copy(N.root(), -1);
    return T;
}

} // namespace testsup
