#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tripnet/consistency.hpp"
#include "tripnet/core.hpp"
#include "tripnet/hbuild.hpp"
#include "tripnet/network.hpp"
#include "tripnet/pair_graph.hpp"
#include "tripnet/sn_sets.hpp"
#include "tripnet/tree.hpp"

namespace tripnet {

/// How Step 5 breaks ties when the three criteria leave several candidate
/// reticulation leaves: slow examines every candidate, normal draws two,
/// fast draws one. The seed pins all draws.
struct SpeedMode {
    enum class Kind { slow, normal, fast };
    Kind kind = Kind::slow;
    std::uint64_t rng_seed = 0;

    static SpeedMode slow() { return {Kind::slow, 0}; }
    static SpeedMode normal(std::uint64_t seed) { return {Kind::normal, seed}; }
    static SpeedMode fast(std::uint64_t seed) { return {Kind::fast, seed}; }
};

struct Options {
    SpeedMode mode;
    int jobs = 1;
    std::function<void(const std::string&)> trace; // one line per step when set
};

struct CandidateSets {
    TaxonSet r1, r2, r3;
};

/// Criterion I: for each node, m = min and M = max weight over its incident
/// edges; keep the nodes minimizing m, refined by minimizing M on ties.
inline TaxonSet criterion_one(const TaxonSet& nodes, const HeightFunction& w) {
    if (nodes.size() < 2)
        throw input_error("criterion_one needs at least 2 nodes");
    std::map<Taxon, std::pair<int, int>> mm; // node -> (m, M)
    for (const auto& s : nodes) {
        int lo = 0, hi = 0;
        for (const auto& t : nodes) {
            if (t == s)
                continue;
            int v = w.at(s, t);
            lo = lo == 0 ? v : std::min(lo, v);
            hi = std::max(hi, v);
        }
        mm[s] = {lo, hi};
    }
    int best_m = 0;
    for (const auto& [s, p] : mm)
        best_m = best_m == 0 ? p.first : std::min(best_m, p.first);
    int best_M = 0;
    for (const auto& [s, p] : mm)
        if (p.first == best_m)
            best_M = best_M == 0 ? p.second : std::min(best_M, p.second);
    TaxonSet out;
    for (const auto& [s, p] : mm)
        if (p.first == best_m && p.second == best_M)
            out.insert(s);
    return out;
}

/// Criterion II: restrict to the edges carrying the global minimum weight;
/// keep the R1 members of maximum degree in that subgraph.
inline TaxonSet criterion_two(const TaxonSet& nodes, const HeightFunction& w,
                              const TaxonSet& r1) {
    if (r1.empty())
        throw input_error("criterion_two needs a nonempty R1");
    int wmin = 0;
    for (const Pair& p : all_pairs(nodes)) {
        int v = w.at(p);
        wmin = wmin == 0 ? v : std::min(wmin, v);
    }
    std::map<Taxon, int> deg;
    for (const auto& s : nodes)
        deg[s] = 0;
    for (const Pair& p : all_pairs(nodes))
        if (w.at(p) == wmin) {
            ++deg[p.first];
            ++deg[p.second];
        }
    int best = -1;
    for (const auto& s : r1)
        best = std::max(best, deg.at(s));
    TaxonSet out;
    for (const auto& s : r1)
        if (deg.at(s) == best)
            out.insert(s);
    return out;
}

namespace detail {

inline TripletSet drop_taxon(const TripletSet& tau, const Taxon& x) {
    TripletSet out;
    for (const auto& t : tau)
        if (!t.mentions(x))
            out.insert(t);
    return out;
}

} // namespace detail

/// Criterion III: tentatively remove each R2 node, re-run the SN-set
/// decomposition on what is left, and keep the nodes whose removal leaves
/// the most blocks of size > 1.
inline TaxonSet criterion_three(const TaxonSet& nodes, const HeightFunction& w,
                                const TripletSet& tau, const TaxonSet& r2) {
    if (r2.empty())
        throw input_error("criterion_three needs a nonempty R2");
    std::map<Taxon, int> score;
    for (const auto& s : r2) {
        TaxonSet rest = nodes;
        rest.erase(s);
        SnPartition P = sn_decomposition(w, detail::drop_taxon(tau, s), rest);
        int n = 0;
        for (const auto& b : P.blocks)
            if (b.members.size() > 1)
                ++n;
        score[s] = n;
    }
    int best = -1;
    for (const auto& [s, n] : score)
        best = std::max(best, n);
    TaxonSet out;
    for (const auto& [s, n] : score)
        if (n == best)
            out.insert(s);
    return out;
}

namespace detail {

template <class F>
inline void parallel_for(int n, int jobs, F&& f) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
            f(i);
    };
    std::vector<std::thread> pool;
    int k = std::min(jobs, n);
    pool.reserve(k);
    for (int t = 0; t < k; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
}

} // namespace detail

/// Hang a new leaf x below a fresh reticulation joining two subdivided
/// edges. Every unordered pair of distinct edges is tried, plus a synthetic
/// stem above the root (so the reticulation may sit over the old root); the
/// candidate consistent with the most triplets of tau_eval wins, ties going
/// to the first edge pair in enumeration order.
inline PhyloNetwork insert_reticulation_leaf(const PhyloNetwork& N, const Taxon& x,
                                             const TripletSet& tau_eval, int jobs = 1) {
    if (N.find_leaf(x) >= 0)
        throw input_error("leaf '" + x + "' already present");
    std::vector<std::pair<int, int>> edges = N.edges();
    const int stem = static_cast<int>(edges.size());
    edges.emplace_back(-1, N.root()); // synthetic stem
    if (edges.size() < 2)
        throw input_error("network too small to accept a reticulation leaf");

    std::vector<std::pair<int, int>> cand_pairs;
    for (std::size_t a = 0; a < edges.size(); ++a)
        for (std::size_t b = a + 1; b < edges.size(); ++b)
            cand_pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));

    auto build = [&](int ei) {
        PhyloNetwork M = N;
        auto mid = [&](int e) {
            auto [u, v] = edges[e];
            if (e == stem) {
                int y = M.add_node();
                M.add_edge(y, M.root());
                M.set_root(y);
                return y;
            }
            return M.subdivide(u, v);
        };
        int y1 = mid(cand_pairs[ei].first);
        int y2 = mid(cand_pairs[ei].second);
        int y3 = M.add_node();
        M.add_edge(y1, y3);
        M.add_edge(y2, y3);
        M.add_edge(y3, M.add_node(x));
        return M;
    };

    std::vector<int> score(cand_pairs.size(), -1);
    detail::parallel_for(static_cast<int>(cand_pairs.size()), jobs,
                         [&](int i) { score[i] = consistent_count(build(i), tau_eval); });
    int best = 0;
    for (std::size_t i = 1; i < cand_pairs.size(); ++i)
        if (score[i] > score[best])
            best = static_cast<int>(i);
    PhyloNetwork out = build(best);
    if (out.has_cycle())
        throw internal_error("reticulation insertion created a cycle");
    return out;
}

/// Step 9: while some triplets are inconsistent, take the leaf pair (i,j)
/// carrying the most inconsistent ij|* triplets, subdivide the pendant
/// edges above i and j and run a cross edge from i's side to j's side. The
/// new reticulation makes every ij|* triplet consistent, and adding edges
/// never breaks existing ones, so the inconsistent set strictly shrinks.
inline PhyloNetwork repair(const PhyloNetwork& N, const TripletSet& tau) {
    PhyloNetwork M = N;
    while (true) {
        TripletSet bad = inconsistent_triplets(M, tau);
        if (bad.empty())
            return M;
        std::map<Pair, int> weight;
        for (const auto& t : bad)
            ++weight[t.left_pair()];
        Pair pick = weight.begin()->first;
        int best = weight.begin()->second;
        for (const auto& [p, c] : weight)
            if (c > best) { // ties keep the lexicographically smallest pair
                pick = p;
                best = c;
            }
        int li = M.find_leaf(pick.first), lj = M.find_leaf(pick.second);
        if (li < 0 || lj < 0)
            throw input_error("repair: triplet taxa missing from network");
        int pi = M.node(li).parents.at(0);
        int pj = M.node(lj).parents.at(0);
        int ui = M.subdivide(pi, li);
        int uj = M.subdivide(pj, lj);
        M.add_edge(ui, uj);
        if (M.has_cycle())
            throw internal_error("repair: cross edge created a cycle");
        TripletSet after = inconsistent_triplets(M, tau);
        if (after.size() >= bad.size())
            throw internal_error("repair made no progress");
    }
}

/// Ordered reticulation leaves plus what is left once they are peeled off.
struct SelectionResult {
    std::vector<Taxon> leaves;
    TripletSet residual;
    PhyloTree residual_tree;
};

namespace detail {

struct Ctx {
    Options opts;
    std::mt19937_64 rng;
    explicit Ctx(const Options& o) : opts(o), rng(o.mode.rng_seed) {}

    void trace(const std::string& line) {
        if (opts.trace)
            opts.trace(line);
    }
    PhyloTree binarized(const PhyloTree& T) {
        if (opts.mode.kind == SpeedMode::Kind::slow)
            return binarize(T);
        return binarize(T, rng);
    }
};

inline std::string join_taxa(const TaxonSet& s) {
    std::string out;
    for (const auto& t : s) {
        if (!out.empty())
            out += ",";
        out += t;
    }
    return out;
}

PhyloNetwork run_steps(const TripletSet& tau, const TaxonSet& taxa, Ctx& ctx);

// Steps 2-8 on one weighted instance: try HBUILD, otherwise decompose into
// SN-sets and either pick a reticulation leaf (all blocks singletons) or
// contract, solve the quotient and expand the blocks.
inline PhyloNetwork solve_instance(const TaxonSet& X, const HeightFunction& w,
                                   const TripletSet& tau, Ctx& ctx,
                                   std::vector<Taxon>* picks) {
    if (X.empty())
        throw internal_error("solve_instance on empty taxon set");
    if (X.size() == 1)
        return PhyloNetwork::single_leaf(*X.begin());
    if (X.size() == 2)
        return PhyloNetwork::cherry(*X.begin(), *std::next(X.begin()));

    if (auto T = hbuild(w, X)) {
        ctx.trace("step2 hbuild=ok taxa=" + std::to_string(X.size()));
        return network_from_tree(ctx.binarized(*T));
    }
    ctx.trace("step2 hbuild=fail taxa=" + std::to_string(X.size()));

    SnPartition P = sn_decomposition(w, tau, X);
    {
        std::string line = "step4 blocks=";
        for (std::size_t i = 0; i < P.blocks.size(); ++i)
            line += (i ? ";" : "") + join_taxa(P.blocks[i].members);
        ctx.trace(line);
    }

    if (!P.all_singletons()) {
        ContractedInstance CI = contract(w, tau, P);
        PhyloNetwork N = solve_instance(CI.nodes, CI.w, CI.triplets, ctx, picks);
        // Steps 7-8: build each multi-member block from its own triplets and
        // splice it in place of its representative leaf.
        for (const auto& b : P.blocks) {
            if (b.members.size() < 2)
                continue;
            ctx.trace("step7 block=" + join_taxa(b.members));
            PhyloNetwork sub = run_steps(restrict_to(tau, b.members), b.members, ctx);
            int leaf = N.find_leaf(b.rep);
            if (leaf < 0)
                throw internal_error("representative leaf '" + b.rep + "' missing");
            if (N.node_count() == 1) {
                N = sub;
                continue;
            }
            int parent = N.node(leaf).parents.at(0);
            int base = N.node_count();
            for (const auto& n : sub.raw_nodes()) {
                int id = N.add_node(n.label);
                (void)id;
            }
            for (auto [u, v] : sub.edges())
                N.add_edge(base + u, base + v);
            N.remove_edge(parent, leaf);
            N.add_edge(parent, base + sub.root());
        }
        N.compact();
        return N;
    }

    // Step 5: all blocks are singletons and HBUILD failed, so one node
    // must come off as a reticulation leaf.
    TaxonSet r1 = criterion_one(X, w);
    TaxonSet chosen = r1;
    std::string cline = "step5 r1=" + join_taxa(r1);
    if (chosen.size() > 1) {
        chosen = criterion_two(X, w, chosen);
        cline += " r2=" + join_taxa(chosen);
    }
    if (chosen.size() > 1) {
        chosen = criterion_three(X, w, tau, chosen);
        cline += " r3=" + join_taxa(chosen);
    }

    std::vector<Taxon> candidates(chosen.begin(), chosen.end());
    if (candidates.size() > 1) {
        switch (ctx.opts.mode.kind) {
        case SpeedMode::Kind::slow:
            break; // examine all
        case SpeedMode::Kind::normal: {
            std::size_t a = ctx.rng() % candidates.size();
            std::size_t b = ctx.rng() % (candidates.size() - 1);
            if (b >= a)
                ++b;
            std::vector<Taxon> two{candidates[std::min(a, b)], candidates[std::max(a, b)]};
            candidates = std::move(two);
            break;
        }
        case SpeedMode::Kind::fast:
            candidates = {candidates[ctx.rng() % candidates.size()]};
            break;
        }
    }

    struct Branch {
        PhyloNetwork net;
        std::vector<Taxon> picks;
        int score = -1;
        int retics = 0;
        Taxon leaf;
    };
    std::optional<Branch> best;
    for (const Taxon& x : candidates) {
        TaxonSet rest = X;
        rest.erase(x);
        std::vector<Taxon> sub_picks;
        PhyloNetwork below = solve_instance(rest, w, drop_taxon(tau, x), ctx, &sub_picks);
        PhyloNetwork with = insert_reticulation_leaf(below, x, tau, ctx.opts.jobs);
        Branch br;
        br.score = consistent_count(with, tau);
        br.retics = reticulation_count(with);
        br.leaf = x;
        br.picks = std::move(sub_picks);
        br.net = std::move(with);
        bool better = !best || br.score > best->score ||
                      (br.score == best->score &&
                       (br.retics < best->retics ||
                        (br.retics == best->retics && br.leaf < best->leaf)));
        if (better)
            best = std::move(br);
    }
    if (!best)
        throw internal_error("no reticulation candidate");
    ctx.trace(cline + " pick=" + best->leaf);
    ctx.trace("step6 insert=" + best->leaf + " score=" + std::to_string(best->score) + "/" +
              std::to_string(tau.size()));
    if (picks) {
        picks->push_back(best->leaf);
        picks->insert(picks->end(), best->picks.begin(), best->picks.end());
    }
    return best->net;
}

// Steps 1-9 for one triplet set over a declared taxon set.
inline PhyloNetwork run_steps(const TripletSet& tau, const TaxonSet& taxa, Ctx& ctx) {
    if (taxa.empty())
        throw internal_error("run_steps on empty taxon set");
    if (taxa.size() == 1)
        return PhyloNetwork::single_leaf(*taxa.begin());
    if (taxa.size() == 2)
        return PhyloNetwork::cherry(*taxa.begin(), *std::next(taxa.begin()));

    PairGraph G = build_pair_graph(tau, taxa);
    auto [Gp, removed] = make_dag(G);
    ctx.trace("step1 taxa=" + std::to_string(taxa.size()) +
              " pairs=" + std::to_string(G.node_count()) +
              " edges=" + std::to_string(G.edge_count()) +
              " removed=" + std::to_string(removed.size()));
    HeightFunction h = dag_height(Gp);

    std::vector<Taxon> picks;
    PhyloNetwork N = solve_instance(taxa, h, tau, ctx, &picks);

    TripletSet bad = inconsistent_triplets(N, tau);
    ctx.trace("step9 inconsistent=" + std::to_string(bad.size()));
    if (!bad.empty())
        N = repair(N, tau);
    N.compact();
    return N;
}

// Tree rebuilt from an instance that needs no further reticulations:
// straight HBUILD when it works, otherwise decompose, solve the quotient
// and expand blocks as subtrees. Returns nullopt if a reticulation would
// still be needed.
inline std::optional<PhyloTree> residual_tree(const TaxonSet& X, const HeightFunction& w,
                                              const TripletSet& tau) {
    if (X.empty())
        return std::nullopt;
    if (X.size() == 1)
        return PhyloTree::leaf(*X.begin());
    if (X.size() == 2) {
        PhyloTree T;
        int r = T.add_node(-1);
        T.add_node(r, *X.begin());
        T.add_node(r, *std::next(X.begin()));
        return T;
    }
    if (auto T = hbuild(w, X))
        return binarize(*T);
    SnPartition P = sn_decomposition(w, tau, X);
    if (P.all_singletons())
        return std::nullopt;
    ContractedInstance CI = contract(w, tau, P);
    auto skeleton = residual_tree(CI.nodes, CI.w, CI.triplets);
    if (!skeleton)
        return std::nullopt;
    PhyloTree T = *skeleton;
    for (const auto& b : P.blocks) {
        if (b.members.size() < 2)
            continue;
        auto sub = residual_tree(b.members, w.restricted(b.members), restrict_to(tau, b.members));
        if (!sub)
            return std::nullopt;
        int leaf = T.find_leaf(b.rep);
        if (leaf < 0)
            throw internal_error("representative leaf missing in residual tree");
        int parent = T.node(leaf).parent;
        if (parent < 0)
            return sub; // whole tree was one block
        auto& nodes = T.raw_nodes();
        int grafted = T.graft(parent, *sub);
        auto& cs = nodes[parent].children;
        cs.erase(std::find(cs.begin(), cs.end(), leaf));
        (void)grafted;
    }
    return T;
}

} // namespace detail

/// Step 5 as a standalone operation: peel reticulation leaves off a
/// contracted instance until the rest is tree-shaped, reporting the leaves
/// in selection order, the surviving triplets and the residual tree.
inline SelectionResult select_reticulations(const ContractedInstance& instance,
                                            const SpeedMode& mode) {
    Options opts;
    opts.mode = mode;
    detail::Ctx ctx(opts);
    SelectionResult out;
    detail::solve_instance(instance.nodes, instance.w, instance.triplets, ctx, &out.leaves);
    out.residual = instance.triplets;
    TaxonSet rest = instance.nodes;
    for (const auto& x : out.leaves) {
        out.residual = detail::drop_taxon(out.residual, x);
        rest.erase(x);
    }
    auto T = detail::residual_tree(rest, instance.w, out.residual);
    if (!T)
        throw internal_error("residual instance is not tree-shaped after selection");
    out.residual_tree = *T;
    return out;
}

/// The TripNet heuristic: from an arbitrary triplet set, produce a rooted
/// phylogenetic network consistent with every input triplet. Tree-consistent
/// inputs come back as a binarization of their BUILD tree with no
/// reticulations.
inline PhyloNetwork tripnet(const TripletSet& tau, const Options& opts = {}) {
    TaxonSet taxa = tau.taxa();
    if (taxa.size() < 3)
        throw input_error("tripnet needs at least 3 taxa, got " +
                          std::to_string(taxa.size()));
    detail::Ctx ctx(opts);
    return detail::run_steps(tau, taxa, ctx);
}

inline PhyloNetwork tripnet(const TripletSet& tau, const SpeedMode& mode) {
    Options opts;
    opts.mode = mode;
    return tripnet(tau, opts);
}

} // namespace tripnet
