#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/pair_graph.hpp"

namespace tripnet {

/// The difference system of IP(tau, s): for every triplet ij|k,
/// h(i,k) - h(i,j) >= 1 and h(j,k) - h(i,j) >= 1, with 0 < h <= s.
/// It is feasible for some s iff G_tau is acyclic, and the smallest such s
/// is l_{G_tau} + 1.
inline std::optional<int> min_feasible_s(const TripletSet& tau, const TaxonSet& taxa) {
    PairGraph G = build_pair_graph(tau, taxa);
    if (!is_dag(G))
        return std::nullopt;
    return longest_path_length(G) + 1;
}

inline std::optional<int> min_feasible_s(const TripletSet& tau) {
    return min_feasible_s(tau, tau.taxa());
}

/// Exact optimum of IP(tau, s) without a solver: assigning each pair
/// s - LP(pair), with LP the longest outgoing path in G_tau, satisfies
/// every difference constraint and is coordinatewise maximal, hence the
/// sum-maximizer. Returns nullopt when the IP is infeasible (cyclic G_tau
/// or s below the threshold).
inline std::optional<HeightFunction> ip_optimal_height(const TripletSet& tau, int s,
                                                       const TaxonSet& taxa) {
    if (s < 1)
        return std::nullopt;
    PairGraph G = build_pair_graph(tau, taxa);
    if (!is_dag(G))
        return std::nullopt;
    int l = longest_path_length(G);
    if (s < l + 1)
        return std::nullopt;
    HeightFunction base = dag_height(G); // l + 1 - LP
    HeightFunction h;
    for (const auto& [p, v] : base)
        h.set(p, v + (s - l - 1)); // = s - LP
    return h;
}

inline std::optional<HeightFunction> ip_optimal_height(const TripletSet& tau, int s) {
    return ip_optimal_height(tau, s, tau.taxa());
}

/// Exhaustive oracle for the IP theorems: enumerate every assignment in
/// {1..s}^pairs, keep the feasible ones, return all sum maximizers.
/// Deliberately small-minded; guarded to |taxa| <= 5 and s <= 6.
inline std::vector<HeightFunction> brute_force_ip(const TripletSet& tau, int s,
                                                  const TaxonSet& taxa) {
    if (taxa.size() > 5 || s > 6 || s < 1)
        throw input_error("brute_force_ip guard: need |taxa| <= 5 and 1 <= s <= 6");
    std::vector<Pair> pairs = all_pairs(taxa);
    std::map<Pair, std::size_t> idx;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        idx[pairs[i]] = i;

    // constraints as (lo, hi): value[hi] - value[lo] >= 1
    std::vector<std::pair<std::size_t, std::size_t>> constraints;
    for (const auto& t : tau) {
        std::size_t ij = idx.at(Pair(t.left1, t.left2));
        constraints.emplace_back(ij, idx.at(Pair(t.left1, t.right)));
        constraints.emplace_back(ij, idx.at(Pair(t.left2, t.right)));
    }

    std::vector<int> value(pairs.size(), 0);
    std::vector<HeightFunction> best;
    int best_sum = -1;

    std::function<void(std::size_t, int)> recurse = [&](std::size_t at, int sum) {
        if (at == pairs.size()) {
            if (sum > best_sum) {
                best_sum = sum;
                best.clear();
            }
            if (sum == best_sum) {
                HeightFunction h;
                for (std::size_t i = 0; i < pairs.size(); ++i)
                    h.set(pairs[i], value[i]);
                best.push_back(std::move(h));
            }
            return;
        }
        for (int v = 1; v <= s; ++v) {
            value[at] = v;
            bool ok = true;
            for (auto [lo, hi] : constraints) {
                if (lo < at && hi < at)
                    continue; // already checked deeper in the prefix
                if (lo <= at && hi <= at && value[hi] - value[lo] < 1) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                recurse(at + 1, sum + v);
        }
        value[at] = 0;
    };
    recurse(0, 0);
    return best;
}

inline std::vector<HeightFunction> brute_force_ip(const TripletSet& tau, int s) {
    return brute_force_ip(tau, s, tau.taxa());
}

} // namespace tripnet
