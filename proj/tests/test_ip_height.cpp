#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tripnet/tripnet.hpp"

using namespace tripnet;

namespace {

TripletSet fig2() {
    return {Triplet("k", "l", "j"), Triplet("k", "l", "i"), Triplet("j", "k", "i"),
            Triplet("j", "l", "i")};
}

TripletSet contradictory3() {
    return {Triplet("i", "j", "k"), Triplet("i", "k", "j"), Triplet("j", "k", "i")};
}

} // namespace

TEST_CASE("min_feasible_s") {
    CHECK(min_feasible_s(fig2()) == 3);
    CHECK_FALSE(min_feasible_s(contradictory3()).has_value());
    CHECK(min_feasible_s(TripletSet{Triplet("a", "b", "c")}) == 2);
}

TEST_CASE("ip_optimal_height at the threshold equals dag_height") {
    auto h = ip_optimal_height(fig2(), 3);
    REQUIRE(h.has_value());
    CHECK(*h == dag_height(build_pair_graph(fig2())));
    CHECK_FALSE(ip_optimal_height(fig2(), 2).has_value());
}

TEST_CASE("ip_optimal_height: no constraints, upper bound binds") {
    auto h = ip_optimal_height(TripletSet{}, 1, {"a", "b", "c"});
    REQUIRE(h.has_value());
    for (const auto& [p, v] : *h)
        CHECK(v == 1);
    CHECK(h->size() == 3);
}

TEST_CASE("ip_optimal_height above the threshold shifts uniformly") {
    auto h3 = ip_optimal_height(fig2(), 3);
    auto h5 = ip_optimal_height(fig2(), 5);
    REQUIRE(h5.has_value());
    for (const auto& [p, v] : *h3)
        CHECK(h5->at(p) == v + 2);
}

TEST_CASE("brute_force_ip: worked example has a unique optimum") {
    auto best = brute_force_ip(fig2(), 3);
    REQUIRE(best.size() == 1);
    CHECK(best.front() == dag_height(build_pair_graph(fig2())));
}

TEST_CASE("brute_force_ip: infeasible system") {
    CHECK(brute_force_ip(contradictory3(), 3).empty());
    CHECK(brute_force_ip(contradictory3(), 6).empty());
}

TEST_CASE("brute_force_ip: single triplet") {
    auto best = brute_force_ip(TripletSet{Triplet("a", "b", "c")}, 2);
    REQUIRE(best.size() == 1);
    CHECK(best.front().at("a", "b") == 1);
    CHECK(best.front().at("a", "c") == 2);
    CHECK(best.front().at("b", "c") == 2);
}

TEST_CASE("brute_force_ip: size guard") {
    CHECK_THROWS_AS(brute_force_ip(TripletSet{}, 7, {"a", "b"}), input_error);
    CHECK_THROWS_AS(brute_force_ip(TripletSet{}, 2, testsup::taxa_set(6)), input_error);
}

TEST_CASE("feasibility iff acyclic pair graph") {
    testsup::Rng rng(30);
    for (int it = 0; it < 60; ++it) {
        TripletSet tau = testsup::random_triplet_set(5, 0.3, rng);
        if (tau.taxa().size() < 2)
            continue;
        bool dag = is_dag(build_pair_graph(tau));
        CHECK(min_feasible_s(tau).has_value() == dag);
        if (dag) {
            int s = *min_feasible_s(tau);
            CHECK(ip_optimal_height(tau, s).has_value());
            CHECK_FALSE(ip_optimal_height(tau, s - 1).has_value());
        } else {
            CHECK_FALSE(ip_optimal_height(tau, 6).has_value());
        }
    }
}

TEST_CASE("ip solution satisfies every constraint within bounds") {
    testsup::Rng rng(31);
    for (int it = 0; it < 60; ++it) {
        PhyloTree T = testsup::random_tree(testsup::taxa_pool(4 + rng() % 4), rng);
        TripletSet tau = testsup::sample_triplets(T, 0.5, rng);
        if (tau.taxa().size() < 2)
            continue;
        int s = *min_feasible_s(tau) + static_cast<int>(rng() % 2);
        auto h = ip_optimal_height(tau, s);
        REQUIRE(h.has_value());
        for (const auto& t : tau) {
            CHECK(h->at(t.left1, t.right) - h->at(t.left1, t.left2) >= 1);
            CHECK(h->at(t.left2, t.right) - h->at(t.left1, t.left2) >= 1);
        }
        CHECK(h->min_value() >= 1);
        CHECK(h->max_value() <= s);
    }
}

TEST_CASE("tree-consistent instances: unique brute-force optimum matches the closed form") {
    testsup::Rng rng(32);
    int done = 0;
    for (int it = 0; it < 200 && done < 25; ++it) {
        PhyloTree T = testsup::random_tree(testsup::taxa_pool(4 + rng() % 2), rng);
        TripletSet tau = testsup::sample_triplets(T, 0.7, rng);
        if (tau.taxa() != T.leaves())
            continue;
        int l = longest_path_length(build_pair_graph(tau));
        if (l + 1 > 6)
            continue;
        auto best = brute_force_ip(tau, l + 1);
        REQUIRE(best.size() == 1);
        CHECK(best.front() == *ip_optimal_height(tau, l + 1));
        CHECK(best.front() == dag_height(build_pair_graph(tau)));
        ++done;
    }
    CHECK(done == 25);
}
