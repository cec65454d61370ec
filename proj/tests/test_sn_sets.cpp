#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "tripnet/tripnet.hpp"

using namespace tripnet;

namespace {

TripletSet worked15() {
    std::ifstream in(std::string(TRIPNET_TEST_DATA) + "/worked15.triplets");
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_triplets(os.str());
}

HeightFunction worked_height(const TripletSet& tau) {
    auto [G, removed] = make_dag(build_pair_graph(tau));
    return dag_height(G);
}

} // namespace

TEST_CASE("is_sn_set basics") {
    TripletSet tau = worked15();
    for (const auto& x : tau.taxa())
        CHECK(is_sn_set({x}, tau)); // singletons always pass
    CHECK(is_sn_set(tau.taxa(), tau));
    CHECK(is_sn_set({"n", "o"}, tau));
    CHECK_FALSE(is_sn_set({"k", "l"}, tau)); // lo|k pulls l below k from outside
}

TEST_CASE("sn_decomposition: the worked example blocks") {
    TripletSet tau = worked15();
    SnPartition P = sn_decomposition(worked_height(tau), tau);
    std::vector<TaxonSet> expect = {{"i"}, {"j"}, {"k"}, {"l"}, {"m"}, {"n", "o"}};
    CHECK(P.block_sets() == expect);
    CHECK_FALSE(P.all_singletons());
    CHECK(P.block_of("o").rep == "n");
}

TEST_CASE("sn_decomposition on a tree-consistent instance") {
    // (i,(j,(k,l))): first disconnection splits {i} from {j,k,l}
    TripletSet tau{Triplet("k", "l", "j"), Triplet("k", "l", "i"), Triplet("j", "k", "i"),
                   Triplet("j", "l", "i")};
    HeightFunction h = dag_height(build_pair_graph(tau));
    SnPartition P = sn_decomposition(h, tau);
    // {j,k,l} is an SN-set here, so decomposition stops at the first split
    std::vector<TaxonSet> expect = {{"i"}, {"j", "k", "l"}};
    CHECK(P.block_sets() == expect);
    for (const auto& b : P.blocks)
        CHECK(is_sn_set(b.members, tau));
}

TEST_CASE("sn_decomposition: two taxa") {
    TripletSet none;
    HeightFunction h;
    h.set("a", "b", 1);
    SnPartition P = sn_decomposition(h, none, {"a", "b"});
    CHECK(P.block_sets() == std::vector<TaxonSet>{{"a"}, {"b"}});
}

TEST_CASE("blocks always pass is_sn_set and cover the taxa") {
    testsup::Rng rng(50);
    for (int it = 0; it < 50; ++it) {
        TripletSet tau = testsup::random_triplet_set(5 + static_cast<int>(rng() % 3), 0.3, rng);
        if (tau.taxa().size() < 3)
            continue;
        auto [G, removed] = make_dag(build_pair_graph(tau));
        HeightFunction h = dag_height(G);
        SnPartition P = sn_decomposition(h, tau);
        TaxonSet covered;
        for (const auto& b : P.blocks) {
            CHECK(is_sn_set(b.members, tau));
            for (const auto& x : b.members)
                CHECK(covered.insert(x).second); // disjoint
        }
        CHECK(covered == tau.taxa());
    }
}

TEST_CASE("contract: worked example weights and triplets") {
    TripletSet tau = worked15();
    HeightFunction h = worked_height(tau);
    SnPartition P = sn_decomposition(h, tau);
    ContractedInstance CI = contract(h, tau, P);

    CHECK(CI.nodes == TaxonSet{"i", "j", "k", "l", "m", "n"});
    // the contracted pair weight is the min over cross pairs
    CHECK(CI.w.at("l", "n") == std::min(h.at("l", "n"), h.at("l", "o")));
    CHECK(CI.w.at("m", "n") == std::min(h.at("m", "n"), h.at("m", "o")));
    CHECK(CI.w.at("i", "j") == h.at("i", "j"));

    // no|m and no|k collapse inside the {n,o} block; the rest project
    TripletSet expect{Triplet("i", "j", "l"), Triplet("j", "k", "i"), Triplet("k", "l", "j"),
                      Triplet("k", "l", "i"), Triplet("l", "n", "k"), Triplet("j", "l", "n"),
                      Triplet("m", "n", "l"), Triplet("m", "n", "j"), Triplet("m", "n", "i"),
                      Triplet("j", "k", "n"), Triplet("i", "j", "n"), Triplet("i", "k", "m"),
                      Triplet("i", "l", "n")};
    CHECK(CI.triplets == expect);
}

TEST_CASE("contract: all-singleton partition is the identity") {
    TripletSet tau{Triplet("a", "b", "c"), Triplet("b", "c", "a")};
    HeightFunction h = dag_height(make_dag(build_pair_graph(tau)).first);
    SnPartition P;
    for (const auto& x : tau.taxa())
        P.blocks.push_back({{x}, x});
    ContractedInstance CI = contract(h, tau, P);
    CHECK(CI.triplets == tau);
    CHECK(CI.w == h);
    CHECK(CI.nodes == tau.taxa());
}

TEST_CASE("contract: triplets inside fewer than three blocks are dropped") {
    TripletSet tau{Triplet("a", "b", "c")};
    HeightFunction h;
    h.set("a", "b", 1);
    h.set("a", "c", 2);
    h.set("b", "c", 2);
    SnPartition P;
    P.blocks.push_back({{"a", "b"}, "a"});
    P.blocks.push_back({{"c"}, "c"});
    ContractedInstance CI = contract(h, tau, P);
    CHECK(CI.triplets == TripletSet{});
    CHECK(CI.w.at("a", "c") == 2);
}

TEST_CASE("re-decomposing a contracted instance yields singletons") {
    testsup::Rng rng(51);
    int done = 0;
    for (int it = 0; it < 120 && done < 30; ++it) {
        TripletSet tau = testsup::random_triplet_set(6, 0.35, rng);
        if (tau.taxa().size() < 4)
            continue;
        auto [G, removed] = make_dag(build_pair_graph(tau));
        HeightFunction h = dag_height(G);
        SnPartition P = sn_decomposition(h, tau);
        if (P.all_singletons())
            continue;
        ContractedInstance CI = contract(h, tau, P);
        if (CI.nodes.size() < 2)
            continue;
        SnPartition Q = sn_decomposition(CI.w, CI.triplets, CI.nodes);
        CHECK(Q.all_singletons());
        ++done;
    }
    CHECK(done >= 10);
}
