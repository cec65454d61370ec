#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tripnet/tripnet.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw tripnet::input_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

tripnet::SpeedMode make_mode(const std::string& speed, std::uint64_t seed) {
    using K = tripnet::SpeedMode::Kind;
    K kind = speed == "normal" ? K::normal : speed == "fast" ? K::fast : K::slow;
    return {kind, seed};
}

struct BuildArgs {
    std::string triplets_file, matrix_file, outgroup;
    std::string speed = "slow", out = "enewick";
    std::uint64_t seed = 0;
    double tol = 1e-9;
    bool use_closure = false;
    bool stats = false;
    bool trace = false;
    int jobs = 1;
};

int run_build(const BuildArgs& a) {
    using namespace tripnet;
    TripletSet tau;
    if (!a.triplets_file.empty()) {
        tau = parse_triplets(slurp(a.triplets_file));
    } else {
        DistanceMatrix D = parse_matrix(slurp(a.matrix_file));
        tau = qot_triplets(D, a.outgroup, a.tol);
        if (a.use_closure)
            tau = closure(tau);
    }

    Options opts;
    opts.mode = make_mode(a.speed, a.seed);
    opts.jobs = a.jobs;
    if (a.trace)
        opts.trace = [](const std::string& line) { std::cerr << line << "\n"; };

    PhyloNetwork N = tripnet::tripnet(tau, opts);
    if (a.out == "dot")
        std::cout << emit_dot(N);
    else
        std::cout << emit_enewick(N) << "\n";

    if (a.stats) {
        PairGraph G = build_pair_graph(tau);
        auto removed = make_dag(G).second;
        std::cerr << "taxa=" << tau.taxa().size() << " triplets=" << tau.size()
                  << " fas_removed=" << removed.size()
                  << " reticulations=" << reticulation_count(N) << " level=" << level(N)
                  << " consistent=" << consistent_count(N, tau) << "/" << tau.size() << "\n";
    }
    return 0;
}

int run_check(const std::string& network_file, const std::string& triplets_file) {
    using namespace tripnet;
    PhyloNetwork N = parse_enewick(slurp(network_file));
    if (N.has_cycle())
        throw input_error("network file contains a cycle");
    TripletSet tau = parse_triplets(slurp(triplets_file));
    TripletSet bad = inconsistent_triplets(N, tau);
    std::cout << "consistent " << (tau.size() - bad.size()) << "/" << tau.size() << "\n";
    for (const auto& t : bad)
        std::cout << "inconsistent " << t.str() << "\n";
    return 0;
}

int run_height(const std::string& triplets_file, bool dot_pairs) {
    using namespace tripnet;
    TripletSet tau = parse_triplets(slurp(triplets_file));
    if (tau.taxa().size() < 2)
        throw input_error("need at least 2 taxa");
    PairGraph G = build_pair_graph(tau);
    auto [Gp, removed] = make_dag(G);
    if (dot_pairs) {
        std::cout << pair_graph_dot(Gp, removed);
        return 0;
    }
    if (!removed.empty())
        std::cerr << "removed " << removed.size() << " edge(s) to break cycles\n";
    for (const auto& [p, v] : dag_height(Gp))
        std::cout << p.first << " " << p.second << " " << v << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TripNet: rooted phylogenetic networks from triplets"};
    app.require_subcommand(1);

    BuildArgs b;
    auto* build = app.add_subcommand("build", "construct a network from triplets or a distance matrix");
    auto* topt = build->add_option("--triplets", b.triplets_file, "triplet file, one 'A B | C' per line");
    auto* mopt = build->add_option("--matrix", b.matrix_file, "PHYLIP-style distance matrix");
    auto* oopt = build->add_option("--outgroup", b.outgroup, "outgroup taxon for quartet inference");
    build->add_option("--tol", b.tol, "relative four-point tolerance")->capture_default_str();
    build->add_flag("--closure", b.use_closure, "close the inferred triplets under the chain rule");
    build->add_option("--speed", b.speed, "slow|normal|fast")
        ->check(CLI::IsMember({"slow", "normal", "fast"}))
        ->capture_default_str();
    build->add_option("--seed", b.seed, "seed for the randomized modes")->capture_default_str();
    build->add_option("--out", b.out, "enewick|dot")
        ->check(CLI::IsMember({"enewick", "dot"}))
        ->capture_default_str();
    build->add_flag("--stats", b.stats, "print a one-line summary to stderr");
    build->add_flag("--trace", b.trace, "log one line per algorithm step to stderr");
    build->add_option("--jobs", b.jobs, "worker threads for candidate scoring")
        ->capture_default_str();
    topt->excludes(mopt);
    mopt->needs(oopt);

    std::string check_network, check_triplets;
    auto* check = app.add_subcommand("check", "count triplets consistent with a network");
    check->add_option("--network", check_network, "eNewick network file")->required();
    check->add_option("--triplets", check_triplets, "triplet file")->required();

    std::string height_triplets;
    bool dot_pairs = false;
    auto* height = app.add_subcommand("height", "print the pair height table");
    height->add_option("--triplets", height_triplets, "triplet file")->required();
    height->add_flag("--dot-pairs", dot_pairs, "emit the pair graph as DOT instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            if (b.triplets_file.empty() && b.matrix_file.empty())
                throw tripnet::input_error("build needs --triplets or --matrix");
            return run_build(b);
        }
        if (check->parsed())
            return run_check(check_network, check_triplets);
        if (height->parsed())
            return run_height(height_triplets, dot_pairs);
    } catch (const tripnet::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
