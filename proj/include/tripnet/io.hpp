#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tripnet/core.hpp"
#include "tripnet/distance.hpp"
#include "tripnet/network.hpp"
#include "tripnet/tree.hpp"

namespace tripnet {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline void check_name(const std::string& name, int line) {
    if (name.empty())
        throw input_error("empty taxon name, line " + std::to_string(line));
    for (char c : name)
        if (std::isspace(static_cast<unsigned char>(c)) ||
            std::string("|#(),;:").find(c) != std::string::npos)
            throw input_error("invalid character '" + std::string(1, c) +
                              "' in taxon name, line " + std::to_string(line));
}

} // namespace detail

/// One triplet per line as "A B | C"; blank lines and lines starting with
/// '#' are skipped; duplicates collapse.
inline TripletSet parse_triplets(const std::string& text) {
    TripletSet out;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t bar = line.find('|');
        if (bar == std::string::npos || line.find('|', bar + 1) != std::string::npos)
            throw input_error("expected exactly one '|', line " + std::to_string(lineno));
        std::istringstream left(line.substr(0, bar)), right(line.substr(bar + 1));
        std::string a, b, c, extra;
        if (!(left >> a >> b) || (left >> extra))
            throw input_error("expected two taxa before '|', line " + std::to_string(lineno));
        if (!(right >> c) || (right >> extra))
            throw input_error("expected one taxon after '|', line " + std::to_string(lineno));
        for (const auto& n : {a, b, c})
            detail::check_name(n, lineno);
        if (a == b || a == c || b == c)
            throw input_error("duplicate taxon, line " + std::to_string(lineno));
        out.insert(Triplet(a, b, c));
    }
    return out;
}

/// PHYLIP-style square matrix: a count line, then one "name d1 ... dn" row
/// per taxon. Requires a zero diagonal and symmetry within 1e-6.
inline DistanceMatrix parse_matrix(const std::string& text) {
    std::istringstream is(text);
    std::size_t n = 0;
    if (!(is >> n))
        throw input_error("matrix: missing taxon count");
    if (n < 2)
        throw input_error("matrix: need at least 2 taxa, got " + std::to_string(n));
    std::vector<Taxon> names(n);
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(is >> names[i]))
            throw input_error("matrix: missing name in row " + std::to_string(i + 1));
        detail::check_name(names[i], static_cast<int>(i + 2));
        for (std::size_t j = 0; j < n; ++j)
            if (!(is >> d[i][j]))
                throw input_error("matrix: row '" + names[i] + "' needs " +
                                  std::to_string(n) + " entries");
    }
    std::string extra;
    if (is >> extra)
        throw input_error("matrix: trailing content '" + extra + "'");
    const double tol = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(d[i][i]) > tol)
            throw input_error("matrix: nonzero diagonal for '" + names[i] + "'");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(d[i][j] - d[j][i]) > tol)
                throw input_error("matrix: asymmetry between '" + names[i] + "' and '" +
                                  names[j] + "'");
    }
    DistanceMatrix D(names);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            D.set(names[i], names[j], d[i][j]);
    return D;
}

inline std::string emit_matrix(const DistanceMatrix& D) {
    std::ostringstream os;
    os << D.size() << "\n";
    for (const auto& a : D.taxa()) {
        os << a;
        for (const auto& b : D.taxa())
            os << " " << D.at(a, b);
        os << "\n";
    }
    return os.str();
}

/// Extended Newick: nodes of indegree >= 2 carry a "#H<k>" tag, appear once
/// in full (with children) and afterwards as bare references. Trees come
/// out as plain Newick. Hybrid numbering follows first-visit order of a
/// DFS whose children are ordered by smallest reachable leaf.
inline std::string emit_enewick(const PhyloNetwork& N) {
    if (N.node_count() == 0)
        return ";";
    // smallest reachable leaf per node, for deterministic child order
    std::vector<std::string> min_leaf(N.node_count());
    {
        std::vector<int> order = N.topo_order();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int u = *it;
            const auto& node = N.node(u);
            if (node.is_leaf()) {
                min_leaf[u] = node.label;
                continue;
            }
            std::string best;
            for (int c : node.children)
                if (best.empty() || min_leaf[c] < best)
                    best = min_leaf[c];
            min_leaf[u] = best;
        }
    }
    std::map<int, int> hybrid_num;
    std::function<std::string(int)> walk = [&](int u) -> std::string {
        const auto& node = N.node(u);
        bool hybrid = node.parents.size() >= 2;
        if (hybrid) {
            auto it = hybrid_num.find(u);
            if (it != hybrid_num.end())
                return "#H" + std::to_string(it->second);
            int k = static_cast<int>(hybrid_num.size()) + 1;
            hybrid_num[u] = k;
            if (node.is_leaf())
                return node.label + "#H" + std::to_string(k);
            std::vector<int> cs = node.children;
            std::sort(cs.begin(), cs.end(), [&](int a, int b) {
                return std::make_pair(min_leaf[a], a) < std::make_pair(min_leaf[b], b);
            });
            std::string s = "(";
            for (std::size_t i = 0; i < cs.size(); ++i)
                s += (i ? "," : "") + walk(cs[i]);
            return s + ")#H" + std::to_string(k);
        }
        if (node.is_leaf())
            return node.label;
        std::vector<int> cs = node.children;
        std::sort(cs.begin(), cs.end(), [&](int a, int b) {
            return std::make_pair(min_leaf[a], a) < std::make_pair(min_leaf[b], b);
        });
        std::string s = "(";
        for (std::size_t i = 0; i < cs.size(); ++i)
            s += (i ? "," : "") + walk(cs[i]);
        return s + ")";
    };
    return walk(N.root()) + ";";
}

namespace detail {

class EnewickParser {
public:
    explicit EnewickParser(const std::string& text) : text_(text) {}

    PhyloNetwork parse() {
        skip_ws();
        int root = subtree();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ';')
            ++pos_;
        skip_ws();
        if (pos_ != text_.size())
            throw input_error("newick: trailing content at offset " + std::to_string(pos_));
        net_.set_root(root);
        auto diag = validate_leaf_labels();
        if (!diag.empty())
            throw input_error("newick: " + diag);
        if (net_.has_cycle())
            throw input_error("newick: hybrid references create a cycle");
        return net_;
    }

private:
    std::string validate_leaf_labels() {
        std::set<Taxon> seen;
        for (int i = 0; i < net_.node_count(); ++i) {
            const auto& n = net_.node(i);
            if (!n.is_leaf())
                continue;
            if (n.label.empty())
                return "unlabeled leaf";
            if (!seen.insert(n.label).second)
                return "duplicate leaf label '" + n.label + "'";
        }
        return "";
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    // subtree := '(' subtree (',' subtree)* ')' label? | label
    // label   := name? ('#H' digits)? (':' number)?
    int subtree() {
        skip_ws();
        std::vector<int> children_of_here;
        bool has_children = false;
        if (pos_ < text_.size() && text_[pos_] == '(') {
            has_children = true;
            ++pos_;
            children_of_here.push_back(subtree());
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                children_of_here.push_back(subtree());
                skip_ws();
            }
            if (pos_ >= text_.size() || text_[pos_] != ')')
                throw input_error("newick: expected ')' at offset " + std::to_string(pos_));
            ++pos_;
        }
        auto [name, hybrid] = label();

        int id;
        if (hybrid >= 0) {
            auto it = hybrids_.find(hybrid);
            if (it == hybrids_.end()) {
                id = net_.add_node(name);
                hybrids_[hybrid] = id;
            } else {
                id = it->second;
                if (!name.empty()) {
                    auto& node = net_.raw_nodes()[id];
                    if (node.label.empty())
                        node.label = name;
                    else if (node.label != name)
                        throw input_error("newick: hybrid #H" + std::to_string(hybrid) +
                                          " renamed from '" + node.label + "' to '" + name + "'");
                }
            }
            if (has_children && !net_.node(id).children.empty())
                throw input_error("newick: hybrid #H" + std::to_string(hybrid) +
                                  " defined with children twice");
        } else {
            if (!has_children && name.empty())
                throw input_error("newick: unlabeled leaf at offset " + std::to_string(pos_));
            id = net_.add_node(name);
        }
        for (int c : children_of_here)
            net_.add_edge(id, c);
        return id;
    }

    std::pair<std::string, int> label() {
        std::string name;
        while (pos_ < text_.size() &&
               std::string("(),;:#").find(text_[pos_]) == std::string::npos &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            name += text_[pos_++];
        int hybrid = -1;
        if (pos_ < text_.size() && text_[pos_] == '#') {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == 'H' || text_[pos_] == 'h'))
                ++pos_;
            std::string digits;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits += text_[pos_++];
            if (digits.empty())
                throw input_error("newick: malformed hybrid tag at offset " +
                                  std::to_string(pos_));
            hybrid = std::stoi(digits);
        }
        if (pos_ < text_.size() && text_[pos_] == ':') { // ignore branch lengths
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    std::string(".eE+-").find(text_[pos_]) != std::string::npos))
                ++pos_;
        }
        return {name, hybrid};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    PhyloNetwork net_;
    std::map<int, int> hybrids_;
};

} // namespace detail

inline PhyloNetwork parse_enewick(const std::string& text) {
    detail::EnewickParser p(text);
    PhyloNetwork N = p.parse();
    N.relaxed = !is_valid_network(N);
    return N;
}

inline std::string emit_dot(const PhyloNetwork& N) {
    std::ostringstream os;
    os << "digraph network {\n";
    for (int i = 0; i < N.node_count(); ++i) {
        const auto& n = N.node(i);
        os << "  n" << i;
        if (n.is_leaf())
            os << " [label=\"" << n.label << "\", shape=plaintext]";
        else if (n.parents.size() >= 2)
            os << " [label=\"\", shape=box]";
        else
            os << " [label=\"\", shape=point]";
        os << ";\n";
    }
    for (auto [u, v] : N.edges())
        os << "  n" << u << " -> n" << v << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace tripnet
