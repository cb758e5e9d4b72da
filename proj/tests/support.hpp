#pragma once

// Test-only helpers: random inputs and brute-force oracles. Nothing here calls
// into the propagation, metric or similarity code it is used to check.

#include <aggprop/graph.hpp>
#include <aggprop/labels.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

using aggprop::DirectedGraph;
using aggprop::Label;
using aggprop::NodeId;

using EdgePairs = std::vector<std::pair<NodeId, NodeId>>;

/// Directed G(n, p) over sparse, shuffled ids. Isolated nodes are kept.
inline DirectedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::vector<NodeId>* ids_out = nullptr)
{
    std::vector<NodeId> ids(n);
    std::uniform_int_distribution<NodeId> gap(1, 5);
    NodeId next = gap(rng);
    for (auto& id : ids) {
        id = next;
        next += gap(rng);
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    std::bernoulli_distribution coin(p);
    EdgePairs edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && coin(rng))
                edges.emplace_back(ids[a], ids[b]);
    if (ids_out)
        *ids_out = ids;
    return DirectedGraph::build(ids, edges);
}

/// Each node follows `out_min..out_max` others chosen preferentially by
/// follower count, giving a heavy-tailed in-degree.
inline DirectedGraph follower_graph(std::mt19937_64& rng, std::size_t n, std::size_t out_min, std::size_t out_max)
{
    std::vector<NodeId> targets_pool;
    EdgePairs edges;
    std::uniform_int_distribution<std::size_t> out_deg(out_min, out_max);
    std::vector<NodeId> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = i + 1;
    for (std::size_t i = 0; i < n; ++i)
        targets_pool.push_back(ids[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = out_deg(rng);
        for (std::size_t e = 0; e < k; ++e) {
            std::uniform_int_distribution<std::size_t> pick(0, targets_pool.size() - 1);
            const NodeId v = targets_pool[pick(rng)];
            if (v == ids[i])
                continue;
            edges.emplace_back(ids[i], v);
            targets_pool.push_back(v);
        }
    }
    return DirectedGraph::build(ids, edges);
}

inline std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n, double p_aggressive)
{
    std::bernoulli_distribution coin(p_aggressive);
    std::vector<Label> out(n);
    for (auto& l : out)
        l = coin(rng) ? Label::aggressive : Label::normal;
    return out;
}

inline DirectedGraph parse_graph(const std::string& text)
{
    std::istringstream in(text);
    return aggprop::load_edge_list(in);
}

// ---------------------------------------------------------------------------
// Brute-force SCC by pairwise reachability.

inline std::set<NodeId> brute_force_largest_scc(const std::vector<NodeId>& nodes, const EdgePairs& edges)
{
    const std::size_t n = nodes.size();
    std::map<NodeId, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i)
        pos[nodes[i]] = i;
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        reach[i][i] = 1;
    for (const auto& [u, v] : edges)
        reach[pos[u]][pos[v]] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j])
                    reach[i][j] = 1;
    std::set<NodeId> best;
    for (std::size_t i = 0; i < n; ++i) {
        std::set<NodeId> comp;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i])
                comp.insert(nodes[j]);
        if (comp.size() > best.size() || (comp.size() == best.size() && !best.empty() && *comp.begin() < *best.begin()))
            best = comp;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Hand-rolled propagation trace. Works on external ids, derives everything
// from the raw edge list and reads the model's equation off its name.

struct OracleModel {
    std::string family; // Voter, Deffuant, HK, DeGroot, FJ, avgDeGroot, avgFJ
    std::string variant; // "", "W", "P", "WP"
    double d = 0.0;
};

inline OracleModel parse_model_name(const std::string& name)
{
    OracleModel m;
    std::vector<std::string> parts;
    std::stringstream ss(name);
    std::string part;
    while (std::getline(ss, part, '_'))
        parts.push_back(part);
    m.family = parts.at(0);
    std::size_t next = 1;
    if (m.family == "HK")
        m.d = std::stod(parts.at(next++));
    if (next < parts.size())
        m.variant = parts.at(next);
    return m;
}

class OracleSimulator {
public:
    OracleSimulator(std::vector<NodeId> nodes, EdgePairs edges) : nodes_(std::move(nodes)), edges_(std::move(edges))
    {
        for (NodeId v : nodes_) {
            nb_[v];
            in_[v] = 0;
            out_[v] = 0;
        }
        for (const auto& [u, v] : edges_) {
            nb_[u].insert(v);
            nb_[v].insert(u);
            ++out_[u];
            ++in_[v];
        }
    }

    double jaccard(NodeId i, NodeId j) const
    {
        const auto& a = nb_.at(i);
        const auto& b = nb_.at(j);
        std::set<NodeId> inter, uni;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(inter, inter.begin()));
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(uni, uni.begin()));
        if (uni.empty())
            return 0.0;
        return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
    }

    double power(NodeId i) const
    {
        const double in = in_.at(i), out = out_.at(i);
        if (out == 0)
            return in > 0 ? 1.0 : 0.0;
        return in / out > 1.0 ? 1.0 : in / out;
    }

    double factor(const OracleModel& m, NodeId i, NodeId j, bool self) const
    {
        if (m.variant.empty())
            return 1.0;
        const double p = self ? power(i) : power(j);
        if (m.variant == "W")
            return jaccard(i, j);
        if (m.variant == "P")
            return p;
        return jaccard(i, j) * p;
    }

    /// Scores after each of the snapshot points floor(k L / N), k = 0..N.
    std::vector<std::map<NodeId, double>> run(const std::string& model_name, std::map<NodeId, double> score,
                                              const EdgePairs& schedule, std::size_t snapshots) const
    {
        const OracleModel m = parse_model_name(model_name);
        const std::map<NodeId, double> initial = score;
        std::vector<std::map<NodeId, double>> out{score};
        std::vector<std::size_t> points;
        for (std::size_t k = 1; k <= snapshots; ++k)
            points.push_back(k * schedule.size() / snapshots);
        std::size_t next = 0;
        while (next < points.size() && points[next] == 0) {
            out.push_back(score);
            ++next;
        }
        for (std::size_t step = 0; step < schedule.size(); ++step) {
            const NodeId i = schedule[step].first;
            const NodeId j = schedule[step].second;
            const double si = score[i];
            const double sj = score[j];
            double result = si;
            if (m.family == "Voter") {
                result = factor(m, i, j, false) * sj;
            } else if (m.family == "Deffuant" || m.family == "HK") {
                const double a = factor(m, i, j, true) * si;
                const double b = factor(m, i, j, false) * sj;
                const bool fire = m.family == "Deffuant" || std::fabs(a - b) < m.d;
                if (fire)
                    result = a + b > 1.0 ? 1.0 : a + b;
            } else {
                const double ai = factor(m, i, j, true);
                double num = 0.0, den = 0.0, asum = 0.0, ssum = 0.0;
                std::size_t count = 0;
                if (m.family == "DeGroot") {
                    num = ai * si;
                    den = ai;
                } else if (m.family == "FJ") {
                    num = ai * initial.at(i) + ai * si;
                    den = 2 * ai;
                } else if (m.family == "avgDeGroot") {
                    asum = ai;
                    ssum = si;
                    count = 1;
                } else {
                    asum = ai + ai;
                    ssum = initial.at(i) + si;
                    count = 2;
                }
                for (NodeId k : nb_.at(i)) {
                    const double ak = factor(m, i, k, false);
                    num += ak * score[k];
                    den += ak;
                    asum += ak;
                    ssum += score[k];
                    ++count;
                }
                if (m.family == "DeGroot" || m.family == "FJ")
                    result = den > 0 ? num / den : si;
                else
                    result = (asum / count) * (ssum / count);
            }
            score[i] = result;
            while (next < points.size() && points[next] == step + 1) {
                out.push_back(score);
                ++next;
            }
        }
        return out;
    }

    /// All 26 metrics by exhaustive counting, keyed by canonical name.
    std::map<std::string, double> metrics(const std::map<NodeId, double>& t0, const std::map<NodeId, double>& tn,
                                          double t_a) const
    {
        auto lab = [t_a](double s) { return s >= t_a ? 'a' : 'n'; };
        auto up = [](char c) { return static_cast<char>(c == 'a' ? 'A' : 'N'); };
        std::map<std::string, double> out;
        const double nv = static_cast<double>(nodes_.size());
        const double ne = static_cast<double>(edges_.size());
        for (char s : {'n', 'a'}) {
            std::size_t c = 0;
            for (NodeId v : nodes_)
                c += lab(tn.at(v)) == s;
            out[std::string(1, s)] = nv ? c / nv : 0.0;
            for (char t : {'n', 'a'}) {
                std::size_t m = 0;
                for (NodeId v : nodes_)
                    m += lab(t0.at(v)) == s && lab(tn.at(v)) == t;
                out[std::string(1, s) + "_to_" + t] = nv ? m / nv : 0.0;
            }
        }
        const std::vector<std::string> states{"NN", "NA", "AN", "AA"};
        for (const auto& s : states) {
            std::size_t c = 0;
            for (const auto& [u, v] : edges_)
                c += up(lab(tn.at(u))) == s[0] && up(lab(tn.at(v))) == s[1];
            out[s] = ne ? c / ne : 0.0;
            for (const auto& t : states) {
                std::size_t m = 0;
                for (const auto& [u, v] : edges_)
                    m += up(lab(t0.at(u))) == s[0] && up(lab(t0.at(v))) == s[1] && up(lab(tn.at(u))) == t[0] &&
                         up(lab(tn.at(v))) == t[1];
                out[s + "_to_" + t] = ne ? m / ne : 0.0;
            }
        }
        return out;
    }

private:
    std::vector<NodeId> nodes_;
    EdgePairs edges_;
    std::map<NodeId, std::set<NodeId>> nb_;
    std::map<NodeId, double> in_, out_;
};

// ---------------------------------------------------------------------------
// Naive similarity and AUC references.

inline double naive_cosine(const std::vector<double>& u, const std::vector<double>& v)
{
    double dot = 0, a = 0, b = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (i == j) {
                dot += u[i] * v[j];
                a += u[i] * u[i];
                b += v[j] * v[j];
            }
    return (a == 0 || b == 0) ? 0.0 : dot / std::sqrt(a * b);
}

inline double naive_pearson(const std::vector<double>& u, const std::vector<double>& v)
{
    const double n = static_cast<double>(u.size());
    double su = 0, sv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
    }
    // pairwise form: sum over i<j of (u_i-u_j)(v_i-v_j)
    double cov = 0, vu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            cov += (u[i] - u[j]) * (v[i] - v[j]);
            vu += (u[i] - u[j]) * (u[i] - u[j]);
            vv += (v[i] - v[j]) * (v[i] - v[j]);
        }
    (void)n;
    if (vu == 0 || vv == 0)
        return 0.0;
    return cov / std::sqrt(vu * vv);
}

inline std::vector<double> naive_ranks(const std::vector<double>& x)
{
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            less += x[j] < x[i];
            equal += x[j] == x[i];
        }
        r[i] = less + (equal + 1) / 2.0;
    }
    return r;
}

inline double naive_spearman(const std::vector<double>& u, const std::vector<double>& v)
{
    return naive_pearson(naive_ranks(u), naive_ranks(v));
}

inline double naive_euclidean(const std::vector<double>& u, const std::vector<double>& v)
{
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += std::pow(u[i] - v[i], 2);
    return std::sqrt(s);
}

/// Fraction of (aggressive, normal) pairs ranked correctly, ties counting half.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<Label>& labels)
{
    double wins = 0, pairs = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (labels[p] != Label::aggressive)
            continue;
        for (std::size_t q = 0; q < scores.size(); ++q) {
            if (labels[q] != Label::normal)
                continue;
            pairs += 1;
            if (scores[p] > scores[q])
                wins += 1;
            else if (scores[p] == scores[q])
                wins += 0.5;
        }
    }
    return wins / pairs;
}

} // namespace testing_support
