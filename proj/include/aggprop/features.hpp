#pragma once

#include "error.hpp"
#include "graph.hpp"
#include "text.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

namespace aggprop {

/// Network features exported for external label-transfer classifiers.
struct NodeFeatures {
    std::size_t in_degree = 0;  // followers
    std::size_t out_degree = 0; // friends
    double degree_ratio = 0.0;  // in / max(out, 1)
    double clustering_coefficient = 0.0;
    double hub = 0.0;
    double authority = 0.0;
    double eigenvector = 0.0;
};

struct FeatureTable {
    std::vector<NodeFeatures> rows; // dense, aligned with the graph
    bool hits_converged = false;
    bool eigenvector_converged = false;
    std::size_t hits_iterations = 0;
    std::size_t eigenvector_iterations = 0;
};

struct PowerIterationOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 100;
};

namespace detail {

inline double l2_norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

inline void normalize(std::vector<double>& v)
{
    const double n = l2_norm(v);
    if (n > 0.0)
        for (double& x : v)
            x /= n;
}

inline double l2_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace detail

/// Local clustering coefficient on the undirected view.
inline std::vector<double> clustering_coefficients(const DirectedGraph& g)
{
    const std::size_t n = g.node_count();
    std::vector<double> cc(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto ni = g.neighbors(static_cast<NodeIndex>(i));
        const std::size_t k = ni.size();
        if (k < 2)
            continue;
        std::size_t links = 0; // each triangle edge counted twice
        for (NodeIndex j : ni) {
            auto nj = g.neighbors(j);
            auto a = ni.begin();
            auto b = nj.begin();
            while (a != ni.end() && b != nj.end()) {
                if (*a < *b)
                    ++a;
                else if (*b < *a)
                    ++b;
                else {
                    ++links;
                    ++a;
                    ++b;
                }
            }
        }
        cc[i] = static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
    return cc;
}

/// HITS hub and authority scores, each normalised to unit L2 norm.
inline void hits(const DirectedGraph& g, std::vector<double>& hub, std::vector<double>& authority, bool& converged,
                 std::size_t& iterations, const PowerIterationOptions& opt = {})
{
    const std::size_t n = g.node_count();
    hub.assign(n, n ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0);
    authority = hub;
    converged = false;
    iterations = 0;
    std::vector<double> next_auth(n), next_hub(n);
    while (iterations < opt.max_iterations) {
        ++iterations;
        for (std::size_t v = 0; v < n; ++v) {
            double s = 0.0;
            for (NodeIndex u : g.in_neighbors(static_cast<NodeIndex>(v)))
                s += hub[u];
            next_auth[v] = s;
        }
        detail::normalize(next_auth);
        for (std::size_t u = 0; u < n; ++u) {
            double s = 0.0;
            for (NodeIndex v : g.out_neighbors(static_cast<NodeIndex>(u)))
                s += next_auth[v];
            next_hub[u] = s;
        }
        detail::normalize(next_hub);
        const double change = detail::l2_distance(next_auth, authority) + detail::l2_distance(next_hub, hub);
        authority.swap(next_auth);
        hub.swap(next_hub);
        if (change < opt.tolerance) {
            converged = true;
            break;
        }
    }
}

/// Eigenvector centrality of the undirected view. Iterates with A + I, which
/// shares A's leading eigenvector but does not oscillate on bipartite graphs.
inline std::vector<double> eigenvector_centrality(const DirectedGraph& g, bool& converged, std::size_t& iterations,
                                                  const PowerIterationOptions& opt = {})
{
    const std::size_t n = g.node_count();
    std::vector<double> x(n, n ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0), next(n);
    converged = false;
    iterations = 0;
    while (iterations < opt.max_iterations) {
        ++iterations;
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (NodeIndex j : g.neighbors(static_cast<NodeIndex>(i)))
                s += x[j];
            next[i] = s;
        }
        detail::normalize(next);
        const double change = detail::l2_distance(next, x);
        x.swap(next);
        if (change < opt.tolerance) {
            converged = true;
            break;
        }
    }
    return x;
}

inline FeatureTable node_features(const DirectedGraph& g, const PowerIterationOptions& opt = {})
{
    if (g.empty())
        throw ValidationError("node_features requires a non-empty graph");
    FeatureTable table;
    const std::size_t n = g.node_count();
    table.rows.resize(n);
    auto cc = clustering_coefficients(g);
    std::vector<double> hub, auth;
    hits(g, hub, auth, table.hits_converged, table.hits_iterations, opt);
    auto eig = eigenvector_centrality(g, table.eigenvector_converged, table.eigenvector_iterations, opt);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = table.rows[i];
        const auto idx = static_cast<NodeIndex>(i);
        r.in_degree = g.in_degree(idx);
        r.out_degree = g.out_degree(idx);
        r.degree_ratio = static_cast<double>(r.in_degree) / static_cast<double>(std::max<std::size_t>(r.out_degree, 1));
        r.clustering_coefficient = cc[i];
        r.hub = hub[i];
        r.authority = auth[i];
        r.eigenvector = eig[i];
    }
    return table;
}

inline void write_features_csv(std::ostream& out, const DirectedGraph& g, const FeatureTable& table)
{
    out << "node,in_degree,out_degree,degree_ratio,clustering,hub,authority,eigenvector\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        out << g.id_of(static_cast<NodeIndex>(i)) << ',' << r.in_degree << ',' << r.out_degree << ','
            << text::fmt(r.degree_ratio) << ',' << text::fmt(r.clustering_coefficient) << ',' << text::fmt(r.hub)
            << ',' << text::fmt(r.authority) << ',' << text::fmt(r.eigenvector) << '\n';
    }
}

} // namespace aggprop
