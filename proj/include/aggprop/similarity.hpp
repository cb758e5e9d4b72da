#pragma once

#include "error.hpp"
#include "metrics.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace aggprop {

/// A similarity value; degenerate inputs (zero norm, constant vector) yield 0
/// with the flag set.
struct Similarity {
    double value = 0.0;
    bool degenerate = false;
};

namespace detail {

inline void require_same_length(std::span<const double> u, std::span<const double> v, const char* what,
                                std::size_t min_len)
{
    if (u.size() != v.size())
        throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(u.size()) + " vs " +
                              std::to_string(v.size()) + ")");
    if (u.size() < min_len)
        throw ValidationError(std::string(what) + ": needs at least " + std::to_string(min_len) + " entries");
}

inline double mean(std::span<const double> x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace detail

inline Similarity cosine(std::span<const double> u, std::span<const double> v)
{
    detail::require_same_length(u, v, "cosine", 1);
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        dot += u[k] * v[k];
        uu += u[k] * u[k];
        vv += v[k] * v[k];
    }
    if (uu == 0.0 || vv == 0.0)
        return {0.0, true};
    return {std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0), false};
}

inline Similarity pearson(std::span<const double> u, std::span<const double> v)
{
    detail::require_same_length(u, v, "pearson", 2);
    const double mu = detail::mean(u), mv = detail::mean(v);
    double cov = 0.0, su = 0.0, sv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double du = u[k] - mu, dv = v[k] - mv;
        cov += du * dv;
        su += du * du;
        sv += dv * dv;
    }
    if (su == 0.0 || sv == 0.0)
        return {0.0, true};
    return {std::clamp(cov / (std::sqrt(su) * std::sqrt(sv)), -1.0, 1.0), false};
}

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && x[order[j]] == x[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j); // mean of positions i+1 .. j
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

inline Similarity spearman(std::span<const double> u, std::span<const double> v)
{
    detail::require_same_length(u, v, "spearman", 2);
    const auto ru = average_ranks(u);
    const auto rv = average_ranks(v);
    return pearson(ru, rv);
}

inline double euclidean(std::span<const double> u, std::span<const double> v)
{
    detail::require_same_length(u, v, "euclidean", 0);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        s += (u[k] - v[k]) * (u[k] - v[k]);
    return std::sqrt(s);
}

struct SimilarityRow {
    std::size_t snapshot = 0;
    Similarity cosine, pearson, spearman;
    double euclidean = 0.0;

    std::string degenerate_flags() const
    {
        std::string f;
        auto add = [&f](bool on, const char* name) {
            if (on)
                f += f.empty() ? name : std::string("|") + name;
        };
        add(cosine.degenerate, "cosine");
        add(pearson.degenerate, "pearson");
        add(spearman.degenerate, "spearman");
        return f.empty() ? "none" : f;
    }
};

struct SimilarityReport {
    std::vector<SimilarityRow> rows;

    /// Row with the highest cosine (earliest on ties).
    const SimilarityRow& best_cosine() const
    {
        if (rows.empty())
            throw ValidationError("empty similarity report");
        return *std::max_element(rows.begin(), rows.end(), [](const SimilarityRow& a, const SimilarityRow& b) {
            return a.cosine.value < b.cosine.value;
        });
    }
};

inline SimilarityReport compare_run(std::span<const ValidationVector> run, const ValidationVector& truth)
{
    SimilarityReport report;
    for (std::size_t k = 0; k < run.size(); ++k) {
        std::span<const double> u = run[k].values, t = truth.values;
        report.rows.push_back({k, cosine(u, t), pearson(u, t), spearman(u, t), euclidean(u, t)});
    }
    return report;
}

inline void write_similarity_csv(std::ostream& out, const SimilarityReport& report)
{
    out << "snapshot,cosine,pearson,spearman,euclidean,degenerate_flags\n";
    for (const auto& r : report.rows)
        out << r.snapshot << ',' << text::fmt(r.cosine.value) << ',' << text::fmt(r.pearson.value) << ','
            << text::fmt(r.spearman.value) << ',' << text::fmt(r.euclidean) << ',' << r.degenerate_flags() << '\n';
}

} // namespace aggprop
