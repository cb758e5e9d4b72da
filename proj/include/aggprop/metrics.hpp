#pragma once

#include "error.hpp"
#include "graph.hpp"
#include "labels.hpp"
#include "text.hpp"

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aggprop {

/// Aggressive iff score >= t_a.
inline std::vector<Label> binarize(std::span<const double> scores, double t_a)
{
    std::vector<Label> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = scores[i] >= t_a ? Label::aggressive : Label::normal;
    return out;
}

/// Joint state of a directed edge i -> j: first letter is i (influenced), second j.
enum class EdgeState : std::uint8_t { NN = 0, NA = 1, AN = 2, AA = 3 };

inline constexpr EdgeState edge_state(Label i, Label j)
{
    return static_cast<EdgeState>(2 * static_cast<int>(i) + static_cast<int>(j));
}

/**
 * The 26 aggression-change metrics of one snapshot against the initial state.
 *
 * Layout (also the CSV column order):
 *   0-1    n, a                         node fractions at the snapshot
 *   2-5    NN, NA, AN, AA               edge fractions at the snapshot
 *   6-9    n_to_n, n_to_a, a_to_n, a_to_a
 *   10-25  XY_to_ZW, row-major over {NN,NA,AN,AA} x {NN,NA,AN,AA}
 *
 * Node quantities are fractions of |V|, edge quantities fractions of |E|, so
 * each transition row sums to the initial mass of its source state.
 */
struct MetricVector {
    static constexpr std::size_t size = 26;
    std::array<double, size> values{};

    double node_fraction(Label l) const { return values[static_cast<std::size_t>(l)]; }
    double edge_fraction(EdgeState s) const { return values[2 + static_cast<std::size_t>(s)]; }
    double node_transition(Label from, Label to) const
    {
        return values[6 + 2 * static_cast<std::size_t>(from) + static_cast<std::size_t>(to)];
    }
    double edge_transition(EdgeState from, EdgeState to) const
    {
        return values[10 + 4 * static_cast<std::size_t>(from) + static_cast<std::size_t>(to)];
    }

    static const std::array<std::string, size>& names()
    {
        static const std::array<std::string, size> n = [] {
            std::array<std::string, size> out;
            const char* nodes[] = {"n", "a"};
            const char* edges[] = {"NN", "NA", "AN", "AA"};
            out[0] = "n";
            out[1] = "a";
            for (int s = 0; s < 4; ++s)
                out[2 + s] = edges[s];
            for (int f = 0; f < 2; ++f)
                for (int t = 0; t < 2; ++t)
                    out[6 + 2 * f + t] = std::string(nodes[f]) + "_to_" + nodes[t];
            for (int f = 0; f < 4; ++f)
                for (int t = 0; t < 4; ++t)
                    out[10 + 4 * f + t] = std::string(edges[f]) + "_to_" + edges[t];
            return out;
        }();
        return n;
    }

    friend bool operator==(const MetricVector&, const MetricVector&) = default;
};

/// The 22 metrics kept for validation: everything except n, n_to_n, NN and
/// NN_to_NN. Order: a; NA; AN; AA; n_to_a; a_to_n; a_to_a; then the 15
/// remaining edge transitions in row-major order.
struct ValidationVector {
    static constexpr std::size_t size = 22;
    std::array<double, size> values{};

    /// Positions in MetricVector::values, in canonical validation order.
    static constexpr std::array<std::size_t, size> source_index{1,  3,  4,  5,  7,  8,  9,  11, 12, 13, 14,
                                                                 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25};

    static const std::array<std::string, size>& names()
    {
        static const std::array<std::string, size> n = [] {
            std::array<std::string, size> out;
            for (std::size_t k = 0; k < size; ++k)
                out[k] = MetricVector::names()[source_index[k]];
            return out;
        }();
        return n;
    }

    friend bool operator==(const ValidationVector&, const ValidationVector&) = default;
};

inline MetricVector metric_vector(const DirectedGraph& g, std::span<const Label> t0, std::span<const Label> tn)
{
    if (t0.size() != g.node_count() || tn.size() != g.node_count())
        throw ValidationError("label vectors must cover every node of the graph");
    MetricVector mv;
    auto& v = mv.values;
    const std::size_t n = g.node_count();
    if (n > 0) {
        std::array<std::size_t, 2> now{};
        std::array<std::size_t, 4> moves{};
        for (std::size_t i = 0; i < n; ++i) {
            ++now[static_cast<std::size_t>(tn[i])];
            ++moves[2 * static_cast<std::size_t>(t0[i]) + static_cast<std::size_t>(tn[i])];
        }
        const double dn = static_cast<double>(n);
        v[0] = static_cast<double>(now[0]) / dn;
        v[1] = static_cast<double>(now[1]) / dn;
        for (std::size_t k = 0; k < 4; ++k)
            v[6 + k] = static_cast<double>(moves[k]) / dn;
    }
    const std::size_t m = g.edge_count();
    if (m > 0) {
        std::array<std::size_t, 4> now{};
        std::array<std::size_t, 16> moves{};
        for (const Edge& e : g.edges()) {
            const auto before = static_cast<std::size_t>(edge_state(t0[e.source], t0[e.target]));
            const auto after = static_cast<std::size_t>(edge_state(tn[e.source], tn[e.target]));
            ++now[after];
            ++moves[4 * before + after];
        }
        const double dm = static_cast<double>(m);
        for (std::size_t k = 0; k < 4; ++k)
            v[2 + k] = static_cast<double>(now[k]) / dm;
        for (std::size_t k = 0; k < 16; ++k)
            v[10 + k] = static_cast<double>(moves[k]) / dm;
    }
    return mv;
}

/// Map-keyed variant; every node of `g` must be labelled in both maps.
inline MetricVector metric_vector(const DirectedGraph& g, const LabelMap& t0, const LabelMap& tn)
{
    return metric_vector(g, require_labels(g, t0), require_labels(g, tn));
}

inline ValidationVector validation_vector(const MetricVector& mv)
{
    ValidationVector vv;
    for (std::size_t k = 0; k < ValidationVector::size; ++k)
        vv.values[k] = mv.values[ValidationVector::source_index[k]];
    return vv;
}

/// Validation vector of an observed change between two labelings of `g`.
inline ValidationVector ground_truth_vector(const DirectedGraph& g, const LabelMap& before, const LabelMap& after)
{
    return validation_vector(metric_vector(g, before, after));
}

/// One metric vector per snapshot, each binarized at `t_a` and compared with
/// the binarized first snapshot.
template <class SnapshotRange>
std::vector<MetricVector> snapshot_metrics(const DirectedGraph& g, const SnapshotRange& snapshots, double t_a)
{
    std::vector<MetricVector> out;
    if (snapshots.empty())
        return out;
    const auto t0 = binarize(snapshots.front().scores, t_a);
    for (const auto& s : snapshots)
        out.push_back(metric_vector(g, t0, binarize(s.scores, t_a)));
    return out;
}

// ---------------------------------------------------------------------------
// CSV: header of canonical names, one row per vector.

namespace detail {

template <std::size_t N>
void write_rows(std::ostream& out, const std::array<std::string, N>& names,
                std::span<const std::array<double, N>> rows)
{
    for (std::size_t k = 0; k < N; ++k)
        out << (k ? "," : "") << names[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < N; ++k)
            out << (k ? "," : "") << text::fmt(row[k]);
        out << '\n';
    }
}

template <std::size_t N>
std::vector<std::array<double, N>> read_rows(std::istream& in, const std::array<std::string, N>& names,
                                             const std::string& source)
{
    std::vector<std::array<double, N>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty())
            continue;
        auto f = text::split_csv(body);
        if (!header) {
            if (f.size() != N)
                throw ParseError(source + ": expected " + std::to_string(N) + " columns, header has " +
                                     std::to_string(f.size()),
                                 line_no);
            for (std::size_t k = 0; k < N; ++k)
                if (f[k] != names[k])
                    throw ParseError(source + ": column " + std::to_string(k + 1) + " is '" + std::string(f[k]) +
                                         "', expected '" + names[k] + "'",
                                     line_no);
            header = true;
            continue;
        }
        if (f.size() != N)
            throw ParseError(source + ": expected " + std::to_string(N) + " values, got " + std::to_string(f.size()),
                             line_no);
        std::array<double, N> row{};
        for (std::size_t k = 0; k < N; ++k) {
            auto v = text::parse_double(f[k]);
            if (!v)
                throw ParseError(source + ": not a number: '" + std::string(f[k]) + "'", line_no);
            row[k] = *v;
        }
        rows.push_back(row);
    }
    if (!header)
        throw ParseError(source + ": missing header", 0);
    return rows;
}

} // namespace detail

inline void write_metric_csv(std::ostream& out, std::span<const MetricVector> rows)
{
    std::vector<std::array<double, MetricVector::size>> raw;
    for (const auto& r : rows)
        raw.push_back(r.values);
    detail::write_rows<MetricVector::size>(out, MetricVector::names(), raw);
}

inline std::vector<MetricVector> read_metric_csv(std::istream& in, const std::string& source = "metric csv")
{
    std::vector<MetricVector> out;
    for (const auto& row : detail::read_rows<MetricVector::size>(in, MetricVector::names(), source))
        out.push_back({row});
    return out;
}

inline void write_validation_csv(std::ostream& out, const ValidationVector& vv)
{
    const std::array<std::array<double, ValidationVector::size>, 1> rows{vv.values};
    detail::write_rows<ValidationVector::size>(out, ValidationVector::names(), rows);
}

inline ValidationVector read_validation_csv(std::istream& in, const std::string& source = "validation csv")
{
    auto rows = detail::read_rows<ValidationVector::size>(in, ValidationVector::names(), source);
    if (rows.size() != 1)
        throw ParseError(source + ": expected exactly one data row, got " + std::to_string(rows.size()), 0);
    return {rows.front()};
}

} // namespace aggprop
