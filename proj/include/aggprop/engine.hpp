#pragma once

#include "error.hpp"
#include "graph.hpp"
#include "labels.hpp"
#include "models.hpp"
#include "rng.hpp"
#include "text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aggprop {

enum class OrderingKind : std::uint8_t { random, most_popular, least_popular, neighborhood, network_id };

inline constexpr std::array<OrderingKind, 5> all_orderings{OrderingKind::random, OrderingKind::most_popular,
                                                           OrderingKind::least_popular, OrderingKind::neighborhood,
                                                           OrderingKind::network_id};

inline std::string_view to_string(OrderingKind k)
{
    switch (k) {
    case OrderingKind::random:
        return "random";
    case OrderingKind::most_popular:
        return "most-popular";
    case OrderingKind::least_popular:
        return "least-popular";
    case OrderingKind::neighborhood:
        return "neighborhood";
    case OrderingKind::network_id:
        return "network-id";
    }
    return "?";
}

inline OrderingKind parse_ordering(std::string_view s)
{
    for (auto k : all_orderings)
        if (to_string(k) == s)
            return k;
    throw ValidationError("unknown ordering '" + std::string(s) +
                          "'; valid: random, most-popular, least-popular, neighborhood, network-id");
}

/// round(fraction * edge_count), at least 1.
inline std::size_t sample_size(std::size_t edge_count, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ValidationError("edge fraction must be in (0, 1], got " + text::fmt(fraction));
    const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(edge_count)));
    return std::clamp<std::size_t>(n, 1, edge_count);
}

/// Uniform sample of `count` distinct edges, returned in canonical edge order.
inline std::vector<Edge> select_edge_count(const DirectedGraph& g, std::size_t count, std::uint64_t seed)
{
    if (g.edge_count() == 0)
        throw ValidationError("cannot select edges from a graph without edges");
    count = std::min(count, g.edge_count());
    std::vector<std::uint32_t> ids(g.edge_count());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = static_cast<std::uint32_t>(i);
    auto eng = rng::stream(seed, "select-edges");
    // partial Fisher-Yates: the first `count` slots are the sample
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng::below(eng, ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    std::vector<Edge> out;
    out.reserve(count);
    auto edges = g.edges();
    for (auto id : ids)
        out.push_back(edges[id]);
    return out;
}

inline std::vector<Edge> select_edges(const DirectedGraph& g, double fraction, std::uint64_t seed)
{
    if (g.edge_count() == 0)
        throw ValidationError("cannot select edges from a graph without edges");
    return select_edge_count(g, sample_size(g.edge_count(), fraction), seed);
}

namespace detail {

/// Breadth-first discovery index over the undirected view. Roots are taken in
/// descending total degree (ties: smaller index) until every node is reached.
inline std::vector<std::uint32_t> bfs_discovery(const DirectedGraph& g)
{
    const std::size_t n = g.node_count();
    std::vector<NodeIndex> roots(n);
    for (std::size_t i = 0; i < n; ++i)
        roots[i] = static_cast<NodeIndex>(i);
    std::stable_sort(roots.begin(), roots.end(),
                     [&g](NodeIndex a, NodeIndex b) { return g.total_degree(a) > g.total_degree(b); });
    constexpr auto unseen = UINT32_MAX;
    std::vector<std::uint32_t> discovery(n, unseen);
    std::uint32_t next = 0;
    std::queue<NodeIndex> frontier;
    for (NodeIndex root : roots) {
        if (discovery[root] != unseen)
            continue;
        discovery[root] = next++;
        frontier.push(root);
        while (!frontier.empty()) {
            const NodeIndex v = frontier.front();
            frontier.pop();
            for (NodeIndex w : g.neighbors(v)) {
                if (discovery[w] == unseen) {
                    discovery[w] = next++;
                    frontier.push(w);
                }
            }
        }
    }
    return discovery;
}

} // namespace detail

/**
 * Orders a sampled edge set.
 *
 * - random: seeded Fisher-Yates shuffle.
 * - most_popular / least_popular: by the influencer's total degree, descending
 *   or ascending, ties by (influenced, influencer).
 * - neighborhood: by BFS discovery index of the influenced endpoint, ties by
 *   (influenced, influencer).
 * - network_id: ascending (influenced, influencer).
 */
inline std::vector<Edge> order_edges(std::vector<Edge> edges, OrderingKind kind, const DirectedGraph& g,
                                     std::uint64_t seed)
{
    switch (kind) {
    case OrderingKind::random: {
        auto eng = rng::stream(seed, "order-edges");
        rng::shuffle(std::span<Edge>(edges), eng);
        break;
    }
    case OrderingKind::most_popular:
        std::sort(edges.begin(), edges.end(), [&g](const Edge& a, const Edge& b) {
            const auto da = g.total_degree(a.target), db = g.total_degree(b.target);
            return da != db ? da > db : a < b;
        });
        break;
    case OrderingKind::least_popular:
        std::sort(edges.begin(), edges.end(), [&g](const Edge& a, const Edge& b) {
            const auto da = g.total_degree(a.target), db = g.total_degree(b.target);
            return da != db ? da < db : a < b;
        });
        break;
    case OrderingKind::neighborhood: {
        const auto discovery = detail::bfs_discovery(g);
        std::sort(edges.begin(), edges.end(), [&discovery](const Edge& a, const Edge& b) {
            const auto da = discovery.at(a.source), db = discovery.at(b.source);
            return da != db ? da < db : a < b;
        });
        break;
    }
    case OrderingKind::network_id:
        std::sort(edges.begin(), edges.end());
        break;
    }
    return edges;
}

struct Schedule {
    std::vector<Edge> edges;
    double fraction = 1.0;
    std::uint64_t seed = 0;
    OrderingKind ordering = OrderingKind::random;
};

inline Schedule make_schedule(const DirectedGraph& g, double fraction, OrderingKind ordering, std::uint64_t seed)
{
    return {order_edges(select_edges(g, fraction, seed), ordering, g, seed), fraction, seed, ordering};
}

/// Schedule with an explicit interaction count instead of a fraction.
inline Schedule make_schedule_count(const DirectedGraph& g, std::size_t count, OrderingKind ordering,
                                    std::uint64_t seed)
{
    auto edges = order_edges(select_edge_count(g, count, seed), ordering, g, seed);
    const double fraction = static_cast<double>(edges.size()) / static_cast<double>(g.edge_count());
    return {std::move(edges), fraction, seed, ordering};
}

/// Per-graph quantities shared by every run: power scores, and Jaccard
/// weights aligned with the undirected neighbour slots when requested.
struct PropagationTables {
    std::vector<double> power;
    std::vector<double> slot_weight;

    static PropagationTables build(const DirectedGraph& g, bool with_weights)
    {
        PropagationTables t;
        t.power.resize(g.node_count());
        for (std::size_t i = 0; i < g.node_count(); ++i)
            t.power[i] = power_score(g, static_cast<NodeIndex>(i));
        if (with_weights) {
            t.slot_weight.resize(g.neighbor_slot_count());
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                const auto idx = static_cast<NodeIndex>(i);
                const std::size_t base = g.neighbor_offset(idx);
                auto nb = g.neighbors(idx);
                for (std::size_t k = 0; k < nb.size(); ++k)
                    t.slot_weight[base + k] = jaccard_weight(g, idx, nb[k]);
            }
        }
        return t;
    }

    bool has_weights() const noexcept { return !slot_weight.empty(); }
};

struct Snapshot {
    std::size_t index = 0;
    std::size_t interactions_done = 0;
    std::vector<double> scores; // dense, aligned with the graph
};

struct RunResult {
    std::string model;
    std::vector<Snapshot> snapshots; // T_0 .. T_N
    std::size_t effective_interactions = 0;
};

/// Interaction counts after which snapshots 1..N are taken: floor(k L / N),
/// so the last one lands exactly on L.
inline std::vector<std::size_t> snapshot_points(std::size_t schedule_length, std::size_t snapshot_count)
{
    if (snapshot_count == 0)
        throw ValidationError("snapshot count must be at least 1");
    std::vector<std::size_t> points(snapshot_count);
    for (std::size_t k = 1; k <= snapshot_count; ++k)
        points[k - 1] = k * (schedule_length / snapshot_count) + k * (schedule_length % snapshot_count) / snapshot_count;
    return points;
}

/// Called after every interaction with (step, influenced node, new score).
using UpdateObserver = std::function<void(std::size_t, NodeIndex, double)>;

/**
 * Processes the schedule once, in order, updating node states in place.
 *
 * Pairwise families update the influenced endpoint from the influencer alone;
 * neighbourhood families update it from all of its current neighbourhood.
 * `tables` may be shared between runs on the same graph; it is built on the
 * fly when absent.
 */
inline RunResult run_simulation(const DirectedGraph& g, std::vector<NodeState> states, const ModelSpec& spec,
                                std::span<const Edge> schedule, std::size_t snapshot_count = 10,
                                const PropagationTables* tables = nullptr, const UpdateObserver& observer = {})
{
    if (states.size() != g.node_count())
        throw ValidationError("state vector has " + std::to_string(states.size()) + " entries for a graph of " +
                              std::to_string(g.node_count()) + " nodes");
    for (const Edge& e : schedule)
        if (e.source >= g.node_count() || e.target >= g.node_count() || !g.has_edge(e.source, e.target))
            throw ValidationError("scheduled edge is not part of the graph");

    std::optional<PropagationTables> owned;
    if (!tables || (uses_weight(spec) && !tables->has_weights())) {
        owned = PropagationTables::build(g, uses_weight(spec));
        tables = &*owned;
    }
    const auto& power = tables->power;
    auto weight_of = [&](NodeIndex i, NodeIndex j) -> double {
        if (!tables->has_weights())
            return 0.0;
        auto nb = g.neighbors(i);
        auto it = std::lower_bound(nb.begin(), nb.end(), j);
        return tables->slot_weight[g.neighbor_offset(i) + static_cast<std::size_t>(it - nb.begin())];
    };

    std::vector<double> score(states.size()), initial(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        score[i] = states[i].score;
        initial[i] = states[i].initial_score;
    }

    RunResult result;
    result.model = spec.name;
    result.snapshots.reserve(snapshot_count + 1);
    result.snapshots.push_back({0, 0, score});
    const auto points = snapshot_points(schedule.size(), snapshot_count);
    std::size_t next_point = 0;
    auto take_due_snapshots = [&](std::size_t done) {
        while (next_point < points.size() && points[next_point] == done) {
            result.snapshots.push_back({next_point + 1, done, score});
            ++next_point;
        }
    };
    take_due_snapshots(0);

    const bool pairwise = is_pairwise(spec.family);
    std::vector<Interaction> hood;
    for (std::size_t step = 0; step < schedule.size(); ++step) {
        const NodeIndex i = schedule[step].source;
        const NodeIndex j = schedule[step].target;
        UpdateContext ctx;
        ctx.score_self = score[i];
        ctx.initial_self = initial[i];
        ctx.power_self = power[i];
        if (pairwise) {
            ctx.influencer = {score[j], weight_of(i, j), power[j]};
        } else {
            auto nb = g.neighbors(i);
            const std::size_t base = g.neighbor_offset(i);
            hood.resize(nb.size());
            for (std::size_t k = 0; k < nb.size(); ++k) {
                hood[k] = {score[nb[k]], tables->has_weights() ? tables->slot_weight[base + k] : 0.0, power[nb[k]]};
                if (nb[k] == j)
                    ctx.influencer = hood[k];
            }
            ctx.neighborhood = hood;
        }
        const UpdateResult r = apply_model(spec, ctx);
        score[i] = r.score;
        if (r.applied)
            ++result.effective_interactions;
        if (observer)
            observer(step, i, r.score);
        take_due_snapshots(step + 1);
    }
    return result;
}

inline RunResult run_simulation(const DirectedGraph& g, std::vector<NodeState> states, const ModelSpec& spec,
                                const Schedule& schedule, std::size_t snapshot_count = 10,
                                const PropagationTables* tables = nullptr)
{
    return run_simulation(g, std::move(states), spec, schedule.edges, snapshot_count, tables);
}

struct ClassMeans {
    std::optional<double> aggressive;
    std::optional<double> normal;
    std::optional<double> all;
};

/// Mean score per initial label; a class without members has no mean.
inline ClassMeans mean_scores_by_class(std::span<const double> scores, std::span<const Label> initial_labels)
{
    if (scores.size() != initial_labels.size())
        throw ValidationError("scores and labels differ in length");
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto c = static_cast<std::size_t>(initial_labels[i]);
        sum[c] += scores[i];
        ++count[c];
    }
    ClassMeans m;
    if (count[1])
        m.aggressive = sum[1] / static_cast<double>(count[1]);
    if (count[0])
        m.normal = sum[0] / static_cast<double>(count[0]);
    if (count[0] + count[1])
        m.all = (sum[0] + sum[1]) / static_cast<double>(count[0] + count[1]);
    return m;
}

// ---------------------------------------------------------------------------
// Run CSV: snapshot_index,node_id,score

inline void write_run_csv(std::ostream& out, const DirectedGraph& g, const RunResult& run)
{
    out << "snapshot_index,node_id,score\n";
    for (const Snapshot& s : run.snapshots)
        for (std::size_t i = 0; i < s.scores.size(); ++i)
            out << s.index << ',' << g.id_of(static_cast<NodeIndex>(i)) << ',' << text::fmt(s.scores[i]) << '\n';
}

/// snapshot index -> (node id -> score)
using ScoreTable = std::map<std::size_t, std::map<NodeId, double>>;

inline ScoreTable read_run_csv(std::istream& in, const std::string& source = "run csv")
{
    ScoreTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty())
            continue;
        if (line_no == 1 && body == "snapshot_index,node_id,score")
            continue;
        auto f = text::split_csv(body);
        std::optional<std::uint64_t> snap, node;
        std::optional<double> score;
        if (f.size() == 3) {
            snap = text::parse_u64(f[0]);
            node = text::parse_u64(f[1]);
            score = text::parse_double(f[2]);
        }
        if (!snap || !node || !score)
            throw ParseError(source + ": expected 'snapshot_index,node_id,score'", line_no);
        table[*snap][*node] = *score;
    }
    if (table.empty())
        throw ParseError(source + ": no snapshot rows", 0);
    return table;
}

} // namespace aggprop
