#pragma once

#include "error.hpp"
#include "text.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aggprop {

/// External account identifier. Ascending ids approximate account age.
using NodeId = std::uint64_t;

/// Dense position of a node inside a DirectedGraph, ordered by NodeId.
using NodeIndex = std::uint32_t;

/// Directed edge in dense indices. For a stored edge `source -> target`
/// (source follows target) the simulation treats `source` as the influenced
/// endpoint and `target` as the influencer.
struct Edge {
    NodeIndex source = 0;
    NodeIndex target = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct BuildStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
};

/**
 * Immutable simple directed graph.
 *
 * Nodes are stored sorted by NodeId so dense indices preserve id order.
 * Out-, in- and undirected neighbour lists are sorted by index; the undirected
 * list of a node is the union of its in- and out-neighbours and is the
 * neighbourhood N_i used by every propagation rule.
 */
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Builds a graph over `nodes` plus every edge endpoint. Self-loops and
    /// repeated edges are dropped and counted in `stats`.
    static DirectedGraph build(std::vector<NodeId> nodes,
                               const std::vector<std::pair<NodeId, NodeId>>& edges,
                               BuildStats* stats = nullptr)
    {
        DirectedGraph g;
        nodes.reserve(nodes.size() + 2 * edges.size());
        for (const auto& [u, v] : edges) {
            nodes.push_back(u);
            nodes.push_back(v);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        g.ids_ = std::move(nodes);
        g.index_.reserve(g.ids_.size());
        for (std::size_t i = 0; i < g.ids_.size(); ++i)
            g.index_.emplace(g.ids_[i], static_cast<NodeIndex>(i));

        BuildStats local;
        std::vector<Edge> dense;
        dense.reserve(edges.size());
        for (const auto& [u, v] : edges) {
            if (u == v) {
                ++local.self_loops_dropped;
                continue;
            }
            dense.push_back({g.index_.at(u), g.index_.at(v)});
        }
        std::sort(dense.begin(), dense.end());
        auto last = std::unique(dense.begin(), dense.end());
        local.duplicates_dropped = static_cast<std::size_t>(dense.end() - last);
        dense.erase(last, dense.end());
        g.edges_ = std::move(dense);
        g.build_adjacency();
        if (stats)
            *stats = local;
        return g;
    }

    std::size_t node_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    std::span<const NodeId> node_ids() const noexcept { return ids_; }
    /// Edges sorted by (source, target); the position is the canonical edge id.
    std::span<const Edge> edges() const noexcept { return edges_; }

    NodeId id_of(NodeIndex i) const { return ids_.at(i); }

    std::optional<NodeIndex> find(NodeId id) const
    {
        auto it = index_.find(id);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    bool contains(NodeId id) const { return index_.count(id) != 0; }

    NodeIndex index_of(NodeId id) const
    {
        auto it = index_.find(id);
        if (it == index_.end())
            throw ValidationError("unknown node " + std::to_string(id));
        return it->second;
    }

    std::span<const NodeIndex> out_neighbors(NodeIndex i) const { return slice(out_offsets_, out_, i); }
    std::span<const NodeIndex> in_neighbors(NodeIndex i) const { return slice(in_offsets_, in_, i); }
    /// N_i: union of in- and out-neighbours, sorted.
    std::span<const NodeIndex> neighbors(NodeIndex i) const { return slice(nb_offsets_, nb_, i); }

    /// Offset of the first undirected-neighbour slot of `i`; slot-aligned
    /// side tables (edge weights) index with `neighbor_offset(i) + k`.
    std::size_t neighbor_offset(NodeIndex i) const { return nb_offsets_.at(i); }
    std::size_t neighbor_slot_count() const noexcept { return nb_.size(); }

    std::size_t out_degree(NodeIndex i) const { return out_neighbors(i).size(); }
    std::size_t in_degree(NodeIndex i) const { return in_neighbors(i).size(); }
    std::size_t total_degree(NodeIndex i) const { return out_degree(i) + in_degree(i); }

    bool has_edge(NodeIndex u, NodeIndex v) const
    {
        auto out = out_neighbors(u);
        return std::binary_search(out.begin(), out.end(), v);
    }

private:
    static std::span<const NodeIndex> slice(const std::vector<std::size_t>& offsets,
                                            const std::vector<NodeIndex>& data, NodeIndex i)
    {
        if (static_cast<std::size_t>(i) + 1 >= offsets.size())
            throw ValidationError("node index " + std::to_string(i) + " out of range");
        return std::span<const NodeIndex>(data).subspan(offsets[i], offsets[i + 1] - offsets[i]);
    }

    void build_adjacency()
    {
        const std::size_t n = ids_.size();
        out_offsets_.assign(n + 1, 0);
        in_offsets_.assign(n + 1, 0);
        for (const Edge& e : edges_) {
            ++out_offsets_[e.source + 1];
            ++in_offsets_[e.target + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            out_offsets_[i + 1] += out_offsets_[i];
            in_offsets_[i + 1] += in_offsets_[i];
        }
        out_.resize(edges_.size());
        in_.resize(edges_.size());
        std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
        std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
        // edges_ is sorted by (source, target), so both lists come out sorted.
        for (const Edge& e : edges_) {
            out_[out_fill[e.source]++] = e.target;
            in_[in_fill[e.target]++] = e.source;
        }

        nb_offsets_.assign(n + 1, 0);
        nb_.clear();
        nb_.reserve(2 * edges_.size());
        for (std::size_t i = 0; i < n; ++i) {
            auto out = out_neighbors(static_cast<NodeIndex>(i));
            auto in = in_neighbors(static_cast<NodeIndex>(i));
            std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(nb_));
            nb_offsets_[i + 1] = nb_.size();
        }
        nb_.shrink_to_fit();
    }

    std::vector<NodeId> ids_;
    std::unordered_map<NodeId, NodeIndex> index_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_{0}, in_offsets_{0}, nb_offsets_{0};
    std::vector<NodeIndex> out_, in_, nb_;
};

struct EdgeListReport {
    std::size_t lines_read = 0;
    BuildStats dropped;
};

/// Reads "u v" or "u,v" pairs, one per line. Blank lines and lines starting
/// with '#' are ignored.
inline DirectedGraph load_edge_list(std::istream& in, EdgeListReport* report = nullptr)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        auto fields = text::split_fields(body);
        if (fields.size() != 2)
            throw ParseError("expected two node ids, got '" + std::string(body) + "'", line_no);
        auto u = text::parse_u64(fields[0]);
        auto v = text::parse_u64(fields[1]);
        if (!u || !v)
            throw ParseError("node ids must be non-negative integers: '" + std::string(body) + "'", line_no);
        edges.emplace_back(*u, *v);
    }
    if (in.bad())
        throw IoError("failed reading edge list");
    if (edges.empty())
        throw ValidationError("edge list is empty");
    EdgeListReport local;
    local.lines_read = line_no;
    DirectedGraph g = DirectedGraph::build({}, edges, &local.dropped);
    if (report)
        *report = local;
    return g;
}

/// N_i as external ids.
inline std::vector<NodeId> neighbors(const DirectedGraph& g, NodeId id)
{
    std::vector<NodeId> out;
    for (NodeIndex j : g.neighbors(g.index_of(id)))
        out.push_back(g.id_of(j));
    return out;
}

/// |N_i ∩ N_j| / |N_i ∪ N_j|, zero when both neighbourhoods are empty.
inline double jaccard_weight(const DirectedGraph& g, NodeIndex i, NodeIndex j)
{
    auto a = g.neighbors(i);
    auto b = g.neighbors(j);
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const std::size_t unite = a.size() + b.size() - common;
    return unite == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unite);
}

inline double jaccard_weight_by_id(const DirectedGraph& g, NodeId i, NodeId j)
{
    return jaccard_weight(g, g.index_of(i), g.index_of(j));
}

/// In-degree over out-degree, clamped to 1. A node with no out-edges scores 1
/// when it has followers and 0 when isolated.
inline double power_score(const DirectedGraph& g, NodeIndex i)
{
    const auto in = g.in_degree(i);
    const auto out = g.out_degree(i);
    if (out == 0)
        return in > 0 ? 1.0 : 0.0;
    return std::min(1.0, static_cast<double>(in) / static_cast<double>(out));
}

inline double power_score_by_id(const DirectedGraph& g, NodeId i) { return power_score(g, g.index_of(i)); }

/// Vertex-induced subgraph on the given dense indices (duplicates ignored).
inline DirectedGraph induced_subgraph(const DirectedGraph& g, std::span<const NodeIndex> keep)
{
    std::vector<char> member(g.node_count(), 0);
    std::vector<NodeId> nodes;
    for (NodeIndex i : keep) {
        if (!member.at(i)) {
            member[i] = 1;
            nodes.push_back(g.id_of(i));
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const Edge& e : g.edges())
        if (member[e.source] && member[e.target])
            edges.emplace_back(g.id_of(e.source), g.id_of(e.target));
    return DirectedGraph::build(std::move(nodes), edges);
}

/// Component id per node (iterative Tarjan). Ids are assigned in completion order.
inline std::vector<std::uint32_t> strongly_connected_components(const DirectedGraph& g)
{
    constexpr std::uint32_t unvisited = UINT32_MAX;
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> order(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<NodeIndex> stack;
    struct Frame {
        NodeIndex node;
        std::size_t next;
    };
    std::vector<Frame> call;
    std::uint32_t counter = 0;
    std::uint32_t components = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (order[root] != unvisited)
            continue;
        call.push_back({static_cast<NodeIndex>(root), 0});
        order[root] = low[root] = counter++;
        stack.push_back(static_cast<NodeIndex>(root));
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            auto out = g.out_neighbors(f.node);
            if (f.next < out.size()) {
                NodeIndex w = out[f.next++];
                if (order[w] == unvisited) {
                    order[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], order[w]);
                }
                continue;
            }
            const NodeIndex v = f.node;
            call.pop_back();
            if (!call.empty())
                low[call.back().node] = std::min(low[call.back().node], low[v]);
            if (low[v] == order[v]) {
                NodeIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = components;
                } while (w != v);
                ++components;
            }
        }
    }
    return comp;
}

/// Subgraph induced by the largest SCC. Ties go to the component holding the
/// smallest NodeId.
inline DirectedGraph largest_scc(const DirectedGraph& g)
{
    if (g.empty())
        throw ValidationError("largest_scc requires a non-empty graph");
    auto comp = strongly_connected_components(g);
    std::uint32_t count = 0;
    for (auto c : comp)
        count = std::max(count, c + 1);
    std::vector<std::size_t> size(count, 0);
    std::vector<NodeIndex> first(count, UINT32_MAX);
    for (std::size_t i = 0; i < comp.size(); ++i) {
        ++size[comp[i]];
        first[comp[i]] = std::min(first[comp[i]], static_cast<NodeIndex>(i));
    }
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < count; ++c)
        if (size[c] > size[best] || (size[c] == size[best] && first[c] < first[best]))
            best = c;
    std::vector<NodeIndex> keep;
    keep.reserve(size[best]);
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (comp[i] == best)
            keep.push_back(static_cast<NodeIndex>(i));
    return induced_subgraph(g, keep);
}

} // namespace aggprop
