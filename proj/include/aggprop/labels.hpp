#pragma once

#include "error.hpp"
#include "graph.hpp"
#include "text.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aggprop {

enum class Label : std::uint8_t { normal = 0, aggressive = 1 };

inline std::string_view to_string(Label l) { return l == Label::aggressive ? "aggressive" : "normal"; }

/// Labels keyed by external id. Ordered so that iteration is deterministic.
using LabelMap = std::map<NodeId, Label>;

/// Per-node aggression state. `initial_score` is S_i^0 and is never touched
/// once seeded.
struct NodeState {
    double score = 0.0;
    double initial_score = 0.0;
    std::optional<Label> label;
};

/// Parses "node,label" lines. The label token is case-insensitive; a header
/// line (first line whose node field is not an integer) is skipped.
inline LabelMap load_labels(std::istream& in)
{
    LabelMap labels;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        auto fields = text::split_fields(body);
        if (fields.size() != 2)
            throw ParseError("expected 'node,label', got '" + std::string(body) + "'", line_no);
        auto node = text::parse_u64(fields[0]);
        if (!node) {
            if (!seen_data) {
                seen_data = true;
                continue;
            }
            throw ParseError("node id must be a non-negative integer: '" + std::string(fields[0]) + "'", line_no);
        }
        seen_data = true;
        const auto token = text::lower(fields[1]);
        Label label;
        if (token == "aggressive")
            label = Label::aggressive;
        else if (token == "normal")
            label = Label::normal;
        else
            throw ParseError("unknown label '" + std::string(fields[1]) + "' (expected aggressive or normal)",
                             line_no);
        auto [it, inserted] = labels.emplace(*node, label);
        if (!inserted && it->second != label)
            throw ParseError("conflicting labels for node " + std::to_string(*node), line_no);
    }
    if (in.bad())
        throw IoError("failed reading label file");
    return labels;
}

/// Dense labels for every node of `g`; nodes missing from `labels` are normal.
/// Entries for nodes outside the graph are ignored.
inline std::vector<Label> complete_labels(const DirectedGraph& g, const LabelMap& labels)
{
    std::vector<Label> out(g.node_count(), Label::normal);
    for (const auto& [id, label] : labels)
        if (auto i = g.find(id))
            out[*i] = label;
    return out;
}

/// Dense labels that must cover every node of `g`.
inline std::vector<Label> require_labels(const DirectedGraph& g, const LabelMap& labels)
{
    std::vector<Label> out(g.node_count(), Label::normal);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const NodeId id = g.id_of(static_cast<NodeIndex>(i));
        auto it = labels.find(id);
        if (it == labels.end())
            throw ValidationError("no label for node " + std::to_string(id));
        out[i] = it->second;
    }
    return out;
}

inline std::vector<NodeState> seed_states(std::span<const Label> labels)
{
    std::vector<NodeState> states(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double s = labels[i] == Label::aggressive ? 1.0 : 0.0;
        states[i] = {s, s, labels[i]};
    }
    return states;
}

/// Aggressive nodes start at 1, everyone else at 0.
inline std::vector<NodeState> seed_states(const DirectedGraph& g, const LabelMap& labels)
{
    auto dense = complete_labels(g, labels);
    return seed_states(dense);
}

} // namespace aggprop
