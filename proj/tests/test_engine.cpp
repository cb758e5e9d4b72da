#include <aggprop/engine.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <sstream>

using namespace aggprop;
using testing_support::parse_graph;

namespace {

Edge edge(const DirectedGraph& g, NodeId u, NodeId v)
{
    return {g.index_of(u), g.index_of(v)};
}

std::vector<std::pair<NodeId, NodeId>> as_ids(const DirectedGraph& g, const std::vector<Edge>& edges)
{
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const auto& e : edges)
        out.emplace_back(g.id_of(e.source), g.id_of(e.target));
    return out;
}

std::vector<NodeState> seeded(const DirectedGraph& g, std::initializer_list<NodeId> aggressive)
{
    LabelMap m;
    for (NodeId id : aggressive)
        m[id] = Label::aggressive;
    return seed_states(g, m);
}

bool same_bytes(const RunResult& a, const RunResult& b)
{
    if (a.snapshots.size() != b.snapshots.size() || a.effective_interactions != b.effective_interactions)
        return false;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const auto& x = a.snapshots[k].scores;
        const auto& y = b.snapshots[k].scores;
        if (a.snapshots[k].interactions_done != b.snapshots[k].interactions_done || x.size() != y.size() ||
            std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

} // namespace

TEST(Ordering, NamesRoundTrip)
{
    for (auto k : all_orderings)
        EXPECT_EQ(parse_ordering(to_string(k)), k);
    EXPECT_THROW(parse_ordering("popular"), ValidationError);
}

TEST(Selection, SampleSizeRounds)
{
    EXPECT_EQ(sample_size(1685163, 0.1), 168516u);
    EXPECT_EQ(sample_size(395, 0.1), 40u);
    EXPECT_EQ(sample_size(3, 0.01), 1u);
    EXPECT_THROW(sample_size(10, 0.0), ValidationError);
    EXPECT_THROW(sample_size(10, 1.5), ValidationError);
}

TEST(Selection, FullFractionTakesEveryEdge)
{
    std::mt19937_64 rng(41);
    auto g = testing_support::random_graph(rng, 30, 0.2);
    auto s = select_edges(g, 1.0, 7);
    EXPECT_TRUE(std::equal(s.begin(), s.end(), g.edges().begin(), g.edges().end()));
}

TEST(Selection, SameSeedSameSample)
{
    std::mt19937_64 rng(42);
    auto g = testing_support::random_graph(rng, 60, 0.1);
    EXPECT_EQ(select_edges(g, 0.1, 99), select_edges(g, 0.1, 99));
    EXPECT_NE(select_edges(g, 0.1, 99), select_edges(g, 0.1, 100));
}

TEST(Selection, DistinctEdgesFromGraph)
{
    std::mt19937_64 rng(43);
    auto g = testing_support::random_graph(rng, 60, 0.1);
    auto s = select_edges(g, 0.25, 3);
    EXPECT_EQ(s.size(), sample_size(g.edge_count(), 0.25));
    EXPECT_TRUE(std::adjacent_find(s.begin(), s.end()) == s.end());
    for (const auto& e : s)
        EXPECT_TRUE(g.has_edge(e.source, e.target));
}

TEST(Selection, EdgelessGraphIsAnError)
{
    auto g = DirectedGraph::build({1, 2}, {});
    EXPECT_THROW(select_edges(g, 0.5, 1), ValidationError);
}

TEST(Ordering, NetworkIdSortsByInfluencedThenInfluencer)
{
    auto g = parse_graph("5 1\n2 9\n2 3");
    std::vector<Edge> in{edge(g, 5, 1), edge(g, 2, 9), edge(g, 2, 3)};
    auto out = order_edges(in, OrderingKind::network_id, g, 0);
    EXPECT_EQ(as_ids(g, out), (std::vector<std::pair<NodeId, NodeId>>{{2, 3}, {2, 9}, {5, 1}}));
}

TEST(Ordering, MostPopularPutsHighDegreeInfluencerFirst)
{
    // node 9: degree 10, node 3: degree 1
    auto g = parse_graph("2 9\n2 3\n9 20\n9 21\n9 22\n9 23\n24 9\n25 9\n26 9\n27 9\n28 9");
    ASSERT_EQ(g.total_degree(g.index_of(9)), 10u);
    ASSERT_EQ(g.total_degree(g.index_of(3)), 1u);
    std::vector<Edge> in{edge(g, 2, 3), edge(g, 2, 9)};
    auto most = as_ids(g, order_edges(in, OrderingKind::most_popular, g, 0));
    EXPECT_EQ(most.front(), (std::pair<NodeId, NodeId>{2, 9}));
    auto least = as_ids(g, order_edges(in, OrderingKind::least_popular, g, 0));
    EXPECT_EQ(least.front(), (std::pair<NodeId, NodeId>{2, 3}));
}

TEST(Ordering, NeighborhoodStartsAtHub)
{
    // hub 1 is discovered first, so its outgoing edges lead
    auto g = parse_graph("1 2\n1 3\n1 4\n4 5\n5 6\n6 5");
    std::vector<Edge> all(g.edges().begin(), g.edges().end());
    auto out = as_ids(g, order_edges(all, OrderingKind::neighborhood, g, 0));
    EXPECT_EQ(out.front().first, 1u);
    EXPECT_EQ(out.back().first, 6u);
}

TEST(Ordering, EveryKindIsAPermutation)
{
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = testing_support::random_graph(rng, 50, 0.08);
        if (g.edge_count() == 0)
            continue;
        auto sample = select_edges(g, 0.5, static_cast<std::uint64_t>(trial));
        for (auto k : all_orderings) {
            auto ordered = order_edges(sample, k, g, 5);
            std::sort(ordered.begin(), ordered.end());
            EXPECT_EQ(ordered, sample) << to_string(k);
        }
    }
}

TEST(Ordering, RandomIsSeededAndDeterministic)
{
    std::mt19937_64 rng(45);
    auto g = testing_support::random_graph(rng, 80, 0.1);
    auto sample = select_edges(g, 0.5, 1);
    EXPECT_EQ(order_edges(sample, OrderingKind::random, g, 11), order_edges(sample, OrderingKind::random, g, 11));
    EXPECT_NE(order_edges(sample, OrderingKind::random, g, 11), order_edges(sample, OrderingKind::random, g, 12));
}

TEST(SnapshotPoints, EvenlySpacedAndEndOnLength)
{
    EXPECT_EQ(snapshot_points(100, 10), (std::vector<std::size_t>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100}));
    EXPECT_EQ(snapshot_points(7, 3), (std::vector<std::size_t>{2, 4, 7}));
    EXPECT_EQ(snapshot_points(2, 4), (std::vector<std::size_t>{0, 1, 1, 2}));
    EXPECT_THROW(snapshot_points(5, 0), ValidationError);
}

TEST(Simulation, EmptyScheduleRepeatsInitialState)
{
    auto g = parse_graph("1 2\n2 1");
    auto r = run_simulation(g, seeded(g, {1}), find_model("Deffuant_P"), std::span<const Edge>{}, 10);
    ASSERT_EQ(r.snapshots.size(), 11u);
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        EXPECT_EQ(r.snapshots[k].index, k);
        EXPECT_EQ(r.snapshots[k].scores, r.snapshots[0].scores);
    }
}

TEST(Simulation, VoterCopiesInfluencer)
{
    auto g = parse_graph("1 2");
    std::vector<Edge> sched{edge(g, 1, 2)};
    auto r = run_simulation(g, seeded(g, {2}), find_model("Voter"), sched, 1);
    EXPECT_EQ(r.snapshots.back().scores[g.index_of(1)], 1.0);
}

TEST(Simulation, UpdatesAreVisibleToLaterSteps)
{
    auto g = parse_graph("1 2\n3 1");
    std::vector<Edge> sched{edge(g, 1, 2), edge(g, 3, 1)};
    auto r = run_simulation(g, seeded(g, {2}), find_model("Voter"), sched, 2);
    const auto& last = r.snapshots.back().scores;
    EXPECT_EQ(last[g.index_of(1)], 1.0);
    EXPECT_EQ(last[g.index_of(3)], 1.0);
    EXPECT_EQ(r.snapshots[1].scores[g.index_of(3)], 0.0);
}

TEST(Simulation, RejectsForeignEdgesAndBadStateSize)
{
    auto g = parse_graph("1 2\n2 3");
    std::vector<Edge> reversed{edge(g, 2, 1)};
    EXPECT_THROW(run_simulation(g, seeded(g, {}), find_model("Voter"), reversed), ValidationError);
    std::vector<NodeState> short_states(1);
    EXPECT_THROW(run_simulation(g, short_states, find_model("Voter"), std::span<const Edge>{}), ValidationError);
}

TEST(Simulation, SnapshotShapeAndCounts)
{
    std::mt19937_64 rng(46);
    auto g = testing_support::random_graph(rng, 100, 0.05);
    auto sched = make_schedule(g, 0.3, OrderingKind::random, 9);
    auto r = run_simulation(g, seeded(g, {}), find_model("DeGroot"), sched, 10);
    ASSERT_EQ(r.snapshots.size(), 11u);
    EXPECT_EQ(r.snapshots.front().interactions_done, 0u);
    EXPECT_EQ(r.snapshots.back().interactions_done, sched.edges.size());
    for (std::size_t k = 1; k < r.snapshots.size(); ++k)
        EXPECT_GT(r.snapshots[k].interactions_done, r.snapshots[k - 1].interactions_done);
}

TEST(Simulation, DeterministicAcrossCalls)
{
    std::mt19937_64 rng(47);
    auto g = testing_support::random_graph(rng, 120, 0.04);
    auto labels = testing_support::random_labels(rng, g.node_count(), 0.2);
    for (const auto& m : model_catalog()) {
        auto s1 = make_schedule(g, 0.5, OrderingKind::random, 3);
        auto s2 = make_schedule(g, 0.5, OrderingKind::random, 3);
        auto a = run_simulation(g, seed_states(labels), m, s1);
        auto b = run_simulation(g, seed_states(labels), m, s2);
        EXPECT_TRUE(same_bytes(a, b)) << m.name;
    }
}

TEST(Simulation, SharedTablesGiveSameResult)
{
    std::mt19937_64 rng(48);
    auto g = testing_support::random_graph(rng, 80, 0.06);
    auto labels = testing_support::random_labels(rng, g.node_count(), 0.3);
    auto tables = PropagationTables::build(g, true);
    auto sched = make_schedule(g, 0.4, OrderingKind::most_popular, 4);
    for (const auto& m : model_catalog())
        EXPECT_TRUE(same_bytes(run_simulation(g, seed_states(labels), m, sched, 10, &tables),
                               run_simulation(g, seed_states(labels), m, sched, 10)))
            << m.name;
}

TEST(Simulation, PlainVoterStaysBinary)
{
    std::mt19937_64 rng(49);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = testing_support::random_graph(rng, 60, 0.08);
        if (g.edge_count() == 0)
            continue;
        auto labels = testing_support::random_labels(rng, g.node_count(), 0.3);
        auto sched = make_schedule(g, 1.0, all_orderings[trial % 5], static_cast<std::uint64_t>(trial));
        auto r = run_simulation(g, seed_states(labels), find_model("Voter"), sched);
        for (const auto& s : r.snapshots)
            for (double x : s.scores)
                ASSERT_TRUE(x == 0.0 || x == 1.0);
    }
}

TEST(Simulation, ObserverSeesEveryStep)
{
    auto g = parse_graph("1 2\n2 3\n3 1");
    std::vector<Edge> sched(g.edges().begin(), g.edges().end());
    std::size_t calls = 0;
    run_simulation(g, seeded(g, {1}), find_model("Deffuant_P"), sched, 10, nullptr,
                   [&calls](std::size_t, NodeIndex, double) { ++calls; });
    EXPECT_EQ(calls, 3u);
}

TEST(Simulation, MatchesHandRolledTrace)
{
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<NodeId> ids;
        auto g = testing_support::random_graph(rng, 7, 0.4, &ids);
        if (g.edge_count() == 0)
            continue;
        auto labels = testing_support::random_labels(rng, g.node_count(), 0.4);
        testing_support::EdgePairs pairs;
        for (const auto& e : g.edges())
            pairs.emplace_back(g.id_of(e.source), g.id_of(e.target));
        testing_support::OracleSimulator oracle({g.node_ids().begin(), g.node_ids().end()}, pairs);
        std::map<NodeId, double> init;
        for (std::size_t i = 0; i < labels.size(); ++i)
            init[g.id_of(static_cast<NodeIndex>(i))] = labels[i] == Label::aggressive ? 1.0 : 0.0;
        auto sched = make_schedule(g, 1.0, OrderingKind::random, static_cast<std::uint64_t>(trial));
        const auto sched_ids = as_ids(g, sched.edges);
        for (const auto& m : model_catalog()) {
            auto r = run_simulation(g, seed_states(labels), m, sched, 5);
            auto expected = oracle.run(m.name, init, sched_ids, 5);
            ASSERT_EQ(expected.size(), r.snapshots.size());
            for (std::size_t k = 0; k < expected.size(); ++k)
                for (std::size_t i = 0; i < g.node_count(); ++i)
                    ASSERT_NEAR(r.snapshots[k].scores[i], expected[k].at(g.id_of(static_cast<NodeIndex>(i))), 1e-12)
                        << m.name << " snapshot " << k;
        }
    }
}

TEST(ClassMeans, SeedStateMeans)
{
    std::vector<double> s{1.0, 1.0, 0.0, 0.0, 0.0};
    std::vector<Label> l{Label::aggressive, Label::aggressive, Label::normal, Label::normal, Label::normal};
    auto m = mean_scores_by_class(s, l);
    EXPECT_EQ(*m.aggressive, 1.0);
    EXPECT_EQ(*m.normal, 0.0);
    EXPECT_DOUBLE_EQ(*m.all, 0.4);
}

TEST(ClassMeans, MissingClassIsAbsent)
{
    std::vector<double> s{0.4};
    std::vector<Label> l{Label::aggressive};
    auto m = mean_scores_by_class(s, l);
    EXPECT_DOUBLE_EQ(*m.aggressive, 0.4);
    EXPECT_FALSE(m.normal.has_value());
    EXPECT_DOUBLE_EQ(*m.all, 0.4);
}

TEST(ClassMeans, MixedScores)
{
    std::vector<double> s{1.0, 0.0, 0.5};
    std::vector<Label> l{Label::aggressive, Label::aggressive, Label::normal};
    auto m = mean_scores_by_class(s, l);
    EXPECT_DOUBLE_EQ(*m.aggressive, 0.5);
    EXPECT_DOUBLE_EQ(*m.normal, 0.5);
    EXPECT_DOUBLE_EQ(*m.all, 0.5);
}

TEST(RunCsv, RoundTrips)
{
    std::mt19937_64 rng(51);
    auto g = testing_support::random_graph(rng, 20, 0.2);
    auto labels = testing_support::random_labels(rng, g.node_count(), 0.3);
    auto r = run_simulation(g, seed_states(labels), find_model("DeGroot_W"), make_schedule(g, 0.5, OrderingKind::random, 2), 4);
    std::ostringstream out;
    write_run_csv(out, g, r);
    std::istringstream in(out.str());
    auto table = read_run_csv(in);
    ASSERT_EQ(table.size(), 5u);
    for (const auto& snap : r.snapshots)
        for (std::size_t i = 0; i < snap.scores.size(); ++i)
            EXPECT_NEAR(table.at(snap.index).at(g.id_of(static_cast<NodeIndex>(i))), snap.scores[i], 5e-6);
}

TEST(RunCsv, MalformedRowNamesSourceAndLine)
{
    std::istringstream in("snapshot_index,node_id,score\n0,1,0.5\n0,x,0.1\n");
    try {
        read_run_csv(in, "scores.csv");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("scores.csv"), std::string::npos);
    }
}
