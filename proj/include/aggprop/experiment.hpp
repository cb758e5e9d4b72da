#pragma once

#include "engine.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "labels.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "rng.hpp"
#include "text.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace aggprop {

namespace fs = std::filesystem;

inline std::vector<double> default_thresholds() { return {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

struct ExperimentConfig {
    std::string edges_path;
    std::string labels_path;
    std::optional<std::string> truth_vector_path;
    std::vector<std::string> models;
    std::vector<OrderingKind> orderings{OrderingKind::random};
    double fraction = 0.1;
    std::optional<std::size_t> interactions; // overrides fraction when set
    std::size_t snapshot_count = 10;
    std::vector<double> thresholds = default_thresholds();
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool scc_only = false;
    std::size_t repeats = 1;
    std::size_t jobs = 1;
};

/// Expands "all" and checks every name against the catalog.
inline std::vector<std::string> resolve_models(const std::vector<std::string>& requested)
{
    std::vector<std::string> out;
    for (const auto& name : requested) {
        if (name == "all") {
            for (const auto& m : model_catalog())
                out.push_back(m.name);
            continue;
        }
        out.push_back(find_model(name).name);
    }
    std::vector<std::string> unique;
    for (auto& n : out)
        if (std::find(unique.begin(), unique.end(), n) == unique.end())
            unique.push_back(n);
    return unique;
}

inline void validate(const ExperimentConfig& c)
{
    if (c.models.empty())
        throw ValidationError("no model given; valid names: " + catalog_names());
    for (const auto& m : c.models)
        find_model(m);
    if (c.orderings.empty())
        throw ValidationError("no ordering given");
    if (!(c.fraction > 0.0 && c.fraction <= 1.0))
        throw ValidationError("--fraction must be in (0, 1], got " + text::fmt(c.fraction));
    if (c.interactions && *c.interactions == 0)
        throw ValidationError("--interactions must be positive");
    if (c.snapshot_count == 0)
        throw ValidationError("--snapshots must be at least 1");
    if (c.thresholds.empty())
        throw ValidationError("at least one --ta threshold is required");
    for (std::size_t k = 0; k < c.thresholds.size(); ++k) {
        const double t = c.thresholds[k];
        if (!(t > 0.0 && t < 1.0))
            throw ValidationError("thresholds must lie in (0, 1), got " + text::fmt(t));
        if (k > 0 && !(t > c.thresholds[k - 1]))
            throw ValidationError("thresholds must be strictly increasing");
    }
    if (c.repeats == 0)
        throw ValidationError("--repeats must be at least 1");
    if (c.jobs == 0)
        throw ValidationError("--jobs must be at least 1");
}

/// Per-run seed: stable hash of (master seed, model, ordering, repeat).
inline std::uint64_t derive_run_seed(std::uint64_t master, std::string_view model, OrderingKind ordering,
                                     std::size_t repeat)
{
    std::uint64_t h = rng::splitmix64(master);
    h = rng::fnv1a(model, h);
    h = rng::fnv1a("/", h);
    h = rng::fnv1a(to_string(ordering), h);
    h = rng::fnv1a("/" + std::to_string(repeat), h);
    return rng::splitmix64(h);
}

inline std::string run_id(std::string_view model, OrderingKind ordering, std::size_t repeat, std::size_t repeats)
{
    std::string id = std::string(model) + "__" + std::string(to_string(ordering));
    if (repeats > 1)
        id += "__r" + std::to_string(repeat);
    return id;
}

inline std::string metrics_file_name(double t_a) { return "metrics_ta" + text::fmt(t_a) + ".csv"; }

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << content;
    if (!out)
        throw IoError("failed writing " + path.string());
}

/// Graph (optionally reduced to its largest SCC) with seeded labels.
struct Dataset {
    DirectedGraph graph;
    std::vector<Label> labels;
    EdgeListReport load_report;
    std::uint64_t input_digest = 0;
};

inline DirectedGraph load_graph(const std::string& edges_path, bool scc_only, EdgeListReport* report = nullptr,
                                std::uint64_t* digest = nullptr)
{
    const std::string raw = read_file(edges_path);
    if (digest)
        *digest = rng::fnv1a(raw, *digest);
    std::istringstream in(raw);
    DirectedGraph g = load_edge_list(in, report);
    return scc_only ? largest_scc(g) : g;
}

inline LabelMap load_labels_file(const std::string& path, std::uint64_t* digest = nullptr)
{
    const std::string raw = read_file(path);
    if (digest)
        *digest = rng::fnv1a(raw, *digest);
    std::istringstream in(raw);
    try {
        return load_labels(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

inline Dataset load_dataset(const ExperimentConfig& c)
{
    Dataset d;
    d.input_digest = rng::fnv1a(c.scc_only ? "scc" : "full");
    d.graph = load_graph(c.edges_path, c.scc_only, &d.load_report, &d.input_digest);
    d.labels = complete_labels(d.graph, load_labels_file(c.labels_path, &d.input_digest));
    return d;
}

struct RunPlan {
    std::string model;
    OrderingKind ordering = OrderingKind::random;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    std::string id;
    std::string config_hash;
};

/// Canonical description of one run; its hash identifies the run's outputs.
inline std::string canonical_run_config(const ExperimentConfig& c, const Dataset& d, const RunPlan& p)
{
    std::ostringstream s;
    s << "inputs=" << hex64(d.input_digest) << ";model=" << p.model << ";ordering=" << to_string(p.ordering)
      << ";fraction=" << text::fmt(c.fraction) << ";interactions=" << (c.interactions ? *c.interactions : 0)
      << ";snapshots=" << c.snapshot_count << ";seed=" << p.seed << ";thresholds=";
    for (double t : c.thresholds)
        s << text::fmt(t) << ' ';
    return s.str();
}

inline std::vector<RunPlan> plan_runs(const ExperimentConfig& c, const Dataset& d)
{
    std::vector<RunPlan> plans;
    for (const auto& model : c.models)
        for (OrderingKind o : c.orderings)
            for (std::size_t r = 0; r < c.repeats; ++r) {
                RunPlan p{model, o, r, derive_run_seed(c.seed, model, o, r), run_id(model, o, r, c.repeats), {}};
                p.config_hash = hex64(rng::fnv1a(canonical_run_config(c, d, p)));
                plans.push_back(std::move(p));
            }
    return plans;
}

struct ManifestEntry {
    RunPlan plan;
    std::vector<std::string> outputs; // relative to the output directory
    double duration_ms = 0.0;
    std::size_t interactions = 0;
    std::size_t effective_interactions = 0;
    bool ok = false;
    std::string error;
};

struct SweepManifest {
    std::vector<ManifestEntry> runs;
    std::size_t failures() const
    {
        return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](auto& r) { return !r.ok; }));
    }
};

inline nlohmann::json config_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["edges"] = c.edges_path;
    j["labels"] = c.labels_path;
    j["models"] = c.models;
    std::vector<std::string> orders;
    for (auto o : c.orderings)
        orders.emplace_back(to_string(o));
    j["orderings"] = orders;
    j["fraction"] = c.fraction;
    j["interactions"] = c.interactions ? nlohmann::json(*c.interactions) : nlohmann::json(nullptr);
    j["snapshots"] = c.snapshot_count;
    j["thresholds"] = c.thresholds;
    j["seed"] = c.seed;
    j["scc_only"] = c.scc_only;
    j["repeats"] = c.repeats;
    return j;
}

inline nlohmann::json entry_json(const ManifestEntry& e)
{
    nlohmann::json j;
    j["run_id"] = e.plan.id;
    j["config_hash"] = e.plan.config_hash;
    j["model"] = e.plan.model;
    j["ordering"] = std::string(to_string(e.plan.ordering));
    j["repeat"] = e.plan.repeat;
    j["seed"] = e.plan.seed;
    j["outputs"] = e.outputs;
    j["interactions"] = e.interactions;
    j["effective_interactions"] = e.effective_interactions;
    j["duration_ms"] = e.duration_ms;
    j["status"] = e.ok ? "ok" : "failed";
    if (!e.ok)
        j["error"] = e.error;
    return j;
}

/// Simulates one planned run and writes its scores, one metric CSV per
/// threshold and a run.json sidecar under out_dir/<run id>/.
inline ManifestEntry execute_run(const ExperimentConfig& c, const Dataset& d, const PropagationTables& tables,
                                 const RunPlan& plan)
{
    ManifestEntry e;
    e.plan = plan;
    const auto start = std::chrono::steady_clock::now();
    try {
        const ModelSpec& spec = find_model(plan.model);
        Schedule schedule = c.interactions
                                ? make_schedule_count(d.graph, *c.interactions, plan.ordering, plan.seed)
                                : make_schedule(d.graph, c.fraction, plan.ordering, plan.seed);
        RunResult run = run_simulation(d.graph, seed_states(d.labels), spec, schedule.edges, c.snapshot_count, &tables);
        e.interactions = schedule.edges.size();
        e.effective_interactions = run.effective_interactions;

        const fs::path root(c.out_dir);
        const std::string dir = plan.id + "/";
        std::ostringstream scores;
        write_run_csv(scores, d.graph, run);
        write_file(root / (dir + "scores.csv"), scores.str());
        e.outputs.push_back(dir + "scores.csv");
        for (double t : c.thresholds) {
            const auto mvs = snapshot_metrics(d.graph, run.snapshots, t);
            std::ostringstream csv;
            write_metric_csv(csv, mvs);
            const std::string name = dir + metrics_file_name(t);
            write_file(root / name, csv.str());
            e.outputs.push_back(name);
        }
        nlohmann::json side = config_json(c);
        side["models"] = {plan.model};
        side["orderings"] = {std::string(to_string(plan.ordering))};
        side["run_id"] = plan.id;
        side["run_seed"] = plan.seed;
        side["master_seed"] = c.seed;
        side["config_hash"] = plan.config_hash;
        side["nodes"] = d.graph.node_count();
        side["edges_in_graph"] = d.graph.edge_count();
        side["interactions"] = e.interactions;
        side["effective_interactions"] = e.effective_interactions;
        write_file(root / (dir + "run.json"), side.dump(2) + "\n");
        e.outputs.push_back(dir + "run.json");
        e.ok = true;
    } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
    }
    e.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return e;
}

inline void write_manifest(const ExperimentConfig& c, const SweepManifest& m)
{
    nlohmann::json j;
    j["config"] = config_json(c);
    j["runs"] = nlohmann::json::array();
    for (const auto& e : m.runs)
        j["runs"].push_back(entry_json(e));
    j["failures"] = m.failures();
    write_file(fs::path(c.out_dir) / "manifest.json", j.dump(2) + "\n");
}

/// Runs the full (model x ordering x repeat) cross-product. Thresholds are
/// applied to each run's stored snapshots, so they add files, not runs.
inline SweepManifest run_sweep(const ExperimentConfig& c)
{
    validate(c);
    const Dataset d = load_dataset(c);
    bool need_weights = false;
    for (const auto& m : c.models)
        need_weights = need_weights || uses_weight(find_model(m));
    const PropagationTables tables = PropagationTables::build(d.graph, need_weights);

    const auto plans = plan_runs(c, d);
    SweepManifest manifest;
    manifest.runs.resize(plans.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < plans.size(); k = next++)
            manifest.runs[k] = execute_run(c, d, tables, plans[k]);
    };
    const std::size_t workers = std::min(c.jobs, std::max<std::size_t>(plans.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    write_manifest(c, manifest);
    return manifest;
}

} // namespace aggprop
