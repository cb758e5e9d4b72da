#pragma once

#include "engine.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "experiment.hpp"
#include "features.hpp"
#include "metrics.hpp"
#include "similarity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace aggprop::cli {

namespace fs = std::filesystem;

enum ExitCode : int { ok = 0, validation_failure = 1, runtime_failure = 2 };

/// Comma-separated thresholds. Empty input is rejected.
inline std::vector<double> parse_thresholds(const std::string& s)
{
    std::vector<double> out;
    for (auto field : text::split_csv(s)) {
        if (field.empty())
            continue;
        auto v = text::parse_double(field);
        if (!v)
            throw ValidationError("invalid threshold '" + std::string(field) + "'");
        out.push_back(*v);
    }
    if (out.empty())
        throw ValidationError("at least one --ta threshold is required");
    return out;
}

inline std::string default_thresholds_text()
{
    std::string s;
    for (double t : default_thresholds())
        s += (s.empty() ? "" : ",") + text::fmt(t);
    return s;
}

struct RunOptions {
    std::string edges, labels;
    std::vector<std::string> models;
    std::vector<std::string> orders{"random"};
    double fraction = 0.1;
    std::size_t interactions = 0;
    std::size_t snapshots = 10;
    std::string ta = default_thresholds_text();
    std::uint64_t seed = 0;
    std::string out = "out";
    bool scc_only = false;
    std::size_t repeats = 1;
    std::size_t jobs = 1;
};

inline ExperimentConfig to_config(const RunOptions& o)
{
    ExperimentConfig c;
    c.edges_path = o.edges;
    c.labels_path = o.labels;
    c.models = o.models;
    c.orderings.clear();
    for (const auto& s : o.orders) {
        if (s == "all") {
            c.orderings.assign(all_orderings.begin(), all_orderings.end());
            break;
        }
        c.orderings.push_back(parse_ordering(s));
    }
    c.fraction = o.fraction;
    if (o.interactions > 0)
        c.interactions = o.interactions;
    c.snapshot_count = o.snapshots;
    c.thresholds = parse_thresholds(o.ta);
    c.seed = o.seed;
    c.out_dir = o.out;
    c.scc_only = o.scc_only;
    c.repeats = o.repeats;
    c.jobs = o.jobs;
    return c;
}

inline void add_run_options(CLI::App* cmd, RunOptions& o, bool many)
{
    cmd->add_option("--edges", o.edges, "Edge list file (\"u v\" or \"u,v\" per line)")->required();
    cmd->add_option("--labels", o.labels, "Initial labels, \"node,label\" CSV")->required();
    if (many) {
        cmd->add_option("--model", o.models, "Model names or \"all\"")->required()->delimiter(',');
        cmd->add_option("--order", o.orders, "Orderings or \"all\"")->delimiter(',');
        cmd->add_option("--repeats", o.repeats, "Runs per (model, ordering)");
        cmd->add_option("--jobs", o.jobs, "Concurrent runs");
    } else {
        cmd->add_option("--model", o.models, "Model name")->required()->expected(1);
        cmd->add_option("--order", o.orders,
                        "random | most-popular | least-popular | neighborhood | network-id")
            ->expected(1);
    }
    cmd->add_option("--fraction", o.fraction, "Fraction of edges that interact");
    cmd->add_option("--interactions", o.interactions, "Exact number of interacting edges (overrides --fraction)");
    cmd->add_option("--snapshots", o.snapshots, "Snapshots after T_0");
    cmd->add_option("--ta", o.ta, "Comma-separated aggression thresholds");
    cmd->add_option("--seed", o.seed, "Master RNG seed");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--scc-only", o.scc_only, "Restrict to the largest strongly connected component");
}

inline void upsert_manifest(const ExperimentConfig& c, const ManifestEntry& entry)
{
    const fs::path path = fs::path(c.out_dir) / "manifest.json";
    nlohmann::json j;
    if (fs::exists(path)) {
        try {
            j = nlohmann::json::parse(read_file(path.string()));
        } catch (const nlohmann::json::exception&) {
            j = nlohmann::json::object();
        }
    }
    if (!j.contains("runs") || !j["runs"].is_array())
        j["runs"] = nlohmann::json::array();
    auto& runs = j["runs"];
    runs.erase(std::remove_if(runs.begin(), runs.end(),
                              [&](const nlohmann::json& r) { return r.value("run_id", "") == entry.plan.id; }),
               runs.end());
    runs.push_back(entry_json(entry));
    std::size_t failures = 0;
    for (const auto& r : runs)
        failures += r.value("status", "") != "ok";
    j["config"] = config_json(c);
    j["failures"] = failures;
    write_file(path, j.dump(2) + "\n");
}

inline int cmd_simulate(const RunOptions& o, std::ostream& out)
{
    ExperimentConfig c = to_config(o);
    if (c.models.size() != 1 || c.models.front() == "all")
        throw ValidationError("simulate takes exactly one --model");
    if (c.orderings.size() != 1)
        throw ValidationError("simulate takes exactly one --order");
    validate(c);
    const Dataset d = load_dataset(c);
    const PropagationTables tables = PropagationTables::build(d.graph, uses_weight(find_model(c.models.front())));
    const auto plans = plan_runs(c, d);
    const ManifestEntry e = execute_run(c, d, tables, plans.front());
    upsert_manifest(c, e);
    if (!e.ok)
        throw Error(e.error);
    out << "run " << e.plan.id << ": " << d.graph.node_count() << " nodes, " << d.graph.edge_count() << " edges, "
        << e.interactions << " interactions (" << e.effective_interactions << " effective), seed " << e.plan.seed
        << ", outputs in " << c.out_dir << '\n';
    return ok;
}

inline int cmd_sweep(const RunOptions& o, std::ostream& out)
{
    ExperimentConfig c = to_config(o);
    try {
        c.models = resolve_models(c.models);
        validate(c);
    } catch (const ValidationError&) {
        write_manifest(c, SweepManifest{});
        throw;
    }
    const SweepManifest m = run_sweep(c);
    std::size_t files = 0;
    for (const auto& r : m.runs)
        files += r.outputs.size();
    out << "sweep: " << m.runs.size() << " runs, " << m.failures() << " failed, " << files
        << " files, manifest " << (fs::path(c.out_dir) / "manifest.json").string() << '\n';
    for (const auto& r : m.runs)
        if (!r.ok)
            out << "  failed " << r.plan.id << ": " << r.error << '\n';
    return m.failures() ? runtime_failure : ok;
}

struct GroundTruthOptions {
    std::string edges, labels, labels_after, out = "ground_truth.csv";
    bool scc_only = false;
};

inline int cmd_ground_truth(const GroundTruthOptions& o, std::ostream& out)
{
    const DirectedGraph g = load_graph(o.edges, o.scc_only);
    const LabelMap before = load_labels_file(o.labels);
    const LabelMap after = load_labels_file(o.labels_after);
    ValidationVector vv;
    try {
        vv = validation_vector(metric_vector(g, require_labels(g, before), require_labels(g, after)));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) + " (ground-truth labels must cover every node)");
    }
    std::ostringstream csv;
    write_validation_csv(csv, vv);
    write_file(o.out, csv.str());
    out << "ground truth over " << g.node_count() << " nodes, " << g.edge_count() << " edges written to " << o.out
        << '\n';
    return ok;
}

struct CompareOptions {
    std::string metrics_dir, truth, out = "compare";
    std::string ta;
};

struct RankingRow {
    std::string run;
    double t_a = 0.0;
    std::size_t best_snapshot = 0;
    double cosine = 0.0;
};

inline int cmd_compare(const CompareOptions& o, std::ostream& out)
{
    ValidationVector truth;
    {
        std::istringstream in(read_file(o.truth));
        truth = read_validation_csv(in, o.truth);
    }
    std::vector<double> only;
    if (!o.ta.empty())
        only = parse_thresholds(o.ta);

    if (!fs::is_directory(o.metrics_dir))
        throw IoError("not a directory: " + o.metrics_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(o.metrics_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("metrics_ta", 0) == 0 && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ValidationError("no metrics_ta*.csv files under " + o.metrics_dir);

    std::vector<RankingRow> ranking;
    for (const auto& path : files) {
        const std::string stem = path.stem().string();
        auto t = text::parse_double(std::string_view(stem).substr(std::string_view("metrics_ta").size()));
        if (!t)
            throw ParseError(path.string() + ": cannot read threshold from file name", 0);
        if (!only.empty() && std::none_of(only.begin(), only.end(), [&](double x) { return std::abs(x - *t) < 1e-9; }))
            continue;
        std::istringstream in(read_file(path.string()));
        const auto mvs = read_metric_csv(in, path.string());
        std::vector<ValidationVector> vvs;
        for (const auto& mv : mvs)
            vvs.push_back(validation_vector(mv));
        const auto report = compare_run(vvs, truth);
        std::string run = fs::relative(path.parent_path(), o.metrics_dir).generic_string();
        if (run == ".")
            run = "";
        std::ostringstream csv;
        write_similarity_csv(csv, report);
        write_file(fs::path(o.out) / run / ("similarity_ta" + text::fmt(*t) + ".csv"), csv.str());
        if (!report.rows.empty()) {
            const auto& best = report.best_cosine();
            ranking.push_back({run, *t, best.snapshot, best.cosine.value});
        }
    }
    std::stable_sort(ranking.begin(), ranking.end(), [](const RankingRow& a, const RankingRow& b) {
        if (a.cosine != b.cosine)
            return a.cosine > b.cosine;
        if (a.run != b.run)
            return a.run < b.run;
        return a.t_a < b.t_a;
    });
    std::ostringstream csv;
    csv << "run,t_a,best_snapshot,cosine\n";
    for (const auto& r : ranking)
        csv << r.run << ',' << text::fmt(r.t_a) << ',' << r.best_snapshot << ',' << text::fmt(r.cosine) << '\n';
    write_file(fs::path(o.out) / "ranking.csv", csv.str());
    out << "compared " << ranking.size() << " metric files; ranking in "
        << (fs::path(o.out) / "ranking.csv").string() << '\n';
    return ok;
}

struct EvaluateOptions {
    std::string scores, labels, out = "report.csv";
    std::string ta = default_thresholds_text();
    long long snapshot = -1; // final when negative
};

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& out)
{
    const auto thresholds = parse_thresholds(o.ta);
    ScoreTable table;
    {
        std::istringstream in(read_file(o.scores));
        table = read_run_csv(in, o.scores);
    }
    const auto snap = o.snapshot < 0 ? std::prev(table.end()) : table.find(static_cast<std::size_t>(o.snapshot));
    if (snap == table.end())
        throw ValidationError("snapshot " + std::to_string(o.snapshot) + " not present in " + o.scores);
    const LabelMap file_labels = load_labels_file(o.labels);
    LabelMap truth;
    for (const auto& [id, score] : snap->second) {
        auto it = file_labels.find(id);
        truth[id] = it == file_labels.end() ? Label::normal : it->second;
    }
    const auto report = prediction_report(snap->second, truth, thresholds);
    std::ostringstream csv;
    write_prediction_csv(csv, report);
    write_file(o.out, csv.str());
    out << "snapshot " << snap->first << ": auc " << text::fmt(report.auc) << ", report in " << o.out << '\n';
    return ok;
}

struct FeaturesOptions {
    std::string edges, out = "features.csv";
    bool scc_only = false;
};

inline int cmd_features(const FeaturesOptions& o, std::ostream& out)
{
    const DirectedGraph g = load_graph(o.edges, o.scc_only);
    const auto table = node_features(g);
    std::ostringstream csv;
    write_features_csv(csv, g, table);
    write_file(o.out, csv.str());
    out << "features for " << g.node_count() << " nodes written to " << o.out;
    if (!table.hits_converged || !table.eigenvector_converged)
        out << " (power iteration stopped at the iteration cap)";
    out << '\n';
    return ok;
}

/// Entry point shared by the executable and the tests.
/// CLI11 reads the config file at the top level only, so `--config` given
/// after the subcommand is moved in front of it. Returns arguments in the
/// reversed order `CLI::App::parse(std::vector<std::string>)` expects.
inline std::vector<std::string> hoist_config(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc), config;
    for (std::size_t k = 0; k < args.size();) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            config.insert(config.end(), {args[k], args[k + 1]});
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
        } else if (args[k].rfind("--config=", 0) == 0) {
            config.push_back(args[k]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            ++k;
        }
    }
    args.insert(args.begin(), config.begin(), config.end());
    std::reverse(args.begin(), args.end());
    return args;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Aggression propagation simulator", "aggprop"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.set_config("--config", "", "TOML file; options go under a [subcommand] section");

    RunOptions sim_opts, sweep_opts;
    auto* simulate = app.add_subcommand("simulate", "Run one model with one ordering");
    add_run_options(simulate, sim_opts, false);

    auto* sweep = app.add_subcommand("sweep", "Run the model x ordering cross-product");
    add_run_options(sweep, sweep_opts, true);

    GroundTruthOptions gt;
    auto* ground = app.add_subcommand("ground-truth", "Validation vector from two labelings");
    ground->add_option("--edges", gt.edges, "Edge list file")->required();
    ground->add_option("--labels", gt.labels, "Labels at the earlier time")->required();
    ground->add_option("--labels-after", gt.labels_after, "Labels at the later time")->required();
    ground->add_option("--out", gt.out, "Output CSV");
    ground->add_flag("--scc-only", gt.scc_only, "Restrict to the largest strongly connected component");

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Similarity of run metrics to a validation vector");
    compare->add_option("--metrics-dir", cmp.metrics_dir, "Directory of run outputs")->required();
    compare->add_option("--truth", cmp.truth, "Validation vector CSV")->required();
    compare->add_option("--out", cmp.out, "Output directory");
    compare->add_option("--ta", cmp.ta, "Only compare these thresholds");

    EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "AUC / precision / recall of final scores");
    evaluate->add_option("--scores", ev.scores, "Run scores CSV")->required();
    evaluate->add_option("--labels", ev.labels, "Ground-truth labels")->required();
    evaluate->add_option("--ta", ev.ta, "Comma-separated thresholds");
    evaluate->add_option("--snapshot", ev.snapshot, "Snapshot index (default: last)");
    evaluate->add_option("--out", ev.out, "Output CSV");

    FeaturesOptions feat;
    auto* features = app.add_subcommand("features", "Export per-node network features");
    features->add_option("--edges", feat.edges, "Edge list file")->required();
    features->add_option("--out", feat.out, "Output CSV");
    features->add_flag("--scc-only", feat.scc_only, "Restrict to the largest strongly connected component");

    try {
        app.parse(hoist_config(argc, argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : validation_failure;
    }

    try {
        if (*simulate)
            return cmd_simulate(sim_opts, out);
        if (*sweep)
            return cmd_sweep(sweep_opts, out);
        if (*ground)
            return cmd_ground_truth(gt, out);
        if (*compare)
            return cmd_compare(cmp, out);
        if (*evaluate)
            return cmd_evaluate(ev, out);
        if (*features)
            return cmd_features(feat, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return validation_failure;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return validation_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return validation_failure;
}

} // namespace aggprop::cli
