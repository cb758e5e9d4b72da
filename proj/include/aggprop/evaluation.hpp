#pragma once

#include "error.hpp"
#include "labels.hpp"
#include "metrics.hpp"
#include "similarity.hpp"
#include "text.hpp"

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <vector>

namespace aggprop {

/// Mann-Whitney AUC with average ranks for ties; aggressive is the positive class.
inline double auc(std::span<const double> scores, std::span<const Label> labels)
{
    if (scores.size() != labels.size())
        throw ValidationError("auc: scores and labels differ in length");
    const auto ranks = average_ranks(scores);
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Label::aggressive) {
            positive_rank_sum += ranks[i];
            ++positives;
        }
    }
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0)
        throw ValidationError("auc needs both aggressive and normal labels");
    const double p = static_cast<double>(positives);
    const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

namespace detail {

inline void aligned(const std::map<NodeId, double>& scores, const LabelMap& labels, std::vector<double>& s,
                    std::vector<Label>& l)
{
    if (scores.size() != labels.size())
        throw ValidationError("scores cover " + std::to_string(scores.size()) + " nodes but labels cover " +
                              std::to_string(labels.size()));
    for (const auto& [id, score] : scores) {
        auto it = labels.find(id);
        if (it == labels.end())
            throw ValidationError("no label for node " + std::to_string(id));
        s.push_back(score);
        l.push_back(it->second);
    }
}

} // namespace detail

inline double auc(const std::map<NodeId, double>& scores, const LabelMap& labels)
{
    std::vector<double> s;
    std::vector<Label> l;
    detail::aligned(scores, labels, s, l);
    return auc(s, l);
}

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    bool precision_defined = true; // false when nothing was predicted aggressive
    bool recall_defined = true;    // false when nothing is truly aggressive
};

inline PrecisionRecall precision_recall(std::span<const Label> predicted, std::span<const Label> truth)
{
    if (predicted.size() != truth.size())
        throw ValidationError("precision_recall: prediction and truth differ in length");
    PrecisionRecall r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] == Label::aggressive;
        const bool t = truth[i] == Label::aggressive;
        if (p && t)
            ++r.tp;
        else if (p)
            ++r.fp;
        else if (t)
            ++r.fn;
        else
            ++r.tn;
    }
    r.precision_defined = r.tp + r.fp > 0;
    r.recall_defined = r.tp + r.fn > 0;
    r.precision = r.precision_defined ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
    r.recall = r.recall_defined ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
    return r;
}

inline PrecisionRecall precision_recall(const LabelMap& predicted, const LabelMap& truth)
{
    if (predicted.size() != truth.size())
        throw ValidationError("prediction and truth cover different node sets");
    std::vector<Label> p, t;
    for (const auto& [id, label] : predicted) {
        auto it = truth.find(id);
        if (it == truth.end())
            throw ValidationError("node " + std::to_string(id) + " has no truth label");
        p.push_back(label);
        t.push_back(it->second);
    }
    return precision_recall(p, t);
}

struct ThresholdRow {
    double t_a = 0.0;
    PrecisionRecall pr;
};

struct PredictionReport {
    double auc = 0.0;
    std::vector<ThresholdRow> rows;
};

inline PredictionReport prediction_report(std::span<const double> scores, std::span<const Label> truth,
                                          std::span<const double> thresholds)
{
    if (thresholds.empty())
        throw ValidationError("at least one threshold is required");
    PredictionReport report;
    report.auc = auc(scores, truth);
    for (double t : thresholds)
        report.rows.push_back({t, precision_recall(binarize(scores, t), truth)});
    return report;
}

inline PredictionReport prediction_report(const std::map<NodeId, double>& scores, const LabelMap& truth,
                                          std::span<const double> thresholds)
{
    std::vector<double> s;
    std::vector<Label> l;
    detail::aligned(scores, truth, s, l);
    return prediction_report(s, l, thresholds);
}

inline void write_prediction_csv(std::ostream& out, const PredictionReport& report)
{
    out << "auc," << text::fmt(report.auc) << '\n';
    out << "t_a,precision,recall,tp,fp,tn,fn\n";
    for (const auto& r : report.rows)
        out << text::fmt(r.t_a) << ',' << text::fmt(r.pr.precision) << ',' << text::fmt(r.pr.recall) << ','
            << r.pr.tp << ',' << r.pr.fp << ',' << r.pr.tn << ',' << r.pr.fn << '\n';
}

} // namespace aggprop
