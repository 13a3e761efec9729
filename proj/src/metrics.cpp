#include "recast/metrics.hpp"

#include "recast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace recast {

namespace {

void check_binary(std::span<const double> v, const char* what) {
    for (double x : v)
        if (x != 0.0 && x != 1.0)
            throw ValidationError(std::string(what) + " must be 0 or 1");
}

struct SweepGroup {
    double score;
    long pos;
    long neg;
};

// Unique score values in descending order with per-group class counts.
std::vector<SweepGroup> sweep_groups(std::span<const double> labels,
                                     std::span<const double> scores) {
    if (labels.size() != scores.size())
        throw ValidationError("labels and scores differ in length");
    if (labels.empty())
        throw ValidationError("empty input");
    check_binary(labels, "labels");

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<SweepGroup> groups;
    for (std::size_t i : order) {
        if (groups.empty() || scores[i] != groups.back().score)
            groups.push_back({scores[i], 0, 0});
        (labels[i] == 1.0 ? groups.back().pos : groups.back().neg) += 1;
    }
    return groups;
}

void check_both_classes(const std::vector<SweepGroup>& groups) {
    long pos = 0, neg = 0;
    for (const auto& g : groups) { pos += g.pos; neg += g.neg; }
    if (pos == 0 || neg == 0)
        throw ValidationError("curve metrics need both classes present");
}

} // namespace

ConfusionMatrix confusion(std::span<const double> labels, std::span<const double> calls) {
    if (labels.size() != calls.size())
        throw ValidationError("labels and calls differ in length");
    check_binary(labels, "labels");
    check_binary(calls, "calls");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1.0)
            (calls[i] == 1.0 ? cm.tp : cm.fn) += 1;
        else
            (calls[i] == 1.0 ? cm.fp : cm.tn) += 1;
    }
    return cm;
}

PointMetrics point_metrics(const ConfusionMatrix& cm) {
    long pos = cm.tp + cm.fn;
    long neg = cm.fp + cm.tn;
    if (pos + neg == 0)
        throw ValidationError("empty confusion matrix");
    if (pos == 0 || neg == 0)
        throw ValidationError("point metrics need both actual classes");

    PointMetrics m;
    m.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(pos);
    m.specificity = static_cast<double>(cm.tn) / static_cast<double>(neg);
    m.balanced_accuracy = (m.sensitivity + m.specificity) / 2.0;

    if (cm.tp + cm.fp == 0) {
        m.precision = 0.0;
        m.precision_degenerate = true;
    } else {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    }

    double d1 = static_cast<double>(cm.tp + cm.fp);
    double d2 = static_cast<double>(cm.tp + cm.fn);
    double d3 = static_cast<double>(cm.tn + cm.fp);
    double d4 = static_cast<double>(cm.tn + cm.fn);
    if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0) {
        m.mcc = 0.0;
        m.mcc_degenerate = true;
    } else {
        m.mcc = (static_cast<double>(cm.tp) * cm.tn - static_cast<double>(cm.fp) * cm.fn) /
                std::sqrt(d1 * d2 * d3 * d4);
    }

    if (m.precision_degenerate || m.precision + m.sensitivity == 0.0)
        m.f1 = 0.0;
    else
        m.f1 = 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity);
    return m;
}

double auroc(std::span<const double> labels, std::span<const double> scores) {
    auto groups = sweep_groups(labels, scores);
    check_both_classes(groups);
    long pos = 0, neg = 0;
    for (const auto& g : groups) { pos += g.pos; neg += g.neg; }

    // Twice the unnormalized trapezoid area stays integer-valued, so the
    // result is bit-identical to the pair-counting Mann-Whitney statistic.
    double twice_area = 0.0;
    long tp = 0, fp = 0;
    for (const auto& g : groups) {
        twice_area += static_cast<double>(g.neg) * (2.0 * tp + g.pos);
        tp += g.pos;
        fp += g.neg;
    }
    return twice_area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

CurvePoints roc_curve(std::span<const double> labels, std::span<const double> scores) {
    auto groups = sweep_groups(labels, scores);
    check_both_classes(groups);
    long pos = 0, neg = 0;
    for (const auto& g : groups) { pos += g.pos; neg += g.neg; }

    CurvePoints curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long tp = 0, fp = 0;
    for (const auto& g : groups) {
        tp += g.pos;
        fp += g.neg;
        curve.points.push_back({g.score, static_cast<double>(fp) / neg,
                                static_cast<double>(tp) / pos});
    }
    return curve;
}

double auprc(std::span<const double> labels, std::span<const double> scores) {
    auto groups = sweep_groups(labels, scores);
    check_both_classes(groups);
    long pos = 0;
    for (const auto& g : groups) pos += g.pos;

    double area = 0.0;
    long tp = 0, fp = 0;
    double prev_recall = 0.0;
    for (const auto& g : groups) {
        tp += g.pos;
        fp += g.neg;
        double recall = static_cast<double>(tp) / static_cast<double>(pos);
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return area;
}

CurvePoints pr_curve(std::span<const double> labels, std::span<const double> scores) {
    auto groups = sweep_groups(labels, scores);
    check_both_classes(groups);
    long pos = 0;
    for (const auto& g : groups) pos += g.pos;

    CurvePoints curve;
    long tp = 0, fp = 0;
    for (const auto& g : groups) {
        tp += g.pos;
        fp += g.neg;
        if (tp == 0) continue;   // cutpoints above every positive carry no recall
        double recall = static_cast<double>(tp) / static_cast<double>(pos);
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (curve.points.empty())
            curve.points.push_back({g.score, 0.0, precision});   // recall-0 anchor
        curve.points.push_back({g.score, recall, precision});
    }
    return curve;
}

double phi_coefficient(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError("phi coefficient needs equal-length series");
    check_binary(a, "series a");
    check_binary(b, "series b");
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    };
    if (constant(a) || constant(b))
        throw ValidationError("phi coefficient undefined for a constant series");
    PointMetrics m = point_metrics(confusion(a, b));
    return m.mcc;
}

} // namespace recast
