#pragma once

#include <span>
#include <vector>

namespace recast {

struct ConfusionMatrix {
    long tp = 0;
    long fn = 0;
    long fp = 0;
    long tn = 0;
};

ConfusionMatrix confusion(std::span<const double> labels, std::span<const double> calls);

// The six point-prediction measures. Degenerate denominators are reported as
// flagged zeros so summary tables never abort mid-backtest.
struct PointMetrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double balanced_accuracy = 0.0;
    double mcc = 0.0;
    double f1 = 0.0;
    bool mcc_degenerate = false;
    bool precision_degenerate = false;
};

PointMetrics point_metrics(const ConfusionMatrix& cm);

struct CurvePoint {
    double cutpoint = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct CurvePoints {
    std::vector<CurvePoint> points;
};

// Trapezoidal area over the full cutpoint sweep. Score ties are grouped so
// the value coincides with the Mann-Whitney statistic P(s+ > s-) + P(tie)/2.
double auroc(std::span<const double> labels, std::span<const double> scores);
CurvePoints roc_curve(std::span<const double> labels, std::span<const double> scores);

// Step-wise (right-continuous) integration of the precision-recall sweep;
// the recall-0 endpoint of the exported curve is anchored at the precision of
// the smallest positive recall.
double auprc(std::span<const double> labels, std::span<const double> scores);
CurvePoints pr_curve(std::span<const double> labels, std::span<const double> scores);

// Pearson correlation of two binary series == the MCC of their confusion matrix.
double phi_coefficient(std::span<const double> a, std::span<const double> b);

} // namespace recast
