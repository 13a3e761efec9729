#pragma once

#include "recast/month.hpp"

#include <string>
#include <vector>

namespace recast {

// One out-of-sample forecast. target - as_of always equals the horizon; the
// binary call is probability >= threshold.
struct ForecastRecord {
    Month as_of;
    Month target;
    int horizon = 0;
    std::string model;
    double probability = 0.0;
    double threshold = 0.5;
    int call = 0;
    Month coef_as_of;   // refit month whose coefficients produced this forecast
};

// Fitted coefficient vector at one refit month. terms[0] is the intercept
// ("intercept", lag 0); the rest are (variable, lag) pairs in design order.
struct CoefficientTerm {
    std::string variable;
    int lag = 0;
};

struct CoefficientSnapshot {
    Month as_of;
    std::vector<CoefficientTerm> terms;
    std::vector<double> values;
    bool converged = true;
};

struct InclusionRow {
    std::string variable;
    int lag = 0;
    long count = 0;
    double percentage = 0.0;   // count / total
    bool flagged = false;      // percentage >= 0.8
};

struct InclusionTable {
    std::vector<InclusionRow> rows;   // sorted by (variable, lag)
    long total = 0;
};

// One evaluated (model, horizon) cell of the summary table.
struct MetricsRow {
    std::string model;
    int horizon = 0;
    std::size_t n = 0;
    double auroc = 0.0;
    double auprc = 0.0;
    double balanced_accuracy = 0.0;
    double mcc = 0.0;
    double f1 = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
};

} // namespace recast
