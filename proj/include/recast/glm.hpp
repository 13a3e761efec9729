#pragma once

#include "recast/matrix.hpp"

#include <span>
#include <string>
#include <vector>

namespace recast {

// Elastic-net mixing: alpha = 1 is pure L1 (lasso), alpha = 0 pure L2
// (ridge), lambda = 0 unpenalized. The intercept is never penalized.
struct PenaltySpec {
    double alpha = 0.0;
    double lambda = 0.0;
};

// Per-class likelihood weights: w_pos = 1/(2 N+), w_neg = 1/(2 N-), so the
// total weight over the sample is exactly 1.
struct ClassWeights {
    double w_pos = 1.0;
    double w_neg = 1.0;

    double of(double label) const { return label > 0.5 ? w_pos : w_neg; }
};

ClassWeights class_weights(std::span<const double> labels);

enum class ModelFamily { logit, weighted_logit, lasso, ridge, elastic_net };

std::string to_string(ModelFamily f);
ModelFamily parse_model_family(const std::string& s);

// Whether the family uses class-weighted likelihood terms; everything except
// the basic logit does.
bool family_weighted(ModelFamily f);

struct ModelSpec {
    ModelFamily family = ModelFamily::logit;
    PenaltySpec penalty;
    bool class_weighted = false;

    static ModelSpec make(ModelFamily f, PenaltySpec p = {});
};

struct FitResult {
    std::vector<double> coefficients;   // intercept first, then slopes
    bool converged = false;
    long iterations = 0;                // coordinate sweeps consumed
    double objective = 0.0;             // final penalized negative log-likelihood
};

struct FitOptions {
    double coef_tolerance = 1e-7;
    double kkt_tolerance = 1e-6;
    long max_sweeps = 100000;
};

// Penalized negative weighted log-likelihood. Probabilities are clamped at
// 1e-15 before the log so quasi-separated fits stay finite.
double objective(std::span<const double> coefficients, const Matrix& design,
                 std::span<const double> labels, const ClassWeights& weights,
                 const PenaltySpec& penalty);

// Gradient of the smooth part (the weighted negative log-likelihood) only;
// penalty terms are handled analytically where needed.
std::vector<double> nll_gradient(std::span<const double> coefficients, const Matrix& design,
                                 std::span<const double> labels, const ClassWeights& weights);

// IRLS outer loop with cyclic coordinate descent and soft-thresholding inner
// loop. Deterministic; declares convergence only once the KKT residual of the
// exact objective is below tolerance. Non-convergence is flagged, not thrown.
FitResult fit(const Matrix& design, std::span<const double> labels, const ModelSpec& model,
              const FitOptions& options = {},
              const std::vector<double>* warm_start = nullptr);

double predict_one(std::span<const double> coefficients, std::span<const double> row);
std::vector<double> predict_proba(std::span<const double> coefficients, const Matrix& rows);

// Max violation of the first-order optimality conditions: unpenalized
// gradient for the intercept, soft-threshold subgradient bound for zero
// slopes, exact stationarity for active slopes.
double kkt_residual(const FitResult& fit, const Matrix& design, std::span<const double> labels,
                    const ClassWeights& weights, const PenaltySpec& penalty);

} // namespace recast
