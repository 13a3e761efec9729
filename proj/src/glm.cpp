#include "recast/glm.hpp"

#include "recast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace recast {

namespace {

constexpr double kProbClamp = 1e-15;
constexpr double kVarianceFloor = 1e-6;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void check_labels(std::span<const double> labels) {
    bool pos = false, neg = false;
    for (double y : labels) {
        if (y != 0.0 && y != 1.0)
            throw ValidationError("labels must be 0 or 1");
        (y == 1.0 ? pos : neg) = true;
    }
    if (!pos || !neg)
        throw ValidationError("labels contain a single class; fit is degenerate");
}

} // namespace

ClassWeights class_weights(std::span<const double> labels) {
    long n_pos = 0, n_neg = 0;
    for (double y : labels) {
        if (y == 1.0) ++n_pos;
        else if (y == 0.0) ++n_neg;
        else throw ValidationError("labels must be 0 or 1");
    }
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("class weights need both classes; got " + std::to_string(n_pos) +
                              " positives and " + std::to_string(n_neg) + " negatives");
    ClassWeights w;
    w.w_pos = 1.0 / (2.0 * static_cast<double>(n_pos));
    w.w_neg = 1.0 / (2.0 * static_cast<double>(n_neg));
    return w;
}

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::logit: return "logit";
        case ModelFamily::weighted_logit: return "wlogit";
        case ModelFamily::lasso: return "lasso";
        case ModelFamily::ridge: return "ridge";
        case ModelFamily::elastic_net: return "en";
    }
    return "?";
}

ModelFamily parse_model_family(const std::string& s) {
    if (s == "logit") return ModelFamily::logit;
    if (s == "wlogit") return ModelFamily::weighted_logit;
    if (s == "lasso") return ModelFamily::lasso;
    if (s == "ridge") return ModelFamily::ridge;
    if (s == "en" || s == "elastic-net") return ModelFamily::elastic_net;
    throw ValidationError("unknown model '" + s + "'; expected logit,wlogit,lasso,ridge,en");
}

bool family_weighted(ModelFamily f) { return f != ModelFamily::logit; }

ModelSpec ModelSpec::make(ModelFamily f, PenaltySpec p) {
    ModelSpec m;
    m.family = f;
    m.class_weighted = family_weighted(f);
    switch (f) {
        case ModelFamily::logit:
        case ModelFamily::weighted_logit:
            m.penalty = {0.0, 0.0};
            break;
        case ModelFamily::ridge:
            m.penalty = {0.0, p.lambda};
            break;
        case ModelFamily::lasso:
            m.penalty = {1.0, p.lambda};
            break;
        case ModelFamily::elastic_net:
            m.penalty = p;
            break;
    }
    return m;
}

double objective(std::span<const double> coefficients, const Matrix& design,
                 std::span<const double> labels, const ClassWeights& weights,
                 const PenaltySpec& penalty) {
    if (coefficients.size() != design.cols || labels.size() != design.rows)
        throw ValidationError("objective dimension mismatch");
    double nll = 0.0;
    for (std::size_t r = 0; r < design.rows; ++r) {
        const double* row = design.row(r);
        double eta = 0.0;
        for (std::size_t c = 0; c < design.cols; ++c) eta += row[c] * coefficients[c];
        double p = clamp_prob(sigmoid(eta));
        double w = weights.of(labels[r]);
        nll -= w * (labels[r] * std::log(p) + (1.0 - labels[r]) * std::log(1.0 - p));
    }
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t j = 1; j < coefficients.size(); ++j) {
        l1 += std::abs(coefficients[j]);
        l2 += coefficients[j] * coefficients[j];
    }
    return nll + penalty.lambda * ((1.0 - penalty.alpha) * l2 + penalty.alpha * l1);
}

std::vector<double> nll_gradient(std::span<const double> coefficients, const Matrix& design,
                                 std::span<const double> labels, const ClassWeights& weights) {
    std::vector<double> grad(design.cols, 0.0);
    for (std::size_t r = 0; r < design.rows; ++r) {
        const double* row = design.row(r);
        double eta = 0.0;
        for (std::size_t c = 0; c < design.cols; ++c) eta += row[c] * coefficients[c];
        double p = sigmoid(eta);
        double w = weights.of(labels[r]);
        double resid = w * (p - labels[r]);
        for (std::size_t c = 0; c < design.cols; ++c) grad[c] += row[c] * resid;
    }
    return grad;
}

double predict_one(std::span<const double> coefficients, std::span<const double> row) {
    if (coefficients.size() != row.size())
        throw ValidationError("prediction dimension mismatch");
    double eta = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) eta += row[c] * coefficients[c];
    // Keep probabilities in the open interval even when the linear predictor
    // saturates the double-precision sigmoid.
    return clamp_prob(sigmoid(eta));
}

std::vector<double> predict_proba(std::span<const double> coefficients, const Matrix& rows) {
    std::vector<double> out(rows.rows);
    for (std::size_t r = 0; r < rows.rows; ++r)
        out[r] = predict_one(coefficients, std::span<const double>(rows.row(r), rows.cols));
    return out;
}

double kkt_residual(const FitResult& fit, const Matrix& design, std::span<const double> labels,
                    const ClassWeights& weights, const PenaltySpec& penalty) {
    std::vector<double> g = nll_gradient(fit.coefficients, design, labels, weights);
    double worst = std::abs(g[0]);
    for (std::size_t j = 1; j < g.size(); ++j) {
        double beta = fit.coefficients[j];
        double res;
        if (beta == 0.0) {
            res = std::max(0.0, std::abs(g[j]) - penalty.alpha * penalty.lambda);
        } else {
            res = std::abs(g[j] + penalty.alpha * penalty.lambda * (beta > 0 ? 1.0 : -1.0) +
                           2.0 * (1.0 - penalty.alpha) * penalty.lambda * beta);
        }
        worst = std::max(worst, res);
    }
    return worst;
}

FitResult fit(const Matrix& design, std::span<const double> labels, const ModelSpec& model,
              const FitOptions& options, const std::vector<double>* warm_start) {
    if (labels.size() != design.rows)
        throw ValidationError("fit dimension mismatch");
    check_labels(labels);

    const std::size_t n = design.rows;
    const std::size_t K = design.cols;
    const double alpha = model.penalty.alpha;
    const double lambda = model.penalty.lambda;

    ClassWeights weights = model.class_weighted ? class_weights(labels) : ClassWeights{1.0, 1.0};
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = weights.of(labels[r]);

    FitResult result;
    if (warm_start && warm_start->size() == K) {
        result.coefficients = *warm_start;
    } else {
        result.coefficients.assign(K, 0.0);
        double wy = 0.0, wsum = 0.0;
        for (std::size_t r = 0; r < n; ++r) { wy += w[r] * labels[r]; wsum += w[r]; }
        double base = std::min(1.0 - 1e-12, std::max(1e-12, wy / wsum));
        result.coefficients[0] = std::log(base / (1.0 - base));
    }
    std::vector<double>& beta = result.coefficients;

    std::vector<double> eta(n, 0.0);
    auto recompute_eta = [&] {
        for (std::size_t r = 0; r < n; ++r) {
            const double* row = design.row(r);
            double e = 0.0;
            for (std::size_t c = 0; c < K; ++c) e += row[c] * beta[c];
            eta[r] = e;
        }
    };

    std::vector<double> omega(n), resid(n), curvature(K);
    long sweeps = 0;
    int stalled_outers = 0;

    while (sweeps < options.max_sweeps) {
        // Quadratic (IRLS) approximation at the current coefficients.
        recompute_eta();
        for (std::size_t r = 0; r < n; ++r) {
            double p = sigmoid(eta[r]);
            double v = std::max(p * (1.0 - p), kVarianceFloor);
            omega[r] = w[r] * v;
            resid[r] = (labels[r] - p) / v;
        }
        for (std::size_t c = 0; c < K; ++c) {
            double a = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double x = design.at(r, c);
                a += omega[r] * x * x;
            }
            curvature[c] = a;
        }

        std::vector<double> beta_outer = beta;
        double inner_delta = 0.0;
        const long inner_cap = 200;
        for (long it = 0; it < inner_cap && sweeps < options.max_sweeps; ++it) {
            inner_delta = 0.0;
            ++sweeps;
            for (std::size_t j = 0; j < K; ++j) {
                double rho = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    rho += omega[r] * design.at(r, j) * resid[r];
                rho += curvature[j] * beta[j];
                double updated;
                if (j == 0) {
                    updated = rho / curvature[0];
                } else {
                    updated = soft_threshold(rho, alpha * lambda) /
                              (curvature[j] + 2.0 * (1.0 - alpha) * lambda);
                }
                double delta = updated - beta[j];
                if (delta != 0.0) {
                    for (std::size_t r = 0; r < n; ++r)
                        resid[r] -= design.at(r, j) * delta;
                    beta[j] = updated;
                    inner_delta = std::max(inner_delta, std::abs(delta));
                }
            }
            if (inner_delta < options.coef_tolerance) break;
        }

        double outer_delta = 0.0;
        for (std::size_t j = 0; j < K; ++j)
            outer_delta = std::max(outer_delta, std::abs(beta[j] - beta_outer[j]));
        if (outer_delta < options.coef_tolerance) {
            double kkt = kkt_residual(result, design, labels, weights, model.penalty);
            if (kkt < options.kkt_tolerance) {
                result.converged = true;
                break;
            }
            // Rebuilding the quadratic at an unchanged point reproduces the
            // same subproblem; give it a few chances, then flag the fit stuck.
            if (++stalled_outers >= 5) break;
        } else {
            stalled_outers = 0;
        }
    }

    result.iterations = sweeps;
    result.objective = objective(beta, design, labels, weights, model.penalty);
    return result;
}

} // namespace recast
