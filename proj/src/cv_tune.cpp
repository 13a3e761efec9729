#include "recast/cv_tune.hpp"

#include "recast/csv.hpp"
#include "recast/errors.hpp"
#include "recast/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace recast {

namespace {

bool has_both_classes(std::span<const double> labels) {
    bool pos = false, neg = false;
    for (double y : labels) (y == 1.0 ? pos : neg) = true;
    return pos && neg;
}

Matrix slice_rows(const Matrix& m, std::size_t first, std::size_t last) {
    Matrix out(last - first, m.cols);
    for (std::size_t r = first; r < last; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out.at(r - first, c) = m.at(r, c);
    return out;
}

double weighted_log_loss(std::span<const double> labels, std::span<const double> probs) {
    ClassWeights w = class_weights(labels);
    double loss = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double p = std::min(1.0 - 1e-15, std::max(1e-15, probs[i]));
        loss -= w.of(labels[i]) *
                (labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p));
    }
    return loss;
}

struct CellResult {
    double score = std::numeric_limits<double>::quiet_NaN();
    double cost = 0.0;
    double threshold = 0.5;
    bool converged = false;
};

void run_indexed(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

BlockPlan make_blocks(std::size_t sample_length, const BlockConfig& cfg) {
    if (cfg.block_len == 0 || cfg.step == 0)
        throw ValidationError("block length and step must be positive");
    if (sample_length < cfg.block_len)
        throw ValidationError("insufficient history: " + std::to_string(sample_length) +
                              " rows for block length " + std::to_string(cfg.block_len));
    std::size_t train_len =
        static_cast<std::size_t>(std::ceil(cfg.train_fraction * static_cast<double>(cfg.block_len)));
    if (train_len == 0 || train_len >= cfg.block_len)
        throw ValidationError("train fraction leaves an empty train or validation split");

    BlockPlan plan;
    for (std::size_t start = 0; start + cfg.block_len <= sample_length; start += cfg.step)
        plan.blocks.push_back({start, start + train_len, start + cfg.block_len});
    return plan;
}

CostSpec costs_from_labels(std::span<const double> labels) {
    ClassWeights w = class_weights(labels);
    return {w.w_pos, w.w_neg};
}

ThresholdResult optimal_threshold(std::span<const double> probabilities,
                                  std::span<const double> labels, const CostSpec& costs) {
    if (probabilities.size() != labels.size())
        throw ValidationError("probabilities and labels differ in length");
    if (!has_both_classes(labels))
        throw ValidationError("threshold optimization needs both classes");

    std::vector<double> unique(probabilities.begin(), probabilities.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<double> candidates{0.0};
    for (std::size_t i = 0; i + 1 < unique.size(); ++i)
        candidates.push_back((unique[i] + unique[i + 1]) / 2.0);
    candidates.push_back(1.0);
    std::sort(candidates.begin(), candidates.end());

    auto cost_at = [&](double c) {
        double cost = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            bool call = probabilities[i] >= c;
            if (labels[i] == 1.0 && !call) cost += costs.cost_fn;
            if (labels[i] == 0.0 && call) cost += costs.cost_fp;
        }
        return cost;
    };

    ThresholdResult best{candidates.front(), cost_at(candidates.front())};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double c = cost_at(candidates[i]);
        if (c < best.cost) best = {candidates[i], c};
    }
    return best;
}

std::vector<PenaltySpec> penalty_grid(ModelFamily family, const GridConfig& cfg) {
    auto log_spaced = [&](int n) {
        if (n < 1) throw ValidationError("lambda grid must have at least one point");
        std::vector<double> out;
        if (n == 1) {
            out.push_back(cfg.lambda_min);
            return out;
        }
        double lo = std::log10(cfg.lambda_min), hi = std::log10(cfg.lambda_max);
        for (int i = 0; i < n; ++i)
            out.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / (n - 1)));
        return out;
    };

    std::vector<PenaltySpec> grid;
    switch (family) {
        case ModelFamily::logit:
        case ModelFamily::weighted_logit:
            grid.push_back({0.0, 0.0});
            break;
        case ModelFamily::ridge:
            for (double l : log_spaced(cfg.lambda_count)) grid.push_back({0.0, l});
            break;
        case ModelFamily::lasso:
            for (double l : log_spaced(cfg.lambda_count)) grid.push_back({1.0, l});
            break;
        case ModelFamily::elastic_net:
            for (double a : cfg.en_alphas)
                for (double l : log_spaced(cfg.en_lambda_count)) grid.push_back({a, l});
            break;
    }
    return grid;
}

TuneResult grid_search(const Matrix& design, std::span<const double> labels,
                       ModelFamily family, const std::vector<PenaltySpec>& grid,
                       const CostSpec& costs, const BlockPlan& plan,
                       const TuneOptions& options) {
    if (grid.empty())
        throw ValidationError("empty hyperparameter grid");
    if (plan.blocks.empty())
        throw ValidationError("empty block plan");
    if (labels.size() != design.rows)
        throw ValidationError("grid search dimension mismatch");

    const std::size_t n_blocks = plan.blocks.size();
    const std::size_t n_cand = grid.size();

    // Per-alpha descending-lambda fit order makes warm starts effective while
    // results stay keyed by the caller's enumeration order.
    std::vector<std::size_t> fit_order(n_cand);
    for (std::size_t i = 0; i < n_cand; ++i) fit_order[i] = i;
    std::stable_sort(fit_order.begin(), fit_order.end(), [&](std::size_t a, std::size_t b) {
        if (grid[a].alpha != grid[b].alpha) return grid[a].alpha < grid[b].alpha;
        return grid[a].lambda > grid[b].lambda;
    });

    std::vector<std::vector<CellResult>> cells(n_blocks, std::vector<CellResult>(n_cand));
    std::vector<char> block_used(n_blocks, 0);

    run_indexed(n_blocks, options.workers, [&](std::size_t b) {
        const Block& blk = plan.blocks[b];
        Matrix x_train = slice_rows(design, blk.start, blk.train_end);
        Matrix x_val = slice_rows(design, blk.train_end, blk.end);
        std::vector<double> y_train(labels.begin() + blk.start, labels.begin() + blk.train_end);
        std::vector<double> y_val(labels.begin() + blk.train_end, labels.begin() + blk.end);
        if (!has_both_classes(y_train) || !has_both_classes(y_val))
            return;   // single-class block: skipped, excluded from every mean
        block_used[b] = 1;

        std::vector<double> warm;
        double warm_alpha = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t idx : fit_order) {
            ModelSpec spec = ModelSpec::make(family, grid[idx]);
            const std::vector<double>* start = nullptr;
            if (!warm.empty() && spec.penalty.alpha == warm_alpha) start = &warm;
            FitResult f;
            try {
                f = fit(x_train, y_train, spec, options.fit_options, start);
            } catch (const ValidationError&) {
                continue;   // unscoreable cell; candidate fails on this block
            }
            warm = f.coefficients;
            warm_alpha = spec.penalty.alpha;

            // A fit that exhausted its sweep budget is still scored: its
            // probabilities are the model's output, quasi-separation included.
            std::vector<double> probs = predict_proba(f.coefficients, x_val);
            ThresholdResult thr = optimal_threshold(probs, y_val, costs);
            CellResult cell;
            cell.cost = thr.cost;
            cell.threshold = thr.threshold;
            cell.converged = f.converged;
            switch (options.metric) {
                case SelectionMetric::mean_cost: cell.score = thr.cost; break;
                case SelectionMetric::auprc: cell.score = -auprc(y_val, probs); break;
                case SelectionMetric::log_loss: cell.score = weighted_log_loss(y_val, probs); break;
            }
            cells[b][idx] = cell;
        }
    });

    std::vector<std::size_t> usable;
    for (std::size_t b = 0; b < n_blocks; ++b)
        if (block_used[b]) usable.push_back(b);
    if (usable.empty())
        throw ValidationError("every cross-validation block is single-class; cannot tune");

    // Exact cost ties are common once blocks separate cleanly; among tied
    // candidates the most regularized one (largest lambda) wins.
    TuneResult result;
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t best_idx = n_cand;
    for (std::size_t i = 0; i < n_cand; ++i) {
        double mean = 0.0;
        bool scoreable = true;
        for (std::size_t b : usable) {
            if (std::isnan(cells[b][i].score)) scoreable = false;
            mean += cells[b][i].score;
        }
        mean = scoreable ? mean / static_cast<double>(usable.size())
                         : std::numeric_limits<double>::infinity();
        result.scores.emplace_back(grid[i], mean);
        bool better = mean < best_score ||
                      (best_idx < n_cand && mean == best_score &&
                       grid[i].lambda > grid[best_idx].lambda);
        if (better) {
            best_score = mean;
            best_idx = i;
        }
    }
    if (best_idx == n_cand)
        throw ValidationError("every hyperparameter candidate failed on every block");

    result.best = grid[best_idx];
    for (std::size_t b : usable)
        result.per_block_thresholds.push_back(cells[b][best_idx].threshold);
    double sum = 0.0;
    for (double t : result.per_block_thresholds) sum += t;
    result.threshold = sum / static_cast<double>(result.per_block_thresholds.size());

    if (options.trace) {
        for (std::size_t i = 0; i < n_cand; ++i)
            for (std::size_t b : usable)
                options.trace->push_back({i, b, cells[b][i].cost, cells[b][i].threshold});
    }
    return result;
}

void write_tune_trace(const std::vector<TuneTraceRow>& trace, const std::vector<PenaltySpec>& grid,
                      const std::filesystem::path& path) {
    CsvWriter w({"candidate", "alpha", "lambda", "block", "validation_cost", "threshold"});
    for (const auto& row : trace) {
        const PenaltySpec& p = grid.at(row.candidate);
        w.add_row({std::to_string(row.candidate), format_value(p.alpha), format_value(p.lambda),
                   std::to_string(row.block), format_value(row.validation_cost),
                   format_value(row.threshold)});
    }
    w.write(path);
}

} // namespace recast
