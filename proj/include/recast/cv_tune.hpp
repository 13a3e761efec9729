#pragma once

#include "recast/glm.hpp"
#include "recast/matrix.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace recast {

// One contiguous window: rows [start, train_end) train, [train_end, end)
// validate, so validation is always strictly ahead of the training split.
struct Block {
    std::size_t start = 0;
    std::size_t train_end = 0;
    std::size_t end = 0;
};

struct BlockPlan {
    std::vector<Block> blocks;
};

struct BlockConfig {
    std::size_t block_len = 288;       // 24 years of monthly data
    std::size_t step = 12;             // one year between successive windows
    double train_fraction = 5.0 / 6.0; // 240 train / 48 validation by default
};

BlockPlan make_blocks(std::size_t sample_length, const BlockConfig& cfg = {});

// Asymmetric misclassification prices; a missed recession (false negative)
// never costs less than a false alarm.
struct CostSpec {
    double cost_fn = 1.0;
    double cost_fp = 1.0;
};

// Costs taken from the sample's class weights, the same weights the weighted
// logit uses.
CostSpec costs_from_labels(std::span<const double> labels);

struct ThresholdResult {
    double threshold = 0.5;
    double cost = 0.0;
};

// Minimizes cost_fn * #FN(c) + cost_fp * #FP(c) over the midpoints between
// adjacent sorted unique probabilities plus the endpoints 0 and 1. The cost is
// piecewise constant between sample probabilities, so this candidate set
// provably contains a minimizer. Ties break toward the smallest cutpoint.
ThresholdResult optimal_threshold(std::span<const double> probabilities,
                                  std::span<const double> labels, const CostSpec& costs);

enum class SelectionMetric { mean_cost, auprc, log_loss };

struct GridConfig {
    double lambda_min = 1e-5;
    double lambda_max = 1e2;
    int lambda_count = 1000;                         // Ridge/LASSO grid size
    int en_lambda_count = 200;                       // per-alpha grid for the elastic net
    std::vector<double> en_alphas = {0.25, 0.5, 0.75};
};

// Candidate penalties for a family; log-spaced in lambda, enumerated in
// ascending lambda (and listed alpha order).
std::vector<PenaltySpec> penalty_grid(ModelFamily family, const GridConfig& cfg);

struct TuneTraceRow {
    std::size_t candidate = 0;
    std::size_t block = 0;
    double validation_cost = 0.0;
    double threshold = 0.0;
};

void write_tune_trace(const std::vector<TuneTraceRow>& trace, const std::vector<PenaltySpec>& grid,
                      const std::filesystem::path& path);

struct TuneResult {
    PenaltySpec best;
    std::vector<double> per_block_thresholds;   // winning candidate only
    double threshold = 0.5;                     // mean of per-block thresholds
    std::vector<std::pair<PenaltySpec, double>> scores;
};

struct TuneOptions {
    SelectionMetric metric = SelectionMetric::mean_cost;
    FitOptions fit_options{.max_sweeps = 20000};
    int workers = 1;
    std::vector<TuneTraceRow>* trace = nullptr;
};

// Blocked rolling-window search: every candidate is fit on each block's train
// split and scored on its validation split at that block's optimal cutpoint.
// Single-class blocks are skipped; deterministic regardless of worker count.
TuneResult grid_search(const Matrix& design, std::span<const double> labels,
                       ModelFamily family, const std::vector<PenaltySpec>& grid,
                       const CostSpec& costs, const BlockPlan& plan,
                       const TuneOptions& options = {});

} // namespace recast
