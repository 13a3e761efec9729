#pragma once

#include "recast/cv_tune.hpp"
#include "recast/data_io.hpp"
#include "recast/dating.hpp"
#include "recast/glm.hpp"
#include "recast/preprocess.hpp"
#include "recast/records.hpp"

#include <filesystem>
#include <optional>

namespace recast {

enum class Strategy { standard, freeze_on_announcement };
enum class LabelSource { nber_vintage, alternative_indicator };

Strategy parse_strategy(const std::string& s);
LabelSource parse_label_source(const std::string& s);
std::string to_string(Strategy s);
std::string to_string(LabelSource s);

struct BacktestConfig {
    int horizon = 0;
    ModelFamily family = ModelFamily::ridge;
    Strategy strategy = Strategy::standard;
    LabelSource label_source = LabelSource::nber_vintage;

    // Default period: every vintage directory found under the root.
    std::optional<Month> period_start;
    std::optional<Month> period_end;

    GridConfig grid;
    BlockConfig blocks;
    int tune_every = 1;   // refits between grid searches; thresholds are reused in between
    int knn_k = 5;
    int workers = 1;
    std::optional<CostSpec> costs;   // default: class weights of the training labels
    SelectionMetric metric = SelectionMetric::mean_cost;
    FitOptions cv_fit_options{.max_sweeps = 20000};
    FitOptions fit_options{};

    std::vector<std::string> coincident;   // alternative-indicator inputs
    BryBoschanParams dating_params;
};

struct BacktestResult {
    std::vector<ForecastRecord> records;
    std::vector<CoefficientSnapshot> refits;
    InclusionTable inclusion;   // meaningful for L1-bearing families only
};

// Expanding-window, vintage-faithful out-of-sample run. Each as-of month uses
// only that month's snapshot. Under freeze_on_announcement, refits pause after
// a peak announcement becomes visible (one last refit on the relabelled
// history) and resume at the month a trough announcement becomes visible;
// announcement events are detected by diffing consecutive vintage indicators.
BacktestResult run_backtest(const std::filesystem::path& root, const BacktestConfig& config);

// Share of refits in which each (variable, lag) kept a nonzero coefficient.
// The exact-zero test is valid under soft-thresholding.
InclusionTable inclusion_frequency(const std::vector<CoefficientSnapshot>& refits);

struct AnnouncementEvent {
    TurnType type = TurnType::peak;
    Month turning_point;
    Month announced;
    std::optional<Month> prior_peak;   // required for trough events
};

// Applies one announcement to a label history: a peak sets (peak, announced)
// to 1; a trough sets (prior peak, trough] to 1 and (trough, announced) to 0.
// Months outside the label span are clipped; re-applying is a no-op.
MonthlySeries relabel_history(const MonthlySeries& labels, const AnnouncementEvent& event);

std::vector<Month> list_vintage_months(const std::filesystem::path& root);

// Forecast records joined with final labels at the target month, grouped per
// (horizon, model) for the summary table and curve files. Targets beyond the
// labelled span are dropped.
struct ForecastGroup {
    std::string model;
    int horizon = 0;
    std::vector<double> labels;
    std::vector<double> probabilities;
    std::vector<double> calls;
};

std::vector<ForecastGroup> group_forecasts(const std::vector<ForecastRecord>& records,
                                           const MonthlySeries& final_labels);
MetricsRow evaluate_group(const ForecastGroup& group);

} // namespace recast
