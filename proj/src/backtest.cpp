#include "recast/backtest.hpp"

#include "recast/metrics.hpp"

#include <algorithm>
#include <map>

namespace recast {

Strategy parse_strategy(const std::string& s) {
    if (s == "standard") return Strategy::standard;
    if (s == "freeze") return Strategy::freeze_on_announcement;
    throw ValidationError("unknown strategy '" + s + "'; expected standard or freeze");
}

LabelSource parse_label_source(const std::string& s) {
    if (s == "nber") return LabelSource::nber_vintage;
    if (s == "alternative") return LabelSource::alternative_indicator;
    throw ValidationError("unknown label source '" + s + "'; expected nber or alternative");
}

std::string to_string(Strategy s) {
    return s == Strategy::standard ? "standard" : "freeze";
}

std::string to_string(LabelSource s) {
    return s == LabelSource::nber_vintage ? "nber" : "alternative";
}

std::vector<Month> list_vintage_months(const std::filesystem::path& root) {
    std::vector<Month> months;
    if (!std::filesystem::is_directory(root))
        throw IoError("vintage root not found: " + root.string());
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        auto m = Month::try_parse(entry.path().filename().string());
        if (m) months.push_back(*m);
    }
    std::sort(months.begin(), months.end());
    return months;
}

namespace {

enum class Event { none, peak_announced, trough_announced };

// Between announcements, consecutive vintage indicators differ only by the
// newly appended month; an existing month flipping 1->0 marks a visible
// trough announcement, 0->1 a visible peak announcement.
Event detect_event(const MonthlySeries& prev, const MonthlySeries& cur) {
    bool up = false;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        auto now = cur.at(prev.month(i));
        if (!now) continue;
        if (prev.value(i) == 1.0 && *now == 0.0) return Event::trough_announced;
        if (prev.value(i) == 0.0 && *now == 1.0) up = true;
    }
    return up ? Event::peak_announced : Event::none;
}

} // namespace

InclusionTable inclusion_frequency(const std::vector<CoefficientSnapshot>& refits) {
    if (refits.empty())
        throw ValidationError("inclusion frequency needs at least one refit");
    std::map<std::pair<std::string, int>, long> counts;
    for (const auto& snap : refits) {
        for (std::size_t i = 0; i < snap.terms.size(); ++i) {
            if (snap.terms[i].variable == "intercept") continue;
            auto key = std::make_pair(snap.terms[i].variable, snap.terms[i].lag);
            counts.try_emplace(key, 0);
            if (snap.values[i] != 0.0) counts[key] += 1;
        }
    }
    InclusionTable table;
    table.total = static_cast<long>(refits.size());
    for (const auto& [key, count] : counts) {
        InclusionRow row;
        row.variable = key.first;
        row.lag = key.second;
        row.count = count;
        row.percentage = static_cast<double>(count) / static_cast<double>(table.total);
        row.flagged = row.percentage >= 0.8;
        table.rows.push_back(std::move(row));
    }
    return table;
}

MonthlySeries relabel_history(const MonthlySeries& labels, const AnnouncementEvent& event) {
    if (event.announced <= event.turning_point)
        throw ValidationError("announcement must come strictly after the turning point");
    for (double v : labels.values())
        if (v != 0.0 && v != 1.0)
            throw ValidationError("labels must be 0 or 1");

    MonthlySeries out = labels;
    auto set_span = [&](Month lo_excl, Month hi_excl_or_incl, bool inclusive_hi, double value) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            Month m = out.month(i);
            if (m <= lo_excl) continue;
            if (inclusive_hi ? m > hi_excl_or_incl : m >= hi_excl_or_incl) continue;
            out.value(i) = value;
        }
    };

    if (event.type == TurnType::peak) {
        set_span(event.turning_point, event.announced, false, 1.0);
    } else {
        if (!event.prior_peak)
            throw ValidationError("trough event needs its prior peak");
        if (*event.prior_peak >= event.turning_point)
            throw ValidationError("prior peak must precede the trough");
        set_span(*event.prior_peak, event.turning_point, true, 1.0);
        set_span(event.turning_point, event.announced, false, 0.0);
    }
    return out;
}

BacktestResult run_backtest(const std::filesystem::path& root, const BacktestConfig& config) {
    std::vector<Month> period;
    if (config.period_start && config.period_end) {
        if (*config.period_start > *config.period_end)
            throw ValidationError("backtest period start is after its end");
        for (Month m = *config.period_start; m <= *config.period_end; ++m) period.push_back(m);
    } else {
        period = list_vintage_months(root);
        if (config.period_start)
            std::erase_if(period, [&](Month m) { return m < *config.period_start; });
        if (config.period_end)
            std::erase_if(period, [&](Month m) { return m > *config.period_end; });
    }
    if (period.empty())
        throw ValidationError("no vintage months in the backtest period under " + root.string());

    const bool l1_bearing = config.family == ModelFamily::lasso ||
                            config.family == ModelFamily::elastic_net;
    std::vector<PenaltySpec> grid = penalty_grid(config.family, config.grid);

    BacktestResult result;
    bool frozen = false;
    std::optional<MonthlySeries> prev_indicator;

    FitResult active_fit;
    Standardizer active_standardizer;
    Month active_refit_month;
    double active_threshold = 0.5;
    PenaltySpec active_penalty = grid.front();
    bool have_fit = false;
    long refits_since_tune = 0;
    bool have_tune = false;

    for (Month as_of : period) {
        VintageSnapshot snap;
        try {
            snap = load_vintage(root, as_of);
        } catch (const IoError& e) {
            throw IoError("backtest month " + as_of.str() + ": " + e.what());
        }

        Event event = Event::none;
        if (prev_indicator)
            event = detect_event(*prev_indicator, snap.indicator);
        prev_indicator = snap.indicator;

        if (config.strategy == Strategy::freeze_on_announcement &&
            event == Event::trough_announced)
            frozen = false;

        VintageSnapshot model_input = snap;
        if (config.label_source == LabelSource::alternative_indicator) {
            DatingRun dating = run_dating(snap, config.coincident, config.dating_params);
            model_input = snap.with_indicator(dating.indicator);
        }

        DesignMatrix design;
        try {
            design = build_design(model_input, config.horizon, {config.knn_k});
        } catch (const ValidationError& e) {
            throw ValidationError("backtest month " + as_of.str() + ": " + e.what());
        }

        bool refit_now = !have_fit || (config.strategy == Strategy::standard) || !frozen;
        if (refit_now) {
            if (!have_tune || refits_since_tune >= std::max(1, config.tune_every)) {
                CostSpec costs = config.costs ? *config.costs
                                              : costs_from_labels(design.labels);
                BlockPlan plan = make_blocks(design.x.rows, config.blocks);
                TuneOptions topt;
                topt.metric = config.metric;
                topt.fit_options = config.cv_fit_options;
                topt.workers = config.workers;
                TuneResult tune;
                try {
                    tune = grid_search(design.x, design.labels, config.family, grid, costs,
                                       plan, topt);
                } catch (const ValidationError& e) {
                    throw ValidationError("backtest month " + as_of.str() + ": " + e.what());
                }
                active_penalty = tune.best;
                active_threshold = tune.threshold;
                have_tune = true;
                refits_since_tune = 0;
            }
            ModelSpec spec = ModelSpec::make(config.family, active_penalty);
            const std::vector<double>* warm =
                have_fit && active_fit.coefficients.size() == design.x.cols
                    ? &active_fit.coefficients
                    : nullptr;
            active_fit = fit(design.x, design.labels, spec, config.fit_options, warm);
            active_standardizer = design.standardizer;
            active_refit_month = as_of;
            have_fit = true;
            ++refits_since_tune;

            CoefficientSnapshot snap_out;
            snap_out.as_of = as_of;
            snap_out.converged = active_fit.converged;
            snap_out.terms.push_back({"intercept", 0});
            for (const auto& col : design.columns) snap_out.terms.push_back({col.variable, col.lag});
            snap_out.values = active_fit.coefficients;
            result.refits.push_back(std::move(snap_out));
        }

        // The frozen model keeps its own standardizer; new raw features flow
        // through it unchanged.
        std::vector<double> features = design.oos_row_raw;
        active_standardizer.apply_row(features, 1);
        double probability = predict_one(active_fit.coefficients, features);

        ForecastRecord rec;
        rec.as_of = as_of;
        rec.target = design.oos_target;
        rec.horizon = config.horizon;
        rec.model = to_string(config.family);
        rec.probability = probability;
        rec.threshold = active_threshold;
        rec.call = probability >= active_threshold ? 1 : 0;
        rec.coef_as_of = active_refit_month;
        result.records.push_back(rec);

        if (config.strategy == Strategy::freeze_on_announcement &&
            event == Event::peak_announced)
            frozen = true;
    }

    if (l1_bearing && !result.refits.empty())
        result.inclusion = inclusion_frequency(result.refits);
    return result;
}

std::vector<ForecastGroup> group_forecasts(const std::vector<ForecastRecord>& records,
                                           const MonthlySeries& final_labels) {
    std::map<std::pair<int, std::string>, ForecastGroup> groups;
    for (const auto& r : records) {
        auto label = final_labels.at(r.target);
        if (!label) continue;
        ForecastGroup& g = groups[{r.horizon, r.model}];
        g.model = r.model;
        g.horizon = r.horizon;
        g.labels.push_back(*label);
        g.probabilities.push_back(r.probability);
        g.calls.push_back(static_cast<double>(r.call));
    }
    std::vector<ForecastGroup> out;
    for (auto& [key, g] : groups) out.push_back(std::move(g));
    return out;
}

MetricsRow evaluate_group(const ForecastGroup& g) {
    if (g.labels.empty())
        throw ValidationError("no evaluable records for model " + g.model + " h" +
                              std::to_string(g.horizon));
    PointMetrics pm = point_metrics(confusion(g.labels, g.calls));
    MetricsRow row;
    row.model = g.model;
    row.horizon = g.horizon;
    row.n = g.labels.size();
    row.auroc = auroc(g.labels, g.probabilities);
    row.auprc = auprc(g.labels, g.probabilities);
    row.balanced_accuracy = pm.balanced_accuracy;
    row.mcc = pm.mcc;
    row.f1 = pm.f1;
    row.sensitivity = pm.sensitivity;
    row.specificity = pm.specificity;
    row.precision = pm.precision;
    return row;
}

} // namespace recast
