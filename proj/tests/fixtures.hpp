// Fixture builders shared between the unit tests and the golden-file
// regeneration tool; goldens stay valid only while these stay fixed.
#pragma once

#include "recast/backtest.hpp"
#include "recast/synthgen.hpp"

#include <cmath>

namespace fixtures {

// Deterministic multi-variable snapshot: values are smooth functions of the
// month index so feature provenance is checkable.
inline recast::VintageSnapshot make_snapshot(int n_vars, recast::Month as_of, int history_months) {
    using namespace recast;
    VintageSnapshot snap;
    snap.as_of = as_of;
    Month start = as_of - history_months;
    for (int v = 0; v < n_vars; ++v) {
        std::string id = "V" + std::to_string(100 + v);
        snap.metas.push_back({id, Category::output, Transform::none, Frequency::monthly});
        MonthlySeries s;
        for (int t = 0; t < history_months; ++t)
            s.append(start + t, std::sin(0.37 * t + v) + 0.01 * t + 0.2 * v);
        snap.series[id] = std::move(s);
    }
    for (int t = 0; t < history_months; ++t)
        snap.indicator.append(start + t, (t % 11) < 3 ? 1.0 : 0.0);
    return snap;
}

// Desk-scale scenario: long enough for the default 288-month blocks yet quick
// to run under the small tuning grid below. A 24-vintage window ends the
// truth span with both label classes among the h=1 targets, which the golden
// evaluation fixture relies on.
inline recast::ScenarioSpec backtest_spec(int vintages = 4) {
    recast::ScenarioSpec spec;
    spec.months = 360;
    spec.n_vintages = vintages;
    return spec;
}

inline recast::BacktestConfig quick_config(recast::ModelFamily family, int horizon) {
    recast::BacktestConfig cfg;
    cfg.family = family;
    cfg.horizon = horizon;
    cfg.grid.lambda_min = 1e-2;   // near-unpenalized fits crawl on separable data
    cfg.grid.lambda_count = 6;
    cfg.grid.en_lambda_count = 4;
    cfg.tune_every = 12;
    cfg.workers = 1;
    cfg.cv_fit_options.max_sweeps = 3000;
    cfg.fit_options.max_sweeps = 10000;
    return cfg;
}

} // namespace fixtures
