#pragma once

#include "recast/data_io.hpp"
#include "recast/month.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace recast {

// Synthetic vintage scenario with known ground truth. A two-state persistent
// regime chain drives a common activity factor; coincident variables load on
// it, a spread-like variable anticipates the regime by `lead` months, and
// collinear noise variables replicate the multicollinearity pathologies that
// penalized fits are meant to absorb.
struct ScenarioSpec {
    std::uint64_t seed = 42;
    int months = 480;          // truth span
    int n_informative = 10;    // coincident block + one quarterly + the leading variable
    int n_noise = 15;          // near-duplicate noise variables in groups
    int lead = 12;             // months by which the leading variable anticipates recessions
    int n_vintages = 60;       // trailing as-of months that receive vintage directories
    Month start = Month(1980, 1);

    // Revision process: observations within `revision_window` months of the
    // vintage date carry fading noise; older history is final.
    double revision_scale = 0.05;
    int revision_window = 6;

    // Regime durations (months, inclusive uniform draws).
    int boom_min = 24, boom_max = 54;
    int recession_min = 8, recession_max = 16;

    // Announcement lags behind the turning point (months).
    int peak_lag_min = 4, peak_lag_max = 10;
    int trough_lag_min = 10, trough_lag_max = 18;
};

struct ScenarioTruth {
    std::vector<VariableMeta> metas;
    std::map<std::string, MonthlySeries> series;   // final, unrevised values
    MonthlySeries indicator;                       // true regime, 1 = recession
    AnnouncementLog announcements;
    std::vector<Month> vintage_months;             // as-of months with directories
};

// Writes the vintage tree plus truth.csv and announcements.csv under root and
// returns the ground truth. Identical spec => byte-identical tree.
ScenarioTruth generate(const ScenarioSpec& spec, const std::filesystem::path& root);

// Truth accessors for tests and evaluation.
ScenarioTruth load_truth(const std::filesystem::path& root);

} // namespace recast
