#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "helpers.hpp"
#include "recast/backtest.hpp"
#include "recast/synthgen.hpp"

#include <cmath>

using namespace recast;
using fixtures::backtest_spec;
using fixtures::quick_config;
using helpers::TempDir;

namespace {

MonthlySeries series_from(const std::vector<double>& v, Month start) {
    MonthlySeries s;
    for (std::size_t i = 0; i < v.size(); ++i) s.append(start + static_cast<int>(i), v[i]);
    return s;
}

} // namespace

TEST_CASE("relabel_history applies announcements to the label vector") {
    Month start = Month::parse("2007-01");
    std::vector<double> zeros(48, 0.0);
    MonthlySeries labels = series_from(zeros, start);

    SUBCASE("peak announcement turns (peak, announcement) into ones") {
        AnnouncementEvent ev{TurnType::peak, Month::parse("2007-12"), Month::parse("2008-12"), {}};
        MonthlySeries out = relabel_history(labels, ev);
        for (Month m = Month::parse("2008-01"); m <= Month::parse("2008-11"); ++m)
            CHECK(out.at(m) == 1.0);
        CHECK(out.at(Month::parse("2007-12")) == 0.0);
        CHECK(out.at(Month::parse("2008-12")) == 0.0);
    }
    SUBCASE("trough announcement fixes the false-positive tail") {
        // State as known right before the trough announcement: ones from the
        // peak announcement onward, carried forward.
        MonthlySeries carried = labels;
        for (std::size_t i = 0; i < carried.size(); ++i)
            if (carried.month(i) > Month::parse("2007-12")) carried.value(i) = 1.0;
        AnnouncementEvent ev{TurnType::trough, Month::parse("2009-06"), Month::parse("2010-09"),
                             Month::parse("2007-12")};
        MonthlySeries out = relabel_history(carried, ev);
        for (Month m = Month::parse("2008-01"); m <= Month::parse("2009-06"); ++m)
            CHECK(out.at(m) == 1.0);
        for (Month m = Month::parse("2009-07"); m <= Month::parse("2010-08"); ++m)
            CHECK(out.at(m) == 0.0);
    }
    SUBCASE("re-applying an already-correct event is a no-op") {
        AnnouncementEvent ev{TurnType::peak, Month::parse("2007-12"), Month::parse("2008-12"), {}};
        MonthlySeries once = relabel_history(labels, ev);
        MonthlySeries twice = relabel_history(once, ev);
        CHECK(once.values() == twice.values());
    }
    SUBCASE("structural inconsistencies are rejected") {
        AnnouncementEvent bad{TurnType::peak, Month::parse("2009-01"), Month::parse("2008-01"), {}};
        CHECK_THROWS_AS(relabel_history(labels, bad), ValidationError);
        AnnouncementEvent no_peak{TurnType::trough, Month::parse("2009-06"),
                                  Month::parse("2010-09"), {}};
        CHECK_THROWS_AS(relabel_history(labels, no_peak), ValidationError);
    }
}

TEST_CASE("inclusion frequency accounting") {
    auto snap_with = [](Month m, double v1, double v2) {
        CoefficientSnapshot s;
        s.as_of = m;
        s.terms = {{"intercept", 0}, {"SPREAD", 11}, {"NSE01", 2}};
        s.values = {0.1, v1, v2};
        return s;
    };
    std::vector<CoefficientSnapshot> refits;
    Month base = Month::parse("2010-01");
    for (int i = 0; i < 180; ++i)
        refits.push_back(snap_with(base + i, 0.5, i < 150 ? 0.2 : 0.0));

    InclusionTable table = inclusion_frequency(refits);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.total == 180);
    const InclusionRow* spread = nullptr;
    const InclusionRow* noise = nullptr;
    for (const auto& r : table.rows)
        (r.variable == "SPREAD" ? spread : noise) = &r;
    REQUIRE(spread != nullptr);
    REQUIRE(noise != nullptr);
    CHECK(spread->count == 180);
    CHECK(spread->percentage == doctest::Approx(1.0));
    CHECK(spread->flagged);
    CHECK(noise->count == 150);
    CHECK(noise->percentage == doctest::Approx(150.0 / 180.0));
    CHECK(noise->flagged);   // 83.3% clears the 80% screen

    std::vector<CoefficientSnapshot> never = {snap_with(base, 0.0, 0.0)};
    InclusionTable t2 = inclusion_frequency(never);
    for (const auto& r : t2.rows) {
        CHECK(r.percentage == 0.0);
        CHECK(!r.flagged);
    }
    CHECK_THROWS_AS(inclusion_frequency({}), ValidationError);
}

TEST_CASE("standard backtest emits one record per as-of month") {
    TempDir tmp("bt_count");
    ScenarioTruth truth = generate(backtest_spec(3), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::ridge, 1);
    BacktestResult res = run_backtest(tmp.path(), cfg);

    REQUIRE(res.records.size() == 3);
    REQUIRE(res.refits.size() == 3);
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        CHECK(r.as_of == truth.vintage_months[i]);
        CHECK(r.target - r.as_of == 1);
        CHECK(r.threshold >= 0.0);
        CHECK(r.threshold <= 1.0);
        CHECK(r.probability > 0.0);
        CHECK(r.probability < 1.0);
        CHECK(r.call == (r.probability >= r.threshold ? 1 : 0));
        CHECK(r.model == "ridge");
        CHECK(r.coef_as_of == r.as_of);
    }
}

TEST_CASE("longer horizons keep the target arithmetic") {
    TempDir tmp("bt_horizons");
    generate(backtest_spec(3), tmp.path());
    for (int h : {6, 12}) {
        BacktestConfig cfg = quick_config(ModelFamily::ridge, h);
        BacktestResult res = run_backtest(tmp.path(), cfg);
        REQUIRE(res.records.size() == 3);
        for (const auto& r : res.records) {
            CHECK(r.target - r.as_of == h);
            CHECK(r.horizon == h);
        }
    }
}

TEST_CASE("expanding window grows by one training row per month") {
    TempDir tmp("bt_expand");
    generate(backtest_spec(3), tmp.path());
    std::vector<std::size_t> rows;
    for (Month m : list_vintage_months(tmp.path())) {
        VintageSnapshot snap = load_vintage(tmp.path(), m);
        rows.push_back(build_design(snap, 1).x.rows);
    }
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == rows[0] + 1);
    CHECK(rows[2] == rows[1] + 1);
}

TEST_CASE("real-time discipline: a truncated tree reproduces the prefix records") {
    TempDir tmp("bt_prefix");
    ScenarioTruth truth = generate(backtest_spec(4), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::ridge, 0);
    BacktestResult full = run_backtest(tmp.path(), cfg);

    // Drop the last two vintages and rerun over the shortened period.
    std::filesystem::remove_all(tmp.path() / truth.vintage_months[3].str());
    std::filesystem::remove_all(tmp.path() / truth.vintage_months[2].str());
    BacktestResult prefix = run_backtest(tmp.path(), cfg);
    REQUIRE(prefix.records.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(prefix.records[i].probability == full.records[i].probability);
        CHECK(prefix.records[i].threshold == full.records[i].threshold);
        CHECK(prefix.records[i].call == full.records[i].call);
    }
}

TEST_CASE("missing vintage months are reported by name") {
    TempDir tmp("bt_missing");
    ScenarioTruth truth = generate(backtest_spec(3), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::ridge, 1);
    cfg.period_start = truth.vintage_months.front() - 2;
    cfg.period_end = truth.vintage_months.back();
    try {
        run_backtest(tmp.path(), cfg);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find((truth.vintage_months.front() - 2).str()) !=
              std::string::npos);
    }
}

TEST_CASE("freeze strategy pauses refits between announcements") {
    TempDir tmp("bt_freeze");
    // 70 trailing vintages cover a peak announcement (visible 2005-03) and the
    // matching trough announcement (visible 2006-11) of the seed-42 scenario.
    ScenarioSpec spec;
    spec.months = 360;
    spec.n_vintages = 70;
    ScenarioTruth truth = generate(spec, tmp.path());

    // Locate a peak announcement that becomes visible inside the vintage span
    // and whose matching trough announcement is also in range.
    Month window_start = truth.vintage_months.front();
    Month window_end = truth.vintage_months.back();
    std::optional<Month> peak_visible, trough_visible;
    for (std::size_t i = 0; i < truth.announcements.entries.size(); ++i) {
        const auto& e = truth.announcements.entries[i];
        Month visible = e.announced + 1;
        if (e.type == TurnType::peak && visible > window_start && visible <= window_end &&
            !peak_visible) {
            peak_visible = visible;
            for (std::size_t j = i + 1; j < truth.announcements.entries.size(); ++j) {
                const auto& t = truth.announcements.entries[j];
                if (t.type == TurnType::trough && t.announced + 1 <= window_end) {
                    trough_visible = t.announced + 1;
                    break;
                }
            }
        }
    }
    REQUIRE_MESSAGE(peak_visible.has_value(),
                    "fixture needs a peak announcement inside the vintage span");

    // Early vintages in this 70-month window have under 288 usable rows, so
    // shrink the block geometry accordingly.
    BacktestConfig standard = quick_config(ModelFamily::ridge, 1);
    standard.blocks.block_len = 120;
    standard.blocks.step = 24;
    standard.tune_every = 24;
    BacktestConfig freeze = standard;
    freeze.strategy = Strategy::freeze_on_announcement;

    BacktestResult rs = run_backtest(tmp.path(), standard);
    BacktestResult rf = run_backtest(tmp.path(), freeze);
    REQUIRE(rs.records.size() == rf.records.size());

    for (std::size_t i = 0; i < rf.records.size(); ++i) {
        const auto& rec = rf.records[i];
        bool in_frozen_span = rec.as_of > *peak_visible &&
                              (!trough_visible || rec.as_of < *trough_visible);
        if (rec.as_of < *peak_visible) {
            // Identical to the standard strategy before the first event.
            CHECK(rec.probability == rs.records[i].probability);
            CHECK(rec.coef_as_of == rec.as_of);
        } else if (in_frozen_span) {
            CHECK(rec.coef_as_of == *peak_visible);
        }
    }

    // Coefficient snapshots are refit months only: frozen months add none.
    std::size_t frozen_months = 0;
    for (const auto& rec : rf.records)
        if (rec.as_of > *peak_visible && (!trough_visible || rec.as_of < *trough_visible))
            ++frozen_months;
    CHECK(rf.refits.size() == rf.records.size() - frozen_months);
    if (trough_visible) {
        bool resumed = false;
        for (const auto& s : rf.refits) resumed = resumed || s.as_of == *trough_visible;
        CHECK(resumed);
    }
}

TEST_CASE("lasso backtests report inclusion tables") {
    TempDir tmp("bt_lasso");
    generate(backtest_spec(3), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::lasso, 1);
    BacktestResult res = run_backtest(tmp.path(), cfg);
    CHECK(res.inclusion.total == 3);
    CHECK(!res.inclusion.rows.empty());
    for (const auto& row : res.inclusion.rows) {
        CHECK(row.count >= 0);
        CHECK(row.count <= res.inclusion.total);
        CHECK(row.percentage == doctest::Approx(double(row.count) / res.inclusion.total));
    }
}

TEST_CASE("elastic net tunes over the alpha-lambda cross grid") {
    TempDir tmp("bt_en");
    generate(backtest_spec(3), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::elastic_net, 1);
    BacktestResult res = run_backtest(tmp.path(), cfg);
    REQUIRE(res.records.size() == 3);
    CHECK(res.inclusion.total == 3);   // alpha > 0, so inclusion applies
    for (const auto& r : res.records) CHECK(r.model == "en");
}

TEST_CASE("alternative-indicator labels flow through the dating pipeline") {
    TempDir tmp("bt_alt");
    generate(backtest_spec(3), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::ridge, 0);
    cfg.label_source = LabelSource::alternative_indicator;
    BacktestResult res = run_backtest(tmp.path(), cfg);
    CHECK(res.records.size() == 3);
    for (const auto& r : res.records) {
        CHECK(r.probability > 0.0);
        CHECK(r.probability < 1.0);
    }
}

TEST_CASE("golden forecasts file for the bundled synthetic run") {
    TempDir tmp("bt_golden");
    generate(backtest_spec(24), tmp.path());
    BacktestConfig cfg = quick_config(ModelFamily::ridge, 1);
    BacktestResult res = run_backtest(tmp.path(), cfg);
    write_forecasts(res.records, tmp.path() / "forecasts.csv");

    std::filesystem::path golden =
        std::filesystem::path(RECAST_GOLDEN_DIR) / "forecasts_ridge_h1.csv";
    REQUIRE_MESSAGE(std::filesystem::exists(golden), "golden file missing: run tools/make_goldens");
    CHECK(helpers::slurp(tmp.path() / "forecasts.csv") == helpers::slurp(golden));
}
