#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "recast/preprocess.hpp"
#include "recast/synthgen.hpp"

#include <algorithm>
#include <cmath>

using namespace recast;
using helpers::TempDir;

namespace {

ScenarioSpec small_spec(std::uint64_t seed = 42) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.months = 240;
    spec.n_vintages = 6;
    return spec;
}

std::string tree_digest(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string digest;
    for (const auto& f : files) {
        digest += f.lexically_relative(root).string();
        digest += "|";
        digest += helpers::slurp(f);
    }
    return digest;
}

double point_biserial(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_CASE("identical seeds produce byte-identical trees") {
    TempDir a("gen_a"), b("gen_b");
    generate(small_spec(), a.path());
    generate(small_spec(), b.path());
    CHECK(tree_digest(a.path()) == tree_digest(b.path()));

    TempDir c("gen_c");
    generate(small_spec(43), c.path());
    CHECK(tree_digest(a.path()) != tree_digest(c.path()));
}

TEST_CASE("every generated vintage passes loader validation") {
    TempDir tmp("gen_valid");
    ScenarioTruth truth = generate(small_spec(), tmp.path());
    REQUIRE(truth.vintage_months.size() == 6);
    for (Month m : truth.vintage_months) {
        VintageSnapshot snap = load_vintage(tmp.path(), m);
        CHECK(snap.series.size() == truth.metas.size());
        CHECK(!snap.indicator.empty());
        CHECK(snap.indicator.last_month() == m - 1);
    }
}

TEST_CASE("announced indicator vintages match the announcement log") {
    TempDir tmp("gen_ann");
    ScenarioTruth truth = generate(small_spec(), tmp.path());
    for (Month m : truth.vintage_months) {
        VintageSnapshot snap = load_vintage(tmp.path(), m);
        MonthlySeries expected = build_indicator_vintage(truth.announcements, m, ScenarioSpec{}.start);
        REQUIRE(snap.indicator.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(snap.indicator.value(i) == expected.value(i));
    }
}

TEST_CASE("zero-revision scenarios publish final values immediately") {
    TempDir tmp("gen_norev");
    ScenarioSpec spec = small_spec();
    spec.revision_scale = 0.0;
    ScenarioTruth truth = generate(spec, tmp.path());
    for (Month m : truth.vintage_months) {
        VintageSnapshot snap = load_vintage(tmp.path(), m);
        for (const auto& meta : truth.metas) {
            const MonthlySeries& vs = snap.series.at(meta.id);
            for (std::size_t i = 0; i < vs.size(); ++i)
                CHECK(vs.value(i) == truth.series.at(meta.id).at(vs.month(i)).value());
        }
    }
}

TEST_CASE("revisions fade out beyond the revision window") {
    TempDir tmp("gen_rev");
    ScenarioSpec spec = small_spec();
    ScenarioTruth truth = generate(spec, tmp.path());
    Month m = truth.vintage_months.back();
    VintageSnapshot snap = load_vintage(tmp.path(), m);
    const MonthlySeries& vs = snap.series.at("ACT01");
    bool any_revised = false;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        double final_value = truth.series.at("ACT01").at(vs.month(i)).value();
        int age = (m - vs.month(i)) - 1;
        if (age >= spec.revision_window) {
            CHECK(vs.value(i) == final_value);
        } else if (vs.value(i) != final_value) {
            any_revised = true;
        }
    }
    CHECK(any_revised);
}

TEST_CASE("the leading variable peaks at its configured lead") {
    TempDir tmp("gen_lead");
    ScenarioSpec spec;
    spec.months = 480;
    spec.n_vintages = 1;
    spec.lead = 12;
    ScenarioTruth truth = generate(spec, tmp.path());

    // Correlation scan over transformed (variable, target-relative lag) pairs.
    double best = 0.0;
    std::string best_var;
    int best_lag = -1;
    for (const auto& meta : truth.metas) {
        MonthlySeries ts = transform_series(truth.series.at(meta.id), meta.transform);
        if (meta.native_frequency == Frequency::quarterly)
            ts = spline_interpolate_quarterly(ts, spec.start + spec.months);
        for (int lag = 0; lag <= 18; ++lag) {
            std::vector<double> x, y;
            for (std::size_t i = 0; i < truth.indicator.size(); ++i) {
                Month target = truth.indicator.month(i);
                auto v = ts.at(target - lag);
                if (!v) continue;
                x.push_back(*v);
                y.push_back(truth.indicator.value(i));
            }
            if (x.size() < 100) continue;
            double r = std::abs(point_biserial(x, y));
            if (r > best) {
                best = r;
                best_var = meta.id;
                best_lag = lag;
            }
        }
    }
    CHECK(best_var == "SPREAD");
    CHECK(best_lag == spec.lead);
    CHECK(best > 0.5);
}

TEST_CASE("truth files round-trip through load_truth") {
    TempDir tmp("gen_truth");
    ScenarioTruth truth = generate(small_spec(), tmp.path());
    ScenarioTruth loaded = load_truth(tmp.path());
    CHECK(loaded.metas.size() == truth.metas.size());
    CHECK(loaded.indicator.size() == truth.indicator.size());
    CHECK(loaded.vintage_months == truth.vintage_months);
    CHECK(loaded.announcements.entries.size() == truth.announcements.entries.size());
    for (std::size_t i = 0; i < truth.indicator.size(); ++i)
        CHECK(loaded.indicator.value(i) == truth.indicator.value(i));
    // Generated values are canonical in the storage format, so the round trip
    // is exact.
    const MonthlySeries& a = truth.series.at("SPREAD");
    const MonthlySeries& b = loaded.series.at("SPREAD");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(b.value(i) == a.value(i));
}
