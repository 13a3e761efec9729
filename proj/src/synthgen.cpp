#include "recast/synthgen.hpp"

#include "recast/csv.hpp"
#include "recast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace recast {

namespace {

std::string pad2(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

// Values live on disk with 12 significant digits; storing the ground truth in
// the same precision keeps memory and files bit-for-bit consistent.
double canonical(double v) { return std::strtod(format_value(v).c_str(), nullptr); }

bool quarter_end(Month m) {
    int mm = m.month();
    return mm == 3 || mm == 6 || mm == 9 || mm == 12;
}

int publication_lag(const std::string& id) {
    if (id == "GDPQ") return 2;
    if (id == "ACT03") return 3;   // one slow coincident series to exercise imputation
    return 1;
}

} // namespace

ScenarioTruth generate(const ScenarioSpec& spec, const std::filesystem::path& root) {
    if (spec.months < 60)
        throw ValidationError("scenario needs at least 60 months");
    if (spec.n_informative < 3)
        throw ValidationError("scenario needs at least 3 informative variables");
    if (spec.n_vintages < 1 || spec.n_vintages > spec.months)
        throw ValidationError("vintage count must lie within the truth span");
    if (spec.lead < 0 || spec.lead > 24)
        throw ValidationError("lead must be between 0 and 24 months");

    Rng rng(spec.seed);
    const int T = spec.months;
    const int T_ext = T + spec.lead + 6;

    // Two-state persistent regime chain, duration-sampled so phases respect
    // the dating module's minimum phase and cycle lengths. Always opens in a
    // boom, so every recession has an in-range peak.
    std::vector<int> regime(T_ext, 0);
    {
        int t = 0;
        bool recession = false;
        while (t < T_ext) {
            int dur = recession ? rng.uniform_int(spec.recession_min, spec.recession_max)
                                : rng.uniform_int(spec.boom_min, spec.boom_max);
            for (int k = 0; k < dur && t < T_ext; ++k) regime[t++] = recession ? 1 : 0;
            recession = !recession;
        }
    }

    // Common activity factor: growth is regime-dependent; the level trends up
    // in booms and down in recessions, which is what the dating module needs.
    std::vector<double> growth(T), factor(T);
    double level = 0.0;
    for (int t = 0; t < T; ++t) {
        growth[t] = (regime[t] ? -0.55 : 0.25) + 0.12 * rng.normal();
        level += growth[t];
        factor[t] = level;
    }

    ScenarioTruth truth;
    const int n_coincident = spec.n_informative - 2;

    auto add_meta = [&](const std::string& id, Category cat, Transform tr, Frequency fr) {
        truth.metas.push_back({id, cat, tr, fr});
    };

    // Coincident activity block: levels loading on the factor plus an
    // idiosyncratic walk and measurement noise.
    for (int i = 0; i < n_coincident; ++i) {
        std::string id = "ACT" + pad2(i + 1);
        Category cat = i % 3 == 0 ? Category::output : (i % 3 == 1 ? Category::income : Category::labor);
        add_meta(id, cat, Transform::first_difference, Frequency::monthly);
        double loading = 0.7 + 0.6 * rng.uniform();
        double walk = 0.0;
        MonthlySeries s;
        for (int t = 0; t < T; ++t) {
            walk += 0.18 * rng.normal();
            s.append(spec.start + t, canonical(10.0 + loading * factor[t] + walk + 0.25 * rng.normal()));
        }
        truth.series[id] = std::move(s);
    }

    // Quarterly output series, strictly positive for the log-growth transform.
    {
        add_meta("GDPQ", Category::output, Transform::log_growth, Frequency::quarterly);
        MonthlySeries s;
        for (int t = 0; t < T; ++t) {
            Month m = spec.start + t;
            if (!quarter_end(m)) continue;
            s.append(m, canonical(120.0 * std::exp(0.004 * factor[t] + 0.002 * rng.normal())));
        }
        truth.series["GDPQ"] = std::move(s);
    }

    // Spread-like leading variable: anticipates the regime by `lead` months.
    {
        add_meta("SPREAD", Category::financial, Transform::none, Frequency::monthly);
        MonthlySeries s;
        double ar = 0.0;
        for (int t = 0; t < T; ++t) {
            ar = 0.6 * ar + 0.2 * rng.normal();
            s.append(spec.start + t, canonical(1.0 - 1.1 * regime[t + spec.lead] + ar));
        }
        truth.series["SPREAD"] = std::move(s);
    }

    // Collinear noise: groups of near-duplicate random walks, unrelated to the
    // regime, to manufacture the multicollinearity / separation pathology.
    {
        const int group_size = 5;
        int n_groups = (spec.n_noise + group_size - 1) / group_size;
        std::vector<std::vector<double>> base(n_groups, std::vector<double>(T));
        for (int g = 0; g < n_groups; ++g) {
            double walk = 0.0;
            for (int t = 0; t < T; ++t) {
                walk += 0.5 * rng.normal();
                base[g][t] = walk;
            }
        }
        const Category cats[] = {Category::prices, Category::housing, Category::money_credit,
                                 Category::financial};
        for (int j = 0; j < spec.n_noise; ++j) {
            std::string id = "NSE" + pad2(j + 1);
            add_meta(id, cats[j % 4], Transform::first_difference, Frequency::monthly);
            MonthlySeries s;
            for (int t = 0; t < T; ++t)
                s.append(spec.start + t, canonical(base[j / group_size][t] + 0.03 * rng.normal()));
            truth.series[id] = std::move(s);
        }
    }

    for (int t = 0; t < T; ++t)
        truth.indicator.append(spec.start + t, static_cast<double>(regime[t]));

    // Turning points of the in-range truth with their announcement lags.
    for (int t = 1; t < T; ++t) {
        if (regime[t] == 1 && regime[t - 1] == 0) {
            Month peak = spec.start + (t - 1);
            truth.announcements.entries.push_back(
                {TurnType::peak, peak, peak + rng.uniform_int(spec.peak_lag_min, spec.peak_lag_max)});
        } else if (regime[t] == 0 && regime[t - 1] == 1) {
            Month trough = spec.start + (t - 1);
            truth.announcements.entries.push_back(
                {TurnType::trough, trough,
                 trough + rng.uniform_int(spec.trough_lag_min, spec.trough_lag_max)});
        }
    }
    truth.announcements.validate();

    // Vintage directories for the trailing as-of months. Values within the
    // revision window of the vintage date carry fading, hash-keyed noise so a
    // cell's value depends only on (variable, month, as-of), never on order.
    std::filesystem::create_directories(root);
    Month first_as_of = spec.start + (T - spec.n_vintages);
    for (int k = 0; k < spec.n_vintages; ++k) {
        Month as_of = first_as_of + k;
        truth.vintage_months.push_back(as_of);

        VintageSnapshot snap;
        snap.as_of = as_of;
        snap.metas = truth.metas;
        for (std::size_t vi = 0; vi < truth.metas.size(); ++vi) {
            const auto& meta = truth.metas[vi];
            const MonthlySeries& final_series = truth.series.at(meta.id);
            int lag = publication_lag(meta.id);
            MonthlySeries vintage_series;
            for (std::size_t i = 0; i < final_series.size(); ++i) {
                Month m = final_series.month(i);
                if (as_of - m < lag) break;
                double v = final_series.value(i);
                int age = (as_of - m) - lag;
                if (spec.revision_scale > 0.0 && age < spec.revision_window) {
                    double weight = 1.0 - static_cast<double>(age) / spec.revision_window;
                    v = canonical(v + spec.revision_scale * weight *
                                  hash_normal(spec.seed, vi + 1,
                                              static_cast<std::uint64_t>(m.index()),
                                              static_cast<std::uint64_t>(as_of.index())));
                }
                vintage_series.append(m, v);
            }
            snap.series[meta.id] = std::move(vintage_series);
        }
        snap.indicator = build_indicator_vintage(truth.announcements, as_of, spec.start);
        write_vintage(snap, root);
    }

    // Root-level ground truth and reference files.
    {
        std::vector<std::string> header{"month"};
        for (const auto& meta : truth.metas) header.push_back(meta.id);
        header.push_back("indicator");
        CsvWriter w(std::move(header));
        for (int t = 0; t < T; ++t) {
            Month m = spec.start + t;
            std::vector<std::string> row{m.str()};
            for (const auto& meta : truth.metas) {
                auto v = truth.series.at(meta.id).at(m);
                row.push_back(v ? format_value(*v) : "");
            }
            row.push_back(format_value(truth.indicator.value(t)));
            w.add_row(std::move(row));
        }
        w.write(root / "truth.csv");
    }
    write_announcements(truth.announcements, root / "announcements.csv");
    {
        CsvWriter w({"id", "category", "transform", "frequency"});
        for (const auto& meta : truth.metas)
            w.add_row({meta.id, to_string(meta.category), to_string(meta.transform),
                       to_string(meta.native_frequency)});
        w.write(root / "meta.csv");
    }
    return truth;
}

ScenarioTruth load_truth(const std::filesystem::path& root) {
    ScenarioTruth truth;

    CsvTable meta = read_csv(root / "meta.csv");
    int mc_id = meta.require_column("id");
    int mc_cat = meta.require_column("category");
    int mc_tr = meta.require_column("transform");
    int mc_fr = meta.require_column("frequency");
    for (const auto& row : meta.rows)
        truth.metas.push_back({row[mc_id], parse_category(row[mc_cat]),
                               parse_transform(row[mc_tr]), parse_frequency(row[mc_fr])});

    CsvTable t = read_csv(root / "truth.csv");
    int c_month = t.require_column("month");
    int c_ind = t.require_column("indicator");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Month m = Month::parse(t.rows[i][c_month]);
        truth.indicator.append(m, parse_value(t.path, t.line_numbers[i], t.rows[i][c_ind]));
        for (const auto& vm : truth.metas) {
            const std::string& cell = t.rows[i][t.require_column(vm.id)];
            if (!cell.empty())
                truth.series[vm.id].append(m, parse_value(t.path, t.line_numbers[i], cell));
        }
    }
    truth.announcements = load_announcements(root / "announcements.csv");

    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        auto m = Month::try_parse(entry.path().filename().string());
        if (m) truth.vintage_months.push_back(*m);
    }
    std::sort(truth.vintage_months.begin(), truth.vintage_months.end());
    return truth;
}

} // namespace recast
