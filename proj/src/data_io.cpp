#include "recast/data_io.hpp"

#include "recast/csv.hpp"

#include <algorithm>

namespace recast {

namespace {

Month parse_month_cell(const std::filesystem::path& file, std::size_t line, const std::string& cell) {
    auto m = Month::try_parse(cell);
    if (!m)
        throw ParseError(file.string() + ":" + std::to_string(line) + ": bad month '" + cell + "'");
    return *m;
}

} // namespace

Category parse_category(const std::string& s) {
    if (s == "output") return Category::output;
    if (s == "income") return Category::income;
    if (s == "prices") return Category::prices;
    if (s == "labor") return Category::labor;
    if (s == "housing") return Category::housing;
    if (s == "money-credit") return Category::money_credit;
    if (s == "financial") return Category::financial;
    throw ValidationError("unknown category '" + s + "'");
}

Transform parse_transform(const std::string& s) {
    if (s == "log-growth") return Transform::log_growth;
    if (s == "first-difference") return Transform::first_difference;
    if (s == "percent-change") return Transform::percent_change;
    if (s == "none") return Transform::none;
    throw ValidationError("unknown transform '" + s + "'");
}

Frequency parse_frequency(const std::string& s) {
    if (s == "daily") return Frequency::daily;
    if (s == "monthly") return Frequency::monthly;
    if (s == "quarterly") return Frequency::quarterly;
    throw ValidationError("unknown frequency '" + s + "'");
}

std::string to_string(Category c) {
    switch (c) {
        case Category::output: return "output";
        case Category::income: return "income";
        case Category::prices: return "prices";
        case Category::labor: return "labor";
        case Category::housing: return "housing";
        case Category::money_credit: return "money-credit";
        case Category::financial: return "financial";
    }
    return "?";
}

std::string to_string(Transform t) {
    switch (t) {
        case Transform::log_growth: return "log-growth";
        case Transform::first_difference: return "first-difference";
        case Transform::percent_change: return "percent-change";
        case Transform::none: return "none";
    }
    return "?";
}

std::string to_string(Frequency f) {
    switch (f) {
        case Frequency::daily: return "daily";
        case Frequency::monthly: return "monthly";
        case Frequency::quarterly: return "quarterly";
    }
    return "?";
}

std::string to_string(TurnType t) { return t == TurnType::peak ? "peak" : "trough"; }

TurnType parse_turn_type(const std::string& s) {
    if (s == "peak") return TurnType::peak;
    if (s == "trough") return TurnType::trough;
    throw ValidationError("unknown turning-point type '" + s + "'");
}

const VariableMeta& VintageSnapshot::meta(const std::string& id) const {
    for (const auto& m : metas)
        if (m.id == id) return m;
    throw ValidationError("no metadata for variable '" + id + "'");
}

VintageSnapshot VintageSnapshot::with_indicator(MonthlySeries ind) const {
    VintageSnapshot copy = *this;
    copy.indicator = std::move(ind);
    return copy;
}

void AnnouncementLog::validate() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.announced <= e.turning_point)
            throw ValidationError("announcement for " + e.turning_point.str() +
                                  " must come strictly after the turning point");
        if (i > 0) {
            if (entries[i - 1].turning_point >= e.turning_point)
                throw ValidationError("turning points out of order at " + e.turning_point.str());
            if (entries[i - 1].type == e.type)
                throw ValidationError("peaks and troughs must alternate; duplicate " +
                                      to_string(e.type) + " at " + e.turning_point.str());
        }
    }
    // A log may legitimately open with a trough (prior peak out of range).
}

VintageSnapshot load_vintage(const std::filesystem::path& root, Month as_of) {
    std::filesystem::path dir = root / as_of.str();
    if (!std::filesystem::is_directory(dir))
        throw IoError("vintage directory not found: " + dir.string());

    VintageSnapshot snap;
    snap.as_of = as_of;

    CsvTable meta = read_csv(dir / "meta.csv");
    int mc_id = meta.require_column("id");
    int mc_cat = meta.require_column("category");
    int mc_tr = meta.require_column("transform");
    int mc_fr = meta.require_column("frequency");
    for (std::size_t i = 0; i < meta.rows.size(); ++i) {
        const auto& row = meta.rows[i];
        VariableMeta vm;
        vm.id = row[mc_id];
        try {
            vm.category = parse_category(row[mc_cat]);
            vm.transform = parse_transform(row[mc_tr]);
            vm.native_frequency = parse_frequency(row[mc_fr]);
        } catch (const ValidationError& e) {
            throw ParseError(meta.path.string() + ":" + std::to_string(meta.line_numbers[i]) +
                             ": " + e.what());
        }
        snap.metas.push_back(std::move(vm));
    }

    CsvTable series = read_csv(dir / "series.csv");
    int sc_id = series.require_column("variable_id");
    int sc_m = series.require_column("month");
    int sc_v = series.require_column("value");
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const auto& row = series.rows[i];
        std::size_t line = series.line_numbers[i];
        const std::string& id = row[sc_id];
        Month m = parse_month_cell(series.path, line, row[sc_m]);
        double v = parse_value(series.path, line, row[sc_v]);
        if (m >= as_of)
            throw ValidationError(series.path.string() + ":" + std::to_string(line) +
                                  ": observation for " + m.str() + " is not available at as-of " +
                                  as_of.str());
        bool known = std::any_of(snap.metas.begin(), snap.metas.end(),
                                 [&](const VariableMeta& vm) { return vm.id == id; });
        if (!known)
            throw ValidationError(series.path.string() + ":" + std::to_string(line) +
                                  ": variable '" + id + "' has no meta entry");
        try {
            snap.series[id].append(m, v);
        } catch (const std::invalid_argument&) {
            throw ValidationError(series.path.string() + ":" + std::to_string(line) +
                                  ": months for '" + id + "' must be strictly increasing");
        }
    }

    CsvTable ind = read_csv(dir / "indicator.csv");
    int ic_m = ind.require_column("month");
    int ic_v = ind.require_column("value");
    for (std::size_t i = 0; i < ind.rows.size(); ++i) {
        const auto& row = ind.rows[i];
        std::size_t line = ind.line_numbers[i];
        Month m = parse_month_cell(ind.path, line, row[ic_m]);
        double v = parse_value(ind.path, line, row[ic_v]);
        if (v != 0.0 && v != 1.0)
            throw ValidationError(ind.path.string() + ":" + std::to_string(line) +
                                  ": indicator value must be 0 or 1, got " + row[ic_v]);
        if (m >= as_of)
            throw ValidationError(ind.path.string() + ":" + std::to_string(line) +
                                  ": indicator for " + m.str() + " is not available at as-of " +
                                  as_of.str());
        try {
            snap.indicator.append(m, v);
        } catch (const std::invalid_argument&) {
            throw ValidationError(ind.path.string() + ":" + std::to_string(line) +
                                  ": indicator months must be strictly increasing");
        }
    }

    return snap;
}

void write_vintage(const VintageSnapshot& snap, const std::filesystem::path& root) {
    std::filesystem::path dir = root / snap.as_of.str();
    std::filesystem::create_directories(dir);

    CsvWriter meta({"id", "category", "transform", "frequency"});
    for (const auto& vm : snap.metas)
        meta.add_row({vm.id, to_string(vm.category), to_string(vm.transform),
                      to_string(vm.native_frequency)});
    meta.write(dir / "meta.csv");

    CsvWriter series({"variable_id", "month", "value"});
    for (const auto& vm : snap.metas) {
        auto it = snap.series.find(vm.id);
        if (it == snap.series.end()) continue;
        const MonthlySeries& s = it->second;
        for (std::size_t i = 0; i < s.size(); ++i)
            series.add_row({vm.id, s.month(i).str(), format_value(s.value(i))});
    }
    series.write(dir / "series.csv");

    CsvWriter ind({"month", "value"});
    for (std::size_t i = 0; i < snap.indicator.size(); ++i)
        ind.add_row({snap.indicator.month(i).str(), format_value(snap.indicator.value(i))});
    ind.write(dir / "indicator.csv");
}

MonthlySeries build_indicator_vintage(const AnnouncementLog& log, Month as_of, Month start) {
    log.validate();
    if (start > as_of)
        throw ValidationError("indicator start " + start.str() + " is after as-of " + as_of.str());

    // Announcements made during month A become visible to a forecaster acting
    // on the first day of any later month, i.e. when A < as_of.
    std::vector<Announcement> visible;
    for (const auto& e : log.entries)
        if (e.announced < as_of) visible.push_back(e);

    MonthlySeries out;
    for (Month m = start; m < as_of; ++m) {
        // State at m: 1 iff the latest announced turning point strictly before
        // m is a peak (recession runs from the month after the peak through
        // the trough, then carries forward until the next announcement).
        const Announcement* latest = nullptr;
        for (const auto& e : visible)
            if (e.turning_point < m) latest = &e;
        double v = (latest && latest->type == TurnType::peak) ? 1.0 : 0.0;
        out.append(m, v);
    }
    return out;
}

AnnouncementLog load_announcements(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    int c_m = t.require_column("month");
    int c_t = t.require_column("type");
    int c_a = t.require_column("announced");
    AnnouncementLog log;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        std::size_t line = t.line_numbers[i];
        Announcement a;
        a.turning_point = parse_month_cell(t.path, line, row[c_m]);
        try {
            a.type = parse_turn_type(row[c_t]);
        } catch (const ValidationError& e) {
            throw ParseError(t.path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
        a.announced = parse_month_cell(t.path, line, row[c_a]);
        log.entries.push_back(a);
    }
    log.validate();
    return log;
}

void write_announcements(const AnnouncementLog& log, const std::filesystem::path& path) {
    CsvWriter w({"month", "type", "announced"});
    for (const auto& e : log.entries)
        w.add_row({e.turning_point.str(), to_string(e.type), e.announced.str()});
    w.write(path);
}

void write_forecasts(const std::vector<ForecastRecord>& records, const std::filesystem::path& path) {
    CsvWriter w({"as_of", "target", "horizon", "model", "probability", "threshold", "call"});
    for (const auto& r : records)
        w.add_row({r.as_of.str(), r.target.str(), std::to_string(r.horizon), r.model,
                   format_value(r.probability), format_value(r.threshold), std::to_string(r.call)});
    w.write(path);
}

std::vector<ForecastRecord> load_forecasts(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    int c_ao = t.require_column("as_of");
    int c_tg = t.require_column("target");
    int c_h = t.require_column("horizon");
    int c_mo = t.require_column("model");
    int c_p = t.require_column("probability");
    int c_th = t.require_column("threshold");
    int c_c = t.require_column("call");
    std::vector<ForecastRecord> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        std::size_t line = t.line_numbers[i];
        ForecastRecord r;
        r.as_of = parse_month_cell(t.path, line, row[c_ao]);
        r.target = parse_month_cell(t.path, line, row[c_tg]);
        r.horizon = static_cast<int>(parse_count(t.path, line, row[c_h]));
        r.model = row[c_mo];
        r.probability = parse_value(t.path, line, row[c_p]);
        r.threshold = parse_value(t.path, line, row[c_th]);
        r.call = static_cast<int>(parse_count(t.path, line, row[c_c]));
        r.coef_as_of = r.as_of;
        out.push_back(std::move(r));
    }
    return out;
}

void write_coefficients(const std::vector<CoefficientSnapshot>& snaps, const std::filesystem::path& path) {
    CsvWriter w({"as_of", "variable", "lag", "value"});
    for (const auto& s : snaps)
        for (std::size_t i = 0; i < s.terms.size(); ++i)
            w.add_row({s.as_of.str(), s.terms[i].variable, std::to_string(s.terms[i].lag),
                       format_value(s.values[i])});
    w.write(path);
}

void write_inclusion(const InclusionTable& table, const std::filesystem::path& path) {
    CsvWriter w({"variable", "lag", "count", "total", "percentage", "flagged"});
    for (const auto& r : table.rows)
        w.add_row({r.variable, std::to_string(r.lag), std::to_string(r.count),
                   std::to_string(table.total), format_value(r.percentage),
                   r.flagged ? "1" : "0"});
    w.write(path);
}

void write_metrics_table(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
    CsvWriter w({"model", "horizon", "n", "auroc", "auprc", "bacc", "mcc", "f1",
                 "sensitivity", "specificity", "precision"});
    for (const auto& r : rows)
        w.add_row({r.model, std::to_string(r.horizon), std::to_string(r.n),
                   format_value(r.auroc), format_value(r.auprc), format_value(r.balanced_accuracy),
                   format_value(r.mcc), format_value(r.f1), format_value(r.sensitivity),
                   format_value(r.specificity), format_value(r.precision)});
    w.write(path);
}

void write_curve(const CurvePoints& curve, const std::filesystem::path& path) {
    CsvWriter w({"cutpoint", "x", "y"});
    for (const auto& pt : curve.points)
        w.add_row({format_value(pt.cutpoint), format_value(pt.x), format_value(pt.y)});
    w.write(path);
}

void write_month_series(const MonthlySeries& s, const std::filesystem::path& path,
                        const std::string& value_column) {
    CsvWriter w({"month", value_column});
    for (std::size_t i = 0; i < s.size(); ++i)
        w.add_row({s.month(i).str(), format_value(s.value(i))});
    w.write(path);
}

MonthlySeries load_month_series(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    int c_m = t.require_column("month");
    int c_v = t.column("value");
    if (c_v < 0) {
        if (t.header.size() != 2)
            throw ParseError(path.string() + ": expected a (month, value) table");
        c_v = c_m == 0 ? 1 : 0;
    }
    MonthlySeries out;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        out.append(parse_month_cell(t.path, t.line_numbers[i], t.rows[i][c_m]),
                   parse_value(t.path, t.line_numbers[i], t.rows[i][c_v]));
    return out;
}

} // namespace recast
