#include "recast/preprocess.hpp"

#include "recast/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace recast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool observed(double v) { return !std::isnan(v); }

} // namespace

MonthlySeries transform_series(const MonthlySeries& s, Transform t) {
    if (s.size() < 2 && t != Transform::none)
        throw ValidationError("transform needs at least 2 observations, got " +
                              std::to_string(s.size()));
    MonthlySeries out;
    switch (t) {
        case Transform::none:
            return s;
        case Transform::log_growth:
            for (std::size_t i = 0; i < s.size(); ++i)
                if (s.value(i) <= 0.0)
                    throw ValidationError("log-growth requires strictly positive values; got " +
                                          format_value(s.value(i)) + " at " + s.month(i).str());
            for (std::size_t i = 1; i < s.size(); ++i)
                out.append(s.month(i), std::log(s.value(i)) - std::log(s.value(i - 1)));
            return out;
        case Transform::first_difference:
            for (std::size_t i = 1; i < s.size(); ++i)
                out.append(s.month(i), s.value(i) - s.value(i - 1));
            return out;
        case Transform::percent_change:
            for (std::size_t i = 1; i < s.size(); ++i) {
                if (s.value(i - 1) == 0.0)
                    throw ValidationError("percent-change denominator is zero at " +
                                          s.month(i - 1).str());
                out.append(s.month(i), (s.value(i) - s.value(i - 1)) / s.value(i - 1));
            }
            return out;
    }
    throw std::logic_error("unreachable transform");
}

MonthlySeries aggregate_to_monthly(const std::vector<DatedValue>& observations) {
    std::vector<DatedValue> sorted = observations;
    std::stable_sort(sorted.begin(), sorted.end(), [](const DatedValue& a, const DatedValue& b) {
        if (a.date.year != b.date.year) return a.date.year < b.date.year;
        if (a.date.month != b.date.month) return a.date.month < b.date.month;
        return a.date.day < b.date.day;
    });
    MonthlySeries out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        Month m = sorted[i].date.to_month();
        double sum = 0.0;
        std::size_t n = 0;
        while (i < sorted.size() && sorted[i].date.to_month() == m) {
            sum += sorted[i].value;
            ++n;
            ++i;
        }
        out.append(m, sum / static_cast<double>(n));
    }
    return out;
}

CubicSpline fit_natural_spline(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw ValidationError("spline needs at least 2 knots");
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] <= x[i - 1])
            throw ValidationError("spline knots must be strictly increasing");

    CubicSpline spline;
    spline.x = x;
    spline.y = y;
    spline.second_derivative.assign(n, 0.0);
    if (n == 2) return spline;

    // Tridiagonal system for the interior second derivatives; natural
    // boundary pins the first and last to zero.
    const std::size_t m = n - 2;
    std::vector<double> sub(m), diag(m), sup(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        double h0 = x[i + 1] - x[i];
        double h1 = x[i + 2] - x[i + 1];
        sub[i] = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        sup[i] = h1 / 6.0;
        rhs[i] = (y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0;
    }
    // Thomas algorithm.
    for (std::size_t i = 1; i < m; ++i) {
        double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    spline.second_derivative[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;)
        spline.second_derivative[i + 1] = (rhs[i] - sup[i] * spline.second_derivative[i + 2]) / diag[i];
    return spline;
}

double CubicSpline::evaluate(double at) const {
    const std::size_t n = x.size();
    if (at < x.front() || at > x.back())
        throw ValidationError("spline evaluation outside knot range");
    std::size_t hi = std::upper_bound(x.begin(), x.end(), at) - x.begin();
    if (hi == n) hi = n - 1;
    if (hi == 0) hi = 1;
    std::size_t lo = hi - 1;
    double h = x[hi] - x[lo];
    double a = (x[hi] - at) / h;
    double b = 1.0 - a;
    return a * y[lo] + b * y[hi] +
           ((a * a * a - a) * second_derivative[lo] + (b * b * b - b) * second_derivative[hi]) *
               (h * h) / 6.0;
}

MonthlySeries spline_interpolate_quarterly(const MonthlySeries& quarterly, Month as_of) {
    std::vector<double> xs, ys;
    Month first;
    Month last;
    for (std::size_t i = 0; i < quarterly.size(); ++i) {
        if (quarterly.month(i) >= as_of) break;
        if (xs.empty()) first = quarterly.month(i);
        last = quarterly.month(i);
        xs.push_back(static_cast<double>(quarterly.month(i).index()));
        ys.push_back(quarterly.value(i));
    }
    if (xs.size() < 2)
        throw ValidationError("need at least 2 quarterly knots before " + as_of.str() + ", got " +
                              std::to_string(xs.size()));

    CubicSpline spline = fit_natural_spline(xs, ys);
    MonthlySeries out;
    for (Month m = first; m <= last; ++m)
        out.append(m, spline.evaluate(static_cast<double>(m.index())));
    return out;
}

Matrix knn_impute(const Matrix& with_gaps, int k, const std::vector<Month>& row_months,
                  const std::vector<std::string>& column_names) {
    if (k < 1)
        throw ValidationError("knn imputation needs k >= 1");
    if (row_months.size() != with_gaps.rows)
        throw std::logic_error("row month count mismatch");

    const std::size_t R = with_gaps.rows, C = with_gaps.cols;
    for (std::size_t r = 0; r < R; ++r) {
        bool any = false;
        for (std::size_t c = 0; c < C; ++c) any = any || observed(with_gaps.at(r, c));
        if (!any)
            throw ValidationError("row " + row_months[r].str() + " has no observed values");
    }

    // Column statistics over observed cells, used only to put the distance
    // computation on a common scale.
    std::vector<double> mean(C, 0.0), sd(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < R; ++r)
            if (observed(with_gaps.at(r, c))) { sum += with_gaps.at(r, c); ++n; }
        if (n == 0) {
            std::string name = c < column_names.size() ? column_names[c] : std::to_string(c);
            throw ValidationError("column '" + name + "' has no observed values; cannot impute");
        }
        mean[c] = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < R; ++r)
            if (observed(with_gaps.at(r, c))) {
                double d = with_gaps.at(r, c) - mean[c];
                ss += d * d;
            }
        sd[c] = std::sqrt(ss / static_cast<double>(n));
    }
    auto zval = [&](std::size_t r, std::size_t c) {
        double v = with_gaps.at(r, c);
        return sd[c] > 0.0 ? (v - mean[c]) / sd[c] : 0.0;
    };

    Matrix out = with_gaps;
    for (std::size_t r = 0; r < R; ++r) {
        bool has_gap = false;
        for (std::size_t c = 0; c < C; ++c) has_gap = has_gap || !observed(with_gaps.at(r, c));
        if (!has_gap) continue;

        // Distance from row r to every other row over mutually observed columns.
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(R - 1);
        for (std::size_t s = 0; s < R; ++s) {
            if (s == r) continue;
            double d2 = 0.0;
            std::size_t shared = 0;
            for (std::size_t c = 0; c < C; ++c)
                if (observed(with_gaps.at(r, c)) && observed(with_gaps.at(s, c))) {
                    double d = zval(r, c) - zval(s, c);
                    d2 += d * d;
                    ++shared;
                }
            double d = shared > 0 ? std::sqrt(d2) : std::numeric_limits<double>::infinity();
            dist.emplace_back(d, s);
        }
        std::sort(dist.begin(), dist.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return row_months[a.second] < row_months[b.second];
        });

        for (std::size_t c = 0; c < C; ++c) {
            if (observed(with_gaps.at(r, c))) continue;
            double sum = 0.0;
            int used = 0;
            for (const auto& [d, s] : dist) {
                if (!observed(with_gaps.at(s, c))) continue;
                sum += with_gaps.at(s, c);
                if (++used == k) break;
            }
            // The upfront column check guarantees at least one donor.
            out.at(r, c) = sum / static_cast<double>(used);
        }
    }
    return out;
}

Standardizer fit_standardizer(const Matrix& rows, std::size_t first_col) {
    if (rows.rows == 0)
        throw ValidationError("cannot fit standardizer on empty input");
    Standardizer st;
    for (std::size_t c = first_col; c < rows.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < rows.rows; ++r) sum += rows.at(r, c);
        double mean = sum / static_cast<double>(rows.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < rows.rows; ++r) {
            double d = rows.at(r, c) - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / static_cast<double>(rows.rows));
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean)))
            throw ValidationError("degenerate column " + std::to_string(c) +
                                  ": zero variance over training rows");
        st.means.push_back(mean);
        st.sds.push_back(sd);
    }
    return st;
}

void Standardizer::apply(Matrix& m, std::size_t first_col) const {
    for (std::size_t c = first_col; c < m.cols; ++c)
        for (std::size_t r = 0; r < m.rows; ++r)
            m.at(r, c) = (m.at(r, c) - means[c - first_col]) / sds[c - first_col];
}

void Standardizer::apply_row(std::vector<double>& row, std::size_t first_col) const {
    for (std::size_t c = first_col; c < row.size(); ++c)
        row[c] = (row[c] - means[c - first_col]) / sds[c - first_col];
}

LagStructure lag_spec(int horizon) {
    LagStructure ls;
    ls.horizon = horizon;
    switch (horizon) {
        case 0: ls.lags = {2, 3, 6, 12}; break;
        case 1: ls.lags = {2, 5, 11}; break;
        case 3: ls.lags = {2, 3, 9}; break;
        case 6: ls.lags = {2, 6}; break;
        case 12: ls.lags = {2}; break;
        default:
            throw ValidationError("unsupported horizon " + std::to_string(horizon) +
                                  "; expected one of 0,1,3,6,12");
    }
    return ls;
}

DesignMatrix build_design(const VintageSnapshot& snap, int horizon, const DesignOptions& opts) {
    LagStructure ls = lag_spec(horizon);

    // Transformed monthly series per variable; quarterly series become monthly
    // via the natural spline over all knots published before as_of.
    std::map<std::string, MonthlySeries> monthly;
    for (const auto& meta : snap.metas) {
        auto it = snap.series.find(meta.id);
        if (it == snap.series.end())
            throw ValidationError("vintage " + snap.as_of.str() + " has no data for '" + meta.id + "'");
        MonthlySeries ts = transform_series(it->second, meta.transform);
        if (meta.native_frequency == Frequency::quarterly)
            ts = spline_interpolate_quarterly(ts, snap.as_of);
        monthly[meta.id] = std::move(ts);
    }
    if (snap.indicator.empty())
        throw ValidationError("vintage " + snap.as_of.str() + " has an empty indicator series");

    DesignMatrix d;
    d.horizon = horizon;
    for (const auto& meta : snap.metas)
        for (int lag : ls.lags)
            d.columns.push_back({meta.id, lag});

    // A target month is usable once every feature month lies within the
    // transformed history; the end of the window is the last labelled month.
    Month row_start = snap.indicator.first_month();
    for (const auto& col : d.columns) {
        Month earliest = monthly[col.variable].first_month() + (col.lag + horizon);
        row_start = std::max(row_start, earliest);
    }
    Month row_end = snap.indicator.last_month();
    if (row_start > row_end)
        throw ValidationError("no usable design rows for vintage " + snap.as_of.str() +
                              " at horizon " + std::to_string(horizon));

    const std::size_t n_rows = static_cast<std::size_t>(row_end - row_start) + 1;
    const std::size_t n_cols = 1 + d.columns.size();
    Matrix raw(n_rows + 1, n_cols, kNaN);   // final row is the out-of-sample row
    std::vector<Month> all_months;
    for (std::size_t r = 0; r < n_rows; ++r) {
        Month target = row_start + static_cast<int>(r);
        d.target_months.push_back(target);
        all_months.push_back(target);
        raw.at(r, 0) = 1.0;
        auto label = snap.indicator.at(target);
        if (!label)
            throw ValidationError("missing indicator value for " + target.str());
        d.labels.push_back(*label);
        for (std::size_t c = 0; c < d.columns.size(); ++c) {
            Month fm = target - (d.columns[c].lag + horizon);
            auto v = monthly[d.columns[c].variable].at(fm);
            if (v) raw.at(r, c + 1) = *v;
        }
    }
    d.oos_target = snap.as_of + horizon;
    all_months.push_back(d.oos_target);
    raw.at(n_rows, 0) = 1.0;
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
        Month fm = d.oos_target - (d.columns[c].lag + horizon);
        auto v = monthly[d.columns[c].variable].at(fm);
        if (v) raw.at(n_rows, c + 1) = *v;
    }

    std::vector<std::string> col_names{"intercept"};
    for (const auto& col : d.columns)
        col_names.push_back(col.variable + "_l" + std::to_string(col.lag));
    Matrix filled = knn_impute(raw, opts.knn_k, all_months, col_names);

    Matrix train(n_rows, n_cols);
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_cols; ++c) train.at(r, c) = filled.at(r, c);
    try {
        d.standardizer = fit_standardizer(train, 1);
    } catch (const ValidationError& e) {
        throw ValidationError("vintage " + snap.as_of.str() + ": " + e.what());
    }
    d.standardizer.apply(train, 1);
    d.x = std::move(train);

    d.oos_row_raw.assign(n_cols, 0.0);
    for (std::size_t c = 0; c < n_cols; ++c) d.oos_row_raw[c] = filled.at(n_rows, c);
    d.oos_row = d.oos_row_raw;
    d.standardizer.apply_row(d.oos_row, 1);
    return d;
}

void write_design(const DesignMatrix& d, const std::filesystem::path& path) {
    std::vector<std::string> header{"target_month", "label"};
    for (const auto& col : d.columns)
        header.push_back(col.variable + "_l" + std::to_string(col.lag));
    CsvWriter w(std::move(header));
    for (std::size_t r = 0; r < d.x.rows; ++r) {
        std::vector<std::string> row{d.target_months[r].str(), format_value(d.labels[r])};
        for (std::size_t c = 1; c < d.x.cols; ++c) row.push_back(format_value(d.x.at(r, c)));
        w.add_row(std::move(row));
    }
    w.write(path);
}

} // namespace recast
