#pragma once

#include "recast/data_io.hpp"
#include "recast/matrix.hpp"
#include "recast/month.hpp"

#include <optional>
#include <string>
#include <vector>

namespace recast {

// Stationarity transform from the variable metadata. Every transform except
// "none" consumes the first observation.
MonthlySeries transform_series(const MonthlySeries& s, Transform t);

// Mean-aggregates dated (daily/weekly) observations into calendar months.
// Months without observations are simply absent from the result.
MonthlySeries aggregate_to_monthly(const std::vector<DatedValue>& observations);

// Natural cubic spline through all quarterly knots available strictly before
// as_of, evaluated at every month from the first through the last knot. No
// extrapolation past the last knot.
MonthlySeries spline_interpolate_quarterly(const MonthlySeries& quarterly, Month as_of);

// Natural cubic spline machinery on plain coordinates (shared with tests).
struct CubicSpline {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> second_derivative;   // natural: zero at both ends

    double evaluate(double at) const;
};

CubicSpline fit_natural_spline(const std::vector<double>& x, const std::vector<double>& y);

// k-nearest-neighbour imputation over a row-major matrix with NaN gaps.
// Distances are Euclidean over mutually observed, column-standardized cells;
// ties break toward the earlier row month. Observed cells are never altered.
Matrix knn_impute(const Matrix& with_gaps, int k, const std::vector<Month>& row_months,
                  const std::vector<std::string>& column_names = {});

struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;   // population (divide-by-N) convention

    void apply(Matrix& m, std::size_t first_col) const;
    void apply_row(std::vector<double>& row, std::size_t first_col) const;
};

// Statistics come from the given rows only, so expanding-window callers never
// leak future information into the scaling.
Standardizer fit_standardizer(const Matrix& rows, std::size_t first_col);

struct LagStructure {
    int horizon = 0;
    std::vector<int> lags;   // positive offsets relative to the forecast origin t
};

// Horizon-specific lag sets; minimum lag 2 reflects the publication delay
// between the month data refers to and the month a forecast is made.
LagStructure lag_spec(int horizon);

struct DesignColumn {
    std::string variable;
    int lag = 0;   // origin-relative; target-relative offset is lag + horizon
};

struct DesignMatrix {
    int horizon = 0;
    std::vector<Month> target_months;
    std::vector<DesignColumn> columns;   // x column j+1 corresponds to columns[j]
    Matrix x;                            // column 0 is the intercept (all ones)
    std::vector<double> labels;
    std::vector<double> oos_row;         // standardized, same layout as a row of x
    std::vector<double> oos_row_raw;     // imputed but unstandardized (for frozen models)
    Month oos_target;
    Standardizer standardizer;
};

struct DesignOptions {
    int knn_k = 5;
};

// Full pipeline: transform, quarterly-to-monthly spline, lag expansion,
// imputation, standardization, plus the single out-of-sample feature row for
// the forecast target as_of + horizon.
DesignMatrix build_design(const VintageSnapshot& snap, int horizon,
                          const DesignOptions& opts = {});

void write_design(const DesignMatrix& d, const std::filesystem::path& path);

} // namespace recast
