#pragma once

#include "recast/data_io.hpp"
#include "recast/matrix.hpp"
#include "recast/month.hpp"

#include <vector>

namespace recast {

struct PrincipalComponent {
    std::vector<double> scores;     // one per input row
    std::vector<double> loadings;   // unit norm; first loading non-negative
    double explained_share = 0.0;
};

// Leading eigenvector of the sample correlation matrix of already-standardized
// columns, via cyclic Jacobi rotations. The sign convention (non-negative
// loading on the first column) pins reproducibility.
PrincipalComponent first_principal_component(const Matrix& standardized);

struct BryBoschanParams {
    int window = 5;       // local-extremum neighbourhood, months
    int min_phase = 5;    // peak-to-trough (or back) minimum, months
    int min_cycle = 15;   // same-type point spacing minimum, months
};

struct TurningPoint {
    Month month;
    TurnType type = TurnType::peak;
};

struct TurningPointSet {
    std::vector<TurningPoint> points;   // sorted, strictly alternating
};

// Rule-based turning-point detection: local extrema within +/- window months,
// alternation enforced by keeping the higher peak / lower trough, phases and
// cycles shorter than the minima dropped, end-of-series points trimmed.
// Equal extrema break toward the earlier month.
TurningPointSet bry_boschan(const MonthlySeries& series, const BryBoschanParams& params = {});

// 1 on (peak, trough] spans, 0 elsewhere; a trailing peak with no trough marks
// 1 from the month after it through the end of the range.
MonthlySeries to_indicator(const TurningPointSet& points, Month from, Month to);

void write_turning_points(const TurningPointSet& points, const std::filesystem::path& path);

// Full alternative-indicator pipeline applied to one vintage: standardized
// levels of the coincident monthly series -> first principal component ->
// turning-point dating -> binary indicator over the vintage's label span.
struct DatingRun {
    std::vector<std::string> variables;
    PrincipalComponent component;
    MonthlySeries factor;
    TurningPointSet points;
    MonthlySeries indicator;
};

// Empty `coincident` selects every monthly variable in the output, income or
// labor categories.
DatingRun run_dating(const VintageSnapshot& snap, const std::vector<std::string>& coincident = {},
                     const BryBoschanParams& params = {});

} // namespace recast
