#include "recast/dating.hpp"

#include "recast/csv.hpp"
#include "recast/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace recast {

namespace {

// Cyclic Jacobi eigendecomposition for small symmetric matrices.
void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = a.rows;
    eigenvectors = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigenvectors.at(i, i) = 1.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-24) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = eigenvectors.at(k, p), vkq = eigenvectors.at(k, q);
                    eigenvectors.at(k, p) = c * vkp - s * vkq;
                    eigenvectors.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a.at(i, i);
}

struct IndexedTurn {
    std::size_t idx;
    TurnType type;
    double value;
};

bool better_same_type(const IndexedTurn& candidate, const IndexedTurn& incumbent) {
    if (candidate.type == TurnType::peak) return candidate.value > incumbent.value;
    return candidate.value < incumbent.value;
}

void enforce_alternation(std::vector<IndexedTurn>& pts) {
    std::vector<IndexedTurn> out;
    for (const auto& tp : pts) {
        if (out.empty() || out.back().type != tp.type)
            out.push_back(tp);
        else if (better_same_type(tp, out.back()))
            out.back() = tp;   // strict comparison keeps the earlier point on ties
    }
    pts = std::move(out);
}

} // namespace

PrincipalComponent first_principal_component(const Matrix& standardized) {
    const std::size_t n = standardized.rows, K = standardized.cols;
    if (K < 2 || n < 3)
        throw ValidationError("PCA needs at least 2 columns and 3 rows");

    std::vector<double> mean(K, 0.0), sd(K, 0.0);
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t r = 0; r < n; ++r) mean[c] += standardized.at(r, c);
        mean[c] /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) {
            double d = standardized.at(r, c) - mean[c];
            sd[c] += d * d;
        }
        sd[c] = std::sqrt(sd[c] / static_cast<double>(n));
        if (sd[c] <= 1e-12 * std::max(1.0, std::abs(mean[c])))
            throw ValidationError("PCA input column " + std::to_string(c) + " is constant");
    }

    Matrix corr(K, K);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = i; j < K; ++j) {
            double cov = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                cov += (standardized.at(r, i) - mean[i]) * (standardized.at(r, j) - mean[j]);
            cov /= static_cast<double>(n);
            double c = cov / (sd[i] * sd[j]);
            corr.at(i, j) = c;
            corr.at(j, i) = c;
        }
    }

    std::vector<double> eigenvalues;
    Matrix vectors;
    jacobi_eigen(corr, eigenvalues, vectors);

    std::size_t top = 0;
    for (std::size_t i = 1; i < K; ++i)
        if (eigenvalues[i] > eigenvalues[top]) top = i;

    PrincipalComponent pc;
    pc.loadings.resize(K);
    for (std::size_t i = 0; i < K; ++i) pc.loadings[i] = vectors.at(i, top);

    // Sign convention: non-negative loading on the first (or first non-tiny)
    // input column.
    double pivot = 0.0;
    for (double l : pc.loadings) {
        if (std::abs(l) > 1e-12) { pivot = l; break; }
    }
    if (pivot < 0.0)
        for (double& l : pc.loadings) l = -l;

    double trace = 0.0;
    for (double e : eigenvalues) trace += std::max(e, 0.0);
    pc.explained_share = trace > 0.0 ? std::max(eigenvalues[top], 0.0) / trace : 0.0;

    pc.scores.resize(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < K; ++c) s += standardized.at(r, c) * pc.loadings[c];
        pc.scores[r] = s;
    }
    return pc;
}

TurningPointSet bry_boschan(const MonthlySeries& series, const BryBoschanParams& params) {
    const std::size_t n = series.size();
    if (static_cast<int>(n) <= params.min_cycle)
        throw ValidationError("series too short for turning-point dating: " + std::to_string(n) +
                              " <= min cycle " + std::to_string(params.min_cycle));
    if (!series.contiguous())
        throw ValidationError("turning-point dating needs a contiguous monthly series");

    const auto& v = series.values();
    const int w = params.window;

    // Local extrema within +/- window months; equal values resolve toward the
    // earlier month (strict against earlier neighbours, weak against later).
    std::vector<IndexedTurn> pts;
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t lo = t >= static_cast<std::size_t>(w) ? t - w : 0;
        std::size_t hi = std::min(n - 1, t + static_cast<std::size_t>(w));
        bool peak = true, trough = true;
        for (std::size_t s = lo; s <= hi; ++s) {
            if (s == t) continue;
            if (s < t) {
                if (v[s] >= v[t]) peak = false;
                if (v[s] <= v[t]) trough = false;
            } else {
                if (v[s] > v[t]) peak = false;
                if (v[s] < v[t]) trough = false;
            }
            if (!peak && !trough) break;
        }
        if (peak) pts.push_back({t, TurnType::peak, v[t]});
        else if (trough) pts.push_back({t, TurnType::trough, v[t]});
    }

    // Alternation, then minimum phase and cycle lengths, re-enforcing
    // alternation after every drop.
    bool changed = true;
    while (changed) {
        enforce_alternation(pts);
        changed = false;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (static_cast<int>(pts[i + 1].idx - pts[i].idx) < params.min_phase) {
                pts.erase(pts.begin() + i, pts.begin() + i + 2);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
            if (static_cast<int>(pts[i + 2].idx - pts[i].idx) < params.min_cycle) {
                std::size_t drop = better_same_type(pts[i + 2], pts[i]) ? i : i + 2;
                pts.erase(pts.begin() + drop);
                changed = true;
                break;
            }
        }
    }

    // Turning points too close to either end are not yet confirmable.
    std::erase_if(pts, [&](const IndexedTurn& tp) {
        return tp.idx < static_cast<std::size_t>(w) || tp.idx + static_cast<std::size_t>(w) > n - 1;
    });

    TurningPointSet out;
    for (const auto& tp : pts)
        out.points.push_back({series.month(tp.idx), tp.type});
    return out;
}

MonthlySeries to_indicator(const TurningPointSet& points, Month from, Month to) {
    for (std::size_t i = 1; i < points.points.size(); ++i) {
        if (points.points[i - 1].month >= points.points[i].month ||
            points.points[i - 1].type == points.points[i].type)
            throw ValidationError("turning points must be sorted and alternating");
    }
    MonthlySeries out;
    for (Month m = from; m <= to; ++m) {
        const TurningPoint* latest = nullptr;
        for (const auto& tp : points.points)
            if (tp.month < m) latest = &tp;
        out.append(m, (latest && latest->type == TurnType::peak) ? 1.0 : 0.0);
    }
    return out;
}

void write_turning_points(const TurningPointSet& points, const std::filesystem::path& path) {
    CsvWriter w({"month", "type"});
    for (const auto& tp : points.points)
        w.add_row({tp.month.str(), to_string(tp.type)});
    w.write(path);
}

DatingRun run_dating(const VintageSnapshot& snap, const std::vector<std::string>& coincident,
                     const BryBoschanParams& params) {
    DatingRun run;
    run.variables = coincident;
    if (run.variables.empty()) {
        for (const auto& meta : snap.metas) {
            bool coincident_category = meta.category == Category::output ||
                                       meta.category == Category::income ||
                                       meta.category == Category::labor;
            if (coincident_category && meta.native_frequency == Frequency::monthly)
                run.variables.push_back(meta.id);
        }
    }
    if (run.variables.size() < 2)
        throw ValidationError("dating needs at least 2 coincident variables");

    // Common month span covered by every selected series.
    Month from = snap.series.at(run.variables.front()).first_month();
    Month to = snap.series.at(run.variables.front()).last_month();
    for (const auto& id : run.variables) {
        auto it = snap.series.find(id);
        if (it == snap.series.end())
            throw ValidationError("coincident variable '" + id + "' not in vintage");
        from = std::max(from, it->second.first_month());
        to = std::min(to, it->second.last_month());
    }
    if (to - from + 1 < 3)
        throw ValidationError("too few overlapping months for dating");

    const std::size_t rows = static_cast<std::size_t>(to - from) + 1;
    Matrix levels(rows, run.variables.size());
    for (std::size_t c = 0; c < run.variables.size(); ++c) {
        const MonthlySeries& s = snap.series.at(run.variables[c]);
        for (std::size_t r = 0; r < rows; ++r) {
            auto v = s.at(from + static_cast<int>(r));
            if (!v)
                throw ValidationError("coincident variable '" + run.variables[c] +
                                      "' has a gap at " + (from + static_cast<int>(r)).str());
            levels.at(r, c) = *v;
        }
    }
    Standardizer st = fit_standardizer(levels, 0);
    st.apply(levels, 0);

    run.component = first_principal_component(levels);
    for (std::size_t r = 0; r < rows; ++r)
        run.factor.append(from + static_cast<int>(r), run.component.scores[r]);
    run.points = bry_boschan(run.factor, params);

    Month span_from = snap.indicator.empty() ? from : snap.indicator.first_month();
    Month span_to = snap.indicator.empty() ? to : snap.indicator.last_month();
    run.indicator = to_indicator(run.points, span_from, span_to);
    return run;
}

} // namespace recast
