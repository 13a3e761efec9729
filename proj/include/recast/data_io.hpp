#pragma once

#include "recast/errors.hpp"
#include "recast/metrics.hpp"
#include "recast/month.hpp"
#include "recast/records.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace recast {

enum class Category { output, income, prices, labor, housing, money_credit, financial };
enum class Transform { log_growth, first_difference, percent_change, none };
enum class Frequency { daily, monthly, quarterly };

Category parse_category(const std::string& s);
Transform parse_transform(const std::string& s);
Frequency parse_frequency(const std::string& s);
std::string to_string(Category c);
std::string to_string(Transform t);
std::string to_string(Frequency f);

struct VariableMeta {
    std::string id;
    Category category = Category::output;
    Transform transform = Transform::none;
    Frequency native_frequency = Frequency::monthly;
};

// Everything known on the first day of as_of: per-variable history and the
// recession indicator exactly as published by then. Immutable once loaded.
struct VintageSnapshot {
    Month as_of;
    std::vector<VariableMeta> metas;
    std::map<std::string, MonthlySeries> series;
    MonthlySeries indicator;

    const VariableMeta& meta(const std::string& id) const;

    // Copy with the indicator replaced; series data is shared by value.
    VintageSnapshot with_indicator(MonthlySeries ind) const;
};

enum class TurnType { peak, trough };
std::string to_string(TurnType t);
TurnType parse_turn_type(const std::string& s);

struct Announcement {
    TurnType type = TurnType::peak;
    Month turning_point;
    Month announced;
};

// Official turning points with their announcement months; entries sorted by
// turning-point month must alternate peak/trough.
struct AnnouncementLog {
    std::vector<Announcement> entries;

    void validate() const;   // ordering + alternation
};

// Vintage directory layout: <root>/<YYYY-MM>/{meta.csv,series.csv,indicator.csv}.
VintageSnapshot load_vintage(const std::filesystem::path& root, Month as_of);
void write_vintage(const VintageSnapshot& snap, const std::filesystem::path& root);

// Recession-indicator history exactly as a forecaster standing at as_of would
// see it: announcements are visible only once their announcement month is
// strictly before as_of, and the state carries forward until the next one.
MonthlySeries build_indicator_vintage(const AnnouncementLog& log, Month as_of, Month start);

AnnouncementLog load_announcements(const std::filesystem::path& path);
void write_announcements(const AnnouncementLog& log, const std::filesystem::path& path);

void write_forecasts(const std::vector<ForecastRecord>& records, const std::filesystem::path& path);
std::vector<ForecastRecord> load_forecasts(const std::filesystem::path& path);

void write_coefficients(const std::vector<CoefficientSnapshot>& snaps, const std::filesystem::path& path);
void write_inclusion(const InclusionTable& table, const std::filesystem::path& path);
void write_metrics_table(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
void write_curve(const CurvePoints& curve, const std::filesystem::path& path);

void write_month_series(const MonthlySeries& s, const std::filesystem::path& path,
                        const std::string& value_column = "value");
MonthlySeries load_month_series(const std::filesystem::path& path);

} // namespace recast
