#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace recast {

// Calendar month, stored as a flat index (year * 12 + month - 1) so that
// arithmetic and ordering are plain integer operations.
class Month {
public:
    Month() = default;
    Month(int year, int month);

    static Month parse(const std::string& text);   // "YYYY-MM"
    static std::optional<Month> try_parse(const std::string& text);

    int year() const { return index_ >= 0 ? index_ / 12 : (index_ - 11) / 12; }
    int month() const { int m = index_ % 12; return (m < 0 ? m + 12 : m) + 1; }
    int index() const { return index_; }

    std::string str() const;

    Month operator+(int months) const { return Month::from_index(index_ + months); }
    Month operator-(int months) const { return Month::from_index(index_ - months); }
    int operator-(Month other) const { return index_ - other.index_; }
    Month& operator++() { ++index_; return *this; }

    auto operator<=>(const Month&) const = default;

    static Month from_index(int idx) { Month m; m.index_ = idx; return m; }

private:
    int index_ = 0;
};

// A calendar day; only used when aggregating sub-monthly observations.
struct CalendarDate {
    int year = 1970;
    int month = 1;
    int day = 1;

    Month to_month() const { return Month(year, month); }
};

struct DatedValue {
    CalendarDate date;
    double value = 0.0;
};

// Sorted (strictly increasing) month -> value series. The container is the
// common currency between the vintage store, the preprocessing pipeline and
// the dating module.
class MonthlySeries {
public:
    MonthlySeries() = default;

    void append(Month m, double v);
    std::size_t size() const { return months_.size(); }
    bool empty() const { return months_.empty(); }

    Month first_month() const;
    Month last_month() const;

    std::optional<double> at(Month m) const;
    Month month(std::size_t i) const { return months_[i]; }
    double value(std::size_t i) const { return values_[i]; }
    double& value(std::size_t i) { return values_[i]; }

    const std::vector<Month>& months() const { return months_; }
    const std::vector<double>& values() const { return values_; }

    // True when the series covers every month between first and last.
    bool contiguous() const;

private:
    std::vector<Month> months_;
    std::vector<double> values_;
};

} // namespace recast
