#include "recast/month.hpp"

#include <algorithm>
#include <cstdio>

namespace recast {

Month::Month(int year, int month) {
    if (month < 1 || month > 12)
        throw std::invalid_argument("month out of range 1..12: " + std::to_string(month));
    index_ = year * 12 + month - 1;
}

std::optional<Month> Month::try_parse(const std::string& text) {
    // Strict YYYY-MM, four-digit year.
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
    int year = std::stoi(text.substr(0, 4));
    int month = std::stoi(text.substr(5, 2));
    if (month < 1 || month > 12) return std::nullopt;
    return Month(year, month);
}

Month Month::parse(const std::string& text) {
    auto m = try_parse(text);
    if (!m) throw std::invalid_argument("invalid month '" + text + "', expected YYYY-MM");
    return *m;
}

std::string Month::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
    return buf;
}

void MonthlySeries::append(Month m, double v) {
    if (!months_.empty() && m <= months_.back())
        throw std::invalid_argument("series months must be strictly increasing at " + m.str());
    months_.push_back(m);
    values_.push_back(v);
}

Month MonthlySeries::first_month() const {
    if (months_.empty()) throw std::logic_error("empty series has no first month");
    return months_.front();
}

Month MonthlySeries::last_month() const {
    if (months_.empty()) throw std::logic_error("empty series has no last month");
    return months_.back();
}

std::optional<double> MonthlySeries::at(Month m) const {
    auto it = std::lower_bound(months_.begin(), months_.end(), m);
    if (it == months_.end() || *it != m) return std::nullopt;
    return values_[static_cast<std::size_t>(it - months_.begin())];
}

bool MonthlySeries::contiguous() const {
    if (months_.size() < 2) return true;
    return months_.back() - months_.front() == static_cast<int>(months_.size()) - 1;
}

} // namespace recast
