#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace recast {

// All pipeline files share one dialect: comma delimiter, LF line endings,
// dot decimal separator, UTF-8, mandatory header row.

struct CsvTable {
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;   // 1-based source line per row

    int column(const std::string& name) const;            // -1 when absent
    int require_column(const std::string& name) const;    // ParseError when absent
};

CsvTable read_csv(const std::filesystem::path& path);

// Numeric cells use up to 12 significant digits; formatting is centralized so
// every output file (and golden file) renders doubles identically.
std::string format_value(double v);

double parse_value(const std::filesystem::path& file, std::size_t line, const std::string& cell);
long parse_count(const std::filesystem::path& file, std::size_t line, const std::string& cell);

// Accumulates rows in memory and writes atomically (temp file + rename), so
// interrupted runs never leave partial files behind.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    void write(const std::filesystem::path& path) const;
    std::string to_string() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace recast
