#include "recast/csv.hpp"

#include "recast/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace recast {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    int c = column(name);
    if (c < 0)
        throw ParseError(path.string() + ": missing required column '" + name + "'");
    return c;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    CsvTable table;
    table.path = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            table.header = split_fields(line);
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != table.header.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty())
        throw ParseError(path.string() + ": missing header row");
    return table;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double parse_value(const std::filesystem::path& file, std::size_t line, const std::string& cell) {
    if (cell.empty())
        throw ParseError(file.string() + ":" + std::to_string(line) + ": empty numeric field");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (errno != 0 || end == cell.c_str() || *end != '\0')
        throw ParseError(file.string() + ":" + std::to_string(line) + ": bad numeric value '" + cell + "'");
    return v;
}

long parse_count(const std::filesystem::path& file, std::size_t line, const std::string& cell) {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(cell.c_str(), &end, 10);
    if (errno != 0 || end == cell.c_str() || *end != '\0')
        throw ParseError(file.string() + ":" + std::to_string(line) + ": bad integer value '" + cell + "'");
    return v;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw std::logic_error("csv row width mismatch");
    rows_.push_back(std::move(cells));
}

std::string CsvWriter::to_string() const {
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(header_);
    for (const auto& row : rows_) emit(row);
    return out.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
    write_text_atomic(path, to_string());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

} // namespace recast
