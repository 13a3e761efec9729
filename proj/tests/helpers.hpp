#pragma once

#include "recast/data_io.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace helpers {

// Fresh scratch directory per test binary invocation; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("recast_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

// Minimal three-variable monthly vintage used across the data_io tests.
inline void write_fixture_vintage(const std::filesystem::path& root, const std::string& as_of,
                                  bool lookahead_violation = false, bool bad_indicator = false) {
    std::filesystem::path dir = root / as_of;
    std::filesystem::create_directories(dir);
    spit(dir / "meta.csv",
         "id,category,transform,frequency\n"
         "ALPHA,output,first-difference,monthly\n"
         "BETA,financial,none,monthly\n"
         "GAMMA,labor,log-growth,monthly\n");
    std::ostringstream series;
    series << "variable_id,month,value\n";
    for (const char* id : {"ALPHA", "BETA", "GAMMA"}) {
        for (int m = 1; m <= 10; ++m)
            series << id << ",2006-" << (m < 10 ? "0" : "") << m << ","
                   << (std::string(id) == "GAMMA" ? 100.0 + m : 0.5 * m) << "\n";
    }
    if (lookahead_violation)
        series << "ALPHA," << as_of << ",9.9\n";
    spit(dir / "series.csv", series.str());

    std::ostringstream ind;
    ind << "month,value\n";
    for (int m = 1; m <= 10; ++m)
        ind << "2006-" << (m < 10 ? "0" : "") << m << "," << (m >= 7 ? 1 : 0) << "\n";
    if (bad_indicator)
        ind << "2006-11,2\n";
    spit(dir / "indicator.csv", ind.str());
}

} // namespace helpers
