#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgbm/version.hpp"

namespace dgbm {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe decimal form (17 significant digits).
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Comma-separated rows with LF line endings. Cells are plain tokens
/// (headers and numbers), never needing RFC-4180 quoting.
class CsvWriter {
  public:
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }
    void numeric_row(const std::vector<double>& cells) {
        std::vector<std::string> formatted;
        formatted.reserve(cells.size());
        for (const double v : cells) formatted.push_back(format_g17(v));
        row(formatted);
    }
    const std::string& str() const { return out_; }

  private:
    std::string out_;
};

inline std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

/// Reproducibility record emitted alongside every output: the full parameter
/// set plus seed and tool version pin the run down bit-exactly (the timestamp
/// is informational only).
inline nlohmann::json run_manifest(const std::string& subcommand, const nlohmann::json& params,
                                   std::uint64_t seed) {
    return nlohmann::json{{"schema", 1},
                          {"tool", "dgbm"},
                          {"version", version_string},
                          {"subcommand", subcommand},
                          {"params", params},
                          {"seed", seed},
                          {"timestamp", iso8601_utc_now()}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace dgbm
