#pragma once

#include "apnsp/error.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace apnsp {

/// Shortest decimal text that parses back to the same double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

inline std::string fmt_hex(std::uint64_t v) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
    return std::string(buf, end);
}

/// CSV writer. Lines starting with '#' before the header carry provenance
/// (config hash, seeds) so every file is self-describing.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path), path_(path) {
        if (!out_) throw FormatError("cannot write " + path);
    }

    void comment(std::string_view text) { out_ << "# " << text << '\n'; }

    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    const std::string& path() const { return path_; }

    static std::string cell(double v) { return fmt_double(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <typename T>
    static std::string cell(const T& v) {
        return std::to_string(v);
    }

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace apnsp
