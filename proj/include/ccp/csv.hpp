#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>

#include "ccp/types.hpp"

namespace ccp {

/// Shortest decimal string that round-trips the 64-bit value exactly.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.front())) s.remove_prefix(1);
    while (!s.empty() && issp(s.back())) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace detail

/// Splits one CSV line on commas into `out`; returns the field count.
inline std::size_t split_csv_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out.size();
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open file for writing: " + path);
    }

    void header(std::initializer_list<std::string_view> names) {
        bool first = true;
        for (auto n : names) {
            if (!first) out_ << ',';
            out_ << n;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
    }

    void row_indexed(std::uint64_t index, std::initializer_list<double> values) {
        out_ << index;
        for (double v : values) out_ << ',' << format_double(v);
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

}  // namespace ccp
