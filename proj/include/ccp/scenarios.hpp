#pragma once

#include <fstream>
#include <string>
#include <utility>

#include "ccp/csv.hpp"
#include "ccp/types.hpp"

namespace ccp {

/**
 * An n x m matrix of equiprobable realizations of the uncertainty vector;
 * row i holds xi_i and carries probability exactly 1/n.
 */
class ScenarioSet {
  public:
    ScenarioSet() = default;  // empty placeholder; populate before use

    ScenarioSet(std::size_t n, std::size_t m, Vector data)
        : n_(n), m_(m), data_(std::move(data)) {
        if (n_ < 1 || m_ < 1) throw std::invalid_argument("scenario set must be at least 1x1");
        if (data_.size() != n_ * m_)
            throw std::invalid_argument("scenario data size does not match dimensions");
        if (!all_finite(data_)) throw std::invalid_argument("scenario entries must be finite");
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return m_; }
    double probability() const { return 1.0 / static_cast<double>(n_); }

    ConstVecView row(std::size_t i) const { return {data_.data() + i * m_, m_}; }
    ConstVecView flat() const { return data_; }

  private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    Vector data_;
};

/**
 * Reads a scenario set from a plain comma-separated text file, one scenario
 * per row. With `skip_header` the first line is discarded. Ragged rows,
 * non-numeric cells and empty files are reported with their line number.
 */
inline ScenarioSet load_scenarios(const std::string& path, bool skip_header = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);

    Vector data;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t lineno = 0;
    std::string line;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && skip_header) continue;
        if (detail::trim(line).empty()) continue;
        split_csv_line(line, fields);
        if (m == 0) m = fields.size();
        if (fields.size() != m)
            throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(m) + " fields, got " +
                                     std::to_string(fields.size()));
        for (auto f : fields) {
            double v;
            if (!detail::parse_double(f, v) || !std::isfinite(v))
                throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno) +
                                         ": non-numeric cell '" + std::string(f) + "'");
            data.push_back(v);
        }
        ++n;
    }
    if (n == 0) throw std::runtime_error(path + ": parse error at line 1: empty file");
    return {n, m, std::move(data)};
}

/// Writes a scenario set in the same format; values round-trip bit-exactly.
inline void save_scenarios(const std::string& path, const ScenarioSet& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto r = s.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out << ',';
            out << format_double(r[j]);
        }
        out << '\n';
    }
}

}  // namespace ccp
