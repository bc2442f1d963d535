#ifndef BCKM_CSV_HPP
#define BCKM_CSV_HPP

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "core.hpp"

/**
 * @file csv.hpp
 *
 * @brief CSV ingestion and emission. One point per row, comma separated,
 * '.' decimal separator, optional single header row (detected when any field
 * of the first row is not a number).
 */

namespace bckm {

namespace internal {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view field) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    if (field.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        return std::nullopt;
    }
    return value;
}

inline void write_double(std::ostream& out, double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.write(buf, ptr - buf);
}

inline std::vector<std::vector<double>> read_numeric_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_fields(line);
        std::vector<double> row;
        row.reserve(fields.size());
        std::size_t bad_field = fields.size();
        for (std::size_t f = 0; f < fields.size(); ++f) {
            auto v = parse_double(fields[f]);
            if (!v) {
                bad_field = f;
                break;
            }
            row.push_back(*v);
        }
        if (bad_field != fields.size()) {
            if (first_content) {
                // header row
                first_content = false;
                width = fields.size();
                continue;
            }
            throw ParseError("row " + std::to_string(line_no) + ": non-numeric field '" +
                             std::string(fields[bad_field]) + "'");
        }
        if (width == 0) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError("row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " fields, found " + std::to_string(row.size()));
        }
        first_content = false;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("no data rows");
    }
    return rows;
}

inline std::ifstream open_for_reading(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "' for reading");
    }
    return in;
}

inline std::ofstream open_for_writing(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    return out;
}

} // namespace internal

inline DataMatrix read_csv(std::istream& in) {
    auto rows = internal::read_numeric_rows(in);
    const Index n = static_cast<Index>(rows.size());
    const Index d = static_cast<Index>(rows.front().size());
    Matrix values(d, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < d; ++i) {
            values(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
    }
    if (!values.allFinite()) {
        throw ParseError("data contains non-finite values");
    }
    return DataMatrix(std::move(values));
}

inline DataMatrix load_csv(const std::string& path) {
    auto in = internal::open_for_reading(path);
    try {
        return read_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes one point per row using shortest round-trip decimal formatting.
inline void write_csv(std::ostream& out, const Matrix& columns) {
    for (Index j = 0; j < columns.cols(); ++j) {
        for (Index i = 0; i < columns.rows(); ++i) {
            if (i > 0) {
                out << ',';
            }
            internal::write_double(out, columns(i, j));
        }
        out << '\n';
    }
}

inline void save_csv(const std::string& path, const DataMatrix& data) {
    auto out = internal::open_for_writing(path);
    write_csv(out, data.values());
}

inline void save_csv(const std::string& path, const LabelVector& labels) {
    auto out = internal::open_for_writing(path);
    out << "label\n";
    for (int l : labels.values()) {
        out << l << '\n';
    }
}

/// Reads a single-column label file. k is inferred unless given.
inline LabelVector read_labels(std::istream& in, std::optional<int> num_clusters = std::nullopt) {
    auto rows = internal::read_numeric_rows(in);
    if (rows.front().size() != 1) {
        throw ParseError("label file must have exactly one column");
    }
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double v = rows[r][0];
        if (v != std::floor(v) || v < 0) {
            throw ParseError("label row " + std::to_string(r + 1) + " is not a non-negative integer");
        }
        labels.push_back(static_cast<int>(v));
    }
    if (num_clusters) {
        return LabelVector(std::move(labels), *num_clusters);
    }
    return LabelVector::from_values(std::move(labels));
}

inline LabelVector load_labels(const std::string& path, std::optional<int> num_clusters = std::nullopt) {
    auto in = internal::open_for_reading(path);
    try {
        return read_labels(in, num_clusters);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace bckm

#endif
