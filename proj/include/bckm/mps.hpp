#ifndef BCKM_MPS_HPP
#define BCKM_MPS_HPP

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "lp.hpp"

namespace bckm {

namespace internal {

/// Shortest decimal that fits the 12-character MPS numeric field.
inline std::string mps_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, ptr);
    for (int prec = 11; s.size() > 12 && prec > 0; --prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        s = buf;
    }
    return s;
}

inline std::string mps_field(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

inline std::string mps_name(char prefix, int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%07d", prefix, index);
    return buf;
}

/// One fixed-format data line: fields start at columns 2, 5, 15, 25, 40, 50.
inline void mps_line(std::ostream& out, const std::string& f1, const std::string& f2, const std::string& f3,
                     const std::string& f4, const std::string& f5 = {}, const std::string& f6 = {}) {
    std::string line = " " + mps_field(f1, 2) + " " + mps_field(f2, 8) + "  " + mps_field(f3, 8) + "  " +
                       mps_field(f4, 12);
    if (!f5.empty()) {
        line += "   " + mps_field(f5, 8) + "  " + f6;
    }
    while (!line.empty() && line.back() == ' ') {
        line.pop_back();
    }
    out << line << '\n';
}

} // namespace internal

/**
 * Writes lp in fixed-format MPS. Columns are named C0000000.., rows
 * R0000000..; comment lines map column names back to their roles. The
 * objective offset is recorded only as a comment.
 */
inline void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name = "BCKM") {
    using internal::mps_line;
    using internal::mps_name;
    using internal::mps_number;
    out << "NAME          " << name.substr(0, 8) << '\n';
    out << "* objective offset " << mps_number(lp.objective_offset) << '\n';
    for (int j = 0; j < lp.num_variables(); ++j) {
        out << "* " << mps_name('C', j) << ' ' << to_string(lp.names[static_cast<std::size_t>(j)]) << '\n';
    }
    out << "ROWS\n";
    out << " N  COST\n";
    for (int r = 0; r < lp.num_rows(); ++r) {
        const char* sense = "E";
        if (lp.rows[static_cast<std::size_t>(r)].sense == RowSense::less_equal) {
            sense = "L";
        } else if (lp.rows[static_cast<std::size_t>(r)].sense == RowSense::greater_equal) {
            sense = "G";
        }
        out << ' ' << internal::mps_field(sense, 2) << ' ' << mps_name('R', r) << '\n';
    }

    std::vector<std::vector<std::pair<int, double>>> columns(static_cast<std::size_t>(lp.num_variables()));
    for (int r = 0; r < lp.num_rows(); ++r) {
        for (const auto& t : lp.rows[static_cast<std::size_t>(r)].terms) {
            columns[static_cast<std::size_t>(t.var)].emplace_back(r, t.coef);
        }
    }
    out << "COLUMNS\n";
    for (int j = 0; j < lp.num_variables(); ++j) {
        const auto col = mps_name('C', j);
        const double c = lp.objective[static_cast<std::size_t>(j)];
        std::vector<std::pair<std::string, double>> entries;
        if (c != 0.0) {
            entries.emplace_back("COST", c);
        }
        for (const auto& [r, a] : columns[static_cast<std::size_t>(j)]) {
            entries.emplace_back(mps_name('R', r), a);
        }
        for (std::size_t e = 0; e < entries.size(); e += 2) {
            if (e + 1 < entries.size()) {
                mps_line(out, "", col, entries[e].first, mps_number(entries[e].second), entries[e + 1].first,
                         mps_number(entries[e + 1].second));
            } else {
                mps_line(out, "", col, entries[e].first, mps_number(entries[e].second));
            }
        }
    }
    out << "RHS\n";
    for (int r = 0; r < lp.num_rows(); ++r) {
        double b = lp.rows[static_cast<std::size_t>(r)].rhs;
        if (b != 0.0) {
            mps_line(out, "", "RHS", mps_name('R', r), mps_number(b));
        }
    }
    out << "BOUNDS\n";
    for (int j = 0; j < lp.num_variables(); ++j) {
        const auto col = mps_name('C', j);
        const double lo = lp.lower[static_cast<std::size_t>(j)];
        const double hi = lp.upper[static_cast<std::size_t>(j)];
        if (lo == hi) {
            mps_line(out, "FX", "BND", col, mps_number(lo));
            continue;
        }
        if (lo == -infinity && hi == infinity) {
            mps_line(out, "FR", "BND", col, "");
            continue;
        }
        if (lo == -infinity) {
            mps_line(out, "MI", "BND", col, "");
        } else if (lo != 0.0) {
            mps_line(out, "LO", "BND", col, mps_number(lo));
        }
        if (hi != infinity) {
            mps_line(out, "UP", "BND", col, mps_number(hi));
        }
    }
    out << "ENDATA\n";
}

} // namespace bckm

#endif
