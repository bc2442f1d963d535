#ifndef BCKM_LP_HPP
#define BCKM_LP_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "linear.hpp"

namespace bckm {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// What an LP column stands for: an assignment entry, one of the two
/// penalty slacks, or an anonymous column.
enum class VarKind { s, gamma_plus, gamma_minus, generic };

struct VarName {
    VarKind kind = VarKind::generic;
    int i = 0;
    int j = 0;
};

inline std::string to_string(const VarName& name) {
    auto idx = "(" + std::to_string(name.i) + "," + std::to_string(name.j) + ")";
    switch (name.kind) {
    case VarKind::s:
        return "S" + idx;
    case VarKind::gamma_plus:
        return "gamma+" + idx;
    case VarKind::gamma_minus:
        return "gamma-" + idx;
    case VarKind::generic:
        break;
    }
    return "x" + std::to_string(name.i);
}

/// minimize objective . x + objective_offset subject to rows and per-column bounds.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<VarName> names;
    std::vector<LinearRow> rows;
    double objective_offset = 0.0;

    int num_variables() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_variable(double cost, double lo, double hi, VarName name = {}) {
        int id = num_variables();
        if (name.kind == VarKind::generic) {
            name.i = id;
        }
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(hi);
        names.push_back(name);
        return id;
    }

    void add_row(LinearRow row) { rows.push_back(std::move(row)); }

    void validate() const {
        const auto n = objective.size();
        if (lower.size() != n || upper.size() != n || names.size() != n) {
            throw InvalidArgument("linear program column arrays differ in length");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
                throw InvalidArgument("column " + std::to_string(j) + " has inconsistent bounds");
            }
            if (!std::isfinite(objective[j])) {
                throw InvalidArgument("column " + std::to_string(j) + " has a non-finite cost");
            }
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!std::isfinite(rows[r].rhs)) {
                throw InvalidArgument("row " + std::to_string(r) + " has a non-finite right-hand side");
            }
            for (const auto& t : rows[r].terms) {
                if (t.var < 0 || t.var >= static_cast<int>(n) || !std::isfinite(t.coef)) {
                    throw InvalidArgument("row " + std::to_string(r) + " references an undeclared column");
                }
            }
        }
    }

    double row_activity(std::size_t r, const std::vector<double>& x) const {
        double a = 0.0;
        for (const auto& t : rows[r].terms) {
            a += t.coef * x[static_cast<std::size_t>(t.var)];
        }
        return a;
    }

    double evaluate(const std::vector<double>& x) const {
        double v = objective_offset;
        for (std::size_t j = 0; j < objective.size(); ++j) {
            v += objective[j] * x[j];
        }
        return v;
    }

    /// Largest bound or row violation of x (0 when x is feasible).
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < objective.size(); ++j) {
            worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double a = row_activity(r, x);
            double b = rows[r].rhs;
            switch (rows[r].sense) {
            case RowSense::equal:
                worst = std::max(worst, std::abs(a - b));
                break;
            case RowSense::less_equal:
                worst = std::max(worst, a - b);
                break;
            case RowSense::greater_equal:
                worst = std::max(worst, b - a);
                break;
            }
        }
        return worst;
    }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus status) {
    switch (status) {
    case LpStatus::optimal:
        return "optimal";
    case LpStatus::infeasible:
        return "infeasible";
    case LpStatus::unbounded:
        return "unbounded";
    case LpStatus::iteration_limit:
        return "iteration_limit";
    }
    return "unknown";
}

struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;
    double objective_value = 0.0;
    long iterations = 0;
    bool warm_started = false;

    bool optimal() const { return status == LpStatus::optimal; }
};

} // namespace bckm

#endif
