#ifndef BCKM_ASSIGNMENT_LP_HPP
#define BCKM_ASSIGNMENT_LP_HPP

#include <string>

#include "constraints.hpp"
#include "lp.hpp"

/**
 * @file assignment_lp.hpp
 *
 * @brief The two linear programs of the assignment step: the plain relaxation
 * min <Y, S> over the constraint polytope, and the penalty LP that adds the
 * weighted l1 misfit between S and a fixed binary matrix V through the slack
 * matrices gamma+ and gamma-.
 */

namespace bckm {

namespace internal {

inline void require_feasible(const ConstraintSet& cs, Index num_points, Index num_clusters) {
    cs.validate(num_points);
    auto check = precheck_feasibility(cs, num_points, static_cast<int>(num_clusters));
    if (!check) {
        throw InfeasibleError("infeasible constraints: " + check.reason);
    }
}

inline void add_assignment_columns(LinearProgram& lp, const DistanceMatrix& y) {
    const Index k = y.num_clusters();
    for (Index j = 0; j < y.size(); ++j) {
        for (Index i = 0; i < k; ++i) {
            lp.add_variable(y(i, j), 0.0, 1.0, {VarKind::s, static_cast<int>(i), static_cast<int>(j)});
        }
    }
}

} // namespace internal

/// min <Y, S> subject to 0 <= S <= 1 and the constraint rows; k*N columns.
inline LinearProgram build_relaxed_lp(const DistanceMatrix& y, const ConstraintSet& cs) {
    const Index k = y.num_clusters();
    const Index n = y.size();
    if (cs.num_clusters() != k) {
        throw InvalidArgument("distance matrix has " + std::to_string(k) + " rows but constraints describe " +
                              std::to_string(cs.num_clusters()) + " clusters");
    }
    internal::require_feasible(cs, n, k);
    LinearProgram lp;
    internal::add_assignment_columns(lp, y);
    for (auto& row : emit_lp_rows(cs, n, k)) {
        lp.add_row(std::move(row));
    }
    return lp;
}

/// Column of gamma+(i, j) in the penalty LP; gamma-(i, j) follows k*N later.
inline int gamma_plus_var(Index cluster, Index point, Index num_clusters, Index num_points) {
    return static_cast<int>(num_clusters * num_points) + assignment_var(cluster, point, num_clusters);
}

inline int gamma_minus_var(Index cluster, Index point, Index num_clusters, Index num_points) {
    return static_cast<int>(2 * num_clusters * num_points) + assignment_var(cluster, point, num_clusters);
}

/**
 * min <Y, S> + sum rho+ gamma+ + sum rho- gamma-
 * s.t. V - S <= gamma+, S - V <= gamma-, gamma >= 0, 0 <= S <= 1, S in the
 * constraint polytope. Columns: S, then gamma+, then gamma- (3kN total).
 */
inline LinearProgram build_penalty_lp(const DistanceMatrix& y, const ConstraintSet& cs, const Matrix& v,
                                      const Matrix& rho_plus, const Matrix& rho_minus) {
    const Index k = y.num_clusters();
    const Index n = y.size();
    auto same_shape = [&](const Matrix& m) { return m.rows() == k && m.cols() == n; };
    if (!same_shape(v) || !same_shape(rho_plus) || !same_shape(rho_minus)) {
        throw InvalidArgument("penalty LP inputs must all be " + internal::shape_string(k, n));
    }
    if (!(rho_plus.array() > 0.0).all() || !(rho_minus.array() > 0.0).all() || !rho_plus.allFinite() ||
        !rho_minus.allFinite()) {
        throw InvalidArgument("penalty parameters must be strictly positive and finite");
    }
    if (!(v.array() == 0.0 || v.array() == 1.0).all()) {
        throw InvalidArgument("V must be binary");
    }

    LinearProgram lp = build_relaxed_lp(y, cs);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < k; ++i) {
            lp.add_variable(rho_plus(i, j), 0.0, infinity,
                            {VarKind::gamma_plus, static_cast<int>(i), static_cast<int>(j)});
        }
    }
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < k; ++i) {
            lp.add_variable(rho_minus(i, j), 0.0, infinity,
                            {VarKind::gamma_minus, static_cast<int>(i), static_cast<int>(j)});
        }
    }
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < k; ++i) {
            const int s = assignment_var(i, j, k);
            // V - S <= gamma+   <=>   -S - gamma+ <= -V
            lp.add_row({{{s, -1.0}, {gamma_plus_var(i, j, k, n), -1.0}}, RowSense::less_equal, -v(i, j)});
            // S - V <= gamma-   <=>   S - gamma- <= V
            lp.add_row({{{s, 1.0}, {gamma_minus_var(i, j, k, n), -1.0}}, RowSense::less_equal, v(i, j)});
        }
    }
    return lp;
}

/// Reads the S block of an LP solution back into a k x N matrix.
inline Matrix assignment_values(const std::vector<double>& values, Index num_clusters, Index num_points) {
    Matrix s(num_clusters, num_points);
    for (Index j = 0; j < num_points; ++j) {
        for (Index i = 0; i < num_clusters; ++i) {
            s(i, j) = std::clamp(values[static_cast<std::size_t>(assignment_var(i, j, num_clusters))], 0.0, 1.0);
        }
    }
    return s;
}

} // namespace bckm

#endif
