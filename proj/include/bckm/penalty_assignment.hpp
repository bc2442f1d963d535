#ifndef BCKM_PENALTY_ASSIGNMENT_HPP
#define BCKM_PENALTY_ASSIGNMENT_HPP

#include <cmath>
#include <string>
#include <vector>

#include "assignment_lp.hpp"
#include "constraints.hpp"
#include "core.hpp"
#include "simplex.hpp"

/**
 * @file penalty_assignment.hpp
 *
 * @brief Binary assignment step. Alternates an LP over the relaxed
 * constraint polytope (S-step), a closed-form rounding target (V-step) and
 * a geometric penalty increase until S and V agree on a binary point.
 */

namespace bckm {

struct AssignmentConfig {
    double rho0 = 0.5;
    double kappa = 1.1;
    int max_iter = 100;
    double eps_s = 1e-6;
    double binary_tol = default_binary_tolerance;
    /// Penalties above this end the loop as not converged.
    double rho_cap = 1e12;
    /// On failure, run the whole loop once more with kappa squared.
    bool retry_with_squared_kappa = false;
    /// When S repeats while fractional, point V's fractional columns at
    /// their largest entry before escalating.
    bool break_stalls = true;
    SimplexOptions lp;

    void validate() const {
        if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
            throw InvalidArgument("rho0 must be positive");
        }
        if (!(kappa > 1.0) || !std::isfinite(kappa)) {
            throw InvalidArgument("kappa must be greater than 1");
        }
        if (max_iter < 1) {
            throw InvalidArgument("max_iter must be at least 1");
        }
        if (!(eps_s >= 0.0) || !(binary_tol >= 0.0) || !(binary_tol < 0.5)) {
            throw InvalidArgument("eps_s must be >= 0 and binary_tol in [0, 0.5)");
        }
    }
};

struct PenaltyState {
    Matrix rho_plus;
    Matrix rho_minus;
    Matrix v;
    int iteration = 0;

    static PenaltyState initial(const Matrix& v0, double rho0) {
        PenaltyState st;
        st.rho_plus = Matrix::Constant(v0.rows(), v0.cols(), rho0);
        st.rho_minus = Matrix::Constant(v0.rows(), v0.cols(), rho0);
        st.v = v0;
        return st;
    }
};

struct AssignmentDiagnostics {
    bool converged = false;
    int iterations = 0;
    int nonbinary = 0;
    ViolationReport violations;
    double objective = 0.0;
    long long lp_iterations = 0;
};

struct AssignmentOutcome {
    /// Binary when diagnostics.converged, otherwise the last LP iterate.
    AssignmentMatrix assignment;
    AssignmentDiagnostics diagnostics;
    PenaltyState state;
};

/// S-step: optimal S of the penalty LP for the current V and penalties.
inline Matrix update_S(const DistanceMatrix& y, const ConstraintSet& cs, const PenaltyState& state,
                       const SimplexOptions& opts = {}, SimplexBasis* warm = nullptr,
                       long long* lp_iterations = nullptr) {
    LinearProgram lp = build_penalty_lp(y, cs, state.v, state.rho_plus, state.rho_minus);
    LpOutcome out = solve(lp, opts, warm);
    if (lp_iterations != nullptr) {
        *lp_iterations += out.iterations;
    }
    if (out.status == LpStatus::infeasible) {
        throw InfeasibleError("assignment LP is infeasible under the given constraints");
    }
    if (!out.optimal()) {
        throw Error(std::string("assignment LP stopped without an optimum: ") + to_string(out.status));
    }
    return assignment_values(out.values, y.num_clusters(), y.size());
}

/// V-step: V_ij = 0 exactly when rho-_ij S_ij <= rho+_ij (1 - S_ij).
inline Matrix update_V(const Matrix& s, const PenaltyState& state) {
    if (s.rows() != state.v.rows() || s.cols() != state.v.cols()) {
        throw InvalidArgument("S is " + internal::shape_string(s.rows(), s.cols()) + " but the penalty state is " +
                              internal::shape_string(state.v.rows(), state.v.cols()));
    }
    Matrix v(s.rows(), s.cols());
    for (Index j = 0; j < s.cols(); ++j) {
        for (Index i = 0; i < s.rows(); ++i) {
            v(i, j) = state.rho_minus(i, j) * s(i, j) <= state.rho_plus(i, j) * (1.0 - s(i, j)) ? 0.0 : 1.0;
        }
    }
    return v;
}

/// Multiplies rho- by kappa where V is 0 and rho+ where V is 1.
inline PenaltyState update_penalties(PenaltyState state, const Matrix& v_new, double kappa) {
    if (v_new.rows() != state.v.rows() || v_new.cols() != state.v.cols()) {
        throw InvalidArgument("V has the wrong shape for the penalty state");
    }
    for (Index j = 0; j < v_new.cols(); ++j) {
        for (Index i = 0; i < v_new.rows(); ++i) {
            if (v_new(i, j) == 0.0) {
                state.rho_minus(i, j) *= kappa;
            } else if (v_new(i, j) == 1.0) {
                state.rho_plus(i, j) *= kappa;
            } else {
                throw InvalidArgument("V must be binary");
            }
        }
    }
    state.v = v_new;
    ++state.iteration;
    return state;
}

namespace internal {

inline int count_nonbinary(const Matrix& s, double tol) {
    int count = 0;
    for (double x : s.reshaped()) {
        if (std::min(std::abs(x), std::abs(1.0 - x)) > tol) {
            ++count;
        }
    }
    return count;
}

/// Link structure consulted when pointing stalled columns.
struct LinkIndex {
    /// Points sharing a must-link group, each point alone otherwise.
    std::vector<std::vector<int>> unit_members;
    std::vector<int> unit_of;
    std::vector<std::vector<int>> cannot;

    LinkIndex(const ConstraintSet& cs, Index n) : unit_of(static_cast<std::size_t>(n), -1), cannot(static_cast<std::size_t>(n)) {
        MustLinkClosure closure = close_must_links(cs, n);
        for (const auto& g : closure.groups) {
            for (int p : g) {
                unit_of[static_cast<std::size_t>(p)] = static_cast<int>(unit_members.size());
            }
            unit_members.push_back(g);
        }
        for (int p = 0; p < static_cast<int>(n); ++p) {
            if (unit_of[static_cast<std::size_t>(p)] < 0) {
                unit_of[static_cast<std::size_t>(p)] = static_cast<int>(unit_members.size());
                unit_members.push_back({p});
            }
        }
        for (const auto& pr : cs.cannot_link_pairs()) {
            cannot[static_cast<std::size_t>(pr.p)].push_back(pr.q);
            cannot[static_cast<std::size_t>(pr.q)].push_back(pr.p);
        }
    }
};

/**
 * Points V's fractional columns at single rows, one must-link group at a
 * time in order of first column. Each group takes the row with the largest
 * summed S among rows not already held by a cannot-linked point, falling
 * back to the plain largest row when every row is held.
 */
inline void point_fractional_columns(const Matrix& s, Matrix& v, const LinkIndex& links, double tol) {
    const Index k = s.rows();
    const Index n = s.cols();
    // row currently held by each point: binary columns keep theirs, fractional ones wait to be pointed
    std::vector<Index> held(static_cast<std::size_t>(n), -1);
    std::vector<char> fractional(static_cast<std::size_t>(n), 0);
    for (Index j = 0; j < n; ++j) {
        if (count_nonbinary(s.col(j), tol) > 0) {
            fractional[static_cast<std::size_t>(j)] = 1;
        } else {
            v.col(j).maxCoeff(&held[static_cast<std::size_t>(j)]);
        }
    }
    std::vector<char> done(links.unit_members.size(), 0);
    for (Index j = 0; j < n; ++j) {
        const int unit = links.unit_of[static_cast<std::size_t>(j)];
        if (!fractional[static_cast<std::size_t>(j)] || done[static_cast<std::size_t>(unit)]) {
            continue;
        }
        done[static_cast<std::size_t>(unit)] = 1;
        const auto& members = links.unit_members[static_cast<std::size_t>(unit)];
        Eigen::VectorXd weight = Eigen::VectorXd::Zero(k);
        std::vector<char> blocked(static_cast<std::size_t>(k), 0);
        for (int p : members) {
            if (!fractional[static_cast<std::size_t>(p)]) {
                continue;
            }
            weight += s.col(p);
            for (int q : links.cannot[static_cast<std::size_t>(p)]) {
                if (held[static_cast<std::size_t>(q)] >= 0) {
                    blocked[static_cast<std::size_t>(held[static_cast<std::size_t>(q)])] = 1;
                }
            }
        }
        Index top = -1;
        for (Index i = 0; i < k; ++i) {
            if (!blocked[static_cast<std::size_t>(i)] && (top < 0 || weight[i] > weight[top])) {
                top = i;
            }
        }
        if (top < 0) {
            weight.maxCoeff(&top);
        }
        for (int p : members) {
            if (fractional[static_cast<std::size_t>(p)]) {
                v.col(p).setZero();
                v(top, p) = 1.0;
                held[static_cast<std::size_t>(p)] = top;
            }
        }
    }
}

/// Scales both penalties of every column holding a fractional entry by kappa.
inline void boost_fractional_columns(const Matrix& s, PenaltyState& state, double kappa, double tol) {
    for (Index j = 0; j < s.cols(); ++j) {
        if (count_nonbinary(s.col(j), tol) > 0) {
            state.rho_plus.col(j) *= kappa;
            state.rho_minus.col(j) *= kappa;
        }
    }
}

inline AssignmentOutcome run_penalty_loop(const DistanceMatrix& y, const Matrix& s0, const ConstraintSet& cs,
                                          const AssignmentConfig& cfg, SimplexBasis* warm) {
    AssignmentOutcome res;
    res.state = PenaltyState::initial(s0.array().round().matrix(), cfg.rho0);
    Matrix s_prev = s0;
    Matrix s = s0;
    const LinkIndex links(cs, s0.cols());
    auto& diag = res.diagnostics;
    bool done = false;
    for (int t = 1; t <= cfg.max_iter; ++t) {
        s = update_S(y, cs, res.state, cfg.lp, warm, &diag.lp_iterations);
        Matrix v_prev = res.state.v;
        Matrix v = update_V(s, res.state);
        const bool stalled =
            cfg.break_stalls && (s - s_prev).squaredNorm() <= cfg.eps_s && count_nonbinary(s, cfg.binary_tol) > 0;
        if (stalled) {
            point_fractional_columns(s, v, links, cfg.binary_tol);
        }
        res.state = update_penalties(std::move(res.state), v, cfg.kappa);
        if (stalled) {
            boost_fractional_columns(s, res.state, cfg.kappa, cfg.binary_tol);
        }
        diag.iterations = t;

        double delta = (s - s_prev).squaredNorm() + (v - v_prev).squaredNorm();
        s_prev = s;
        if (delta <= cfg.eps_s && count_nonbinary(s, cfg.binary_tol) == 0) {
            done = true;
            break;
        }
        if (res.state.rho_plus.maxCoeff() > cfg.rho_cap || res.state.rho_minus.maxCoeff() > cfg.rho_cap) {
            break;
        }
    }

    diag.nonbinary = count_nonbinary(s, cfg.binary_tol);
    diag.violations = audit(s, cs, cfg.binary_tol);
    diag.objective = inner_product(y, s);
    if (done && diag.nonbinary == 0 && diag.violations.empty()) {
        Matrix rounded = s.array().round().matrix();
        diag.objective = inner_product(y, rounded);
        diag.converged = true;
        res.assignment = AssignmentMatrix::binary(std::move(rounded));
    } else {
        res.assignment = AssignmentMatrix::relaxed(std::move(s));
    }
    return res;
}

} // namespace internal

/**
 * Assignment step for fixed centroids. S0 seeds V through elementwise
 * rounding and need not satisfy the constraints. A warm basis, when given,
 * is used for the first LP and updated in place.
 */
inline AssignmentOutcome update_cluster_assignment(const DataMatrix& x, const CentroidMatrix& c, const Matrix& s0,
                                                   const ConstraintSet& cs, const AssignmentConfig& cfg = {},
                                                   SimplexBasis* warm = nullptr) {
    cfg.validate();
    const Index k = c.num_clusters();
    const Index n = x.size();
    if (s0.rows() != k || s0.cols() != n) {
        throw InvalidArgument("initial assignment is " + internal::shape_string(s0.rows(), s0.cols()) +
                              " but expected " + internal::shape_string(k, n));
    }
    if (!s0.allFinite() || (s0.array() < 0.0).any() || (s0.array() > 1.0).any()) {
        throw InvalidArgument("initial assignment entries must lie in [0, 1]");
    }
    internal::require_feasible(cs, n, k);
    DistanceMatrix y = compute_distance_matrix(x, c);

    SimplexBasis local;
    SimplexBasis* basis = warm != nullptr ? warm : &local;
    AssignmentOutcome res = internal::run_penalty_loop(y, s0, cs, cfg, basis);
    if (!res.diagnostics.converged && cfg.retry_with_squared_kappa) {
        AssignmentConfig again = cfg;
        again.kappa = cfg.kappa * cfg.kappa;
        long long spent = res.diagnostics.lp_iterations;
        int iters = res.diagnostics.iterations;
        res = internal::run_penalty_loop(y, s0, cs, again, basis);
        res.diagnostics.lp_iterations += spent;
        res.diagnostics.iterations += iters;
    }
    return res;
}

} // namespace bckm

#endif
