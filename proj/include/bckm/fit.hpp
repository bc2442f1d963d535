#ifndef BCKM_FIT_HPP
#define BCKM_FIT_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>

#include "baselines.hpp"
#include "centroids.hpp"
#include "fit_result.hpp"
#include "metrics.hpp"
#include "penalty_assignment.hpp"

/**
 * @file fit.hpp
 *
 * @brief Constrained K-Means by alternating the regularized centroid update
 * with the penalty-based binary assignment step.
 */

namespace bckm {

struct BckmConfig {
    double lambda = 1e-4;
    double eps_c = 1e-6;
    int max_iter = 100;
    /// Seeds the Lloyd initialization when no S0 is given.
    std::uint64_t seed = 0;
    int init_restarts = 10;
    int init_max_iter = 100;
    AssignmentConfig assignment;
    /// Relative slack for the per-iteration descent check.
    double monotone_tol = 1e-7;

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw InvalidArgument("lambda must be positive");
        }
        if (!(eps_c >= 0.0)) {
            throw InvalidArgument("eps_c must be nonnegative");
        }
        if (max_iter < 1) {
            throw InvalidArgument("max_iter must be at least 1");
        }
        assignment.validate();
    }
};

/**
 * Runs from S0 (or from Lloyd labels when S0 is absent) until the centroid
 * change drops to eps_c, the assignment repeats, or max_iter is reached.
 * Throws InfeasibleError before iterating when the constraints cannot hold.
 */
inline FitResult fit(const DataMatrix& x, const ConstraintSet& cs, const BckmConfig& cfg = {},
                     const std::optional<Matrix>& s0 = std::nullopt) {
    auto start = std::chrono::steady_clock::now();
    cfg.validate();
    const Index k = cs.num_clusters();
    const Index n = x.size();
    internal::require_k_le_n(k, n);
    internal::require_feasible(cs, n, k);

    Matrix s;
    if (s0) {
        if (s0->rows() != k || s0->cols() != n) {
            throw InvalidArgument("S0 is " + internal::shape_string(s0->rows(), s0->cols()) + " but expected " +
                                  internal::shape_string(k, n));
        }
        s = AssignmentMatrix::relaxed(*s0).values();
    } else {
        LloydConfig init{cfg.init_restarts, cfg.init_max_iter, cfg.seed};
        s = lloyd(x, k, init).assignment.values();
    }

    FitResult res;
    res.algorithm = "bckm";
    SimplexBasis basis;
    CentroidMatrix c;
    Matrix c_prev;
    double prev_objective = 0.0;
    bool prev_binary = false;
    bool descending = true;
    bool loop_done = false;
    AssignmentOutcome last;
    for (int t = 1; t <= cfg.max_iter; ++t) {
        c = update_centroids(x, s, cfg.lambda);
        last = update_cluster_assignment(x, c, s, cs, cfg.assignment, &basis);

        IterationRecord rec;
        rec.iteration = t;
        rec.centroid_delta = t == 1 ? 0.0 : (c.values() - c_prev).squaredNorm();
        rec.objective = last.diagnostics.objective + cfg.lambda * c.values().squaredNorm();
        rec.assignment = last.diagnostics;
        res.history.push_back(rec);
        res.outer_iterations = t;

        const bool binary = last.diagnostics.converged;
        if (t > 1 && binary && prev_binary &&
            rec.objective > prev_objective + cfg.monotone_tol * std::max(1.0, std::abs(prev_objective))) {
            descending = false;
        }
        prev_objective = rec.objective;
        prev_binary = binary;

        // an unchanged assignment means the next centroid update is identical
        bool stop = (t >= 2 && rec.centroid_delta <= cfg.eps_c) || last.assignment.values() == s;
        s = last.assignment.values();
        c_prev = c.values();
        if (stop) {
            loop_done = true;
            break;
        }
    }

    res.centroids = c;
    if (last.assignment.is_binary()) {
        res.assignment = last.assignment;
    } else {
        res.assignment = assignment_from_labels(LabelVector(internal::argmax_labels(s), static_cast<int>(k)));
    }
    res.labels = labels_from_assignment(res.assignment);
    res.wcss = wcss(x, res.centroids, res.assignment);
    res.violations = audit(res.assignment.values(), cs);
    res.converged = loop_done && last.diagnostics.converged && descending && res.violations.empty();
    res.seconds = internal::seconds_since(start);
    return res;
}

} // namespace bckm

#endif
