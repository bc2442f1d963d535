#ifndef BCKM_BASELINES_HPP
#define BCKM_BASELINES_HPP

#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "assignment_lp.hpp"
#include "centroids.hpp"
#include "fit_result.hpp"
#include "metrics.hpp"
#include "random.hpp"
#include "simplex.hpp"

/**
 * @file baselines.hpp
 *
 * @brief Reference clusterers: k-means++ seeding, Lloyd's algorithm, and
 * LP relaxation with argmax rounding plus a greedy size repair.
 */

namespace bckm {

struct LloydConfig {
    int restarts = 10;
    int max_iter = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (restarts < 1 || max_iter < 1) {
            throw InvalidArgument("lloyd needs restarts >= 1 and max_iter >= 1");
        }
    }
};

namespace internal {

inline void require_k_le_n(Index k, Index n) {
    if (k < 1 || k > n) {
        throw InvalidArgument("need 1 <= k <= N, got k=" + std::to_string(k) + " and N=" + std::to_string(n));
    }
}

inline std::vector<Index> kmeanspp_indices(const DataMatrix& x, Index k, Rng& rng) {
    const Index n = x.size();
    std::vector<Index> chosen;
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    auto pick = [&](Index j) {
        chosen.push_back(j);
        taken[static_cast<std::size_t>(j)] = 1;
    };
    pick(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    while (static_cast<Index>(chosen.size()) < k) {
        auto last = x.point(chosen.back());
        double total = 0.0;
        for (Index j = 0; j < n; ++j) {
            auto& dj = d2[static_cast<std::size_t>(j)];
            dj = std::min(dj, (x.point(j) - last).squaredNorm());
            if (!taken[static_cast<std::size_t>(j)]) {
                total += dj;
            }
        }
        Index next = -1;
        if (total > 0.0) {
            double target = rng.uniform01() * total;
            double cum = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (taken[static_cast<std::size_t>(j)] || d2[static_cast<std::size_t>(j)] <= 0.0) {
                    continue;
                }
                cum += d2[static_cast<std::size_t>(j)];
                next = j;
                if (cum > target) {
                    break;
                }
            }
        } else {
            // every remaining point coincides with a chosen one
            auto r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - static_cast<Index>(chosen.size()))));
            for (Index j = 0; j < n; ++j) {
                if (!taken[static_cast<std::size_t>(j)] && r-- == 0) {
                    next = j;
                    break;
                }
            }
        }
        pick(next);
    }
    return chosen;
}

/// Nearest centroid per point; ties go to the lower cluster index.
inline std::vector<int> nearest_labels(const DistanceMatrix& y) {
    std::vector<int> labels(static_cast<std::size_t>(y.size()));
    for (Index j = 0; j < y.size(); ++j) {
        Index best = 0;
        y.values().col(j).minCoeff(&best);
        labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return labels;
}

/// Cluster means; an empty cluster takes over the point farthest from its
/// current centroid (among clusters that can spare one).
inline Matrix means_with_reseed(const DataMatrix& x, std::vector<int>& labels, Index k) {
    const Index d = x.dim();
    const Index n = x.size();
    auto means = [&]() {
        Matrix c = Matrix::Zero(d, k);
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (Index j = 0; j < n; ++j) {
            c.col(labels[static_cast<std::size_t>(j)]) += x.point(j);
            ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
        }
        for (Index i = 0; i < k; ++i) {
            if (sizes[static_cast<std::size_t>(i)] > 0) {
                c.col(i) /= sizes[static_cast<std::size_t>(i)];
            }
        }
        return std::pair{c, sizes};
    };
    auto [c, sizes] = means();
    for (Index i = 0; i < k; ++i) {
        if (sizes[static_cast<std::size_t>(i)] > 0) {
            continue;
        }
        Index far = -1;
        double far_d = -1.0;
        for (Index j = 0; j < n; ++j) {
            int l = labels[static_cast<std::size_t>(j)];
            if (sizes[static_cast<std::size_t>(l)] < 2) {
                continue;
            }
            double dist = (x.point(j) - c.col(l)).squaredNorm();
            if (dist > far_d) {
                far_d = dist;
                far = j;
            }
        }
        labels[static_cast<std::size_t>(far)] = static_cast<int>(i);
        std::tie(c, sizes) = means();
    }
    return c;
}

struct LloydRun {
    std::vector<int> labels;
    Matrix centroids;
    double wcss = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history;
};

inline double labels_wcss(const DataMatrix& x, const Matrix& c, const std::vector<int>& labels) {
    double total = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        total += (x.point(j) - c.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
    }
    return total;
}

inline LloydRun lloyd_once(const DataMatrix& x, Matrix c, Index k, int max_iter) {
    LloydRun run;
    for (int t = 1; t <= max_iter; ++t) {
        DistanceMatrix y = compute_distance_matrix(x, CentroidMatrix(c));
        std::vector<int> labels = nearest_labels(y);
        bool changed = labels != run.labels;
        run.labels = std::move(labels);
        run.iterations = t;
        IterationRecord rec;
        rec.iteration = t;
        rec.objective = labels_wcss(x, c, run.labels);
        if (!changed) {
            run.history.push_back(rec);
            run.converged = true;
            break;
        }
        Matrix next = means_with_reseed(x, run.labels, k);
        rec.centroid_delta = (next - c).squaredNorm();
        run.history.push_back(rec);
        c = std::move(next);
    }
    if (!run.converged) {
        c = means_with_reseed(x, run.labels, k);
    }
    run.centroids = std::move(c);
    run.wcss = labels_wcss(x, run.centroids, run.labels);
    return run;
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace internal

/// k distinct data columns by squared-distance sampling.
inline CentroidMatrix kmeanspp_seed(const DataMatrix& x, Index k, std::uint64_t seed) {
    internal::require_k_le_n(k, x.size());
    Rng rng(seed);
    auto idx = internal::kmeanspp_indices(x, k, rng);
    Matrix c(x.dim(), k);
    for (Index i = 0; i < k; ++i) {
        c.col(i) = x.point(idx[static_cast<std::size_t>(i)]);
    }
    return CentroidMatrix(std::move(c));
}

/// Best of cfg.restarts k-means++ seeded Lloyd runs (lowest WCSS, then lowest restart).
inline FitResult lloyd(const DataMatrix& x, Index k, const LloydConfig& cfg = {}) {
    auto start = std::chrono::steady_clock::now();
    cfg.validate();
    internal::require_k_le_n(k, x.size());
    internal::LloydRun best;
    bool have = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(r));
        auto idx = internal::kmeanspp_indices(x, k, rng);
        Matrix c0(x.dim(), k);
        for (Index i = 0; i < k; ++i) {
            c0.col(i) = x.point(idx[static_cast<std::size_t>(i)]);
        }
        auto run = internal::lloyd_once(x, std::move(c0), k, cfg.max_iter);
        if (!have || run.wcss < best.wcss) {
            best = std::move(run);
            have = true;
        }
    }
    FitResult res;
    res.algorithm = "lloyd";
    res.centroids = CentroidMatrix(std::move(best.centroids));
    res.labels = LabelVector(std::move(best.labels), static_cast<int>(k));
    res.assignment = assignment_from_labels(res.labels);
    res.wcss = best.wcss;
    res.outer_iterations = best.iterations;
    res.converged = best.converged;
    res.history = std::move(best.history);
    res.violations = audit(res.assignment.values(), ConstraintSet::unconstrained(static_cast<int>(k)));
    res.seconds = internal::seconds_since(start);
    return res;
}

/// Replaces result.violations with an audit against cs.
inline void attach_audit(FitResult& result, const ConstraintSet& cs) {
    result.violations = audit(result.assignment.values(), cs);
}

struct LpRoundConfig {
    double lambda = 1e-4;
    double eps_c = 1e-6;
    int max_iter = 100;
    std::uint64_t seed = 0;
    LloydConfig init;
    SimplexOptions lp;
};

namespace internal {

/// Moves single points between clusters, cheapest cost change first, until
/// every size bound holds or no legal move is left. Links are not considered.
inline void repair_sizes(std::vector<int>& labels, const DistanceMatrix& y, const ConstraintSet& cs) {
    const Index k = y.num_clusters();
    const Index n = y.size();
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        ++sizes[static_cast<std::size_t>(l)];
    }
    auto lower = [&](Index i) { return cs.lower[static_cast<std::size_t>(i)]; };
    auto upper = [&](Index i) { return cs.upper_or(static_cast<int>(i), static_cast<int>(n)); };
    auto move = [&](Index j, Index to) {
        --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
        labels[static_cast<std::size_t>(j)] = static_cast<int>(to);
        ++sizes[static_cast<std::size_t>(to)];
    };
    for (Index guard = 0; guard < n * k + 1; ++guard) {
        Index deficit = -1;
        Index excess = -1;
        for (Index i = 0; i < k; ++i) {
            if (deficit < 0 && sizes[static_cast<std::size_t>(i)] < lower(i)) {
                deficit = i;
            }
            if (excess < 0 && sizes[static_cast<std::size_t>(i)] > upper(i)) {
                excess = i;
            }
        }
        Index best_j = -1;
        Index best_to = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        if (deficit >= 0) {
            for (Index j = 0; j < n; ++j) {
                int from = labels[static_cast<std::size_t>(j)];
                if (from == deficit || sizes[static_cast<std::size_t>(from)] <= lower(from)) {
                    continue;
                }
                double cost = y(deficit, j) - y(from, j);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_j = j;
                    best_to = deficit;
                }
            }
        } else if (excess >= 0) {
            for (Index j = 0; j < n; ++j) {
                if (labels[static_cast<std::size_t>(j)] != excess) {
                    continue;
                }
                for (Index to = 0; to < k; ++to) {
                    if (to == excess || sizes[static_cast<std::size_t>(to)] >= upper(to)) {
                        continue;
                    }
                    double cost = y(to, j) - y(excess, j);
                    if (cost < best_cost) {
                        best_cost = cost;
                        best_j = j;
                        best_to = to;
                    }
                }
            }
        } else {
            return;
        }
        if (best_j < 0) {
            return;
        }
        move(best_j, best_to);
    }
}

inline std::vector<int> argmax_labels(const Matrix& s) {
    std::vector<int> labels(static_cast<std::size_t>(s.cols()));
    for (Index j = 0; j < s.cols(); ++j) {
        Index best = 0;
        s.col(j).maxCoeff(&best);
        labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return labels;
}

} // namespace internal

/**
 * Alternates the regularized centroid update with the LP relaxation of the
 * assignment, rounding each LP solution by column argmax and then repairing
 * size bounds greedily. Initialized from Lloyd.
 */
inline FitResult lp_relax_round(const DataMatrix& x, const ConstraintSet& cs, const LpRoundConfig& cfg = {}) {
    auto start = std::chrono::steady_clock::now();
    if (!(cfg.lambda > 0.0) || !(cfg.eps_c >= 0.0) || cfg.max_iter < 1) {
        throw InvalidArgument("lp-round needs lambda > 0, eps_c >= 0 and max_iter >= 1");
    }
    const Index k = cs.num_clusters();
    const Index n = x.size();
    internal::require_k_le_n(k, n);
    internal::require_feasible(cs, n, k);

    LloydConfig init = cfg.init;
    init.seed = cfg.seed;
    FitResult res;
    res.algorithm = "lp-round";
    Matrix s = lloyd(x, k, init).assignment.values();
    Matrix c_prev;
    CentroidMatrix c;
    SimplexBasis basis;
    for (int t = 1; t <= cfg.max_iter; ++t) {
        c = update_centroids(x, s, cfg.lambda);
        DistanceMatrix y = compute_distance_matrix(x, c);
        LpOutcome out = solve(build_relaxed_lp(y, cs), cfg.lp, &basis);
        if (out.status == LpStatus::infeasible) {
            throw InfeasibleError("relaxed assignment LP is infeasible");
        }
        if (!out.optimal()) {
            throw Error(std::string("relaxed assignment LP stopped without an optimum: ") + to_string(out.status));
        }
        std::vector<int> labels = internal::argmax_labels(assignment_values(out.values, k, n));
        internal::repair_sizes(labels, y, cs);
        Matrix s_new = assignment_from_labels(LabelVector(labels, static_cast<int>(k))).values();

        IterationRecord rec;
        rec.iteration = t;
        rec.centroid_delta = t == 1 ? 0.0 : (c.values() - c_prev).squaredNorm();
        rec.objective = inner_product(y, s_new) + cfg.lambda * c.values().squaredNorm();
        res.history.push_back(rec);
        res.outer_iterations = t;

        bool stop = (t >= 2 && rec.centroid_delta <= cfg.eps_c) || s_new == s;
        s = std::move(s_new);
        c_prev = c.values();
        if (stop) {
            res.converged = true;
            break;
        }
    }
    res.centroids = c;
    res.assignment = AssignmentMatrix::binary(s);
    res.labels = labels_from_assignment(res.assignment);
    res.wcss = wcss(x, res.centroids, res.assignment);
    res.violations = audit(s, cs);
    res.seconds = internal::seconds_since(start);
    return res;
}

} // namespace bckm

#endif
