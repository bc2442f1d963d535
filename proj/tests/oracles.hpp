// Independent reference computations used only by the tests. Nothing here
// calls into the simplex or the penalty loop.
#ifndef BCKM_TESTS_ORACLES_HPP
#define BCKM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "bckm/constraints.hpp"
#include "bckm/lp.hpp"

namespace oracle {

using bckm::Index;
using bckm::Matrix;

struct VertexResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> x;
};

/// Minimizes a bounded LP by trying every basis of n active hyperplanes.
inline VertexResult vertex_enumeration(const bckm::LinearProgram& lp, double tol = 1e-9) {
    const int n = lp.num_variables();
    struct Plane {
        Eigen::VectorXd a;
        double b;
    };
    std::vector<Plane> planes;
    for (const auto& row : lp.rows) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (const auto& t : row.terms) {
            a[t.var] += t.coef;
        }
        planes.push_back({a, row.rhs});
    }
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        a[j] = 1.0;
        planes.push_back({a, lp.lower[static_cast<std::size_t>(j)]});
        planes.push_back({a, lp.upper[static_cast<std::size_t>(j)]});
    }
    VertexResult best;
    const int p = static_cast<int>(planes.size());
    std::vector<int> pick(static_cast<std::size_t>(n));
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd a(n, n);
            Eigen::VectorXd b(n);
            for (int r = 0; r < n; ++r) {
                a.row(r) = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].a.transpose();
                b[r] = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
            if (lu.rank() < n) {
                return;
            }
            Eigen::VectorXd x = lu.solve(b);
            std::vector<double> xv(x.data(), x.data() + n);
            if (lp.max_violation(xv) > tol) {
                return;
            }
            double obj = lp.evaluate(xv);
            if (obj < best.objective) {
                best.feasible = true;
                best.objective = obj;
                best.x = xv;
            }
            return;
        }
        for (int i = start; i < p; ++i) {
            pick[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

/// Calls fn(labels) for every labeling in [0,k)^N.
inline void for_each_labeling(int num_points, int num_clusters, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> labels(static_cast<std::size_t>(num_points), 0);
    while (true) {
        fn(labels);
        int pos = 0;
        while (pos < num_points) {
            if (++labels[static_cast<std::size_t>(pos)] < num_clusters) {
                break;
            }
            labels[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == num_points) {
            return;
        }
    }
}

/// Direct constraint-by-constraint check of a labeling.
inline bool labeling_feasible(const std::vector<int>& labels, const bckm::ConstraintSet& cs) {
    const int k = cs.num_clusters();
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        ++sizes[static_cast<std::size_t>(l)];
    }
    for (int i = 0; i < k; ++i) {
        auto si = static_cast<std::size_t>(i);
        if (sizes[si] < cs.lower[si]) {
            return false;
        }
        if (cs.upper[si] && sizes[si] > *cs.upper[si]) {
            return false;
        }
    }
    for (const auto& pr : cs.must_link) {
        if (labels[static_cast<std::size_t>(pr.p)] != labels[static_cast<std::size_t>(pr.q)]) {
            return false;
        }
    }
    for (const auto& pr : cs.cannot_link) {
        if (labels[static_cast<std::size_t>(pr.p)] == labels[static_cast<std::size_t>(pr.q)]) {
            return false;
        }
    }
    for (const auto& group : cs.cannot_link_groups) {
        std::set<int> used;
        for (int p : group) {
            if (!used.insert(labels[static_cast<std::size_t>(p)]).second) {
                return false;
            }
        }
    }
    return true;
}

struct EnumerationOptimum {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<int> labels;
};

/// min <Y, S> over feasible binary S by brute force.
inline EnumerationOptimum best_assignment(const Matrix& y, const bckm::ConstraintSet& cs) {
    EnumerationOptimum best;
    for_each_labeling(static_cast<int>(y.cols()), static_cast<int>(y.rows()), [&](const std::vector<int>& labels) {
        if (!labeling_feasible(labels, cs)) {
            return;
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            obj += y(labels[j], static_cast<Index>(j));
        }
        if (obj < best.objective) {
            best = {true, obj, labels};
        }
    });
    return best;
}

/// Connected components of the must-link graph by breadth-first search.
inline std::set<std::set<int>> link_components(int num_points, const std::vector<bckm::LinkPair>& pairs) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_points));
    for (const auto& pr : pairs) {
        adj[static_cast<std::size_t>(pr.p)].push_back(pr.q);
        adj[static_cast<std::size_t>(pr.q)].push_back(pr.p);
    }
    std::vector<char> seen(static_cast<std::size_t>(num_points), 0);
    std::set<std::set<int>> out;
    for (int s = 0; s < num_points; ++s) {
        if (seen[static_cast<std::size_t>(s)] || adj[static_cast<std::size_t>(s)].empty()) {
            continue;
        }
        std::set<int> comp;
        std::queue<int> q;
        q.push(s);
        seen[static_cast<std::size_t>(s)] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            comp.insert(u);
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    q.push(v);
                }
            }
        }
        out.insert(comp);
    }
    return out;
}

/// Pairwise squared distance by explicit coordinate loop.
inline double squared_distance(const Matrix& a, Index ca, const Matrix& b, Index cb) {
    double s = 0.0;
    for (Index r = 0; r < a.rows(); ++r) {
        double d = a(r, ca) - b(r, cb);
        s += d * d;
    }
    return s;
}

/// Mutual information and entropies from the contingency table, natural log.
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pa;
    std::map<int, double> pb;
    for (std::size_t t = 0; t < a.size(); ++t) {
        joint[{a[t], b[t]}] += 1.0;
        pa[a[t]] += 1.0;
        pb[b[t]] += 1.0;
    }
    double ha = 0.0;
    double hb = 0.0;
    double mi = 0.0;
    for (auto& [l, c] : pa) {
        ha -= c / n * std::log(c / n);
    }
    for (auto& [l, c] : pb) {
        hb -= c / n * std::log(c / n);
    }
    for (auto& [ab, c] : joint) {
        mi += c / n * std::log((c / n) / ((pa[ab.first] / n) * (pb[ab.second] / n)));
    }
    if (ha == 0.0 && hb == 0.0) {
        return 1.0;
    }
    if (ha == 0.0 || hb == 0.0) {
        return 0.0;
    }
    return 2.0 * mi / (ha + hb);
}

} // namespace oracle

#endif
