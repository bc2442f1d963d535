#ifndef BCKM_CONSTRAINTS_HPP
#define BCKM_CONSTRAINTS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "linear.hpp"

/**
 * @file constraints.hpp
 *
 * @brief Cluster-size bounds, must-link and cannot-link constraints: the
 * polytope of relaxed assignment matrices that every assignment step must
 * stay inside.
 */

namespace bckm {

struct LinkPair {
    int p = 0;
    int q = 0;
    friend bool operator==(const LinkPair&, const LinkPair&) = default;
};

/**
 * Size bounds per cluster plus pairwise link constraints.
 *
 * An absent upper bound means "at most N". Cannot-link cliques are optional;
 * they only feed the pigeonhole precheck, their pairwise expansion must still
 * be present in `cannot_link` for the constraint itself to be enforced.
 */
struct ConstraintSet {
    std::vector<int> lower;
    std::vector<std::optional<int>> upper;
    std::vector<LinkPair> must_link;
    std::vector<LinkPair> cannot_link;
    std::vector<std::vector<int>> cannot_link_groups;

    /// No size bounds and no links for k clusters.
    static ConstraintSet unconstrained(int num_clusters) {
        if (num_clusters < 1) {
            throw InvalidArgument("constraint set needs k >= 1");
        }
        ConstraintSet cs;
        cs.lower.assign(static_cast<std::size_t>(num_clusters), 0);
        cs.upper.assign(static_cast<std::size_t>(num_clusters), std::nullopt);
        return cs;
    }

    int num_clusters() const { return static_cast<int>(lower.size()); }

    int upper_or(std::size_t cluster, Index num_points) const {
        return upper[cluster] ? *upper[cluster] : static_cast<int>(num_points);
    }

    bool has_links() const {
        return !must_link.empty() || !cannot_link.empty() || !cannot_link_groups.empty();
    }

    /// cannot_link followed by the pairs implied by cannot_link_groups that
    /// are not already listed.
    std::vector<LinkPair> cannot_link_pairs() const {
        std::vector<LinkPair> out = cannot_link;
        if (cannot_link_groups.empty()) {
            return out;
        }
        std::set<std::pair<int, int>> seen;
        for (const auto& pr : cannot_link) {
            seen.insert(std::minmax(pr.p, pr.q));
        }
        for (const auto& group : cannot_link_groups) {
            for (std::size_t a = 0; a < group.size(); ++a) {
                for (std::size_t b = a + 1; b < group.size(); ++b) {
                    if (seen.insert(std::minmax(group[a], group[b])).second) {
                        out.push_back({group[a], group[b]});
                    }
                }
            }
        }
        return out;
    }

    /// Throws InvalidArgument unless the set is well formed for N points.
    void validate(Index num_points) const {
        if (lower.empty()) {
            throw InvalidArgument("constraint set needs k >= 1");
        }
        if (upper.size() != lower.size()) {
            throw InvalidArgument("lower and upper bound vectors differ in length");
        }
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (lower[i] < 0) {
                throw InvalidArgument("negative lower bound for cluster " + std::to_string(i));
            }
            if (upper[i]) {
                if (*upper[i] < lower[i]) {
                    throw InvalidArgument("upper bound below lower bound for cluster " + std::to_string(i));
                }
                if (*upper[i] > num_points) {
                    throw InvalidArgument("upper bound above N for cluster " + std::to_string(i));
                }
            }
        }
        auto check_pairs = [&](const std::vector<LinkPair>& pairs, const char* what) {
            for (const auto& pr : pairs) {
                if (pr.p < 0 || pr.q < 0 || pr.p >= num_points || pr.q >= num_points) {
                    throw InvalidArgument(std::string(what) + " pair (" + std::to_string(pr.p) + "," +
                                          std::to_string(pr.q) + ") references a point outside [0, N)");
                }
                if (pr.p == pr.q) {
                    throw InvalidArgument(std::string(what) + " pair links point " + std::to_string(pr.p) +
                                          " to itself");
                }
            }
        };
        check_pairs(must_link, "must-link");
        check_pairs(cannot_link, "cannot-link");
        for (const auto& group : cannot_link_groups) {
            for (int p : group) {
                if (p < 0 || p >= num_points) {
                    throw InvalidArgument("cannot-link group references point " + std::to_string(p));
                }
            }
        }
    }
};

/// Connected components of the must-link graph, restricted to linked points.
struct MustLinkClosure {
    /// Each group sorted ascending; groups ordered by their smallest member.
    std::vector<std::vector<int>> groups;
    /// group_of[p] is the group id of point p, or -1 when p has no must-link.
    std::vector<int> group_of;

    int representative(int group) const { return groups[static_cast<std::size_t>(group)].front(); }

    bool same_group(int p, int q) const {
        auto gp = group_of[static_cast<std::size_t>(p)];
        return gp >= 0 && gp == group_of[static_cast<std::size_t>(q)];
    }
};

inline MustLinkClosure close_must_links(const ConstraintSet& cs, Index num_points) {
    const auto n = static_cast<std::size_t>(num_points);
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& px = parent[static_cast<std::size_t>(x)];
            px = parent[static_cast<std::size_t>(px)];
            x = px;
        }
        return x;
    };
    std::vector<char> linked(n, 0);
    for (const auto& pr : cs.must_link) {
        linked[static_cast<std::size_t>(pr.p)] = 1;
        linked[static_cast<std::size_t>(pr.q)] = 1;
        int a = find(pr.p);
        int b = find(pr.q);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }

    MustLinkClosure closure;
    closure.group_of.assign(n, -1);
    std::vector<int> group_of_root(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        if (!linked[p]) {
            continue;
        }
        auto root = static_cast<std::size_t>(find(static_cast<int>(p)));
        if (group_of_root[root] < 0) {
            group_of_root[root] = static_cast<int>(closure.groups.size());
            closure.groups.emplace_back();
        }
        closure.group_of[p] = group_of_root[root];
        closure.groups[static_cast<std::size_t>(group_of_root[root])].push_back(static_cast<int>(p));
    }
    return closure;
}

struct Feasibility {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

/**
 * Cheap necessary conditions for a non-empty constraint polytope. A negative
 * answer is definitive; a positive one is not a feasibility guarantee.
 */
inline Feasibility precheck_feasibility(const ConstraintSet& cs, Index num_points, int num_clusters) {
    auto fail = [](std::string why) { return Feasibility{false, std::move(why)}; };
    if (cs.num_clusters() != num_clusters) {
        return fail("constraint set describes " + std::to_string(cs.num_clusters()) + " clusters, expected " +
                    std::to_string(num_clusters));
    }
    long long lower_sum = 0;
    long long upper_sum = 0;
    int largest_upper = 0;
    for (std::size_t i = 0; i < cs.lower.size(); ++i) {
        lower_sum += cs.lower[i];
        int u = cs.upper_or(i, num_points);
        upper_sum += u;
        largest_upper = std::max(largest_upper, u);
    }
    if (lower_sum > num_points) {
        return fail("sum of lower bounds " + std::to_string(lower_sum) + " exceeds N = " +
                    std::to_string(num_points));
    }
    if (upper_sum < num_points) {
        return fail("sum of upper bounds " + std::to_string(upper_sum) + " is below N = " +
                    std::to_string(num_points));
    }

    auto closure = close_must_links(cs, num_points);
    for (const auto& group : closure.groups) {
        if (static_cast<int>(group.size()) > largest_upper) {
            return fail("must-link group of size " + std::to_string(group.size()) +
                        " exceeds every cluster upper bound");
        }
    }
    for (const auto& pr : cs.cannot_link) {
        if (closure.same_group(pr.p, pr.q)) {
            return fail("cannot-link pair (" + std::to_string(pr.p) + "," + std::to_string(pr.q) +
                        ") lies inside one must-link group");
        }
    }
    for (const auto& group : cs.cannot_link_groups) {
        if (static_cast<int>(group.size()) > num_clusters) {
            return fail("cannot-link clique of size " + std::to_string(group.size()) + " exceeds k = " +
                        std::to_string(num_clusters));
        }
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t b = a + 1; b < group.size(); ++b) {
                if (group[a] == group[b] || closure.same_group(group[a], group[b])) {
                    return fail("cannot-link clique contains two must-linked points");
                }
            }
        }
    }
    return {};
}

struct SizeViolation {
    int cluster = 0;
    int actual = 0;
    int lower = 0;
    std::optional<int> upper;
};

/// Everything a rounded assignment gets wrong with respect to the constraint set.
struct ViolationReport {
    std::vector<SizeViolation> size_violations;
    std::vector<LinkPair> must_link_violations;
    std::vector<LinkPair> cannot_link_violations;
    /// Points whose rounded column does not hold exactly one 1.
    std::vector<int> assignment_violations;
    int nonbinary_entries = 0;

    bool empty() const {
        return size_violations.empty() && must_link_violations.empty() && cannot_link_violations.empty() &&
               assignment_violations.empty() && nonbinary_entries == 0;
    }

    std::size_t link_violation_count() const {
        return must_link_violations.size() + cannot_link_violations.size();
    }
};

inline constexpr double default_binary_tolerance = 1e-6;

/// Audits S (entries rounded to nearest integer) against the constraint set.
inline ViolationReport audit(const Matrix& s, const ConstraintSet& cs, double tol = default_binary_tolerance) {
    if (s.rows() != cs.num_clusters()) {
        throw InvalidArgument("assignment has " + std::to_string(s.rows()) + " rows but constraints describe " +
                              std::to_string(cs.num_clusters()) + " clusters");
    }
    cs.validate(s.cols());
    const Index k = s.rows();
    const Index n = s.cols();
    Matrix rounded(k, n);
    ViolationReport report;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < k; ++i) {
            double r = std::round(s(i, j));
            if (std::abs(s(i, j) - r) > tol) {
                ++report.nonbinary_entries;
            }
            rounded(i, j) = r;
        }
        if (rounded.col(j).sum() != 1.0 || rounded.col(j).minCoeff() < 0.0) {
            report.assignment_violations.push_back(static_cast<int>(j));
        }
    }
    for (Index i = 0; i < k; ++i) {
        auto actual = static_cast<int>(rounded.row(i).sum());
        auto ci = static_cast<std::size_t>(i);
        int u = cs.upper_or(ci, n);
        if (actual < cs.lower[ci] || actual > u) {
            report.size_violations.push_back({static_cast<int>(i), actual, cs.lower[ci], cs.upper[ci]});
        }
    }
    for (const auto& pr : cs.must_link) {
        if (rounded.col(pr.p) != rounded.col(pr.q)) {
            report.must_link_violations.push_back(pr);
        }
    }
    for (const auto& pr : cs.cannot_link_pairs()) {
        if ((rounded.col(pr.p) + rounded.col(pr.q)).maxCoeff() > 1.0) {
            report.cannot_link_violations.push_back(pr);
        }
    }
    return report;
}

inline ViolationReport audit(const AssignmentMatrix& s, const ConstraintSet& cs,
                             double tol = default_binary_tolerance) {
    return audit(s.values(), cs, tol);
}

/**
 * Linear rows describing the constraint polytope over the k*N assignment
 * variables, in canonical order: one equality per point (columns sum to 1),
 * lower size bounds for every cluster, finite upper size bounds, k equalities
 * tying each must-link member to its group representative, and k
 * inequalities per cannot-link pair (group-implied pairs included).
 */
inline std::vector<LinearRow> emit_lp_rows(const ConstraintSet& cs, Index num_points, Index num_clusters) {
    std::vector<LinearRow> rows;
    const Index n = num_points;
    const Index k = num_clusters;
    for (Index j = 0; j < n; ++j) {
        LinearRow row{{}, RowSense::equal, 1.0};
        for (Index i = 0; i < k; ++i) {
            row.terms.push_back({assignment_var(i, j, k), 1.0});
        }
        rows.push_back(std::move(row));
    }
    auto size_row = [&](Index i, RowSense sense, double rhs) {
        LinearRow row{{}, sense, rhs};
        for (Index j = 0; j < n; ++j) {
            row.terms.push_back({assignment_var(i, j, k), 1.0});
        }
        return row;
    };
    for (Index i = 0; i < k; ++i) {
        rows.push_back(size_row(i, RowSense::greater_equal, cs.lower[static_cast<std::size_t>(i)]));
    }
    for (Index i = 0; i < k; ++i) {
        if (const auto& u = cs.upper[static_cast<std::size_t>(i)]) {
            rows.push_back(size_row(i, RowSense::less_equal, *u));
        }
    }
    auto closure = close_must_links(cs, n);
    for (const auto& group : closure.groups) {
        const int rep = group.front();
        for (std::size_t m = 1; m < group.size(); ++m) {
            for (Index i = 0; i < k; ++i) {
                rows.push_back({{{assignment_var(i, group[m], k), 1.0}, {assignment_var(i, rep, k), -1.0}},
                                RowSense::equal,
                                0.0});
            }
        }
    }
    for (const auto& pr : cs.cannot_link_pairs()) {
        for (Index i = 0; i < k; ++i) {
            rows.push_back({{{assignment_var(i, pr.p, k), 1.0}, {assignment_var(i, pr.q, k), 1.0}},
                            RowSense::less_equal,
                            1.0});
        }
    }
    return rows;
}

} // namespace bckm

#endif
