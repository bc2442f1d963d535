#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bckm/constraints.hpp"
#include "bckm/lp.hpp"
#include "oracles.hpp"

using namespace bckm;

namespace {

std::vector<LinkPair> random_pairs(std::mt19937_64& rng, int n, int count) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<LinkPair> out;
    while (static_cast<int>(out.size()) < count) {
        int p = pick(rng);
        int q = pick(rng);
        if (p != q) {
            out.push_back({p, q});
        }
    }
    return out;
}

std::set<std::set<int>> as_sets(const MustLinkClosure& c) {
    std::set<std::set<int>> out;
    for (const auto& g : c.groups) {
        out.insert(std::set<int>(g.begin(), g.end()));
    }
    return out;
}

/// Evaluates every emitted row at S; true when all hold exactly.
bool rows_hold(const std::vector<LinearRow>& rows, const Matrix& s) {
    for (const auto& row : rows) {
        double act = 0.0;
        for (const auto& t : row.terms) {
            const Index k = s.rows();
            act += t.coef * s(t.var % k, t.var / k);
        }
        if ((row.sense == RowSense::equal && act != row.rhs) ||
            (row.sense == RowSense::less_equal && act > row.rhs) ||
            (row.sense == RowSense::greater_equal && act < row.rhs)) {
            return false;
        }
    }
    return true;
}

ConstraintSet random_constraints(std::mt19937_64& rng, int n, int k) {
    ConstraintSet cs = ConstraintSet::unconstrained(k);
    std::uniform_int_distribution<int> lo(0, n / k);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < k; ++i) {
        cs.lower[static_cast<std::size_t>(i)] = lo(rng);
        if (coin(rng)) {
            cs.upper[static_cast<std::size_t>(i)] = std::min(n, cs.lower[static_cast<std::size_t>(i)] + lo(rng) + 1);
        }
    }
    std::uniform_int_distribution<int> count(0, 2);
    cs.must_link = random_pairs(rng, n, count(rng));
    cs.cannot_link = random_pairs(rng, n, count(rng));
    return cs;
}

} // namespace

TEST(ConstraintSet, ValidateRejectsBadInput) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.must_link.push_back({1, 1});
    EXPECT_THROW(cs.validate(4), InvalidArgument);
    cs = ConstraintSet::unconstrained(2);
    cs.cannot_link.push_back({0, 4});
    EXPECT_THROW(cs.validate(4), InvalidArgument);
    cs = ConstraintSet::unconstrained(2);
    cs.lower[0] = 3;
    cs.upper[0] = 2;
    EXPECT_THROW(cs.validate(4), InvalidArgument);
    cs = ConstraintSet::unconstrained(2);
    cs.lower[1] = -1;
    EXPECT_THROW(cs.validate(4), InvalidArgument);
    EXPECT_NO_THROW(ConstraintSet::unconstrained(3).validate(1));
}

TEST(MustLinkClosure, Transitivity) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.must_link = {{1, 2}, {2, 3}};
    auto c = close_must_links(cs, 5);
    ASSERT_EQ(c.groups.size(), 1u);
    EXPECT_EQ(c.groups[0], (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(c.representative(0), 1);
    EXPECT_TRUE(c.same_group(3, 1));
    EXPECT_FALSE(c.same_group(0, 1));
    EXPECT_EQ(c.group_of[0], -1);
}

TEST(MustLinkClosure, EmptyPairs) {
    auto c = close_must_links(ConstraintSet::unconstrained(2), 5);
    EXPECT_TRUE(c.groups.empty());
}

TEST(MustLinkClosure, MatchesBreadthFirstComponents) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + trial % 20;
        ConstraintSet cs = ConstraintSet::unconstrained(3);
        cs.must_link = random_pairs(rng, n, trial % 12);
        auto closure = close_must_links(cs, n);
        EXPECT_EQ(as_sets(closure), oracle::link_components(n, cs.must_link)) << "trial " << trial;
    }
}

TEST(MustLinkClosure, Idempotent) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 12;
        ConstraintSet cs = ConstraintSet::unconstrained(2);
        cs.must_link = random_pairs(rng, n, 6);
        auto first = close_must_links(cs, n);
        ConstraintSet again = ConstraintSet::unconstrained(2);
        for (const auto& g : first.groups) {
            for (std::size_t m = 1; m < g.size(); ++m) {
                again.must_link.push_back({g.front(), g[m]});
            }
        }
        auto second = close_must_links(again, n);
        EXPECT_EQ(first.groups, second.groups);
        EXPECT_EQ(first.group_of, second.group_of);
    }
}

TEST(Precheck, LowerBoundsExceedN) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.lower = {3, 3};
    auto f = precheck_feasibility(cs, 5, 2);
    EXPECT_FALSE(f.ok);
    EXPECT_FALSE(f.reason.empty());
}

TEST(Precheck, UpperBoundsBelowN) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.upper = {2, 2};
    EXPECT_FALSE(precheck_feasibility(cs, 5, 2).ok);
    cs.upper = {2, std::nullopt};
    EXPECT_TRUE(precheck_feasibility(cs, 5, 2).ok);
}

TEST(Precheck, MustAndCannotLinkSamePair) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.must_link = {{1, 2}};
    cs.cannot_link = {{1, 2}};
    EXPECT_FALSE(precheck_feasibility(cs, 4, 2).ok);
}

TEST(Precheck, CannotLinkCliqueLargerThanK) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.cannot_link_groups = {{1, 2, 3}};
    EXPECT_FALSE(precheck_feasibility(cs, 4, 2).ok);
    cs = ConstraintSet::unconstrained(3);
    cs.cannot_link_groups = {{1, 2, 3}};
    EXPECT_TRUE(precheck_feasibility(cs, 4, 3).ok);
}

TEST(Precheck, NeverRejectsAnInstanceWithAFeasibleLabeling) {
    std::mt19937_64 rng(47);
    int feasible_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 1 + trial % 3;
        const int n = 2 + trial % 7;
        ConstraintSet cs = random_constraints(rng, n, k);
        bool exists = false;
        oracle::for_each_labeling(n, k, [&](const std::vector<int>& labels) {
            exists = exists || oracle::labeling_feasible(labels, cs);
        });
        if (exists) {
            ++feasible_seen;
            EXPECT_TRUE(precheck_feasibility(cs, n, k).ok) << "trial " << trial;
        }
    }
    EXPECT_GT(feasible_seen, 50);
}

TEST(Audit, BalancedAssignmentWithoutLinksIsClean) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.lower = {2, 2};
    cs.upper = {2, 2};
    Matrix s(2, 4);
    s << 1, 0, 1, 0, 0, 1, 0, 1;
    EXPECT_TRUE(audit(s, cs).empty());
}

TEST(Audit, ReportsBrokenMustLink) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.must_link = {{0, 1}};
    Matrix s(2, 3);
    s << 1, 0, 1, 0, 1, 0;
    auto r = audit(s, cs);
    ASSERT_EQ(r.must_link_violations.size(), 1u);
    EXPECT_EQ(r.must_link_violations[0], (LinkPair{0, 1}));
    EXPECT_TRUE(r.cannot_link_violations.empty());
}

TEST(Audit, ReportsSizesNonbinaryAndGroupPairs) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.lower = {0, 2};
    cs.cannot_link_groups = {{0, 1, 2}};
    Matrix s(2, 3);
    s << 1, 1, 0.6, 0, 0, 0.4;
    auto r = audit(s, cs);
    EXPECT_EQ(r.nonbinary_entries, 2);
    ASSERT_EQ(r.size_violations.size(), 1u);
    EXPECT_EQ(r.size_violations[0].cluster, 1);
    EXPECT_EQ(r.size_violations[0].actual, 0);
    EXPECT_EQ(r.link_violation_count(), 3u);
}

TEST(Audit, ShapeMismatchThrows) {
    EXPECT_THROW(audit(Matrix::Zero(3, 4), ConstraintSet::unconstrained(2)), InvalidArgument);
}

TEST(Audit, AgreesWithDirectChecker) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + trial % 4;
        const int n = 3 + trial % 8;
        ConstraintSet cs = random_constraints(rng, n, k);
        std::uniform_int_distribution<int> pick(0, k - 1);
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& l : labels) {
            l = pick(rng);
        }
        auto s = assignment_from_labels(LabelVector(labels, k));
        EXPECT_EQ(audit(s, cs).empty(), oracle::labeling_feasible(labels, cs)) << "trial " << trial;
    }
}

TEST(EmitRows, CountsWithoutLinks) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.lower = {1, 1};
    cs.upper = {2, 2};
    auto rows = emit_lp_rows(cs, 3, 2);
    int eq = 0;
    int ineq = 0;
    for (const auto& r : rows) {
        (r.sense == RowSense::equal ? eq : ineq) += 1;
    }
    EXPECT_EQ(eq, 3);
    EXPECT_EQ(ineq, 4);
}

TEST(EmitRows, UnboundedUpperOmitted) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    cs.lower = {1, 1};
    cs.upper = {2, std::nullopt};
    EXPECT_EQ(emit_lp_rows(cs, 3, 2).size(), 3u + 2u + 1u);
}

TEST(EmitRows, OneMustLinkAddsKEqualities) {
    ConstraintSet cs = ConstraintSet::unconstrained(3);
    auto base = emit_lp_rows(cs, 5, 3).size();
    cs.must_link = {{4, 2}};
    auto rows = emit_lp_rows(cs, 5, 3);
    ASSERT_EQ(rows.size(), base + 3);
    for (std::size_t r = base; r < rows.size(); ++r) {
        EXPECT_EQ(rows[r].sense, RowSense::equal);
        EXPECT_EQ(rows[r].rhs, 0.0);
    }
}

TEST(EmitRows, OneCannotLinkAddsKInequalities) {
    ConstraintSet cs = ConstraintSet::unconstrained(3);
    auto base = emit_lp_rows(cs, 5, 3).size();
    cs.cannot_link = {{0, 3}};
    auto rows = emit_lp_rows(cs, 5, 3);
    ASSERT_EQ(rows.size(), base + 3);
    for (std::size_t r = base; r < rows.size(); ++r) {
        EXPECT_EQ(rows[r].sense, RowSense::less_equal);
        EXPECT_EQ(rows[r].rhs, 1.0);
        EXPECT_EQ(rows[r].terms.size(), 2u);
    }
}

TEST(EmitRows, MustLinkUsesClosedGroups) {
    ConstraintSet cs = ConstraintSet::unconstrained(2);
    auto base = emit_lp_rows(cs, 6, 2).size();
    cs.must_link = {{1, 2}, {2, 3}, {3, 1}};
    // group {1,2,3}: two members tied to representative 1, k rows each
    EXPECT_EQ(emit_lp_rows(cs, 6, 2).size(), base + 4);
}

TEST(EmitRows, AuditEmptyIffRowsHold) {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + trial % 3;
        const int n = 2 + trial % 6;
        ConstraintSet cs = random_constraints(rng, n, k);
        if (!precheck_feasibility(cs, n, k).ok) {
            continue;
        }
        auto rows = emit_lp_rows(cs, n, k);
        std::uniform_int_distribution<int> pick(0, k - 1);
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& l : labels) {
            l = pick(rng);
        }
        Matrix s = assignment_from_labels(LabelVector(labels, k)).values();
        EXPECT_EQ(audit(s, cs).empty(), rows_hold(rows, s)) << "trial " << trial;
    }
}
