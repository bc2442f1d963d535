// Seeded instance generators shared by the unit tests and the acceptance suite.
#ifndef BCKM_TESTS_FIXTURES_HPP
#define BCKM_TESTS_FIXTURES_HPP

#include <random>
#include <vector>

#include "bckm/lp.hpp"

namespace fixtures {

/// Feasible, bounded LP with 2..6 columns and 1..4 rows.
inline bckm::LinearProgram random_small_lp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> ncols(2, 6);
    std::uniform_int_distribution<int> nrows(1, 4);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> cost(-5.0, 5.0);
    std::uniform_real_distribution<double> lo(-2.0, 0.0);
    std::uniform_real_distribution<double> width(0.5, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> sense(0, 2);

    bckm::LinearProgram lp;
    const int n = ncols(rng);
    std::vector<double> interior;
    for (int j = 0; j < n; ++j) {
        double l = lo(rng);
        double u = l + width(rng);
        lp.add_variable(cost(rng), l, u);
        interior.push_back(l + (u - l) * unit(rng));
    }
    const int m = nrows(rng);
    for (int r = 0; r < m; ++r) {
        bckm::LinearRow row;
        double act = 0.0;
        for (int j = 0; j < n; ++j) {
            if (unit(rng) < 0.25) {
                continue;
            }
            double a = coef(rng);
            row.terms.push_back({j, a});
            act += a * interior[static_cast<std::size_t>(j)];
        }
        if (row.terms.empty()) {
            row.terms.push_back({0, 1.0});
            act = interior[0];
        }
        switch (sense(rng)) {
        case 0:
            row.sense = bckm::RowSense::equal;
            row.rhs = act;
            break;
        case 1:
            row.sense = bckm::RowSense::less_equal;
            row.rhs = act + unit(rng);
            break;
        default:
            row.sense = bckm::RowSense::greater_equal;
            row.rhs = act - unit(rng);
            break;
        }
        lp.add_row(std::move(row));
    }
    return lp;
}

/// LPs whose rows cannot all hold inside the column box.
inline std::vector<bckm::LinearProgram> infeasible_lps() {
    using bckm::RowSense;
    std::vector<bckm::LinearProgram> out;
    {
        bckm::LinearProgram lp;
        lp.add_variable(1.0, 0.0, 1.0);
        lp.add_variable(1.0, 0.0, 1.0);
        lp.add_row({{{0, 1.0}, {1, 1.0}}, RowSense::greater_equal, 3.0});
        out.push_back(lp);
    }
    {
        bckm::LinearProgram lp;
        lp.add_variable(0.0, 0.0, 1.0);
        lp.add_row({{{0, 1.0}}, RowSense::equal, 2.0});
        out.push_back(lp);
    }
    {
        bckm::LinearProgram lp;
        lp.add_variable(1.0, -5.0, 5.0);
        lp.add_variable(-1.0, -5.0, 5.0);
        lp.add_row({{{0, 1.0}, {1, 1.0}}, RowSense::less_equal, 1.0});
        lp.add_row({{{0, 1.0}, {1, 1.0}}, RowSense::greater_equal, 2.0});
        out.push_back(lp);
    }
    {
        bckm::LinearProgram lp;
        for (int j = 0; j < 3; ++j) {
            lp.add_variable(1.0, 0.0, 1.0);
        }
        lp.add_row({{{0, 1.0}, {1, 1.0}, {2, 1.0}}, RowSense::equal, 2.0});
        lp.add_row({{{0, 1.0}, {1, 1.0}}, RowSense::less_equal, 0.5});
        lp.add_row({{{2, 1.0}}, RowSense::less_equal, 0.5});
        out.push_back(lp);
    }
    return out;
}

} // namespace fixtures

#endif
