#ifndef BCKM_LINEAR_HPP
#define BCKM_LINEAR_HPP

#include <vector>

#include "core.hpp"

namespace bckm {

enum class RowSense { equal, less_equal, greater_equal };

struct RowTerm {
    int var = 0;
    double coef = 0.0;
};

/// Sparse linear row: sum(coef * x[var]) (sense) rhs.
struct LinearRow {
    std::vector<RowTerm> terms;
    RowSense sense = RowSense::equal;
    double rhs = 0.0;
};

/// LP column of assignment entry S(i, j); columns are laid out point-major.
inline int assignment_var(Index cluster, Index point, Index num_clusters) {
    return static_cast<int>(point * num_clusters + cluster);
}

} // namespace bckm

#endif
