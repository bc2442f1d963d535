#ifndef BCKM_CENTROIDS_HPP
#define BCKM_CENTROIDS_HPP

#include <string>

#include "core.hpp"

namespace bckm {

/// C = X S^T (S S^T + lambda I)^-1, the minimizer of ||X - C S||^2 + lambda ||C||^2.
inline CentroidMatrix update_centroids(const DataMatrix& x, const Matrix& s, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("lambda must be positive and finite");
    }
    if (s.cols() != x.size() || s.rows() < 1) {
        throw InvalidArgument("assignment is " + internal::shape_string(s.rows(), s.cols()) + " but data has " +
                              std::to_string(x.size()) + " points");
    }
    Matrix gram = s * s.transpose();
    gram.diagonal().array() += lambda;
    Matrix rhs = s * x.values().transpose();  // k x d
    Matrix c = gram.ldlt().solve(rhs);
    return CentroidMatrix(c.transpose());
}

inline CentroidMatrix update_centroids(const DataMatrix& x, const AssignmentMatrix& s, double lambda) {
    return update_centroids(x, s.values(), lambda);
}

} // namespace bckm

#endif
