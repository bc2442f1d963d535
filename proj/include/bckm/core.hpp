#ifndef BCKM_CORE_HPP
#define BCKM_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

/**
 * @file core.hpp
 *
 * @brief Numeric containers shared by every algorithm: points, centroids,
 * assignment matrices, labels and squared-distance matrices.
 *
 * Points are stored column-major, one point per column (d x N).
 * Cluster labels are 0-based.
 */

namespace bckm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;

namespace internal {

inline std::string shape_string(Index rows, Index cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + " contains non-finite entries");
    }
}

} // namespace internal

/// d x N point set, one point per column.
class DataMatrix {
public:
    DataMatrix() = default;

    explicit DataMatrix(Matrix values) : values_(std::move(values)) {
        if (values_.rows() < 1 || values_.cols() < 1) {
            throw InvalidArgument("data matrix must have d >= 1 and N >= 1, got " +
                                  internal::shape_string(values_.rows(), values_.cols()));
        }
        internal::require_finite(values_, "data matrix");
    }

    Index dim() const { return values_.rows(); }
    Index size() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    auto point(Index j) const { return values_.col(j); }

private:
    Matrix values_;
};

/// d x k centroid set, one centroid per column.
class CentroidMatrix {
public:
    CentroidMatrix() = default;

    explicit CentroidMatrix(Matrix values) : values_(std::move(values)) {
        if (values_.rows() < 1 || values_.cols() < 1) {
            throw InvalidArgument("centroid matrix must have d >= 1 and k >= 1, got " +
                                  internal::shape_string(values_.rows(), values_.cols()));
        }
        internal::require_finite(values_, "centroid matrix");
    }

    Index dim() const { return values_.rows(); }
    Index num_clusters() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    auto centroid(Index i) const { return values_.col(i); }

private:
    Matrix values_;
};

enum class AssignmentMode { relaxed, binary };

/**
 * k x N assignment matrix S. In relaxed mode every entry lies in [0, 1];
 * in binary mode every entry is 0 or 1 and each column sums to exactly 1.
 */
class AssignmentMatrix {
public:
    AssignmentMatrix() = default;

    static AssignmentMatrix relaxed(Matrix values) {
        if (values.rows() < 1 || values.cols() < 1) {
            throw InvalidArgument("assignment matrix must be non-empty");
        }
        internal::require_finite(values, "assignment matrix");
        if (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0) {
            throw InvalidArgument("relaxed assignment entries must lie in [0, 1]");
        }
        return AssignmentMatrix(std::move(values), AssignmentMode::relaxed);
    }

    static AssignmentMatrix binary(Matrix values) {
        if (values.rows() < 1 || values.cols() < 1) {
            throw InvalidArgument("assignment matrix must be non-empty");
        }
        for (Index j = 0; j < values.cols(); ++j) {
            int ones = 0;
            for (Index i = 0; i < values.rows(); ++i) {
                double v = values(i, j);
                if (v == 1.0) {
                    ++ones;
                } else if (v != 0.0) {
                    throw InvalidArgument("binary assignment entry (" + std::to_string(i) + "," +
                                          std::to_string(j) + ") is neither 0 nor 1");
                }
            }
            if (ones != 1) {
                throw InvalidArgument("binary assignment column " + std::to_string(j) +
                                      " must contain exactly one 1");
            }
        }
        return AssignmentMatrix(std::move(values), AssignmentMode::binary);
    }

    Index num_clusters() const { return values_.rows(); }
    Index size() const { return values_.cols(); }
    AssignmentMode mode() const { return mode_; }
    bool is_binary() const { return mode_ == AssignmentMode::binary; }
    const Matrix& values() const { return values_; }

private:
    AssignmentMatrix(Matrix values, AssignmentMode mode) : values_(std::move(values)), mode_(mode) {}

    Matrix values_;
    AssignmentMode mode_ = AssignmentMode::relaxed;
};

/// One label per point, each in [0, k).
class LabelVector {
public:
    LabelVector() = default;

    LabelVector(std::vector<int> labels, int num_clusters)
        : labels_(std::move(labels)), num_clusters_(num_clusters) {
        if (num_clusters_ < 1) {
            throw InvalidArgument("label vector needs k >= 1");
        }
        for (std::size_t j = 0; j < labels_.size(); ++j) {
            if (labels_[j] < 0 || labels_[j] >= num_clusters_) {
                throw InvalidArgument("label " + std::to_string(labels_[j]) + " at position " +
                                      std::to_string(j) + " outside [0, " +
                                      std::to_string(num_clusters_) + ")");
            }
        }
    }

    /// Infers k as one past the largest label.
    static LabelVector from_values(std::vector<int> labels) {
        int k = 0;
        for (int l : labels) {
            k = std::max(k, l + 1);
        }
        return LabelVector(std::move(labels), std::max(k, 1));
    }

    std::size_t size() const { return labels_.size(); }
    int num_clusters() const { return num_clusters_; }
    int operator[](std::size_t j) const { return labels_[j]; }
    const std::vector<int>& values() const { return labels_; }

    std::vector<int> cluster_sizes() const {
        std::vector<int> sizes(static_cast<std::size_t>(num_clusters_), 0);
        for (int l : labels_) {
            ++sizes[static_cast<std::size_t>(l)];
        }
        return sizes;
    }

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    std::vector<int> labels_;
    int num_clusters_ = 1;
};

/// k x N matrix of exact squared Euclidean distances, Y(i, j) = |c_i - x_j|^2.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(Matrix values) : values_(std::move(values)) {}

    Index num_clusters() const { return values_.rows(); }
    Index size() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    double operator()(Index i, Index j) const { return values_(i, j); }

private:
    Matrix values_;
};

inline DistanceMatrix compute_distance_matrix(const DataMatrix& points, const CentroidMatrix& centroids) {
    if (points.dim() != centroids.dim()) {
        throw InvalidArgument("dimension mismatch: data is " +
                              internal::shape_string(points.dim(), points.size()) + ", centroids are " +
                              internal::shape_string(centroids.dim(), centroids.num_clusters()));
    }
    const Index k = centroids.num_clusters();
    const Index n = points.size();
    Matrix out(k, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < k; ++i) {
            out(i, j) = (centroids.centroid(i) - points.point(j)).squaredNorm();
        }
    }
    return DistanceMatrix(std::move(out));
}

inline LabelVector labels_from_assignment(const AssignmentMatrix& s) {
    if (!s.is_binary()) {
        throw InvalidArgument("labels_from_assignment requires a binary assignment matrix");
    }
    std::vector<int> labels(static_cast<std::size_t>(s.size()));
    for (Index j = 0; j < s.size(); ++j) {
        Index best = 0;
        s.values().col(j).maxCoeff(&best);
        labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return LabelVector(std::move(labels), static_cast<int>(s.num_clusters()));
}

inline AssignmentMatrix assignment_from_labels(const LabelVector& labels) {
    Matrix s = Matrix::Zero(labels.num_clusters(), static_cast<Index>(labels.size()));
    for (std::size_t j = 0; j < labels.size(); ++j) {
        s(labels[j], static_cast<Index>(j)) = 1.0;
    }
    return AssignmentMatrix::binary(std::move(s));
}

/// Frobenius inner product <Y, S>.
inline double inner_product(const DistanceMatrix& y, const Matrix& s) {
    return y.values().cwiseProduct(s).sum();
}

} // namespace bckm

#endif
