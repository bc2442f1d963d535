#ifndef BCKM_METRICS_HPP
#define BCKM_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "constraints.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "fit_result.hpp"

namespace bckm {

/**
 * Normalized mutual information 2 I(a; b) / (H(a) + H(b)), natural log.
 * Two constant labelings give 1; otherwise a zero entropy gives 0.
 */
inline double nmi(const LabelVector& a, const LabelVector& b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("nmi needs labelings of equal length, got " + std::to_string(a.size()) + " and " +
                              std::to_string(b.size()));
    }
    if (a.size() == 0) {
        throw InvalidArgument("nmi needs at least one point");
    }
    const double n = static_cast<double>(a.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pa;
    std::map<int, double> pb;
    for (std::size_t j = 0; j < a.size(); ++j) {
        joint[{a[j], b[j]}] += 1.0;
        pa[a[j]] += 1.0;
        pb[b[j]] += 1.0;
    }
    auto entropy = [n](const std::map<int, double>& counts) {
        double h = 0.0;
        for (const auto& [label, c] : counts) {
            h -= (c / n) * std::log(c / n);
        }
        return h;
    };
    const double ha = entropy(pa);
    const double hb = entropy(pb);
    if (pa.size() == 1 && pb.size() == 1) {
        return 1.0;
    }
    if (ha <= 0.0 || hb <= 0.0) {
        return 0.0;
    }
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        mi += (c / n) * std::log(c * n / (pa[key.first] * pb[key.second]));
    }
    return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

/// Within-cluster sum of squares of a binary assignment.
inline double wcss(const DataMatrix& x, const CentroidMatrix& c, const AssignmentMatrix& s) {
    if (!s.is_binary()) {
        throw InvalidArgument("wcss requires a binary assignment matrix");
    }
    if (s.size() != x.size() || s.num_clusters() != c.num_clusters() || x.dim() != c.dim()) {
        throw InvalidArgument("wcss shape mismatch: data " + internal::shape_string(x.dim(), x.size()) +
                              ", centroids " + internal::shape_string(c.dim(), c.num_clusters()) +
                              ", assignment " + internal::shape_string(s.num_clusters(), s.size()));
    }
    double total = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        Index i = 0;
        s.values().col(j).maxCoeff(&i);
        total += (x.point(j) - c.centroid(i)).squaredNorm();
    }
    return total;
}

struct EvalReport {
    std::optional<double> nmi;
    double wcss = 0.0;
    std::vector<int> sizes;
    ViolationReport violations;
    double runtime_seconds = 0.0;
};

inline EvalReport evaluate(const FitResult& result, const std::optional<LabelVector>& truth,
                           const ConstraintSet& cs) {
    EvalReport report;
    if (truth) {
        report.nmi = nmi(result.labels, *truth);
    }
    report.wcss = result.wcss;
    report.sizes = result.labels.cluster_sizes();
    report.violations = audit(result.assignment.values(), cs);
    report.runtime_seconds = result.seconds;
    return report;
}

/// Report for labels alone; centroids are the cluster means.
inline EvalReport evaluate_labels(const DataMatrix& x, const LabelVector& labels,
                                  const std::optional<LabelVector>& truth, const ConstraintSet& cs) {
    if (labels.size() != static_cast<std::size_t>(x.size())) {
        throw InvalidArgument("labels cover " + std::to_string(labels.size()) + " points but the data has " +
                              std::to_string(x.size()));
    }
    const Index k = labels.num_clusters();
    Matrix sums = Matrix::Zero(x.dim(), k);
    std::vector<int> sizes = labels.cluster_sizes();
    for (std::size_t j = 0; j < labels.size(); ++j) {
        sums.col(labels[j]) += x.point(static_cast<Index>(j));
    }
    for (Index i = 0; i < k; ++i) {
        if (sizes[static_cast<std::size_t>(i)] > 0) {
            sums.col(i) /= sizes[static_cast<std::size_t>(i)];
        }
    }
    FitResult fr;
    fr.centroids = CentroidMatrix(std::move(sums));
    fr.assignment = assignment_from_labels(labels);
    fr.labels = labels;
    fr.wcss = wcss(x, fr.centroids, fr.assignment);
    return evaluate(fr, truth, cs);
}

/// Column names of csv_row, in order.
inline const char* eval_csv_header() { return "nmi,wcss,min_size,max_size,size_violations,link_violations,seconds"; }

/// Empty nmi field when no truth was given.
inline std::string eval_csv_row(const EvalReport& r) {
    std::ostringstream out;
    if (r.nmi) {
        internal::write_double(out, *r.nmi);
    }
    out << ',';
    internal::write_double(out, r.wcss);
    int lo = r.sizes.empty() ? 0 : *std::min_element(r.sizes.begin(), r.sizes.end());
    int hi = r.sizes.empty() ? 0 : *std::max_element(r.sizes.begin(), r.sizes.end());
    out << ',' << lo << ',' << hi << ',' << r.violations.size_violations.size() << ','
        << r.violations.link_violation_count() << ',';
    internal::write_double(out, r.runtime_seconds);
    return out.str();
}

} // namespace bckm

#endif
