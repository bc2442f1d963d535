#ifndef BCKM_FIT_RESULT_HPP
#define BCKM_FIT_RESULT_HPP

#include <string>
#include <vector>

#include "constraints.hpp"
#include "core.hpp"
#include "penalty_assignment.hpp"

namespace bckm {

/// One outer iteration of a clustering run.
struct IterationRecord {
    int iteration = 0;
    /// Squared Frobenius change of the centroids (0 on the first iteration).
    double centroid_delta = 0.0;
    /// Objective after the assignment step: the regularized surrogate for
    /// bckm and lp-round, plain WCSS for lloyd.
    double objective = 0.0;
    /// Penalty-loop diagnostics (bckm only).
    AssignmentDiagnostics assignment;
};

/// Common output of bckm::fit and the baselines.
struct FitResult {
    std::string algorithm;
    CentroidMatrix centroids;
    AssignmentMatrix assignment;
    LabelVector labels;
    double wcss = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    /// Audit of the binary assignment against the constraints passed in.
    ViolationReport violations;
    std::vector<IterationRecord> history;
    double seconds = 0.0;
};

} // namespace bckm

#endif
