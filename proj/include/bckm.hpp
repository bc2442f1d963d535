#ifndef BCKM_HPP
#define BCKM_HPP

#include "bckm/assignment_lp.hpp"
#include "bckm/baselines.hpp"
#include "bckm/centroids.hpp"
#include "bckm/constraints.hpp"
#include "bckm/core.hpp"
#include "bckm/csv.hpp"
#include "bckm/error.hpp"
#include "bckm/fit.hpp"
#include "bckm/fit_result.hpp"
#include "bckm/io.hpp"
#include "bckm/linear.hpp"
#include "bckm/lp.hpp"
#include "bckm/metrics.hpp"
#include "bckm/mps.hpp"
#include "bckm/penalty_assignment.hpp"
#include "bckm/random.hpp"
#include "bckm/simplex.hpp"
#include "bckm/synthgen.hpp"
#include "bckm/version.hpp"

#endif
