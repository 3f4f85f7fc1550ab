#pragma once

#include "oglasso/outer.hpp"

namespace oglasso {

struct LambdaMinOptions {
  OuterConfig solver;       // configuration used for the trial solves
  double zero_tol = 1e-10;  // "zero solution": every group norm below this
  int grid_max_steps = 60;  // geometric-grid expansion budget (factor 2)
  int bisection_steps = 20;
};

struct LambdaMinResult {
  double lambda_min = 0.0;   // smallest tested Lambda giving x = 0
  double bracket_lo = 0.0;   // largest tested Lambda giving x != 0
  double bracket_hi = 0.0;   // == lambda_min when converged
  bool converged = false;
  int solves = 0;
};

/// Smallest Lambda (geometric grid with factor 2, then bisection) such that
/// minimizing f + sum_i Lambda sqrt(|g_i|) ||x_{g_i}|| returns x = 0. The
/// initial guess is the non-overlapping stationarity threshold at zero,
/// max_i ||grad f(0)_{g_i}|| / sqrt(|g_i|). When the grid budget runs out the
/// result reports the bracketing interval with converged = false.
LambdaMinResult find_lambda_min(const LossModel& loss, const GroupStructure& gs,
                                const LambdaMinOptions& opts = {});

}  // namespace oglasso
