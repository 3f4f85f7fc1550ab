#include "oglasso/lambda_min.hpp"

#include <cmath>
#include <stdexcept>

namespace oglasso {

namespace {

bool solves_to_zero(const LossModel& loss, const GroupStructure& gs,
                    double Lambda, const LambdaMinOptions& opts) {
  const GroupStructure weighted = gs.with_weights(Lambda);
  const SolveResult out = solve(loss, weighted, opts.solver);
  for (int i = 0; i < weighted.num_groups(); ++i)
    if (weighted.group_norm(out.x, i) >= opts.zero_tol) return false;
  return true;
}

}  // namespace

LambdaMinResult find_lambda_min(const LossModel& loss, const GroupStructure& gs,
                                const LambdaMinOptions& opts) {
  const Vec grad0 = loss.gradient(Vec::Zero(loss.dim()));
  double guess = 0.0;
  for (int i = 0; i < gs.num_groups(); ++i)
    guess = std::max(guess, gs.group_norm(grad0, i) /
                                std::sqrt(static_cast<double>(gs.group_size(i))));
  if (guess == 0.0) {
    // grad f(0) = 0: zero is stationary for every positive Lambda.
    LambdaMinResult r;
    r.lambda_min = std::pow(2.0, -opts.grid_max_steps);
    r.bracket_lo = 0.0;
    r.bracket_hi = r.lambda_min;
    r.converged = true;
    return r;
  }

  LambdaMinResult r;
  double lo = 0.0, hi = 0.0;  // lo: x != 0, hi: x = 0
  double lam = guess;
  if (solves_to_zero(loss, gs, lam, opts)) {
    hi = lam;
    for (int step = 0; step < opts.grid_max_steps; ++step) {
      lam /= 2.0;
      ++r.solves;
      if (!solves_to_zero(loss, gs, lam, opts)) {
        lo = lam;
        break;
      }
      hi = lam;
    }
    ++r.solves;
  } else {
    lo = lam;
    for (int step = 0; step < opts.grid_max_steps; ++step) {
      lam *= 2.0;
      ++r.solves;
      if (solves_to_zero(loss, gs, lam, opts)) {
        hi = lam;
        break;
      }
      lo = lam;
    }
    ++r.solves;
  }

  if (hi == 0.0 || lo == 0.0) {
    // Budget exhausted before a bracket formed.
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.lambda_min = hi != 0.0 ? hi : lam;
    r.converged = false;
    return r;
  }

  for (int step = 0; step < opts.bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    ++r.solves;
    if (solves_to_zero(loss, gs, mid, opts))
      hi = mid;
    else
      lo = mid;
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.lambda_min = hi;
  r.converged = true;
  return r;
}

}  // namespace oglasso
