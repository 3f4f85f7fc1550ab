#pragma once

#include <functional>
#include <vector>

#include "oglasso/groups.hpp"

namespace oglasso {

/// One proximal-gradient subproblem: minimize over x
///   phi(x) = ||x - u||^2 / (2 alpha) + r(x)
/// with u = x_anchor - alpha * grad f(x_anchor). x_anchor is kept for the
/// gap tests that reference phi(x_anchor).
struct ProxSubproblem {
  Vec u;
  double alpha;
  const GroupStructure* gs;
  Vec x_anchor;
};

enum class TermVariant { option1, option2, option3 };

/// Subproblem exit test. option1: gap <= c_k ||xhat - x_anchor||^2.
/// option2: gap <= gamma2 (phi(x_anchor) - phi_d(y)). option3: gap <=
/// eps_fixed. eps_prev and iota feed the predicted-zero-group threshold
/// lambda_i - eps_prev^iota.
struct TerminationRule {
  TermVariant variant = TermVariant::option3;
  double c_k = 0.0;
  double gamma2 = 0.5;
  double eps_fixed = 0.0;
  double eps_prev = 0.0;
  double iota = 1.0;

  static TerminationRule option1(double c_k, double eps_prev, double iota = 1.0);
  static TerminationRule option2(double gamma2, double eps_prev, double iota = 1.0);
  static TerminationRule option3(double eps_fixed, double eps_prev, double iota = 1.0);
};

enum class SubStatus { gap_met, iter_limit, corrected };

struct SubproblemResult {
  Vec x_hat;
  Vec y_hat;
  double gap = 0.0;        // phi(x_hat) - phi_d(y_hat) at exit
  double eps_out = 0.0;    // certified epsilon: max(gap, 0)
  int inner_iters = 0;
  SubStatus status = SubStatus::gap_met;
  double sigma_out = 1.0;  // last accepted arc-search step, for warm starts
};

/// Dual iterate and arc-search step carried across subproblem solves.
struct DualWarmStart {
  Vec y;
  double sigma = 1.0;
};

struct InnerLimits {
  int max_iters = 5000;
  int max_backtracks = 100;  // enough to shrink any admissible sigma to zero
  double eta2 = 1e-3;        // sufficient-ascent fraction
  double xi2 = 0.5;          // arc-search backtracking factor
  // Called once per inner iteration with (t, phi, phi_d, gap, |P|).
  std::function<void(int, double, double, double, int)> trace;
};

double phi_primal(const Vec& x, const ProxSubproblem& sp);
double phi_dual(const Vec& y, const ProxSubproblem& sp);
/// grad phi_d(y) = -A^T (alpha A y + u).
Vec phi_dual_gradient(const Vec& y, const ProxSubproblem& sp);

/// Groups whose dual block is safely interior to its ball:
/// { i : ||y_block_i|| < lambda_i - eps_prev^iota } (strict).
std::vector<int> predict_support_set(const Vec& y, const GroupStructure& gs,
                                     double eps_prev, double iota);

/// x_trial = u + alpha A y, then every coordinate belonging to a group in P
/// is set to zero (order-independent union rule).
Vec projected_primal(const Vec& y, const ProxSubproblem& sp,
                     const std::vector<int>& P);

/// Projected gradient ascent on the dual with predicted-zero-group
/// projection of the primal trial iterate. Returns status iter_limit when
/// the iteration budget is exhausted so the caller can apply
/// correction_step.
SubproblemResult solve_subproblem_enhanced(const ProxSubproblem& sp,
                                           const TerminationRule& rule,
                                           const DualWarmStart& warm,
                                           const InnerLimits& limits = {});

/// Plain projected gradient ascent baseline: identical iteration but with
/// the predicted-zero set forced empty, so x_hat = u + alpha A y always.
SubproblemResult solve_subproblem_pga(const ProxSubproblem& sp, double gap_tol,
                                      const DualWarmStart& warm,
                                      const InnerLimits& limits = {});

/// Same as solve_subproblem_pga but honoring an arbitrary termination rule;
/// used when the outer loop swaps the subproblem solver while keeping its
/// option-specific gap test.
SubproblemResult solve_subproblem_pga_rule(const ProxSubproblem& sp,
                                           const TerminationRule& rule,
                                           const DualWarmStart& warm,
                                           const InnerLimits& limits = {});

/// Zero every group that is zero in x_ref; keep the candidate iff its
/// subproblem objective does not increase.
Vec correction_step(const Vec& x_hat, const Vec& x_ref,
                    const ProxSubproblem& sp);

}  // namespace oglasso
