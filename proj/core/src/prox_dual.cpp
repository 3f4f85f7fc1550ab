#include "oglasso/prox_dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oglasso {

TerminationRule TerminationRule::option1(double c_k, double eps_prev, double iota) {
  TerminationRule r;
  r.variant = TermVariant::option1;
  r.c_k = c_k;
  r.eps_prev = eps_prev;
  r.iota = iota;
  return r;
}

TerminationRule TerminationRule::option2(double gamma2, double eps_prev, double iota) {
  if (!(gamma2 > 0.0 && gamma2 <= 0.5))
    throw std::invalid_argument("TerminationRule: gamma2 must lie in (0, 1/2]");
  TerminationRule r;
  r.variant = TermVariant::option2;
  r.gamma2 = gamma2;
  r.eps_prev = eps_prev;
  r.iota = iota;
  return r;
}

TerminationRule TerminationRule::option3(double eps_fixed, double eps_prev, double iota) {
  if (!(eps_fixed > 0.0))
    throw std::invalid_argument("TerminationRule: eps_fixed must be positive");
  TerminationRule r;
  r.variant = TermVariant::option3;
  r.eps_fixed = eps_fixed;
  r.eps_prev = eps_prev;
  r.iota = iota;
  return r;
}

double phi_primal(const Vec& x, const ProxSubproblem& sp) {
  return (x - sp.u).squaredNorm() / (2.0 * sp.alpha) +
         sp.gs->regularizer_value(x);
}

double phi_dual(const Vec& y, const ProxSubproblem& sp) {
  const Vec ay = sp.gs->apply_A(y);
  return -0.5 * sp.alpha * ay.squaredNorm() - sp.u.dot(ay);
}

Vec phi_dual_gradient(const Vec& y, const ProxSubproblem& sp) {
  const Vec ay = sp.gs->apply_A(y);
  return sp.gs->apply_A_transpose(-(sp.alpha * ay + sp.u));
}

std::vector<int> predict_support_set(const Vec& y, const GroupStructure& gs,
                                     double eps_prev, double iota) {
  const double margin = std::pow(eps_prev, iota);
  std::vector<int> P;
  for (int i = 0; i < gs.num_groups(); ++i)
    if (gs.block_norm(y, i) < gs.weight(i) - margin) P.push_back(i);
  return P;
}

Vec projected_primal(const Vec& y, const ProxSubproblem& sp,
                     const std::vector<int>& P) {
  Vec x = sp.u + sp.alpha * sp.gs->apply_A(y);
  for (int i : P)
    for (int c : sp.gs->group(i)) x[c] = 0.0;
  return x;
}

namespace {

struct GapTest {
  const TerminationRule& rule;
  double phi_anchor;  // phi(x_anchor; sp), used by option2

  // Termination threshold for the current iterate; gap <= threshold exits.
  double threshold(const Vec& x_hat, const Vec& x_anchor, double phid) const {
    switch (rule.variant) {
      case TermVariant::option1:
        return rule.c_k * (x_hat - x_anchor).squaredNorm();
      case TermVariant::option2:
        return rule.gamma2 * (phi_anchor - phid);
      case TermVariant::option3:
        return rule.eps_fixed;
    }
    return 0.0;
  }
};

SubproblemResult solve_impl(const ProxSubproblem& sp,
                            const TerminationRule& rule,
                            const DualWarmStart& warm,
                            const InnerLimits& limits, bool enhanced) {
  const GroupStructure& gs = *sp.gs;
  if (sp.alpha <= 0.0) throw std::invalid_argument("subproblem: alpha <= 0");
  if (sp.u.size() != gs.dim() || sp.x_anchor.size() != gs.dim())
    throw std::invalid_argument("subproblem: dimension mismatch");

  Vec y = warm.y.size() == gs.dual_dim() ? warm.y : Vec::Zero(gs.dual_dim());
  y = gs.project_dual_feasible(std::move(y));
  double sigma = warm.sigma > 0.0 ? warm.sigma : 1.0;

  const GapTest test{rule, phi_primal(sp.x_anchor, sp)};

  SubproblemResult res;
  res.sigma_out = sigma;
  const std::vector<int> no_groups;
  // Dual-progress window: the iterate can pin against degenerate ball
  // boundaries where projected steps move by round-off only. If a whole
  // window passes without measurable ascent, further iterations are useless.
  double window_phid = -std::numeric_limits<double>::infinity();
  int window_count = 0;
  bool stalled = false;

  for (int t = 0;; ++t) {
    const std::vector<int> P =
        enhanced ? predict_support_set(y, gs, rule.eps_prev, rule.iota)
                 : no_groups;
    Vec x_hat = projected_primal(y, sp, P);
    const double phi = phi_primal(x_hat, sp);
    const double phid = phi_dual(y, sp);
    if (!std::isfinite(phi) || !std::isfinite(phid))
      throw std::runtime_error("subproblem: non-finite objective at inner iteration " +
                               std::to_string(t));
    double gap = phi - phid;
    // Round-off floor: gaps this small read as zero in the exit tests.
    if (gap <= 1e-14 * (1.0 + std::abs(phi))) gap = 0.0;

    if (limits.trace) limits.trace(t, phi, phid, gap, static_cast<int>(P.size()));

    if (gap <= test.threshold(x_hat, sp.x_anchor, phid)) {
      res.x_hat = std::move(x_hat);
      res.y_hat = std::move(y);
      res.gap = gap;
      res.eps_out = std::max(gap, 0.0);
      res.inner_iters = t;
      res.status = SubStatus::gap_met;
      return res;
    }
    if (window_count == 0) window_phid = phid;
    if (++window_count >= 100) {
      stalled = phid - window_phid <= 1e-14 * (1.0 + std::abs(phid));
      window_count = 0;
    }

    if (t >= limits.max_iters || stalled) {
      res.x_hat = std::move(x_hat);
      res.y_hat = std::move(y);
      res.gap = gap;
      res.eps_out = std::max(gap, 0.0);
      res.inner_iters = t;
      res.status = SubStatus::iter_limit;
      return res;
    }

    // Arc search: backtrack over y + sigma xi2^j grad until sufficient ascent.
    const Vec grad = phi_dual_gradient(y, sp);
    double step = sigma;
    for (int j = 0;; ++j) {
      Vec y_next = gs.project_dual_feasible(y + step * grad);
      const double phid_next = phi_dual(y_next, sp);
      if (phid_next >= phid + limits.eta2 * grad.dot(y_next - y)) {
        if ((y_next - y).norm() == 0.0) {
          sigma = 1.0;  // a frozen step carries no scale information
        } else {
          sigma = step;
          if (j == 0) sigma /= limits.xi2;  // grow after a clean accept
          sigma = std::min(sigma, 1e6);
        }
        y = std::move(y_next);
        break;
      }
      if (j >= limits.max_backtracks) {
        // Step underflow; return the current iterate and let the caller
        // decide (treated like an iteration-limit exit).
        res.x_hat = std::move(x_hat);
        res.y_hat = std::move(y);
        res.gap = gap;
        res.eps_out = std::max(gap, 0.0);
        res.inner_iters = t;
        res.status = SubStatus::iter_limit;
        return res;
      }
      step *= limits.xi2;
    }
    res.sigma_out = sigma;
  }
}

}  // namespace

SubproblemResult solve_subproblem_enhanced(const ProxSubproblem& sp,
                                           const TerminationRule& rule,
                                           const DualWarmStart& warm,
                                           const InnerLimits& limits) {
  return solve_impl(sp, rule, warm, limits, /*enhanced=*/true);
}

SubproblemResult solve_subproblem_pga(const ProxSubproblem& sp, double gap_tol,
                                      const DualWarmStart& warm,
                                      const InnerLimits& limits) {
  return solve_impl(sp, TerminationRule::option3(gap_tol, 0.0), warm, limits,
                    /*enhanced=*/false);
}

SubproblemResult solve_subproblem_pga_rule(const ProxSubproblem& sp,
                                           const TerminationRule& rule,
                                           const DualWarmStart& warm,
                                           const InnerLimits& limits) {
  return solve_impl(sp, rule, warm, limits, /*enhanced=*/false);
}

Vec correction_step(const Vec& x_hat, const Vec& x_ref,
                    const ProxSubproblem& sp) {
  const GroupStructure& gs = *sp.gs;
  Vec candidate = x_hat;
  for (int i = 0; i < gs.num_groups(); ++i) {
    bool ref_zero = true;
    for (int c : gs.group(i))
      if (x_ref[c] != 0.0) {
        ref_zero = false;
        break;
      }
    if (ref_zero)
      for (int c : gs.group(i)) candidate[c] = 0.0;
  }
  return phi_primal(candidate, sp) <= phi_primal(x_hat, sp) ? candidate : x_hat;
}

}  // namespace oglasso
