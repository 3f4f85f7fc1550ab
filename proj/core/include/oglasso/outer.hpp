#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oglasso/groups.hpp"
#include "oglasso/losses.hpp"
#include "oglasso/prox_dual.hpp"

namespace oglasso {

enum class OptionKind { option1, option2, option3 };
enum class AlphaMode { faithful, practical };
enum class SubsolverKind { enhanced, pga };
enum class ScheduleKind { none, strategy1, strategy2 };

struct EpsSchedule {
  ScheduleKind kind = ScheduleKind::none;
  double psi = 0.5;    // strategy1
  double omega = 0.5;  // strategy2
};

struct OuterConfig {
  OptionKind option = OptionKind::option1;
  SubsolverKind subsolver = SubsolverKind::enhanced;

  double xi = 0.5;
  double eta = 1e-3;
  double zeta = 0.8;
  double alpha0 = 1.0;
  double gamma1 = 0.2;   // option1
  double gamma2 = 0.5;   // option2
  double C = 1000.0;     // option3: eps_k = C / k^3 (k counted from 1)
  double iota = 1.0;     // predicted-zero-group threshold exponent

  double eps_tol = 1e-5;  // stop when the chi proxy falls below this
  int max_iters = 10000;
  double max_time_s = 300.0;

  AlphaMode alpha_mode = AlphaMode::faithful;
  int max_alpha_increases = 50;  // practical mode only

  EpsSchedule schedule;
  std::optional<double> mu_f;  // strong convexity constant; required by strategy1

  InnerLimits inner;
  bool record_supports = true;

  /// Throws std::invalid_argument on any parameter outside its range.
  void validate() const;
};

enum class RunStatus { solved, iter_limit, time_limit, numerical_difficulties };
std::string to_string(RunStatus s);

struct IterRow {
  int k = 0;
  double F = 0.0;         // f + r after the iteration's step
  double chi_proxy = 0.0;
  double eps_k = 0.0;     // certified subproblem inexactness (gap at exit)
  double delta_k = 0.0;   // NaN for option3 and terminal rows
  double alpha_k = 0.0;   // PG parameter used this iteration
  int backtracks = 0;
  int inner_iters = 0;
  int support_size = 0;
  double wall_time_s = 0.0;
  std::string note;  // "", "corrected", "recalled", "solved", ...
};

struct RunRecord {
  std::vector<IterRow> rows;
  std::vector<std::vector<int>> supports;  // per-iteration nonzero groups
  RunStatus status = RunStatus::iter_limit;
  double F_final = 0.0;
  Vec x_final;
  int iters = 0;
  double time_s = 0.0;

  void write_csv(std::ostream& os) const;
};

/// Upper endpoint of the admissible c_k interval,
/// (1/4) (sqrt(6 / ((1+gamma1) alpha)) - sqrt(2 / alpha))^2.
double choose_ck(double alpha, double gamma1);

/// -||s||^2 / alpha + sqrt(2 eps / alpha) ||s|| + eps.
double delta_option1(const Vec& s, double eps, double alpha);

/// r(x + s) - r(x) + grad_fx . s.
double delta_option2(const GroupStructure& gs, const Vec& x, const Vec& s,
                     const Vec& grad_fx);

struct LineSearchResult {
  Vec x_next;
  int j = 0;
  double F_next = 0.0;
  bool failed = false;  // backtracking exceeded max_backtracks (step underflow)
};

/// Backtracking Armijo search along s: smallest j >= 0 with
/// F(x + xi^j s) <= F_x + eta xi^j delta. Requires delta < 0.
LineSearchResult line_search(const Vec& x, const Vec& s, double delta,
                             const std::function<double(const Vec&)>& F,
                             double F_x, double xi, double eta,
                             int max_backtracks = 60);

enum class AlphaFlag { same_alpha, dec_alpha, inc_alpha };

struct AlphaUpdate {
  double alpha_next = 0.0;
  AlphaFlag flag = AlphaFlag::same_alpha;
  int increases_left = 0;
};

AlphaUpdate update_alpha(int j, double alpha, AlphaMode mode, double zeta,
                         int increases_left);

/// (||xhat - xk|| + sqrt(2 alpha max(gap, 0))) / min(1, alpha); a computable
/// upper bound on the first-order measure ||T(xk, alpha) - xk|| / alpha.
double chi_proxy(const Vec& xhat, const Vec& xk, double alpha, double gap);

/// Required epsilon cap for iteration k, +infinity when no schedule is set.
/// theta = 1 - alpha0 mu_f (strategy1 only); eps_prev is the certified
/// epsilon of the previous iteration (strategy2 only).
double eps_schedule_cap(int k, const EpsSchedule& schedule, double alpha0,
                        double theta, double eps_prev);

/// Lower bound on alpha_k from the backtracking analysis, for an estimated
/// gradient Lipschitz constant.
double alpha_floor(OptionKind option, double alpha0, double gamma1,
                   double zeta, double eta, double lipschitz);

struct SolveResult {
  Vec x;
  RunRecord record;
};

/// The inexact proximal-gradient outer loop.
SolveResult solve(const LossModel& loss, const GroupStructure& gs,
                  const OuterConfig& cfg, const Vec* x0 = nullptr);

}  // namespace oglasso
