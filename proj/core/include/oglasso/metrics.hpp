#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oglasso/groups.hpp"

namespace oglasso {

/// Groups with a nonzero block: { i : ||x_{g_i}|| > tol }. tol = 0 tests
/// exact zeros (this solver produces hard zeros); positive tol is for
/// iterates produced elsewhere.
std::set<int> support_of(const Vec& x, const GroupStructure& gs,
                         double tol = 0.0);

struct SupportProfile {
  std::vector<std::set<int>> per_iter;  // S(x_k) per recorded iteration
  std::set<int> reference;              // S from the highest-accuracy run
};

/// Smallest k such that S(x_j) equals the reference for all j >= k within
/// the recorded horizon; nullopt if the support never stabilizes on it.
std::optional<int> identification_index(const SupportProfile& profile);

struct ProfileBar {
  std::string instance;
  double height = 0.0;  // -log2(t_i / t_j); positive favors solver i
  bool failure = false; // exactly one of the two solvers failed
};

struct ProfileResult {
  std::vector<ProfileBar> bars;
  double area_i = 0.0;  // total bar area pointing toward solver i
  double area_j = 0.0;
};

/// Per-instance timing comparison bars. Instances where both solvers fail
/// are dropped; a single failure scores 1.5 max |log2 ratio| over the
/// both-solved set, signed toward the solver that succeeded.
ProfileResult performance_profile(const std::vector<double>& times_i,
                                  const std::vector<double>& times_j,
                                  const std::vector<bool>& solved_i,
                                  const std::vector<bool>& solved_j,
                                  const std::vector<std::string>& instances);

struct CompareCounts {
  int better = 0;
  int same = 0;
  int worse = 0;
};

/// "Better" means a final objective lower by more than tol.
CompareCounts compare_objectives(const std::vector<double>& F_i,
                                 const std::vector<double>& F_j,
                                 double tol = 1e-6);

/// "Better" means strictly more zero groups.
CompareCounts compare_sparsity(const std::vector<int>& zeros_i,
                               const std::vector<int>& zeros_j);

}  // namespace oglasso
