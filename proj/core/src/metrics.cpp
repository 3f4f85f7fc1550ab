#include "oglasso/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace oglasso {

std::set<int> support_of(const Vec& x, const GroupStructure& gs, double tol) {
  std::set<int> s;
  for (int i = 0; i < gs.num_groups(); ++i) {
    if (tol == 0.0) {
      for (int c : gs.group(i))
        if (x[c] != 0.0) {
          s.insert(i);
          break;
        }
    } else if (gs.group_norm(x, i) > tol) {
      s.insert(i);
    }
  }
  return s;
}

std::optional<int> identification_index(const SupportProfile& profile) {
  const int m = static_cast<int>(profile.per_iter.size());
  if (m == 0 || profile.per_iter.back() != profile.reference) return std::nullopt;
  int k = m - 1;
  while (k > 0 && profile.per_iter[k - 1] == profile.reference) --k;
  return k;
}

ProfileResult performance_profile(const std::vector<double>& times_i,
                                  const std::vector<double>& times_j,
                                  const std::vector<bool>& solved_i,
                                  const std::vector<bool>& solved_j,
                                  const std::vector<std::string>& instances) {
  const size_t n = times_i.size();
  if (times_j.size() != n || solved_i.size() != n || solved_j.size() != n ||
      instances.size() != n)
    throw std::invalid_argument("performance_profile: input sizes differ");

  double max_abs = 0.0;
  for (size_t p = 0; p < n; ++p)
    if (solved_i[p] && solved_j[p])
      max_abs = std::max(max_abs, std::abs(std::log2(times_i[p] / times_j[p])));
  if (max_abs == 0.0) max_abs = 1.0;  // no both-solved spread to scale against

  ProfileResult out;
  for (size_t p = 0; p < n; ++p) {
    if (!solved_i[p] && !solved_j[p]) continue;
    ProfileBar bar;
    bar.instance = instances[p];
    if (solved_i[p] && solved_j[p]) {
      bar.height = -std::log2(times_i[p] / times_j[p]);
    } else {
      bar.failure = true;
      bar.height = solved_i[p] ? 1.5 * max_abs : -1.5 * max_abs;
    }
    if (bar.height > 0.0)
      out.area_i += bar.height;
    else
      out.area_j += -bar.height;
    out.bars.push_back(std::move(bar));
  }
  return out;
}

CompareCounts compare_objectives(const std::vector<double>& F_i,
                                 const std::vector<double>& F_j, double tol) {
  if (F_i.size() != F_j.size())
    throw std::invalid_argument("compare_objectives: input sizes differ");
  CompareCounts c;
  for (size_t p = 0; p < F_i.size(); ++p) {
    const double d = F_i[p] - F_j[p];
    if (d < -tol)
      ++c.better;
    else if (d > tol)
      ++c.worse;
    else
      ++c.same;
  }
  return c;
}

CompareCounts compare_sparsity(const std::vector<int>& zeros_i,
                               const std::vector<int>& zeros_j) {
  if (zeros_i.size() != zeros_j.size())
    throw std::invalid_argument("compare_sparsity: input sizes differ");
  CompareCounts c;
  for (size_t p = 0; p < zeros_i.size(); ++p) {
    if (zeros_i[p] > zeros_j[p])
      ++c.better;
    else if (zeros_i[p] < zeros_j[p])
      ++c.worse;
    else
      ++c.same;
  }
  return c;
}

}  // namespace oglasso
