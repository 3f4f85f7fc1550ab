#include "oglasso/groups.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace oglasso {

using nlohmann::json;

GroupStructure::GroupStructure(int n, std::vector<std::vector<int>> groups,
                               Vec lambda)
    : n_(n), groups_(std::move(groups)), lambda_(std::move(lambda)) {
  if (n_ <= 0) throw std::invalid_argument("GroupStructure: n must be positive");
  if (groups_.empty()) throw std::invalid_argument("GroupStructure: no groups");
  if (lambda_.size() != static_cast<Eigen::Index>(groups_.size()))
    throw std::invalid_argument("GroupStructure: lambda size != number of groups");

  std::vector<char> covered(n_, 0);
  offsets_.resize(groups_.size() + 1);
  offsets_[0] = 0;
  for (size_t i = 0; i < groups_.size(); ++i) {
    auto& g = groups_[i];
    if (g.empty()) throw std::invalid_argument("GroupStructure: empty group");
    std::sort(g.begin(), g.end());
    if (std::adjacent_find(g.begin(), g.end()) != g.end())
      throw std::invalid_argument("GroupStructure: duplicate index in group");
    if (g.front() < 0 || g.back() >= n_)
      throw std::invalid_argument("GroupStructure: group index out of range");
    for (int c : g) covered[c] = 1;
    if (!(lambda_[static_cast<Eigen::Index>(i)] > 0.0))
      throw std::invalid_argument("GroupStructure: weights must be strictly positive");
    offsets_[i + 1] = offsets_[i] + static_cast<int>(g.size());
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw std::invalid_argument("GroupStructure: groups must cover every variable");
}

GroupStructure GroupStructure::chain(int n, double ratio, int grpsize) {
  if (n <= 0) throw std::invalid_argument("chain: n must be positive");
  if (grpsize <= 0) throw std::invalid_argument("chain: grpsize must be positive");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("chain: ratio must lie in (0,1)");
  const int overlap = static_cast<int>(std::lround(ratio * grpsize));
  if (overlap >= grpsize)
    throw std::invalid_argument("chain: rounded overlap must be < grpsize");
  const int stride = grpsize - overlap;

  std::vector<std::vector<int>> groups;
  for (int start = 0;; start += stride) {
    const int end = std::min(start + grpsize, n);
    std::vector<int> g(end - start);
    for (int c = start; c < end; ++c) g[c - start] = c;
    if (groups.empty() || g != groups.back()) groups.push_back(std::move(g));
    if (end == n) break;
  }
  return GroupStructure(n, std::move(groups),
                        Vec::Ones(static_cast<Eigen::Index>(groups.size())));
}

GroupStructure GroupStructure::with_weights(double Lambda) const {
  if (!(Lambda > 0.0))
    throw std::invalid_argument("with_weights: Lambda must be positive");
  Vec lambda(num_groups());
  for (int i = 0; i < num_groups(); ++i)
    lambda[i] = Lambda * std::sqrt(static_cast<double>(group_size(i)));
  return GroupStructure(n_, groups_, std::move(lambda));
}

double GroupStructure::group_norm(const Vec& x, int i) const {
  double sq = 0.0;
  for (int c : groups_[i]) sq += x[c] * x[c];
  return std::sqrt(sq);
}

double GroupStructure::block_norm(const Vec& y, int i) const {
  return y.segment(offsets_[i], group_size(i)).norm();
}

double GroupStructure::regularizer_value(const Vec& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("regularizer_value: dimension mismatch");
  double r = 0.0;
  for (int i = 0; i < num_groups(); ++i) r += lambda_[i] * group_norm(x, i);
  return r;
}

Vec GroupStructure::apply_A(const Vec& y) const {
  if (y.size() != dual_dim()) throw std::invalid_argument("apply_A: dimension mismatch");
  Vec out = Vec::Zero(n_);
  for (int i = 0; i < num_groups(); ++i) {
    const auto& g = groups_[i];
    const int off = offsets_[i];
    for (size_t j = 0; j < g.size(); ++j) out[g[j]] += y[off + static_cast<int>(j)];
  }
  return out;
}

Vec GroupStructure::apply_A_transpose(const Vec& v) const {
  if (v.size() != n_)
    throw std::invalid_argument("apply_A_transpose: dimension mismatch");
  Vec out(dual_dim());
  for (int i = 0; i < num_groups(); ++i) {
    const auto& g = groups_[i];
    const int off = offsets_[i];
    for (size_t j = 0; j < g.size(); ++j) out[off + static_cast<int>(j)] = v[g[j]];
  }
  return out;
}

Vec GroupStructure::project_dual_feasible(Vec y) const {
  if (y.size() != dual_dim())
    throw std::invalid_argument("project_dual_feasible: dimension mismatch");
  for (int i = 0; i < num_groups(); ++i) {
    auto block = y.segment(offsets_[i], group_size(i));
    const double norm = block.norm();
    if (norm > lambda_[i]) block *= lambda_[i] / norm;
  }
  return y;
}

bool GroupStructure::is_dual_feasible(const Vec& y, double tol) const {
  if (y.size() != dual_dim()) return false;
  for (int i = 0; i < num_groups(); ++i)
    if (block_norm(y, i) > lambda_[i] + tol) return false;
  return true;
}

std::string GroupStructure::to_json_string() const {
  json j;
  j["n"] = n_;
  auto& jg = j["groups"] = json::array();
  for (const auto& g : groups_) {
    json row = json::array();
    for (int c : g) row.push_back(c + 1);
    jg.push_back(std::move(row));
  }
  auto& jl = j["lambda"] = json::array();
  for (int i = 0; i < num_groups(); ++i) jl.push_back(lambda_[i]);
  return j.dump();
}

GroupStructure GroupStructure::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  const int n = j.at("n").get<int>();
  std::vector<std::vector<int>> groups;
  for (const auto& row : j.at("groups")) {
    std::vector<int> g;
    for (const auto& c : row) g.push_back(c.get<int>() - 1);
    groups.push_back(std::move(g));
  }
  const auto& jl = j.at("lambda");
  Vec lambda(static_cast<Eigen::Index>(jl.size()));
  for (size_t i = 0; i < jl.size(); ++i)
    lambda[static_cast<Eigen::Index>(i)] = jl[i].get<double>();
  return GroupStructure(n, std::move(groups), std::move(lambda));
}

}  // namespace oglasso
