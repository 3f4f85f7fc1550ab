#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace oglasso {

using Vec = Eigen::VectorXd;

/// Overlapping group structure for the group-l2 regularizer
/// r(x) = sum_i lambda_i ||x_{g_i}||_2.
///
/// Groups are index sets over {0..n-1}, stored sorted. Every variable must
/// belong to at least one group and all weights must be strictly positive.
/// Dual vectors stack one block per group; block i occupies the contiguous
/// range [offset(i), offset(i) + group(i).size()), so the block-index map is
/// just an offset lookup.
///
/// Immutable after construction and safe to share across concurrent solves.
class GroupStructure {
 public:
  GroupStructure(int n, std::vector<std::vector<int>> groups, Vec lambda);

  /// Chain groups of size grpsize where consecutive groups share
  /// round(ratio * grpsize) indices. The last group is truncated to end at
  /// n - 1 when the stride does not land exactly; it is dropped if it would
  /// duplicate the previous group. All weights are set to 1.
  ///
  /// Throws std::invalid_argument when round(ratio * grpsize) >= grpsize.
  /// A grpsize >= n yields the single group {0..n-1}.
  static GroupStructure chain(int n, double ratio, int grpsize);

  int dim() const { return n_; }
  int num_groups() const { return static_cast<int>(groups_.size()); }
  int dual_dim() const { return offsets_.back(); }

  const std::vector<int>& group(int i) const { return groups_[i]; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  int group_size(int i) const { return static_cast<int>(groups_[i].size()); }
  /// Start of dual block i; block i is y.segment(offset(i), group_size(i)).
  int offset(int i) const { return offsets_[i]; }

  double weight(int i) const { return lambda_[i]; }
  const Vec& weights() const { return lambda_; }

  /// Same groups, weights lambda_i = Lambda * sqrt(|g_i|).
  GroupStructure with_weights(double Lambda) const;

  /// r(x); overlapping coordinates contribute once per containing group.
  double regularizer_value(const Vec& x) const;

  /// A y: scatter each dual block into its group's coordinates and sum.
  Vec apply_A(const Vec& y) const;

  /// A^T v: gather v over each group into the corresponding dual block.
  Vec apply_A_transpose(const Vec& v) const;

  /// Blockwise Euclidean-ball projection onto {y : ||y_i|| <= lambda_i}.
  Vec project_dual_feasible(Vec y) const;

  bool is_dual_feasible(const Vec& y, double tol = 0.0) const;

  /// Norm of dual block i.
  double block_norm(const Vec& y, int i) const;
  /// Norm of the subvector of x indexed by group i.
  double group_norm(const Vec& x, int i) const;

  /// JSON document {"n": ..., "groups": [[...]], "lambda": [...]} with
  /// 1-based indices, matching the LIBSVM convention.
  std::string to_json_string() const;
  static GroupStructure from_json_string(const std::string& text);

 private:
  int n_;
  std::vector<std::vector<int>> groups_;
  Vec lambda_;
  std::vector<int> offsets_;  // prefix sums; offsets_[num_groups()] = dual dim
};

}  // namespace oglasso
