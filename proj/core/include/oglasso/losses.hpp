#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

#include "oglasso/groups.hpp"

namespace oglasso {

using SparseRowMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Binary classification data: one sparse feature row per point, labels in
/// {-1,+1}. Immutable after construction.
struct Dataset {
  SparseRowMat features;  // N x n
  Vec labels;

  int num_points() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

/// Smooth term f of the composite objective: value, gradient, and an estimate
/// of the gradient's Lipschitz constant. Evaluation is pure and may be called
/// concurrently.
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual double lipschitz_estimate() const = 0;
};

/// f(x) = (1/N) sum_i log(1 + exp(-y_i x^T d_i)), evaluated in the stable
/// form log1p(exp(-|t|)) + max(0, -t).
class LogisticLoss final : public LossModel {
 public:
  explicit LogisticLoss(std::shared_ptr<const Dataset> data);

  int dim() const override { return data_->dim(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  /// ||D||^2 / (4N) with ||D|| estimated by 20 power iterations.
  double lipschitz_estimate() const override { return lipschitz_; }

  const Dataset& data() const { return *data_; }

 private:
  std::shared_ptr<const Dataset> data_;
  double lipschitz_;
};

/// f(x) = x^T Q x / 2 - b^T x for SPD Q; exposes exact extreme eigenvalues
/// (strong convexity and gradient Lipschitz constants).
class QuadraticLoss final : public LossModel {
 public:
  QuadraticLoss(Vec diagQ, Vec b);  // Q = diag(diagQ)
  static QuadraticLoss dense(Eigen::MatrixXd Q, Vec b);

  int dim() const override { return static_cast<int>(b_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double lipschitz_estimate() const override { return l_max_; }

  double strong_convexity() const { return l_min_; }
  const Vec& linear_term() const { return b_; }

 private:
  QuadraticLoss() = default;

  bool diagonal_ = true;
  Vec diag_;
  Eigen::MatrixXd q_;
  Vec b_;
  double l_min_ = 0.0, l_max_ = 0.0;
};

/// Largest singular value of D by power iteration on D^T D (deterministic
/// start, `iters` sweeps).
double spectral_norm_estimate(const SparseRowMat& D, int iters = 20);

}  // namespace oglasso
