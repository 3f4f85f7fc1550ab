#include "oglasso/losses.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

namespace oglasso {

namespace {

// sigma(-t) = 1/(1+e^t), computed without overflow for any finite t.
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

double spectral_norm_estimate(const SparseRowMat& D, int iters) {
  if (D.nonZeros() == 0) return 0.0;
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(D.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = D * v;
    est = w.norm();
    v = D.transpose() * w;
    const double n = v.norm();
    if (n == 0.0) return 0.0;
    v /= n;
  }
  return est;
}

LogisticLoss::LogisticLoss(std::shared_ptr<const Dataset> data)
    : data_(std::move(data)) {
  if (!data_) throw std::invalid_argument("LogisticLoss: null dataset");
  if (data_->labels.size() != data_->features.rows())
    throw std::invalid_argument("LogisticLoss: labels/features size mismatch");
  const double snorm = spectral_norm_estimate(data_->features);
  lipschitz_ = snorm * snorm / (4.0 * data_->num_points());
}

double LogisticLoss::value(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("LogisticLoss: bad x size");
  const auto& D = data_->features;
  double total = 0.0;
  for (int i = 0; i < data_->num_points(); ++i) {
    double dot = 0.0;
    for (SparseRowMat::InnerIterator it(D, i); it; ++it)
      dot += it.value() * x[it.col()];
    const double t = data_->labels[i] * dot;
    total += std::log1p(std::exp(-std::abs(t))) + std::max(0.0, -t);
  }
  return total / data_->num_points();
}

Vec LogisticLoss::gradient(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("LogisticLoss: bad x size");
  const auto& D = data_->features;
  Vec g = Vec::Zero(dim());
  for (int i = 0; i < data_->num_points(); ++i) {
    double dot = 0.0;
    for (SparseRowMat::InnerIterator it(D, i); it; ++it)
      dot += it.value() * x[it.col()];
    const double y = data_->labels[i];
    const double coeff = -y * sigmoid_neg(y * dot);
    for (SparseRowMat::InnerIterator it(D, i); it; ++it)
      g[it.col()] += coeff * it.value();
  }
  return g / data_->num_points();
}

QuadraticLoss::QuadraticLoss(Vec diagQ, Vec b)
    : diagonal_(true), diag_(std::move(diagQ)), b_(std::move(b)) {
  if (diag_.size() != b_.size())
    throw std::invalid_argument("QuadraticLoss: size mismatch");
  if (diag_.minCoeff() <= 0.0)
    throw std::invalid_argument("QuadraticLoss: Q must be positive definite");
  l_min_ = diag_.minCoeff();
  l_max_ = diag_.maxCoeff();
}

QuadraticLoss QuadraticLoss::dense(Eigen::MatrixXd Q, Vec b) {
  QuadraticLoss loss;
  loss.diagonal_ = false;
  loss.q_ = std::move(Q);
  loss.b_ = std::move(b);
  if (loss.q_.rows() != loss.q_.cols() || loss.q_.rows() != loss.b_.size())
    throw std::invalid_argument("QuadraticLoss: size mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(loss.q_,
                                                    Eigen::EigenvaluesOnly);
  loss.l_min_ = es.eigenvalues().minCoeff();
  loss.l_max_ = es.eigenvalues().maxCoeff();
  if (loss.l_min_ <= 0.0)
    throw std::invalid_argument("QuadraticLoss: Q must be positive definite");
  return loss;
}

double QuadraticLoss::value(const Vec& x) const {
  if (diagonal_) return 0.5 * x.dot(diag_.cwiseProduct(x)) - b_.dot(x);
  return 0.5 * x.dot(q_ * x) - b_.dot(x);
}

Vec QuadraticLoss::gradient(const Vec& x) const {
  if (diagonal_) return diag_.cwiseProduct(x) - b_;
  return q_ * x - b_;
}

}  // namespace oglasso
