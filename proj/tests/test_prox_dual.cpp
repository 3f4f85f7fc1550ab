#include <doctest.h>

#include <cmath>
#include <random>

#include "oglasso/prox_dual.hpp"
#include "test_support.hpp"

using namespace oglasso;
using testsup::block_soft_threshold;
using testsup::central_diff_grad;
using testsup::paper13;
using testsup::prox_oracle;
using testsup::random_structure;
using testsup::random_vec;

namespace {

ProxSubproblem make_sp(const GroupStructure& gs, Vec u, double alpha,
                       Vec anchor) {
  return ProxSubproblem{std::move(u), alpha, &gs, std::move(anchor)};
}

GroupStructure disjoint_structure(std::mt19937& rng, int max_groups = 5) {
  const int ngrp = std::uniform_int_distribution<int>(1, max_groups)(rng);
  std::vector<std::vector<int>> groups;
  int c = 0;
  for (int i = 0; i < ngrp; ++i) {
    const int len = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<int> g(len);
    for (int j = 0; j < len; ++j) g[j] = c++;
    groups.push_back(std::move(g));
  }
  Vec lambda(ngrp);
  for (int i = 0; i < ngrp; ++i)
    lambda[i] = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
  return GroupStructure(c, std::move(groups), std::move(lambda));
}

}  // namespace

TEST_SUITE_BEGIN("prox_dual");

TEST_CASE("phi_primal") {
  const auto gs = paper13(1e-12);  // near-zero weights isolate the quadratic
  const Vec u = Vec::Ones(13);
  const auto sp = make_sp(gs, u, 2.0, Vec::Zero(13));
  CHECK(phi_primal(u, sp) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(phi_primal(Vec::Zero(13), sp) ==
        doctest::Approx(u.squaredNorm() / 4.0).epsilon(1e-9));

  std::mt19937 rng(3);
  const auto gsr = paper13(0.7);
  const Vec ur = random_vec(rng, 13);
  const Vec x = random_vec(rng, 13);
  const auto spr = make_sp(gsr, ur, 0.8, Vec::Zero(13));
  const double expect =
      (x - ur).squaredNorm() / (2.0 * 0.8) + gsr.regularizer_value(x);
  CHECK(phi_primal(x, spr) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("phi_dual values and maximum") {
  std::mt19937 rng(5);
  const auto gs = paper13(0.6);
  const Vec u = random_vec(rng, 13);
  const auto sp = make_sp(gs, u, 1.3, Vec::Zero(13));
  CHECK(phi_dual(Vec::Zero(gs.dual_dim()), sp) == 0.0);

  // Any y with A y = -u / alpha attains ||u||^2 / (2 alpha).
  // On the n=13 chain, splitting overlap coordinates evenly gives such a y.
  Vec y = Vec::Zero(gs.dual_dim());
  for (int i = 0; i < gs.num_groups(); ++i) {
    const auto& g = gs.group(i);
    for (size_t j = 0; j < g.size(); ++j) {
      const int c = g[j];
      const bool shared = (c == 4 || c == 8);
      y[gs.offset(i) + static_cast<int>(j)] =
          -u[c] / sp.alpha * (shared ? 0.5 : 1.0);
    }
  }
  CHECK((gs.apply_A(y) + u / sp.alpha).norm() <= 1e-12);
  CHECK(phi_dual(y, sp) ==
        doctest::Approx(u.squaredNorm() / (2.0 * sp.alpha)).epsilon(1e-12));
}

TEST_CASE("strong duality on a small instance") {
  std::mt19937 rng(7);
  const GroupStructure gs(5, {{0, 1, 2}, {2, 3, 4}}, Vec::Constant(2, 0.4));
  const Vec u = random_vec(rng, 5);
  const auto sp = make_sp(gs, u, 0.9, Vec::Zero(5));
  const auto oracle = prox_oracle(sp, 1e-15);
  const double phi_star = phi_primal(oracle.x, sp);
  const double phid_star = phi_dual(oracle.y, sp);
  CHECK(phi_star - phid_star <= 1e-10 * (1.0 + std::abs(phi_star)));
}

TEST_CASE("phi_dual_gradient") {
  std::mt19937 rng(11);
  const auto gs = paper13(0.5);
  const Vec u = random_vec(rng, 13);
  const auto sp = make_sp(gs, u, 1.1, Vec::Zero(13));

  CHECK((phi_dual_gradient(Vec::Zero(gs.dual_dim()), sp) +
         gs.apply_A_transpose(u))
            .norm() <= 1e-14);

  auto sp0 = sp;
  sp0.u = Vec::Zero(13);
  CHECK(phi_dual_gradient(Vec::Zero(gs.dual_dim()), sp0).norm() == 0.0);

  const Vec y = random_vec(rng, gs.dual_dim(), 0.3);
  const Vec g = phi_dual_gradient(y, sp);
  const Vec fd = central_diff_grad(
      [&](const Vec& v) { return phi_dual(v, sp); }, y);
  for (Eigen::Index c = 0; c < g.size(); ++c)
    CHECK(std::abs(g[c] - fd[c]) <= 1e-6 * std::max(1.0, std::abs(fd[c])));
}

TEST_CASE("predicted zero-group set") {
  const auto gs = paper13(1.0);  // lambda_i = sqrt(5)
  const Vec zero = Vec::Zero(gs.dual_dim());

  auto P = predict_support_set(zero, gs, 0.5, 1.0);
  CHECK(P == std::vector<int>{0, 1, 2});  // all weights exceed 0.5

  // block norm exactly lambda_i - eps^iota is NOT in P (strict inequality)
  Vec y = Vec::Zero(gs.dual_dim());
  const double margin = gs.weight(0) - 0.5;
  y[0] = margin;
  P = predict_support_set(y, gs, 0.5, 1.0);
  CHECK(P == std::vector<int>{1, 2});

  // eps large enough that lambda_i - eps^iota < 0: never predicted zero
  P = predict_support_set(zero, gs, 10.0, 1.0);
  CHECK(P.empty());
}

TEST_CASE("projected primal iterate") {
  std::mt19937 rng(13);
  const GroupStructure gs(3, {{0, 1}, {1, 2}}, Vec::Ones(2));
  const Vec u = random_vec(rng, 3);
  const Vec y = random_vec(rng, gs.dual_dim(), 0.2);
  const auto sp = make_sp(gs, u, 0.7, Vec::Zero(3));

  const Vec trial = u + 0.7 * gs.apply_A(y);
  CHECK((projected_primal(y, sp, {}) - trial).norm() == 0.0);
  CHECK(projected_primal(y, sp, {0, 1}).isZero());

  // coordinate 1 is shared; zeroing group 0 clears coordinates 0 and 1
  const Vec x = projected_primal(y, sp, {0});
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
  CHECK(x[2] == trial[2]);
}

TEST_CASE("solver terminates immediately at an optimal anchor") {
  std::mt19937 rng(17);
  const auto gs = paper13(0.8);
  const Vec u = random_vec(rng, 13);
  auto sp = make_sp(gs, u, 1.0, Vec::Zero(13));
  const auto oracle = prox_oracle(sp, 1e-15);
  sp.x_anchor = oracle.x;

  const auto res = solve_subproblem_enhanced(
      sp, TerminationRule::option1(0.1, 1e-8), {oracle.y, 1.0});
  CHECK(res.status == SubStatus::gap_met);
  CHECK(res.inner_iters == 0);
  CHECK(res.gap <= 1e-8);
}

TEST_CASE("non-overlapping instances match block soft-thresholding") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const auto gs = disjoint_structure(rng);
    const Vec u = random_vec(rng, gs.dim());
    const double alpha = std::uniform_real_distribution<double>(0.3, 2.0)(rng);
    const auto sp = make_sp(gs, u, alpha, random_vec(rng, gs.dim()));
    const Vec closed_form = block_soft_threshold(u, alpha, gs);

    const auto res = solve_subproblem_enhanced(
        sp, TerminationRule::option3(1e-12, 1e-6), {Vec::Zero(gs.dual_dim()), 1.0});
    REQUIRE(res.status == SubStatus::gap_met);
    // inexactness certificate: ||T - xhat||^2 <= 2 alpha gap
    CHECK((closed_form - res.x_hat).squaredNorm() <=
          2.0 * alpha * std::max(res.gap, 1e-13) + 1e-10);
    CHECK((closed_form - res.x_hat).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("option2 exit condition verified post hoc") {
  std::mt19937 rng(23);
  const auto gs = paper13(0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec anchor = random_vec(rng, 13);
    const Vec u = random_vec(rng, 13);
    const auto sp = make_sp(gs, u, 0.9, anchor);
    const auto res = solve_subproblem_enhanced(
        sp, TerminationRule::option2(0.5, 1e-6), {Vec::Zero(gs.dual_dim()), 1.0});
    REQUIRE(res.status == SubStatus::gap_met);
    const double lhs = phi_primal(res.x_hat, sp) - phi_dual(res.y_hat, sp);
    const double rhs =
        0.5 * (phi_primal(anchor, sp) - phi_dual(res.y_hat, sp));
    CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("weak duality and hard zeros on random instances") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    const auto gs = random_structure(rng, 20);
    const Vec u = random_vec(rng, gs.dim());
    const double alpha = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
    const auto sp = make_sp(gs, u, alpha, random_vec(rng, gs.dim(), 0.5));
    const auto res = solve_subproblem_enhanced(
        sp, TerminationRule::option1(0.05, 1e-4), {Vec::Zero(gs.dual_dim()), 1.0});

    CHECK(res.gap >= -1e-12 * (1.0 + std::abs(phi_primal(res.x_hat, sp))));
    CHECK(gs.is_dual_feasible(res.y_hat, 1e-12));

    // every group in the exit P-set is exactly zero in x_hat
    const auto P = predict_support_set(res.y_hat, gs, 1e-4, 1.0);
    for (int i : P)
      for (int c : gs.group(i)) CHECK(res.x_hat[c] == 0.0);
  }
}

TEST_CASE("epsilon certificate against the high-accuracy oracle") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto gs = testsup::random_chain_structure(rng, 20);
    const Vec u = random_vec(rng, gs.dim());
    const double alpha = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    const auto sp = make_sp(gs, u, alpha, random_vec(rng, gs.dim(), 0.5));
    const auto oracle = prox_oracle(sp);
    const auto res = solve_subproblem_enhanced(
        sp, TerminationRule::option2(0.4, 1e-5), {Vec::Zero(gs.dual_dim()), 1.0});
    REQUIRE(res.status == SubStatus::gap_met);
    CHECK((oracle.x - res.x_hat).squaredNorm() <=
          2.0 * alpha * res.eps_out + 1e-10);
  }
}

TEST_CASE("linking equation and zero-group soundness at tiny gap") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gs = testsup::random_chain_structure(rng, 20);
    const Vec u = random_vec(rng, gs.dim());
    const double alpha = std::uniform_real_distribution<double>(0.4, 1.2)(rng);
    const auto sp = make_sp(gs, u, alpha, Vec::Zero(gs.dim()));
    const auto oracle = prox_oracle(sp);

    InnerLimits lim;
    lim.max_iters = 200000;
    const auto res = solve_subproblem_enhanced(
        sp, TerminationRule::option3(1e-12, 1e-6), {Vec::Zero(gs.dual_dim()), 1.0},
        lim);
    REQUIRE(res.status == SubStatus::gap_met);

    // linking: u + alpha A yhat reproduces the prox
    const Vec linked = u + alpha * gs.apply_A(res.y_hat);
    CHECK((linked - oracle.x).norm() <= 1e-5);

    // strictly interior dual blocks imply zero groups of the prox
    for (int i = 0; i < gs.num_groups(); ++i)
      if (gs.block_norm(res.y_hat, i) < gs.weight(i) - 1e-6)
        CHECK(gs.group_norm(oracle.x, i) <= 1e-6);
  }
}

TEST_CASE("dual ascent is monotone across accepted steps") {
  std::mt19937 rng(41);
  const auto gs = paper13(0.4);
  const Vec u = random_vec(rng, 13);
  const auto sp = make_sp(gs, u, 1.0, Vec::Zero(13));

  std::vector<double> phid_trace;
  InnerLimits lim;
  lim.trace = [&](int, double, double phid, double, int) {
    phid_trace.push_back(phid);
  };
  const auto res = solve_subproblem_enhanced(
      sp, TerminationRule::option3(1e-10, 1e-6), {Vec::Zero(gs.dual_dim()), 1.0},
      lim);
  REQUIRE(res.status == SubStatus::gap_met);
  REQUIRE(phid_trace.size() >= 2);
  for (size_t t = 1; t < phid_trace.size(); ++t)
    CHECK(phid_trace[t] >= phid_trace[t - 1] - 1e-12);
}

TEST_CASE("PGA reaches the same objective but stays dense") {
  std::mt19937 rng(43);
  const auto gs = paper13(0.35);
  Vec u = random_vec(rng, 13, 2.0);
  for (int c = 4; c <= 8; ++c) u[c] = 0.01;  // middle group thresholds to zero
  const auto sp = make_sp(gs, u, 1.0, Vec::Zero(13));

  const auto enh = solve_subproblem_enhanced(
      sp, TerminationRule::option3(1e-10, 1e-6), {Vec::Zero(gs.dual_dim()), 1.0});
  const auto pga = solve_subproblem_pga(sp, 1e-10, {Vec::Zero(gs.dual_dim()), 1.0});
  CHECK(std::abs(phi_primal(enh.x_hat, sp) - phi_primal(pga.x_hat, sp)) <= 1e-6);

  int enh_zero_groups = 0, pga_zero_groups = 0;
  for (int i = 0; i < gs.num_groups(); ++i) {
    if (gs.group_norm(enh.x_hat, i) == 0.0) ++enh_zero_groups;
    if (gs.group_norm(pga.x_hat, i) == 0.0) ++pga_zero_groups;
  }
  // with these weights at least one group thresholds to zero
  CHECK(enh_zero_groups >= 1);
  CHECK(pga_zero_groups == 0);
}

TEST_CASE("PGA with an interior dual optimum recovers the exact prox") {
  std::mt19937 rng(47);
  const GroupStructure gs(4, {{0, 1, 2, 3}}, Vec::Constant(1, 100.0));
  const Vec u = random_vec(rng, 4);
  const auto sp = make_sp(gs, u, 1.0, Vec::Zero(4));
  const auto res = solve_subproblem_pga(sp, 1e-13, {Vec::Zero(4), 1.0});
  CHECK((res.x_hat - block_soft_threshold(u, 1.0, gs)).norm() <= 1e-6);

  auto sp0 = sp;
  sp0.u = Vec::Zero(4);
  const auto res0 = solve_subproblem_pga(sp0, 1e-13, {Vec::Zero(4), 1.0});
  CHECK(res0.x_hat.norm() <= 1e-6);
}

TEST_CASE("correction step") {
  std::mt19937 rng(53);
  const auto gs = paper13(0.5);
  const Vec u = random_vec(rng, 13);
  const auto sp = make_sp(gs, u, 1.0, Vec::Zero(13));
  const Vec x_hat = random_vec(rng, 13, 0.1);

  CHECK((correction_step(x_hat, x_hat, sp) - x_hat).norm() == 0.0);

  const Vec zeroed = correction_step(x_hat, Vec::Zero(13), sp);
  if (phi_primal(Vec::Zero(13), sp) <= phi_primal(x_hat, sp))
    CHECK(zeroed.isZero());
  else
    CHECK((zeroed - x_hat).norm() == 0.0);

  // a dense iterate with tiny tails vs a sparse reference near the optimum:
  // zeroing must win since it lowers phi
  const auto oracle = prox_oracle(sp);
  Vec ref = oracle.x;
  for (int i = 0; i < gs.num_groups(); ++i)
    if (gs.group_norm(ref, i) < 1e-8)
      for (int c : gs.group(i)) ref[c] = 0.0;
  Vec dense = oracle.x;
  bool any_zero_group = false;
  for (int i = 0; i < gs.num_groups(); ++i)
    if (gs.group_norm(ref, i) == 0.0) {
      any_zero_group = true;
      for (int c : gs.group(i)) dense[c] = 1e-7;
    }
  if (any_zero_group) {
    const Vec fixed = correction_step(dense, ref, sp);
    CHECK(phi_primal(fixed, sp) <= phi_primal(dense, sp));
    for (int i = 0; i < gs.num_groups(); ++i)
      if (gs.group_norm(ref, i) == 0.0) CHECK(gs.group_norm(fixed, i) == 0.0);
  }
}

TEST_SUITE_END();
