#include <gtest/gtest.h>

#include <cmath>

#include "ogsdeconv/cg.hpp"
#include "ogsdeconv/convolution.hpp"
#include "oracles.hpp"

using namespace ogsd;

TEST(CgSolve, IdentityConvergesInOneStep) {
  const Image b = oracle::random_image(6, 6, 1);
  const CgResult r = cg_solve([](const Image& x) { return x; }, b);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x.values()[i], b.values()[i], 1e-14);
}

TEST(CgSolve, ScaledIdentity) {
  const Image b = oracle::random_image(5, 7, 2);
  const CgResult r = cg_solve([](const Image& x) { return 4.0 * x; }, b);
  EXPECT_TRUE(r.converged);
  for (std::size_t i = 0; i < b.size(); ++i)
    EXPECT_NEAR(r.x.values()[i], b.values()[i] / 4.0, 1e-14);
}

TEST(CgSolve, ZeroRightHandSide) {
  const CgResult r = cg_solve([](const Image& x) { return x; }, Image(3, 3));
  EXPECT_TRUE(r.converged);
  for (double v : r.x.values()) EXPECT_EQ(v, 0.0);
}

TEST(CgSolve, MatchesDenseSolveOnConvolutionNormalEquations) {
  const int n = 16;
  const Kernel k = oracle::random_kernel(5, 3, false);
  const auto mode = BoundaryMode::symmetric;
  const Image b = oracle::random_image(n, n, 4, -1, 1);
  auto apply = [&](const Image& x) {
    Image out = conv2_adjoint(conv2_same(x, k, mode), k, mode);
    axpy(0.1, x, out);
    return out;
  };
  CgOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 1000;
  const CgResult r = cg_solve(apply, b, opt);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(std::sqrt(squared_norm(apply(r.x) - b)), opt.tol * std::sqrt(squared_norm(b)) * 1.0001);

  const Eigen::MatrixXd h = oracle::conv_matrix(k, n, n, mode);
  const Eigen::MatrixXd a = h.transpose() * h + 0.1 * Eigen::MatrixXd::Identity(n * n, n * n);
  const Eigen::VectorXd direct = a.ldlt().solve(oracle::vec(b));
  EXPECT_LT((oracle::vec(r.x) - direct).norm(), 1e-8 * direct.norm());
}

TEST(CgSolve, PreconditionedAndWarmStarted) {
  const Image d = oracle::random_image(8, 8, 5, 0.5, 50.0);
  const Image b = oracle::random_image(8, 8, 6);
  auto apply = [&](const Image& x) { return hadamard(d, x); };
  CgOptions opt;
  opt.tol = 1e-12;
  Image inv(8, 8);
  for (std::size_t i = 0; i < inv.size(); ++i) inv.values()[i] = 1.0 / d.values()[i];
  opt.inverse_diagonal = inv;
  opt.initial_guess = oracle::random_image(8, 8, 7);
  const CgResult r = cg_solve(apply, b, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  for (std::size_t i = 0; i < b.size(); ++i)
    EXPECT_NEAR(r.x.values()[i], b.values()[i] / d.values()[i], 1e-12);
}

TEST(CgSolve, ReportsNonConvergenceWithoutThrowing) {
  const Kernel k = oracle::random_kernel(5, 8);
  auto apply = [&](const Image& x) {
    Image out = conv2_adjoint(conv2_same(x, k, BoundaryMode::circular), k, BoundaryMode::circular);
    axpy(1e-6, x, out);
    return out;
  };
  CgOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 3;
  const CgResult r = cg_solve(apply, oracle::random_image(16, 16, 9), opt);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_GT(r.relative_residual, opt.tol);
  EXPECT_TRUE(r.x.all_finite());
}

TEST(CgSolve, RejectsBadOptions) {
  CgOptions opt;
  opt.tol = 0.0;
  EXPECT_THROW(cg_solve([](const Image& x) { return x; }, Image(2, 2), opt), std::invalid_argument);
  CgOptions shape;
  shape.initial_guess = Image(3, 2);
  EXPECT_THROW(cg_solve([](const Image& x) { return x; }, Image(2, 2), shape),
               std::invalid_argument);
}
