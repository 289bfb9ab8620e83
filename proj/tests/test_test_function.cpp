#include <gtest/gtest.h>

#include <cmath>

#include "msn/error.hpp"
#include "msn/random.hpp"
#include "msn/test_function.hpp"

using namespace msn;

TEST(FiniteDiff, TraceAndFrobenius)
{
  Mat x(2, 2);
  x << 0.3, -1.2, 2.0, 0.7;
  const Vec g = finite_diff_gradient(trace_function(2, 2), x);
  Vec expected(4);
  expected << 1, 0, 0, 1;
  EXPECT_LT((g - expected).cwiseAbs().maxCoeff(), 1e-9);

  const Vec gf = finite_diff_gradient(frobenius_sq_function(2, 2), x);
  EXPECT_LT((gf - 2.0 * vec(x)).cwiseAbs().maxCoeff(), 1e-6);
  const Mat hf = finite_diff_hessian(frobenius_sq_function(2, 2), x);
  EXPECT_LT((hf - 2.0 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(FiniteDiff, CubicPolynomialAgainstHandDerivative)
{
  // f = 2 x11^2 x21 - x12 x22^2 + x11, vec order (x11, x21, x12, x22).
  Eigen::MatrixXi e1(2, 2), e2(2, 2), e3(2, 2);
  e1 << 2, 0, 1, 0;
  e2 << 0, 1, 0, 2;
  e3 << 1, 0, 0, 0;
  const TestFunction f = polynomial_function(2, 2, {{2.0, e1}, {-1.0, e2}, {1.0, e3}});
  Rng rng(3);
  for (int k = 0; k < 20; ++k)
  {
    Mat x(2, 2);
    for (Eigen::Index e = 0; e < 4; ++e)
      x(e) = rng.normal();
    const double a = x(0, 0), b = x(1, 0), c = x(0, 1), d = x(1, 1);
    Vec g(4);
    g << 4 * a * b + 1, 2 * a * a, -d * d, -2 * c * d;
    const Vec fd = finite_diff_gradient(f, x);
    EXPECT_LT((fd - g).cwiseAbs().maxCoeff(), 1e-4 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    EXPECT_LT((f.gradient(x) - g).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    Mat h = Mat::Zero(4, 4);
    h(0, 0) = 4 * b;
    h(0, 1) = h(1, 0) = 4 * a;
    h(2, 3) = h(3, 2) = -2 * d;
    h(3, 3) = -2 * c;
    EXPECT_LT((f.hessian(x) - h).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()));
  }
}

TEST(FiniteDiff, NonFiniteThrows)
{
  TestFunction f = constant_function(1, 1, 0.0);
  f.evaluate = [](const Mat& x) { return x(0, 0) < 1.0 ? 0.0 : std::nan(""); };
  try
  {
    finite_diff_gradient(f, Mat::Constant(1, 1, 1.0 - 1e-7));
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), Errc::NonFiniteValue);
  }
}

TEST(Builtins, AnalyticDerivativesPassCheck)
{
  Mat q(4, 4);
  q << 2.0, 0.3, 0.0, 0.1, 0.3, 1.0, 0.2, 0.0, 0.0, 0.2, 1.5, -0.4, 0.1, 0.0, -0.4, 0.7;
  Vec a(4);
  a << 0.5, -1.0, 0.3, 0.8;
  Eigen::MatrixXi e(2, 2);
  e << 1, 2, 0, 1;
  for (const TestFunction& f :
       {linear_function(Mat::Constant(2, 2, 0.5)), trace_function(2, 2), frobenius_sq_function(2, 2),
        quadratic_function(2, 2, q, a, 1.0), tanh_function(2, 2, a, 2.0, 0.1), product_function(2, 2, 0, 0, 1, 1),
        polynomial_function(2, 2, {{0.7, e}})})
  {
    const DerivativeCheck c = check_derivatives(f, 5);
    EXPECT_TRUE(c.passed) << f.name << " " << c.worst_gradient_error << " " << c.worst_hessian_error;
  }
}

TEST(Builtins, TraceOnRectangularUsesLeadingBlock)
{
  Mat x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  EXPECT_DOUBLE_EQ(trace_function(2, 3)(x), 6.0);
}

TEST(Builtins, ProductIndexChecks)
{
  EXPECT_THROW(product_function(2, 2, 2, 0, 0, 0), Error);
  const TestFunction f = product_function(2, 3, 1, 2, 0, 1, -3.0);
  Mat x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  EXPECT_DOUBLE_EQ(f(x), -3.0 * 6.0 * 2.0);
  EXPECT_FALSE(f.has(FunctionClass::Supermodular));
}
