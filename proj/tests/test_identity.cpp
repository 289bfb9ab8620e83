#include <gtest/gtest.h>

#include "msn/error.hpp"
#include "msn/families.hpp"
#include "msn/identity.hpp"
#include "msn/special.hpp"
#include "support.hpp"

using namespace msn;
using msn::testing::corr2;
using msn::testing::with_delta;

namespace
{

MsnParams base()
{
  Mat m(2, 2), v(2, 2), s(2, 2), b(2, 2);
  m << 0.2, -0.1, 0.0, 0.4;
  v << 1.0, 0.3, 0.3, 1.5;
  s << 1.0, -0.2, -0.2, 0.8;
  b << 0.5, -0.4, 1.0, 0.2;
  return MsnParams::build(m, v, s, b);
}

}  // namespace

TEST(Mixture, EndpointsAreBitExact)
{
  const MsnParams x = base();
  Mat b2(2, 2);
  b2 << -1.0, 2.0, 0.3, -0.5;
  const MsnParams y = MsnParams::build(x.M() + Mat::Ones(2, 2), 2.0 * x.V().matrix(), x.Sigma().matrix(), b2);
  const auto& a = x.multivariate();
  const auto& c = y.multivariate();
  const MixtureParams m0 = mixture(a, c, 0.0), m1 = mixture(a, c, 1.0);
  EXPECT_EQ(m0.location, a.location());
  EXPECT_EQ(m0.scale, a.scale());
  EXPECT_EQ(m0.delta, a.delta());
  EXPECT_EQ(m1.location, c.location());
  EXPECT_EQ(m1.scale, c.scale());
  EXPECT_EQ(m1.delta, c.delta());
  const MixtureParams half = mixture(a, c, 0.25);
  EXPECT_LT((half.scale - (0.25 * c.scale() + 0.75 * a.scale())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(mixture(a, c, 1.5), Error);
}

TEST(Mixture, EqualScalesStayPut)
{
  const MsnParams x = base();
  const MsnParams y = MsnParams::build(x.M() * 2.0, x.V().matrix(), x.Sigma().matrix(), x.B());
  EXPECT_EQ(mixture(x.multivariate(), y.multivariate(), 0.5).scale, x.omega());
}

TEST(Mixture, NearBoundaryResidualReportsLambda)
{
  // delta' Omega^-1 delta = 1 - 2.8e-12 is an admissible law, but the residual
  // Omega - delta delta' has condition number past the definiteness threshold.
  const Vec d = Vec::Unit(4, 0) * std::sqrt(1.0 - 2.8e-12);
  const MultivariateSn x = MultivariateSn::from_delta(Vec::Zero(4), Mat::Identity(4, 4), d);
  const MultivariateSn y = MultivariateSn::from_delta(Vec::Ones(4), Mat::Identity(4, 4), d);
  try
  {
    mixture(x, y, 0.5);
    FAIL();
  }
  catch (const MixtureError& e)
  {
    EXPECT_EQ(e.code(), Errc::MixturePdFailure);
    EXPECT_EQ(e.lambda(), 0.5);
  }
}

TEST(Rhs, LinearClosedFormIsExact)
{
  const MsnParams x = base();
  Mat b2(2, 2);
  b2 << -1.0, 2.0, 0.3, -0.5;
  const MsnParams y = MsnParams::build(x.M() + Mat::Constant(2, 2, 0.3), 1.5 * x.V().matrix(), x.Sigma().matrix(), b2);
  Mat a(2, 2);
  a << 1.0, -0.5, 0.7, 2.0;
  const RhsResult r = rhs_estimate(linear_function(a), x.multivariate(), y.multivariate(), 16, 1000, 3);
  const double closed = linear_identity_value(vec(a), x.multivariate(), y.multivariate());
  EXPECT_EQ(r.estimate.std_error, 0.0);
  EXPECT_NEAR(r.estimate.value, closed, 1e-12 * std::max(1.0, std::abs(closed)));
  // The closed form is the mean difference.
  EXPECT_NEAR(closed, vec(a).dot(vec(mean(y)) - vec(mean(x))), 1e-12);
  ASSERT_EQ(r.nodes.size(), 16u);
  for (const auto& n : r.nodes)
  {
    EXPECT_EQ(n.smooth_term.std_error, 0.0);
    EXPECT_EQ(n.skew_term.std_error, 0.0);
  }
}

TEST(Rhs, EqualLawsGiveZeroAndLhsAgrees)
{
  const MsnParams x = base();
  Mat q = Mat::Identity(4, 4);
  q(0, 1) = q(1, 0) = 0.3;
  const TestFunction f = quadratic_function(2, 2, q, Vec::Ones(4));
  const RhsResult r = rhs_estimate(f, x.multivariate(), x.multivariate(), 8, 2000, 4);
  EXPECT_EQ(r.estimate.value, 0.0);
  EXPECT_EQ(r.estimate.std_error, 0.0);
  const McEstimate l = lhs_estimate(f, x.multivariate(), x.multivariate(), 50000, 5);
  EXPECT_LT(std::abs(l.value), 3.0 * l.std_error);
}

TEST(Lhs, ConstantAndTraceOfScale)
{
  const MsnParams x = base();
  const MsnParams y = MsnParams::build(x.M(), 2.0 * x.V().matrix(), x.Sigma().matrix(), x.B());
  const McEstimate c = lhs_estimate(constant_function(2, 2, 3.0), x.multivariate(), y.multivariate(), 1000, 1);
  EXPECT_EQ(c.value, 0.0);
  EXPECT_EQ(c.std_error, 0.0);

  const MsnParams x0 = MsnParams::build(Mat::Zero(2, 2), x.V().matrix(), x.Sigma().matrix(), x.B());
  const MsnParams y0 = MsnParams::build(Mat::Zero(2, 2), y.V().matrix(), y.Sigma().matrix(), y.B());
  const McEstimate l = lhs_estimate(frobenius_sq_function(2, 2), x0.multivariate(), y0.multivariate(), 200000, 2);
  EXPECT_LT(std::abs(l.value - (y0.omega().trace() - x0.omega().trace())), 4.0 * l.std_error);
}

TEST(Identity, QuadraticCaseAgreesAtModestSize)
{
  for (const auto& c : preregistered_identity_cases())
  {
    if (c.name != "quadratic-all")
      continue;
    const RhsResult r = rhs_estimate(c.f, c.x.multivariate(), c.y.multivariate(), 8, 20000, 11);
    const McEstimate l = lhs_estimate(c.f, c.x.multivariate(), c.y.multivariate(), 80000, 12);
    EXPECT_LT(std::abs(difference_z(l, r.estimate)), 4.0);
    return;
  }
  FAIL() << "quadratic-all case missing";
}

TEST(Identity, PreregisteredCasesAreFixed)
{
  const auto a = preregistered_identity_cases();
  const auto b = preregistered_identity_cases();
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t k = 0; k < a.size(); ++k)
  {
    EXPECT_EQ(a[k].name, b[k].name);
    EXPECT_EQ(a[k].x.B(), b[k].x.B());
    EXPECT_EQ(a[k].y.omega(), b[k].y.omega());
    EXPECT_EQ(a[k].x.n(), 2);
    EXPECT_EQ(a[k].x.p(), 2);
  }
}

TEST(SignCheck, EqualLawsGiveZeroSums)
{
  const MsnParams x = base();
  const std::vector<Mat> probes = probe_grid(2, 2, 3, -1.0, 1.0);
  const SignCheckReport r = sufficient_sign_check(tanh_function(2, 2, Vec::Ones(4)), x.multivariate(),
                                                  x.multivariate(), probes);
  EXPECT_TRUE(r.all_hold());
  EXPECT_EQ(r.scale.worst_value, 0.0);
  EXPECT_EQ(r.location.worst_value, 0.0);
  EXPECT_EQ(r.skew.worst_value, 0.0);
}

TEST(SignCheck, IncreasingLinearWithOrderedParameters)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.3), corr2(-0.2), Mat::Constant(2, 2, 0.2));
  const MsnParams y = with_delta(Mat::Constant(2, 2, 0.1), corr2(0.3), corr2(-0.2), Mat::Constant(2, 2, 0.3));
  Mat a(2, 2);
  a << 1.0, 0.5, 0.2, 2.0;
  const TestFunction f = linear_function(a);
  const SignCheckReport r =
      sufficient_sign_check(f, x.multivariate(), y.multivariate(), probe_grid(2, 2, 3, -2.0, 2.0));
  EXPECT_TRUE(r.all_hold());
  const McEstimate l = lhs_estimate(f, x.multivariate(), y.multivariate(), 100000, 8);
  EXPECT_GT(l.value, -3.0 * l.std_error);
}

TEST(SignCheck, MixedSignGradientViolatesLocationCondition)
{
  const MsnParams x = base();
  const MsnParams y = MsnParams::build(x.M() + Mat::Constant(2, 2, 0.5), x.V().matrix(), x.Sigma().matrix(), x.B());
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = -2.0;  // f = x11 - 2 x12
  const SignCheckReport r =
      sufficient_sign_check(linear_function(a), x.multivariate(), y.multivariate(), probe_grid(2, 2, 3, -1.0, 1.0));
  EXPECT_FALSE(r.location.satisfied_at_all_probes);
  EXPECT_NEAR(r.location.worst_value, -0.5, 1e-12);
  EXPECT_EQ(r.location.worst_point.rows(), 2);
  EXPECT_TRUE(r.scale.satisfied_at_all_probes);
  EXPECT_TRUE(r.skew.satisfied_at_all_probes);
}
