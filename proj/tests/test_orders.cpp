#include <gtest/gtest.h>

#include "msn/error.hpp"
#include "msn/orders.hpp"
#include "msn/special.hpp"
#include "support.hpp"

using namespace msn;
using msn::testing::corr2;
using msn::testing::with_delta;

namespace
{

MsnParams general()
{
  Mat m(2, 2), v(2, 2), s(2, 2), b(2, 2);
  m << 0.1, -0.2, 0.3, 0.0;
  v << 1.0, 0.4, 0.4, 1.3;
  s << 1.2, -0.3, -0.3, 0.9;
  b << 0.8, -0.5, 0.2, 1.1;
  return MsnParams::build(m, v, s, b);
}

Mat skew_d()
{
  Mat d(2, 2);
  d << 0.3, 0.1, -0.2, 0.25;
  return d;
}

void expect_reverified(const OrderVerdict& v, const MsnParams& x, const MsnParams& y)
{
  ASSERT_EQ(v.status, VerdictStatus::FailsProven) << to_string(v.kind) << ": " << v.notes;
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_GT(witness_violation(*v.witness, x.multivariate(), y.multivariate()), kOrderTolerance)
      << witness_to_json(*v.witness).dump();
  EXPECT_TRUE(reverify_witness(*v.witness, x.multivariate(), y.multivariate()));
  const json j = verdict_to_json(v);
  EXPECT_EQ(j["status"], "FailsProven");
  EXPECT_TRUE(j.contains("witness"));
}

}  // namespace

TEST(Orders, ParseAndNames)
{
  EXPECT_EQ(parse_order("icx"), OrderKind::Icx);
  EXPECT_STREQ(to_string(OrderKind::Dcx), "dcx");
  EXPECT_THROW(parse_order("lr"), Error);
}

TEST(Orders, ReflexiveForEveryOrder)
{
  const MsnParams x = general();
  for (OrderKind k : {OrderKind::St, OrderKind::Cx, OrderKind::Icx, OrderKind::Uo, OrderKind::Sm, OrderKind::Dcx})
    EXPECT_EQ(check_order(k, x, x).status, VerdictStatus::HoldsProven) << to_string(k);
}

TEST(Orders, ShapeMismatchThrows)
{
  const MsnParams a = general();
  const MsnParams b = MsnParams::build(Mat::Zero(2, 1), Mat::Ones(1, 1), Mat::Identity(2, 2), Mat::Zero(2, 1));
  try
  {
    check_st(a, b);
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(St, KroneckerRescaleHolds)
{
  const MsnParams x = general();
  const MsnParams y = MsnParams::build(x.M() + Mat::Ones(2, 2), 2.0 * x.V().matrix(), 0.5 * x.Sigma().matrix(), x.B());
  EXPECT_LT((y.delta() - x.delta()).cwiseAbs().maxCoeff(), 1e-14);
  const OrderVerdict v = check_st(x, y);
  EXPECT_EQ(v.status, VerdictStatus::HoldsProven) << v.notes;
  EXPECT_NEAR(v.certificate["kronecker_factor"].get<double>(), 0.5, 1e-12);
}

TEST(St, ScaleChangeFailsWithParamWitness)
{
  const MsnParams x = general();
  // delta is pinned so only the scale differs.
  const MsnParams y = with_delta(x.M(), x.V().matrix(), 2.0 * x.Sigma().matrix(), unvec(x.delta(), 2, 2));
  const OrderVerdict v = check_st(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "scale_eq");
  EXPECT_TRUE(v.certificate["kronecker_factor"].is_null());
}

TEST(St, LocationDecreaseFails)
{
  const MsnParams x = general();
  Mat m = x.M();
  m(1, 0) -= 0.5;
  const MsnParams y = MsnParams::build(m, x.V().matrix(), x.Sigma().matrix(), x.B());
  const OrderVerdict v = check_st(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "location_leq");
  EXPECT_EQ(v.witness->indices, std::vector<Eigen::Index>{1});
}

TEST(Univariate, StConditions)
{
  EXPECT_EQ(univariate_st({0.0, 1.0, 0.3}, {0.0, 1.0, 0.3}).status, VerdictStatus::HoldsProven);
  EXPECT_EQ(univariate_st({-0.5, 2.0, 0.3}, {0.2, 2.0, 0.3}).status, VerdictStatus::HoldsProven);
  EXPECT_EQ(univariate_st({0.0, 1.0, 0.1}, {0.0, 1.0, 0.6}).status, VerdictStatus::HoldsProven);
  const OrderVerdict v = univariate_st({0.0, 1.0, 0.3}, {0.0, 1.5, 0.3});
  EXPECT_EQ(v.status, VerdictStatus::FailsProven);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->quantity, "scale_diag_eq");
  EXPECT_EQ(univariate_st({0.0, 1.0, 0.5}, {0.0, 1.0, 0.4}).status, VerdictStatus::FailsProven);
}

TEST(Cx, StandardizedPsdIncreaseForcesEqualCorrelation)
{
  // Unit diagonals make C' - C zero on the diagonal, and a PSD matrix with a
  // zero diagonal vanishes, so the only standardized cx pairs share the law.
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.1), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.5), corr2(0.1), skew_d());
  ASSERT_TRUE(standardized(x, y));
  EXPECT_LT((x.delta() - y.delta()).cwiseAbs().maxCoeff(), 1e-14);
  const OrderVerdict v = check_cx(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "corr_diff_psd");
  EXPECT_EQ(check_cx(x, x).status, VerdictStatus::HoldsProven);
}

TEST(Cx, DifferentSkewFailsByMeans)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.1), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.1), 0.5 * skew_d());
  const OrderVerdict v = check_cx(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "delta_eq");

  const MsnParams gx = general();
  const MsnParams gy = MsnParams::build(gx.M(), gx.V().matrix(), gx.Sigma().matrix(), 0.5 * gx.B());
  const OrderVerdict g = check_cx(gx, gy);
  expect_reverified(g, gx, gy);
  EXPECT_EQ(g.witness->quantity, "mean_eq");
}

TEST(Cx, GeneralSufficientAndInconclusive)
{
  const MsnParams x = with_delta(Mat::Constant(2, 2, 0.3), corr2(0.2), 1.5 * corr2(0.1), skew_d());
  const MsnParams y = with_delta(Mat::Constant(2, 2, 0.3), 2.0 * corr2(0.2), 1.5 * corr2(0.1), skew_d());
  EXPECT_EQ(check_cx(x, y).status, VerdictStatus::SufficientHolds);
  // Same means, different locations and skews: undecided.
  Mat m = x.M();
  const Vec shift = kSqrt2OverPi * 0.5 * vec(skew_d());
  m += unvec(shift, 2, 2);
  const MsnParams z = with_delta(m, corr2(0.2), 1.5 * corr2(0.1), 0.5 * skew_d());
  EXPECT_LT((vec(mean(z)) - vec(mean(x))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(check_cx(x, z).status, VerdictStatus::Inconclusive);
}

TEST(Icx, StandardizedSkewIncreaseHolds)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.3), corr2(0.2), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.3), corr2(0.2), skew_d() + Mat::Constant(2, 2, 0.1));
  EXPECT_EQ(check_icx(x, y).status, VerdictStatus::HoldsProven);
  const OrderVerdict r = check_icx(y, x);
  expect_reverified(r, y, x);
  EXPECT_EQ(r.witness->quantity, "delta_leq");
}

TEST(Icx, CopositiveButNotPsdIsLeftUndecided)
{
  // C' - C = [[0, 0.5], [0.5, 0]] is copositive and not PSD.
  const MsnParams x = MsnParams::build(Mat::Zero(2, 1), Mat::Ones(1, 1), Mat::Identity(2, 2), Mat::Zero(2, 1));
  const MsnParams y = MsnParams::build(Mat::Zero(2, 1), Mat::Ones(1, 1), corr2(0.5), Mat::Zero(2, 1));
  const OrderVerdict v = check_icx(x, y);
  EXPECT_EQ(v.status, VerdictStatus::Inconclusive);
  EXPECT_NE(v.notes.find("max"), std::string::npos);

  // E max(x1, x2) = sqrt((1 - rho) / pi) drops from 0.564 to 0.399: max is
  // increasing convex, so X <=icx Y is false for this pair.
  const Mat dx = sample_additive(x, 100000, 1).draws;
  const Mat dy = sample_additive(y, 100000, 2).draws;
  RunningStats fx, fy;
  for (Eigen::Index k = 0; k < dx.cols(); ++k)
  {
    fx.add(dx.col(k).maxCoeff());
    fy.add(dy.col(k).maxCoeff());
  }
  EXPECT_NEAR(fx.mean(), std::sqrt(1.0 / M_PI), 5.0 * fx.std_error());
  EXPECT_NEAR(fy.mean(), std::sqrt(0.5 / M_PI), 5.0 * fy.std_error());
  EXPECT_LT((fy.mean() - fx.mean()) / std::hypot(fx.std_error(), fy.std_error()), -10.0);
}

TEST(Icx, NotCopositiveGivesStopLossWitness)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.6), corr2(0.2), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.0), corr2(0.2), skew_d());
  const OrderVerdict v = check_icx(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "stop_loss");
  EXPECT_TRUE((v.witness->direction.array() >= 0.0).all());
  EXPECT_GT(v.witness->x_value, v.witness->y_value);
}

TEST(Icx, GeneralSufficientAndMeanFailure)
{
  const MsnParams x = general();
  // Scaling V alone would change delta, so the skew is pinned explicitly.
  const MsnParams y2 = with_delta(x.M() + Mat::Constant(2, 2, 0.2), 1.5 * x.V().matrix(), x.Sigma().matrix(),
                                  unvec(x.delta(), 2, 2));
  EXPECT_EQ(check_icx(x, y2).status, VerdictStatus::SufficientHolds);
  const MsnParams lower = MsnParams::build(x.M() - Mat::Constant(2, 2, 1.0), x.V().matrix(), x.Sigma().matrix(),
                                           x.B());
  const OrderVerdict v = check_icx(x, lower);
  expect_reverified(v, x, lower);
  EXPECT_EQ(v.witness->quantity, "mean_leq");
}

TEST(StopLoss, MatchesNormalClosedForm)
{
  // delta = 0: E(U - t)+ = s phi(z) + (mu - t) Phi(z), z = (mu - t) / s.
  const UnivariateSnParams u{0.4, 2.25, 0.0};
  for (double t : {-2.0, 0.0, 0.4, 3.0})
  {
    const double z = (0.4 - t) / 1.5;
    EXPECT_NEAR(sn_stop_loss(u, t), 1.5 * normal_pdf(z) + (0.4 - t) * normal_cdf(z), 1e-12);
  }
  // Far left threshold: E(U - t)+ = E U - t.
  const UnivariateSnParams s{0.1, 1.0, 0.8};
  EXPECT_NEAR(sn_stop_loss(s, -40.0), 0.1 + kSqrt2OverPi * 0.8 + 40.0, 1e-9);
}

TEST(Uo, SlepianBranch)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.5), corr2(0.3), skew_d() + Mat::Constant(2, 2, 0.05));
  const OrderVerdict v = check_uo(x, y);
  EXPECT_EQ(v.status, VerdictStatus::SufficientHolds) << v.notes;
  EXPECT_FALSE(v.notes.empty());
}

TEST(Uo, UnequalDiagonalFails)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), skew_d());
  Mat s = corr2(0.3);
  s(0, 0) = 1.4;
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.2), s, skew_d());
  const OrderVerdict v = check_uo(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "scale_diag_eq");
}

TEST(Uo, StrictLocationIncreaseIsInconclusive)
{
  const MsnParams x = general();
  const MsnParams y = MsnParams::build(x.M() + Mat::Constant(2, 2, 0.4), x.V().matrix(), x.Sigma().matrix(), x.B());
  EXPECT_EQ(check_uo(x, y).status, VerdictStatus::Inconclusive);
}

TEST(Sm, EqualMarginalsLargerCorrelationHolds)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.5), corr2(0.3), skew_d());
  EXPECT_EQ(check_sm(x, y).status, VerdictStatus::HoldsProven);
  const OrderVerdict r = check_sm(y, x);
  expect_reverified(r, y, x);
  EXPECT_EQ(r.witness->quantity, "scale_leq");
}

TEST(Sm, DifferentSkewFailsAndGeneralIsInconclusive)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), -skew_d());
  const OrderVerdict v = check_sm(x, y);
  expect_reverified(v, x, y);
  EXPECT_EQ(v.witness->quantity, "marginal_eq");
  const MsnParams g = general();
  const MsnParams h = MsnParams::build(g.M(), g.V().matrix(), g.Sigma().matrix(), -g.B());
  EXPECT_EQ(check_sm(g, h).status, VerdictStatus::Inconclusive);
}

TEST(Dcx, ElementwiseIncreaseHoldsAndDecreaseFails)
{
  const MsnParams x = with_delta(Mat::Zero(2, 2), corr2(0.2), corr2(0.3), skew_d());
  const MsnParams y = with_delta(Mat::Zero(2, 2), corr2(0.3), corr2(0.3), skew_d());
  EXPECT_EQ(check_dcx(x, y).status, VerdictStatus::HoldsProven);
  const OrderVerdict r = check_dcx(y, x);
  expect_reverified(r, y, x);
  EXPECT_EQ(r.witness->quantity, "corr_leq");
  EXPECT_EQ(r.witness->kind, WitnessKind::IndexPair);
  const MsnParams g = general();
  EXPECT_EQ(check_dcx(g, MsnParams::build(g.M(), 2.0 * g.V().matrix(), g.Sigma().matrix(), g.B())).status,
            VerdictStatus::Inconclusive);
}

TEST(Witness, ForgedWitnessDoesNotReverify)
{
  const MsnParams x = general();
  Witness w;
  w.kind = WitnessKind::ParamInequality;
  w.quantity = "location_leq";
  w.indices = {0};
  EXPECT_FALSE(reverify_witness(w, x.multivariate(), x.multivariate()));
  w.indices = {17};
  EXPECT_THROW(witness_violation(w, x.multivariate(), x.multivariate()), Error);
}

TEST(Evidence, EqualLawsStayWithinThreeSigma)
{
  const MsnParams x = general();
  const EvidenceReport r = mc_order_evidence(x, x, make_family(FamilyKind::ConvexQuadratic, 2, 2, 3), 20000, 4);
  EXPECT_GE(r.functions.size(), 8u);
  EXPECT_EQ(r.below_3sigma, 0);
  for (const auto& f : r.functions)
    EXPECT_LT(std::abs(f.z), 3.5) << f.name;
}

TEST(Evidence, ReversedStPairIsFalsified)
{
  const MsnParams x = general();
  const MsnParams y = MsnParams::build(x.M() + Mat::Constant(2, 2, 0.3), x.V().matrix(), x.Sigma().matrix(), x.B());
  ASSERT_EQ(check_st(x, y).status, VerdictStatus::HoldsProven);
  const FunctionFamily fam = make_family(FamilyKind::IncreasingLinear, 2, 2, 9);
  const EvidenceReport up = mc_order_evidence(x, y, fam, 50000, 10);
  EXPECT_EQ(up.below_3sigma, 0);
  EXPECT_FALSE(up.contradicts(check_st(x, y)));
  const EvidenceReport down = mc_order_evidence(y, x, fam, 50000, 10);
  EXPECT_GT(down.below_5sigma, 0);
  EXPECT_TRUE(evidence_to_json(down)["falsified"].get<bool>());
}

TEST(UpperOrthant, LimitsAndIndependentCase)
{
  const MsnParams q = general();
  const UpperOrthantResult all = upper_orthant_prob(q, Mat::Constant(2, 2, -1e6), 20000, 1);
  EXPECT_EQ(all.sampler.value, 1.0);
  EXPECT_NEAR(all.augmented.value, 1.0, 4.0 * all.augmented.std_error + 1e-12);

  const MsnParams flat = MsnParams::build(q.M(), Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Zero(2, 2));
  const UpperOrthantResult c = upper_orthant_prob(flat, flat.M(), 200000, 2);
  EXPECT_NEAR(c.sampler.value, 1.0 / 16.0, 4.0 * c.sampler.std_error);
  EXPECT_NEAR(c.augmented.value, 1.0 / 16.0, 4.0 * c.augmented.std_error);
  EXPECT_LT(std::abs(c.z), 4.0);

  const UpperOrthantResult r = upper_orthant_prob(q, q.M(), 200000, 3);
  EXPECT_LT(std::abs(r.z), 4.0);
  EXPECT_THROW(upper_orthant_prob(q, Mat::Zero(3, 2), 100, 1), Error);
}
