#include <gtest/gtest.h>

#include <cmath>

#include "msn/error.hpp"
#include "msn/special.hpp"

using namespace msn;

namespace
{

// Composite Simpson on exp(z^2/2) over [0, u].
double tau_simpson(double u, int panels)
{
  const double h = u / panels;
  double s = 1.0 + std::exp(0.5 * u * u);
  for (int k = 1; k < panels; ++k)
  {
    const double z = k * h;
    s += (k % 2 ? 4.0 : 2.0) * std::exp(0.5 * z * z);
  }
  return std::sqrt(2.0 / M_PI) * s * h / 3.0;
}

}  // namespace

TEST(Tau, ZeroAndOddSymmetry)
{
  EXPECT_EQ(tau(0.0), 0.0);
  for (double u : {0.1, 0.9, 2.5, 3.0, 3.1, 5.0, 8.0, 11.5})
    EXPECT_EQ(tau(-u), -tau(u)) << u;
}

TEST(Tau, MatchesHighResolutionSimpson)
{
  for (double u : {0.5, 1.0, 2.0, 2.99, 3.01, 4.0, 6.0, 9.0})
  {
    const double ref = tau_simpson(u, 1000000);
    EXPECT_NEAR(tau(u) / ref, 1.0, 1e-10) << u;
  }
}

TEST(Tau, ThrowsPastLimit)
{
  EXPECT_NO_THROW(tau(kTauMaxArgument));
  try
  {
    tau(12.5);
    FAIL();
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.code(), Errc::ArgumentTooLarge);
  }
}

TEST(Tau, LogTauAgreesInRangeAndStaysFiniteBeyond)
{
  for (double u : {0.2, 1.0, 4.0, 11.0})
    EXPECT_NEAR(log_tau_abs(u), std::log(tau(u)), 1e-11);
  EXPECT_NEAR(log_tau_abs(-3.0), std::log(tau(3.0)), 1e-11);
  // Beyond the limit: log tau(u) ~ u^2/2 - log u + log sqrt(2/pi).
  const double u = 40.0;
  EXPECT_TRUE(std::isfinite(log_tau_abs(u)));
  EXPECT_NEAR(log_tau_abs(u), 0.5 * u * u - std::log(u) + std::log(kSqrt2OverPi), 1e-2);
}

TEST(Normal, CdfPdfAndLogCdf)
{
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-14);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-16);
  EXPECT_NEAR(log_normal_cdf(-1.0), std::log(normal_cdf(-1.0)), 1e-14);
  // Mills ratio asymptotics: log Phi(-x) ~ -x^2/2 - log(x sqrt(2 pi)).
  const double x = 60.0;
  EXPECT_TRUE(std::isfinite(log_normal_cdf(-x)));
  EXPECT_NEAR(log_normal_cdf(-x), -0.5 * x * x - std::log(x) - kLogSqrt2Pi, 1e-3);
}

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly)
{
  const QuadratureRule r = gauss_legendre_unit(8);
  ASSERT_EQ(r.nodes.size(), 8u);
  for (int deg = 0; deg <= 15; ++deg)
  {
    double s = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k)
      s += r.weights[k] * std::pow(r.nodes[k], deg);
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-14) << deg;
  }
  for (double x : r.nodes)
  {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Kolmogorov, KnownValues)
{
  // Q(1) = 2 sum (-1)^{k-1} exp(-2 k^2) = 0.2699996716...
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-12);
  EXPECT_LT(kolmogorov_survival(3.0), 1e-7);
}
