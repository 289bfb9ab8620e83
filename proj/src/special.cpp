#include "msn/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "msn/error.hpp"

namespace msn
{

double normal_pdf(double x)
{
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double log_normal_cdf(double x)
{
  if (x > -37.0)
    return std::log(normal_cdf(x));
  // Mills-ratio expansion: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

namespace
{

double tau_series(double u)
{
  // sqrt(2/pi) * sum_k u^{2k+1} / ((2k+1) 2^k k!)
  const double u2 = 0.5 * u * u;
  double term = u;  // u^{2k+1} / (2^k k!)
  double sum = u;
  for (int k = 1; k < 200; ++k)
  {
    term *= u2 / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum))
      break;
  }
  return kSqrt2OverPi * sum;
}

double tau_quadrature(double u)
{
  using boost::math::quadrature::gauss_kronrod;
  const double a = std::abs(u);
  const double value =
      gauss_kronrod<double, 61>::integrate([](double z) { return std::exp(0.5 * z * z); }, 0.0, a, 15, 1e-14);
  return std::copysign(kSqrt2OverPi * value, u);
}

}  // namespace

double tau(double u)
{
  if (!std::isfinite(u) || std::abs(u) > kTauMaxArgument)
    throw Error(Errc::ArgumentTooLarge, "tau argument |u| = " + std::to_string(std::abs(u)) + " exceeds 12");
  if (std::abs(u) <= 3.0)
    return tau_series(u);
  return tau_quadrature(u);
}

double log_tau_abs(double u)
{
  const double a = std::abs(u);
  if (a <= kTauMaxArgument)
    return std::log(std::abs(tau(a)));
  // int_0^a e^{z^2/2} dz = e^{a^2/2} int_0^a e^{-a s + s^2/2} ds  (z = a - s)
  using boost::math::quadrature::gauss_kronrod;
  const double upper = std::min(a, 80.0 / a);
  const double scaled = gauss_kronrod<double, 61>::integrate(
      [a](double s) { return std::exp(-a * s + 0.5 * s * s); }, 0.0, upper, 15, 1e-14);
  return 0.5 * a * a + std::log(kSqrt2OverPi * scaled);
}

QuadratureRule gauss_legendre_unit(int count)
{
  if (count < 1)
    throw Error(Errc::InvalidConfig, "Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(count));
  rule.weights.resize(static_cast<std::size_t>(count));
  const int n = count;
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter)
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1)
      {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16)
        break;
    }
    if (n == 1)
    {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - x);
    rule.nodes[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

double kolmogorov_survival(double lambda)
{
  if (lambda < 0.2)
    return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k)
  {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17)
      break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace msn
