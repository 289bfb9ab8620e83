#pragma once

#include <vector>

namespace msn
{

inline constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;  // sqrt(2/pi)
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;   // log(sqrt(2 pi))

double normal_pdf(double x);
double normal_cdf(double x);

/// log Phi(x), finite for all finite x (asymptotic expansion in the far left tail).
double log_normal_cdf(double x);

/// Largest |u| accepted by tau(); beyond it the value leaves double range
/// fast enough that callers must work on the log scale.
inline constexpr double kTauMaxArgument = 12.0;

/// tau(u) = sqrt(2/pi) * int_0^u exp(z^2/2) dz. Maclaurin series for |u| <= 3,
/// adaptive 61-point Gauss-Kronrod for 3 < |u| <= 12. Throws ArgumentTooLarge
/// past that.
double tau(double u);

/// log tau(|u|) for any finite u != 0; used by the log-polar CF path.
double log_tau_abs(double u);

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule mapped to [0, 1].
QuadratureRule gauss_legendre_unit(int count);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

}  // namespace msn
