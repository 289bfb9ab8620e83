#pragma once
// Shared constructions for the unit and acceptance tests.

#include <cmath>

#include "msn/distribution.hpp"

namespace msn::testing
{

inline Mat corr2(double r)
{
  Mat c(2, 2);
  c << 1.0, r, r, 1.0;
  return c;
}

// Parameters whose delta equals `d` (an n x p matrix read in vec order).
// With B = k s Sigma^-1 D V^-1 v the matrix delta formula gives
// k D / sqrt(1 + k^2 q), q = vec(D)' (V (x) Sigma)^-1 vec(D), so k = 1 / sqrt(1 - q).
inline MsnParams with_delta(const Mat& m, const Mat& v, const Mat& sigma, const Mat& d)
{
  const Mat vi = v.inverse(), si = sigma.inverse();
  const double q = (vi * d.transpose() * si * d).trace();
  const double k = 1.0 / std::sqrt(1.0 - q);
  const Vec vs = v.diagonal().cwiseSqrt(), ss = sigma.diagonal().cwiseSqrt();
  const Mat b = k * ss.asDiagonal() * si * d * vi * vs.asDiagonal();
  return MsnParams::build(m, v, sigma, b);
}

}  // namespace msn::testing
