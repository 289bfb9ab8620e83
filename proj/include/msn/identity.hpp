#pragma once

// Monte Carlo evaluation of both sides of the expectation identity
//
//   E f(Y) - E f(X) = int_0^1 E_{Z_l}[ grad f . vec(M' - M) + tr((Om' - Om) H_f) / 2 ]
//                           + sqrt(2/pi) E_{N_l}[ grad f . (d' - d) ] dl
//
// where Z_l ~ SN(M_l, Om_l, *, d_l) interpolates X (l = 0) and Y (l = 1) and
// N_l ~ N(vec M_l, Om_l - d_l d_l'). Intermediate laws are handled in vec'd
// form; Om_l is in general not a Kronecker product.

#include <string>
#include <vector>

#include "msn/distribution.hpp"
#include "msn/stats.hpp"
#include "msn/test_function.hpp"

namespace msn
{

struct MixtureParams
{
  double lambda = 0.0;
  Vec location;
  Mat scale;
  Vec delta;

  MultivariateSn law() const { return MultivariateSn::from_delta(location, scale, delta); }
};

/// Componentwise interpolation lambda * y + (1 - lambda) * x. Throws
/// MixtureError when scale or scale - delta delta' is not positive definite.
MixtureParams mixture(const MultivariateSn& x, const MultivariateSn& y, double lambda);

struct NodeDiagnostic
{
  double lambda = 0.0;
  double weight = 0.0;
  McEstimate smooth_term;  // E_Z[grad f . dM + tr(dOm H)/2]
  McEstimate skew_term;    // sqrt(2/pi) E_N[grad f . d delta]
};

struct RhsResult
{
  McEstimate estimate;
  std::vector<NodeDiagnostic> nodes;
};

/// Right-hand side by Gauss-Legendre in lambda and MC at each node. Uses the
/// analytic gradient/Hessian when present and finite differences otherwise.
RhsResult rhs_estimate(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y, int lambda_nodes,
                       Eigen::Index mc_per_node, std::uint64_t seed, unsigned workers = 0);

/// Mean of f over Y-draws minus mean over independent X-draws.
McEstimate lhs_estimate(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y,
                        Eigen::Index samples, std::uint64_t seed, unsigned workers = 0);

struct ConditionReport
{
  bool satisfied_at_all_probes = true;
  double worst_value = 0.0;
  Mat worst_point;
};

/// Pointwise sums of the sufficient sign conditions:
///   scale:    sum (Om' - Om)_ab d2f/dx_a dx_b
///   location: sum (m' - m)_k df/dx_k
///   skew:     sum (d' - d)_k df/dx_k
/// Nonnegativity at every probe is evidence, not a proof, of E f(Y) >= E f(X).
struct SignCheckReport
{
  ConditionReport scale;
  ConditionReport location;
  ConditionReport skew;

  bool all_hold() const
  {
    return scale.satisfied_at_all_probes && location.satisfied_at_all_probes && skew.satisfied_at_all_probes;
  }
};

SignCheckReport sufficient_sign_check(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y,
                                      const std::vector<Mat>& probes, double tolerance = tol::kSlack);

struct IdentityCase
{
  std::string name;
  TestFunction f;
  MsnParams x;
  MsnParams y;
};

/// Fixed 2 x 2 cases: two linear, two convex quadratic, one tanh composition.
std::vector<IdentityCase> preregistered_identity_cases();

/// a' vec(M' - M) + sqrt(2/pi) a' (d' - d): the exact difference for f = a' vec(X).
double linear_identity_value(const Vec& a, const MultivariateSn& x, const MultivariateSn& y);

}  // namespace msn
