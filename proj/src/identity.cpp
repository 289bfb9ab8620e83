#include "msn/identity.hpp"

#include <cmath>
#include <limits>

#include "msn/special.hpp"

namespace msn
{

namespace
{

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream)
{
  return Rng(seed).split(stream).seed();
}

void require_same_dim(const MultivariateSn& x, const MultivariateSn& y, const char* what)
{
  if (x.dim() != y.dim())
    throw Error(Errc::ShapeMismatch, std::string(what) + ": X and Y have different dimensions");
}

void require_arity(const TestFunction& f, Eigen::Index dim, const char* what)
{
  if (f.n * f.p != dim)
    throw Error(Errc::ShapeMismatch, std::string(what) + ": test function arity does not match the law");
}

void require_finite(double v, const char* what)
{
  if (!std::isfinite(v))
    throw Error(Errc::NonFiniteValue, std::string(what) + ": non-finite function value");
}

// Mean of f over the columns of draws, reusing one n x p buffer.
RunningStats mean_of(const TestFunction& f, const Mat& draws)
{
  RunningStats stats;
  Mat buf(f.n, f.p);
  for (Eigen::Index k = 0; k < draws.cols(); ++k)
  {
    buf = Eigen::Map<const Mat>(draws.col(k).data(), f.n, f.p);
    const double v = f(buf);
    require_finite(v, "lhs_estimate");
    stats.add(v);
  }
  return stats;
}

}  // namespace

MixtureParams mixture(const MultivariateSn& x, const MultivariateSn& y, double lambda)
{
  require_same_dim(x, y, "mixture");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(Errc::InvalidConfig, "mixture: lambda must lie in [0, 1]");

  // Written so that lambda = 0 and lambda = 1 return the endpoints bit for bit.
  auto lerp = [lambda](const auto& a, const auto& b) {
    using T = std::decay_t<decltype(a.eval())>;
    if (lambda == 0.0)
      return T(a);
    if (lambda == 1.0)
      return T(b);
    return T(lambda * b + (1.0 - lambda) * a);
  };

  MixtureParams m;
  m.lambda = lambda;
  m.location = lerp(x.location(), y.location());
  m.scale = lerp(x.scale(), y.scale());
  m.delta = lerp(x.delta(), y.delta());

  if (!is_positive_definite(m.scale))
    throw MixtureError(lambda, "mixture: Omega_lambda is not positive definite at lambda = " +
                                   std::to_string(lambda));
  const Mat residual = m.scale - m.delta * m.delta.transpose();
  if (!is_positive_definite(residual))
    throw MixtureError(lambda, "mixture: Omega_lambda - delta_lambda delta_lambda' is not positive definite "
                               "at lambda = " + std::to_string(lambda));
  try
  {
    (void)m.law();
  }
  catch (const Error& e)
  {
    throw MixtureError(lambda, std::string("mixture: no valid law at lambda = ") + std::to_string(lambda) +
                                   " (" + e.what() + ")");
  }
  return m;
}

RhsResult rhs_estimate(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y, int lambda_nodes,
                       Eigen::Index mc_per_node, std::uint64_t seed, unsigned workers)
{
  require_same_dim(x, y, "rhs_estimate");
  require_arity(f, x.dim(), "rhs_estimate");
  if (lambda_nodes < 1 || mc_per_node < 2)
    throw Error(Errc::InvalidConfig, "rhs_estimate: need lambda_nodes >= 1 and mc_per_node >= 2");

  const Vec d_loc = y.location() - x.location();
  const Mat d_scale = y.scale() - x.scale();
  const Vec d_delta = y.delta() - x.delta();
  const bool has_loc = d_loc.squaredNorm() > 0.0;
  const bool has_scale = d_scale.squaredNorm() > 0.0;
  const bool has_skew = d_delta.squaredNorm() > 0.0;

  const QuadratureRule rule = gauss_legendre_unit(lambda_nodes);
  RhsResult result;
  double value = 0.0;
  double var = 0.0;
  Mat buf(f.n, f.p);

  for (int k = 0; k < lambda_nodes; ++k)
  {
    const double lambda = rule.nodes[k];
    const double w = rule.weights[k];
    const MixtureParams mix = mixture(x, y, lambda);
    const MultivariateSn law = mix.law();

    NodeDiagnostic node;
    node.lambda = lambda;
    node.weight = w;
    const std::uint64_t z_seed = stream_seed(seed, 2 * static_cast<std::uint64_t>(k));
    const std::uint64_t n_seed = stream_seed(seed, 2 * static_cast<std::uint64_t>(k) + 1);

    RunningStats smooth;
    if (has_loc || has_scale)
    {
      const Mat draws = sample_additive(law, mc_per_node, z_seed, workers);
      for (Eigen::Index s = 0; s < draws.cols(); ++s)
      {
        buf = Eigen::Map<const Mat>(draws.col(s).data(), f.n, f.p);
        double term = 0.0;
        if (has_loc)
          term += gradient_or_fd(f, buf).dot(d_loc);
        if (has_scale)
          term += 0.5 * (d_scale.cwiseProduct(hessian_or_fd(f, buf))).sum();
        require_finite(term, "rhs_estimate");
        smooth.add(term);
      }
      node.smooth_term = smooth.estimate(z_seed);
    }
    else
    {
      node.smooth_term.samples = static_cast<std::uint64_t>(mc_per_node);
      node.smooth_term.seed = z_seed;
    }

    RunningStats skew;
    if (has_skew)
    {
      const Mat draws = sample_normal(mix.location, law.residual_root(), mc_per_node, n_seed, workers);
      for (Eigen::Index s = 0; s < draws.cols(); ++s)
      {
        buf = Eigen::Map<const Mat>(draws.col(s).data(), f.n, f.p);
        const double term = kSqrt2OverPi * gradient_or_fd(f, buf).dot(d_delta);
        require_finite(term, "rhs_estimate");
        skew.add(term);
      }
      node.skew_term = skew.estimate(n_seed);
    }
    else
    {
      node.skew_term.samples = static_cast<std::uint64_t>(mc_per_node);
      node.skew_term.seed = n_seed;
    }

    value += w * (node.smooth_term.value + node.skew_term.value);
    var += w * w *
           (node.smooth_term.std_error * node.smooth_term.std_error +
            node.skew_term.std_error * node.skew_term.std_error);
    result.nodes.push_back(node);
  }

  result.estimate.value = value;
  result.estimate.std_error = std::sqrt(var);
  result.estimate.samples = static_cast<std::uint64_t>(lambda_nodes) * static_cast<std::uint64_t>(mc_per_node);
  result.estimate.seed = seed;
  return result;
}

McEstimate lhs_estimate(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y,
                        Eigen::Index samples, std::uint64_t seed, unsigned workers)
{
  require_same_dim(x, y, "lhs_estimate");
  require_arity(f, x.dim(), "lhs_estimate");
  if (samples < 2)
    throw Error(Errc::InvalidConfig, "lhs_estimate: need at least 2 samples");

  const RunningStats fy = mean_of(f, sample_additive(y, samples, stream_seed(seed, 0), workers));
  const RunningStats fx = mean_of(f, sample_additive(x, samples, stream_seed(seed, 1), workers));

  McEstimate out;
  out.value = fy.mean() - fx.mean();
  out.std_error = std::hypot(fy.std_error(), fx.std_error());
  out.samples = static_cast<std::uint64_t>(samples);
  out.seed = seed;
  return out;
}

SignCheckReport sufficient_sign_check(const TestFunction& f, const MultivariateSn& x, const MultivariateSn& y,
                                      const std::vector<Mat>& probes, double tolerance)
{
  require_same_dim(x, y, "sufficient_sign_check");
  require_arity(f, x.dim(), "sufficient_sign_check");

  const Vec d_loc = y.location() - x.location();
  const Mat d_scale = y.scale() - x.scale();
  const Vec d_delta = y.delta() - x.delta();

  SignCheckReport report;
  report.scale.worst_value = report.location.worst_value = report.skew.worst_value =
      std::numeric_limits<double>::infinity();

  auto update = [tolerance](ConditionReport& c, double v, const Mat& point) {
    if (v < c.worst_value)
    {
      c.worst_value = v;
      c.worst_point = point;
    }
    if (v < -tolerance)
      c.satisfied_at_all_probes = false;
  };

  for (const Mat& probe : probes)
  {
    const Vec g = gradient_or_fd(f, probe);
    const Mat h = hessian_or_fd(f, probe);
    update(report.scale, d_scale.cwiseProduct(h).sum(), probe);
    update(report.location, g.dot(d_loc), probe);
    update(report.skew, g.dot(d_delta), probe);
  }
  if (probes.empty())
    report.scale.worst_value = report.location.worst_value = report.skew.worst_value = 0.0;
  return report;
}

double linear_identity_value(const Vec& a, const MultivariateSn& x, const MultivariateSn& y)
{
  require_same_dim(x, y, "linear_identity_value");
  if (a.size() != x.dim())
    throw Error(Errc::ShapeMismatch, "linear_identity_value: coefficient length must match the law");
  return a.dot(y.location() - x.location()) + kSqrt2OverPi * a.dot(y.delta() - x.delta());
}

std::vector<IdentityCase> preregistered_identity_cases()
{
  Mat v(2, 2), v2(2, 2), s(2, 2), s2(2, 2);
  v << 1.0, 0.3, 0.3, 1.5;
  v2 << 1.2, 0.4, 0.4, 1.6;
  s << 1.0, -0.2, -0.2, 0.8;
  s2 << 1.1, -0.1, -0.1, 0.9;

  Mat m0 = Mat::Zero(2, 2);
  Mat m1(2, 2);
  m1 << 0.5, -0.3, 0.2, 0.4;
  Mat b0(2, 2), b1(2, 2), b2(2, 2);
  b0 << 0.5, -0.4, 1.0, 0.2;
  b1 << 1.5, 0.3, 0.8, 0.6;
  b2 << -1.0, 2.0, 0.0, -0.5;

  Mat a(2, 2);
  a << 1.0, -0.5, 0.7, 2.0;
  Mat a2(2, 2);
  a2 << 0.3, 0.8, 1.2, 0.1;

  Mat q(4, 4);
  q << 1.0, 0.2, 0.0, 0.1,  //
      0.2, 0.8, 0.1, 0.0,   //
      0.0, 0.1, 0.6, -0.2,  //
      0.1, 0.0, -0.2, 1.2;
  Vec qb(4);
  qb << 0.5, -0.3, 0.0, 0.2;
  Vec ta(4);
  ta << 0.6, -0.4, 0.9, 0.3;

  std::vector<IdentityCase> cases;
  cases.push_back({"linear-location-skew", linear_function(a), MsnParams::build(m0, v, s, b0),
                   MsnParams::build(m1, v, s, b1)});
  cases.push_back({"linear-all", linear_function(a2), MsnParams::build(m0, v, s, b0),
                   MsnParams::build(m1, v2, s2, b2)});
  cases.push_back({"quadratic-scale", quadratic_function(2, 2, Mat::Identity(4, 4), Vec::Zero(4)),
                   MsnParams::build(m0, v, s, b0), MsnParams::build(m0, v2, s2, b0)});
  cases.push_back({"quadratic-all", quadratic_function(2, 2, q, qb, 0.25), MsnParams::build(m0, v, s, b0),
                   MsnParams::build(m1, v2, s2, b1)});
  cases.push_back({"tanh-composition", tanh_function(2, 2, ta, 2.0, 0.1), MsnParams::build(m0, v, s, b2),
                   MsnParams::build(m1, v2, s2, b1)});
  return cases;
}

}  // namespace msn
