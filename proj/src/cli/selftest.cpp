// Invariant battery behind `msn selftest`. Draw counts are reduced relative to
// the acceptance suite; statistical checks use a 4 sigma band accordingly.

#include <functional>
#include <ostream>

#include "commands.hpp"
#include "msn/families.hpp"
#include "msn/identity.hpp"
#include "msn/orders.hpp"
#include "msn/special.hpp"

namespace msn::cli
{

namespace
{

struct CheckResult
{
  bool passed = true;
  std::string detail;
};

struct Sizes
{
  Eigen::Index draws;
  int copositive_matrices;
  int grid_resolution;
  int lambda_nodes;
  Eigen::Index mc_per_node;
};

std::complex<double> matrix_normal_cf(const MsnParams& q, const Mat& t)
{
  const double re = -0.5 * (t.transpose() * q.Sigma().matrix() * t * q.V().matrix()).trace();
  const double im = (q.M().transpose() * t).trace();
  return std::exp(std::complex<double>(re, im));
}

CheckResult cf_checks(std::uint64_t seed)
{
  Rng rng(seed);
  double worst = 0.0;
  for (Eigen::Index d = 1; d <= 3; ++d)
  {
    const MsnParams skewed = random_params(d, d, rng);
    if (cf(skewed, Mat::Zero(d, d)) != std::complex<double>(1.0, 0.0))
      return {false, "Psi(0) != 1 at n = p = " + std::to_string(d)};
    const MsnParams base = random_params(d, d, rng, 0.0);
    for (int k = 0; k < 10; ++k)
    {
      Mat t(d, d);
      for (Eigen::Index e = 0; e < t.size(); ++e)
        t(e) = rng.normal();
      worst = std::max(worst, std::abs(cf(base, t) - matrix_normal_cf(base, t)));
    }
  }
  return {worst < 1e-12, "max |Psi - matrix normal CF| = " + format_double(worst)};
}

CheckResult vec_equivalence(std::uint64_t seed)
{
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s)
  {
    const MsnParams q = random_params(2, 3, rng, 2.0);
    const MultivariateSn& mv = q.multivariate();
    for (int k = 0; k < 10; ++k)
    {
      Mat y(2, 3);
      for (Eigen::Index e = 0; e < y.size(); ++e)
        y(e) = q.M()(e) + rng.normal();
      const double a = density(q, y);
      const double b = mv.density(vec(y));
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
    }
  }
  return {worst < 1e-12, "max relative density error = " + format_double(worst)};
}

CheckResult moments(std::uint64_t seed, Eigen::Index draws)
{
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < 2; ++s)
  {
    const MsnParams q = random_params(2, 2, rng, s == 0 ? 0.0 : 3.0);
    const SampleBatch b = sample_additive(q, draws, rng());
    const Vec m = vec(mean(q));
    const Mat c = covariance(q);
    const Vec emp = b.draws.rowwise().mean();
    for (Eigen::Index k = 0; k < m.size(); ++k)
      worst = std::max(worst, std::abs(emp(k) - m(k)) / std::sqrt(c(k, k) / static_cast<double>(draws)));
  }
  return {worst < 4.0, "max |z| of the mean = " + format_double(worst)};
}

CheckResult sampler_ks(std::uint64_t seed, Eigen::Index draws)
{
  Rng rng(seed);
  double min_p = 1.0;
  double worst_acc = 0.0;
  for (int s = 0; s < 2; ++s)
  {
    const MsnParams q = random_params(2, 2, rng, 1.5);
    const SampleBatch a = sample_additive(q, draws, rng());
    const SampleBatch r = sample_rejection(q, draws, rng());
    const double acc = r.acceptance_rate;
    const double nprop = static_cast<double>(r.proposals);
    worst_acc = std::max(worst_acc, std::abs(acc - 0.5) / std::sqrt(0.25 / nprop));
    for (int k = 0; k < 2; ++k)
    {
      Vec w(q.dim());
      rng.fill_normal(w);
      const Vec pa = a.draws.transpose() * w;
      const Vec pr = r.draws.transpose() * w;
      const KsResult ks = ks_two_sample({pa.data(), pa.data() + pa.size()}, {pr.data(), pr.data() + pr.size()});
      min_p = std::min(min_p, ks.p_value);
    }
  }
  return {min_p > 0.001 && worst_acc < 4.0,
          "min KS p = " + format_double(min_p) + ", acceptance |z| = " + format_double(worst_acc)};
}

CheckResult copositivity(std::uint64_t seed, int matrices, int resolution)
{
  Rng rng(seed);
  int compared = 0, disagreements = 0, psd_violations = 0;
  for (int k = 0; k < matrices; ++k)
  {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 2);
    Mat a(d, d);
    for (Eigen::Index e = 0; e < a.size(); ++e)
      a(e) = rng.normal();
    a = 0.5 * (a + a.transpose()).eval();
    const CopositivityVerdict v = is_copositive(a);
    const double grid = simplex_grid_min(a, resolution);
    if (is_psd(a).psd && v.status != CopositivityStatus::Copositive)
      ++psd_violations;
    if (std::abs(grid) <= 1e-2)
      continue;
    ++compared;
    if ((grid > 0.0) != (v.status == CopositivityStatus::Copositive))
      ++disagreements;
  }
  return {disagreements == 0 && psd_violations == 0,
          std::to_string(disagreements) + " disagreements in " + std::to_string(compared) + " decided cases, " +
              std::to_string(psd_violations) + " PSD matrices rejected"};
}

CheckResult derivatives(std::uint64_t seed)
{
  Mat q(4, 4);
  q << 2.0, 0.3, 0.0, 0.1, 0.3, 1.0, 0.2, 0.0, 0.0, 0.2, 1.5, -0.4, 0.1, 0.0, -0.4, 0.7;
  Vec a(4);
  a << 0.5, -1.0, 0.3, 0.8;
  Eigen::MatrixXi e1(2, 2), e2(2, 2);
  e1 << 3, 0, 1, 0;
  e2 << 0, 1, 1, 1;
  const std::vector<TestFunction> fs = {
      linear_function(Mat::Constant(2, 2, 0.5)),
      trace_function(2, 2),
      frobenius_sq_function(2, 2),
      quadratic_function(2, 2, q, a, 1.0),
      tanh_function(2, 2, a, 2.0, 0.1),
      product_function(2, 2, 0, 0, 1, 1, 1.5),
      polynomial_function(2, 2, {{0.7, e1}, {-1.2, e2}}),
  };
  for (const auto& f : fs)
  {
    const DerivativeCheck c = check_derivatives(f, seed);
    if (!c.passed)
      return {false, f.name + ": gradient error " + format_double(c.worst_gradient_error) + ", Hessian error " +
                         format_double(c.worst_hessian_error)};
  }
  return {true, std::to_string(fs.size()) + " built-in functions"};
}

CheckResult identity_triples(std::uint64_t seed, int nodes, Eigen::Index mc)
{
  double worst = 0.0;
  std::string name;
  for (const auto& c : preregistered_identity_cases())
  {
    const auto& x = c.x.multivariate();
    const auto& y = c.y.multivariate();
    const RhsResult rhs = rhs_estimate(c.f, x, y, nodes, mc, Rng(seed).split(1).seed());
    const McEstimate lhs = lhs_estimate(c.f, x, y, 4 * mc, Rng(seed).split(2).seed());
    const double z = std::abs(difference_z(lhs, rhs.estimate));
    if (z > worst)
    {
      worst = z;
      name = c.name;
    }
  }
  return {worst <= 4.0, "max |lhs - rhs| / sigma = " + format_double(worst) + " (" + name + ")"};
}

CheckResult order_chain(std::uint64_t seed, Eigen::Index draws)
{
  Mat v(2, 2), s(2, 2), m(2, 2), b(2, 2);
  v << 1.0, 0.4, 0.4, 1.3;
  s << 1.2, -0.3, -0.3, 0.9;
  m << 0.1, -0.2, 0.3, 0.0;
  b << 0.8, -0.5, 0.2, 1.1;
  const MsnParams x = MsnParams::build(m, v, s, b);
  const MsnParams y = MsnParams::build(m + Mat::Constant(2, 2, 0.3), 2.0 * v, 0.5 * s, b);
  const OrderVerdict st = check_st(x, y);
  if (st.status != VerdictStatus::HoldsProven)
    return {false, std::string("constructed st pair not HoldsProven: ") + to_string(st.status)};
  int worst = 0;
  for (FamilyKind k : {FamilyKind::IncreasingLinear, FamilyKind::UpperOrthantIndicators, FamilyKind::IncreasingConvex})
  {
    const EvidenceReport r = mc_order_evidence(x, y, make_family(k, 2, 2, seed), draws, seed);
    worst += r.below_5sigma;
  }
  return {worst == 0, std::to_string(worst) + " estimates below -5 sigma"};
}

CheckResult family_classes(std::uint64_t seed)
{
  const std::vector<Mat> grid = probe_grid(2, 2, 3, -1.5, 1.5);
  for (FamilyKind k : {FamilyKind::IncreasingLinear, FamilyKind::ConvexQuadratic, FamilyKind::IncreasingConvex,
                       FamilyKind::SupermodularPairProducts, FamilyKind::DcxPairProducts,
                       FamilyKind::UpperOrthantIndicators, FamilyKind::DeltaMonotoneBoxes})
  {
    const FunctionFamily fam = make_family(k, 2, 2, seed);
    for (const auto& f : fam.generators)
      for (FunctionClass c : {FunctionClass::Increasing, FunctionClass::Convex, FunctionClass::Supermodular,
                              FunctionClass::DirectionallyConvex, FunctionClass::DeltaMonotone})
        if (required_classes(k) & tag(c))
        {
          const MembershipResult r = class_membership_test(f, c, grid);
          if (!r.passed)
            return {false, f.name + " fails " + r.detail};
        }
  }
  return {true, "all generators pass on a 3^4 grid"};
}

}  // namespace

CommandOutput cmd_selftest(RunConfig& cfg, std::ostream& progress)
{
  const Sizes sz = cfg.quick ? Sizes{20000, 60, 60, 8, 10000} : Sizes{100000, 200, 120, 16, 50000};
  const std::uint64_t seed = cfg.resolved_seed();
  const Rng master(seed);
  auto sub = [&](std::uint64_t k) { return master.split(k).seed(); };

  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"cf_normalization_degeneracy", [&] { return cf_checks(sub(1)); }},
      {"vec_equivalence", [&] { return vec_equivalence(sub(2)); }},
      {"moments", [&] { return moments(sub(3), sz.draws); }},
      {"sampler_cross_ks", [&] { return sampler_ks(sub(4), sz.draws); }},
      {"copositivity_oracle", [&] { return copositivity(sub(5), sz.copositive_matrices, sz.grid_resolution); }},
      {"derivative_checks", [&] { return derivatives(sub(6)); }},
      {"identity_triples", [&] { return identity_triples(sub(7), sz.lambda_nodes, sz.mc_per_node); }},
      {"order_implication_chain", [&] { return order_chain(sub(8), sz.draws); }},
      {"family_class_membership", [&] { return family_classes(sub(9)); }},
  };

  CommandOutput out;
  json results = json::array();
  bool all = true;
  for (const auto& [name, fn] : checks)
  {
    CheckResult r;
    try
    {
      r = fn();
    }
    catch (const std::exception& e)
    {
      r = {false, std::string("threw: ") + e.what()};
    }
    progress << (r.passed ? "PASS " : "FAIL ") << name << ": " << r.detail << "\n";
    results.push_back({{"name", name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  out.report = report_header(cfg);
  out.report["quick"] = cfg.quick;
  out.report["checks"] = std::move(results);
  out.report["passed"] = all;
  out.exit_code = all ? 0 : 1;
  return out;
}

}  // namespace msn::cli
