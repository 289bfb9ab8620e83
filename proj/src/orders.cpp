#include "msn/orders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "msn/special.hpp"

namespace msn
{

const char* to_string(OrderKind kind)
{
  switch (kind)
  {
    case OrderKind::St: return "st";
    case OrderKind::Cx: return "cx";
    case OrderKind::Icx: return "icx";
    case OrderKind::Uo: return "uo";
    case OrderKind::Sm: return "sm";
    case OrderKind::Dcx: return "dcx";
  }
  return "unknown";
}

const char* to_string(VerdictStatus status)
{
  switch (status)
  {
    case VerdictStatus::HoldsProven: return "HoldsProven";
    case VerdictStatus::FailsProven: return "FailsProven";
    case VerdictStatus::SufficientHolds: return "SufficientHolds";
    case VerdictStatus::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

const char* to_string(WitnessKind kind)
{
  switch (kind)
  {
    case WitnessKind::IndexPair: return "IndexPair";
    case WitnessKind::Direction: return "Direction";
    case WitnessKind::SimplexPoint: return "SimplexPoint";
    case WitnessKind::ParamInequality: return "ParamInequality";
  }
  return "unknown";
}

OrderKind parse_order(const std::string& name)
{
  for (OrderKind k : {OrderKind::St, OrderKind::Cx, OrderKind::Icx, OrderKind::Uo, OrderKind::Sm, OrderKind::Dcx})
    if (name == to_string(k))
      return k;
  throw Error(Errc::InvalidConfig, "unknown order '" + name + "' (expected st, cx, icx, uo, sm or dcx)");
}

json witness_to_json(const Witness& w)
{
  json j;
  j["kind"] = to_string(w.kind);
  j["quantity"] = w.quantity;
  j["indices"] = w.indices;
  if (w.direction.size() > 0)
    j["direction"] = std::vector<double>(w.direction.data(), w.direction.data() + w.direction.size());
  if (w.quantity == "stop_loss")
    j["threshold"] = w.threshold;
  j["x_value"] = w.x_value;
  j["y_value"] = w.y_value;
  return j;
}

double sn_stop_loss(const UnivariateSnParams& u, double t)
{
  const double r2 = u.sigma_sq - u.delta * u.delta;
  const double r = r2 > 0.0 ? std::sqrt(r2) : 0.0;
  auto integrand = [&](double h) {
    const double m = u.mu + u.delta * h - t;
    const double inner = r > 0.0 ? r * normal_pdf(m / r) + m * normal_cdf(m / r) : std::max(m, 0.0);
    return 2.0 * normal_pdf(h) * inner;
  };
  // The half-normal weight is below 1e-31 past h = 12.
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 12.0, 15, 1e-13);
}

UnivariateSnParams projection(const MultivariateSn& mv, const Vec& w)
{
  if (w.size() != mv.dim())
    throw Error(Errc::ShapeMismatch, "projection: direction length must match the law");
  return {w.dot(mv.location()), w.dot(mv.scale() * w), w.dot(mv.delta())};
}

namespace
{

Eigen::Index at(const Witness& w, std::size_t k, Eigen::Index bound)
{
  if (w.indices.size() <= k || w.indices[k] < 0 || w.indices[k] >= bound)
    throw Error(Errc::IndexOutOfRange, "witness index outside the parameter range");
  return w.indices[k];
}

}  // namespace

double witness_violation(const Witness& w, const MultivariateSn& x, const MultivariateSn& y)
{
  if (x.dim() != y.dim())
    throw Error(Errc::ShapeMismatch, "witness_violation: X and Y have different dimensions");
  const Eigen::Index d = x.dim();
  const std::string& q = w.quantity;

  if (q == "location_leq" || q == "location_eq" || q == "delta_leq" || q == "delta_eq" || q == "mean_leq" ||
      q == "mean_eq")
  {
    const Eigen::Index a = at(w, 0, d);
    double xv, yv;
    if (q.rfind("location", 0) == 0)
    {
      xv = x.location()(a);
      yv = y.location()(a);
    }
    else if (q.rfind("delta", 0) == 0)
    {
      xv = x.delta()(a);
      yv = y.delta()(a);
    }
    else
    {
      xv = x.location()(a) + kSqrt2OverPi * x.delta()(a);
      yv = y.location()(a) + kSqrt2OverPi * y.delta()(a);
    }
    return q.ends_with("_eq") ? std::abs(xv - yv) : xv - yv;
  }
  if (q == "scale_eq" || q == "scale_leq" || q == "corr_leq")
  {
    const Eigen::Index a = at(w, 0, d), b = at(w, 1, d);
    const Mat& cx = q == "corr_leq" ? x.correlation() : x.scale();
    const Mat& cy = q == "corr_leq" ? y.correlation() : y.scale();
    return q == "scale_eq" ? std::abs(cx(a, b) - cy(a, b)) : cx(a, b) - cy(a, b);
  }
  if (q == "scale_diag_eq")
  {
    const Eigen::Index a = at(w, 0, d);
    return std::abs(x.scale()(a, a) - y.scale()(a, a));
  }
  if (q == "marginal_eq")
  {
    const Eigen::Index a = at(w, 0, d);
    return std::max({std::abs(x.location()(a) - y.location()(a)), std::abs(x.scale()(a, a) - y.scale()(a, a)),
                     std::abs(x.delta()(a) - y.delta()(a))});
  }
  if (q == "corr_diff_psd" || q == "corr_diff_copositive")
  {
    if (w.direction.size() != d || w.direction.squaredNorm() == 0.0)
      throw Error(Errc::ShapeMismatch, "witness direction has the wrong length");
    if (q == "corr_diff_copositive" && (w.direction.array() < 0.0).any())
      return -std::numeric_limits<double>::infinity();
    const Mat diff = y.correlation() - x.correlation();
    return -w.direction.dot(diff * w.direction) / w.direction.squaredNorm();
  }
  if (q == "stop_loss")
  {
    if (w.direction.size() != d || (w.direction.array() < 0.0).any())
      return -std::numeric_limits<double>::infinity();
    return sn_stop_loss(projection(x, w.direction), w.threshold) -
           sn_stop_loss(projection(y, w.direction), w.threshold);
  }
  throw Error(Errc::InvalidConfig, "unknown witness quantity '" + q + "'");
}

bool reverify_witness(const Witness& w, const MultivariateSn& x, const MultivariateSn& y, double tolerance)
{
  return witness_violation(w, x, y) > tolerance;
}

json verdict_to_json(const OrderVerdict& v)
{
  json j;
  j["order"] = to_string(v.kind);
  j["status"] = to_string(v.status);
  j["certificate"] = v.certificate;
  j["notes"] = v.notes;
  j["witness"] = v.witness ? witness_to_json(*v.witness) : json(nullptr);
  return j;
}

namespace
{

void require_same_shape(const MsnParams& x, const MsnParams& y)
{
  if (x.n() != y.n() || x.p() != y.p())
    throw Error(Errc::ShapeMismatch, "orders: X is " + std::to_string(x.n()) + "x" + std::to_string(x.p()) +
                                         " but Y is " + std::to_string(y.n()) + "x" + std::to_string(y.p()));
}

// Collects named conditions into the certificate.
class Conditions
{
public:
  explicit Conditions(OrderVerdict& v) : v_(v) { v_.certificate["conditions"] = json::object(); }

  // gap <= tol means the condition holds; the first failing one keeps its witness.
  bool add(const std::string& name, double gap, double tol, std::optional<Witness> witness = std::nullopt)
  {
    const bool holds = gap <= tol;
    v_.certificate["conditions"][name] = {{"holds", holds}, {"gap", gap}};
    if (!holds && !first_)
      first_ = std::move(witness);
    return holds;
  }

  void add_flag(const std::string& name, bool holds, std::optional<Witness> witness = std::nullopt)
  {
    v_.certificate["conditions"][name] = {{"holds", holds}};
    if (!holds && !first_)
      first_ = std::move(witness);
  }

  std::optional<Witness>& first() { return first_; }

private:
  OrderVerdict& v_;
  std::optional<Witness> first_;
};

struct Gap
{
  double value = -std::numeric_limits<double>::infinity();
  Witness witness;
};

// max_a (x_a - y_a), or max |x_a - y_a| when `equality`.
Gap vector_gap(const std::string& quantity, const Vec& x, const Vec& y, bool equality)
{
  Gap g;
  g.witness.kind = WitnessKind::ParamInequality;
  g.witness.quantity = quantity;
  for (Eigen::Index a = 0; a < x.size(); ++a)
  {
    const double v = equality ? std::abs(x(a) - y(a)) : x(a) - y(a);
    if (v > g.value)
    {
      g.value = v;
      g.witness.indices = {a};
      g.witness.x_value = x(a);
      g.witness.y_value = y(a);
    }
  }
  if (x.size() == 0)
    g.value = 0.0;
  return g;
}

Gap matrix_gap(const std::string& quantity, const Mat& x, const Mat& y, bool equality, bool off_diagonal)
{
  Gap g;
  g.witness.kind = WitnessKind::IndexPair;
  g.witness.quantity = quantity;
  g.value = off_diagonal && x.rows() < 2 ? 0.0 : -std::numeric_limits<double>::infinity();
  for (Eigen::Index b = 0; b < x.cols(); ++b)
    for (Eigen::Index a = 0; a < x.rows(); ++a)
    {
      if (off_diagonal && a == b)
        continue;
      const double v = equality ? std::abs(x(a, b) - y(a, b)) : x(a, b) - y(a, b);
      if (v > g.value)
      {
        g.value = v;
        g.witness.indices = {a, b};
        g.witness.x_value = x(a, b);
        g.witness.y_value = y(a, b);
      }
    }
  return g;
}

Vec mean_vec(const MultivariateSn& mv)
{
  return mv.location() + kSqrt2OverPi * mv.delta();
}

double scale_tolerance(const Mat& a, const Mat& b)
{
  return kOrderTolerance * std::max({1.0, max_abs(a), max_abs(b)});
}

OrderVerdict start(OrderKind kind, const MsnParams& x, const MsnParams& y)
{
  require_same_shape(x, y);
  OrderVerdict v;
  v.kind = kind;
  v.certificate["regime"] = standardized(x, y) ? "standardized" : "general";
  v.certificate["tolerance"] = kOrderTolerance;
  return v;
}

bool identical(OrderVerdict& v, const MsnParams& x, const MsnParams& y)
{
  if (!same_law(x, y))
    return false;
  v.status = VerdictStatus::HoldsProven;
  v.certificate["identical_laws"] = true;
  v.notes = "X and Y have the same law; every order is reflexive.";
  return true;
}

void fail(OrderVerdict& v, Conditions& c)
{
  v.status = VerdictStatus::FailsProven;
  v.witness = c.first();
}

// Largest E(w'X - t)+ - E(w'Y - t)+ over a threshold grid, for w >= 0.
std::optional<Witness> stop_loss_witness(const MultivariateSn& x, const MultivariateSn& y, const Vec& w)
{
  if ((w.array() < 0.0).any() || w.squaredNorm() == 0.0)
    return std::nullopt;
  const UnivariateSnParams u = projection(x, w);
  const UnivariateSnParams s = projection(y, w);
  const double spread = std::sqrt(std::max(u.sigma_sq, s.sigma_sq));
  const double lo = std::min(u.mu, s.mu) - 6.0 * spread;
  const double hi = std::max(u.mu, s.mu) + 8.0 * spread;
  constexpr int kSteps = 280;
  Witness best;
  double best_gap = 0.0;
  for (int k = 0; k <= kSteps; ++k)
  {
    const double t = lo + (hi - lo) * k / kSteps;
    const double ex = sn_stop_loss(u, t);
    const double ey = sn_stop_loss(s, t);
    if (ex - ey > best_gap)
    {
      best_gap = ex - ey;
      best.kind = WitnessKind::SimplexPoint;
      best.quantity = "stop_loss";
      best.direction = w;
      best.threshold = t;
      best.x_value = ex;
      best.y_value = ey;
    }
  }
  if (best_gap > 10.0 * kOrderTolerance)
    return best;
  return std::nullopt;
}

// Directions tried for a certified increasing-convex violation.
std::optional<Witness> search_stop_loss(const MultivariateSn& x, const MultivariateSn& y, const Mat& scale_diff)
{
  const Eigen::Index d = x.dim();
  std::vector<Vec> dirs;
  if (d <= kMaxCopositiveDim)
  {
    const CopositivityVerdict cop = is_copositive(scale_diff);
    if (cop.witness)
      dirs.push_back(*cop.witness);
  }
  dirs.push_back(Vec::Constant(d, 1.0 / static_cast<double>(d)));
  for (Eigen::Index k = 0; k < d; ++k)
    dirs.push_back(Vec::Unit(d, k));
  for (const Vec& w : dirs)
    if (auto wit = stop_loss_witness(x, y, w))
      return wit;
  return std::nullopt;
}

}  // namespace

bool standardized(const MsnParams& x, const MsnParams& y)
{
  auto one = [](const MsnParams& q) {
    return q.M().cwiseAbs().maxCoeff() <= kOrderTolerance &&
           (q.omega().diagonal().array() - 1.0).abs().maxCoeff() <= kOrderTolerance;
  };
  return one(x) && one(y);
}

bool same_law(const MsnParams& x, const MsnParams& y, double tolerance)
{
  if (x.n() != y.n() || x.p() != y.p())
    return false;
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  return (a.location() - b.location()).cwiseAbs().maxCoeff() <= tolerance &&
         (a.delta() - b.delta()).cwiseAbs().maxCoeff() <= tolerance &&
         (a.scale() - b.scale()).cwiseAbs().maxCoeff() <= tolerance * std::max(1.0, max_abs(a.scale()));
}

OrderVerdict check_st(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::St, x, y);
  const auto factor = kron_equal_up_to_scale(x.V(), x.Sigma(), y.V(), y.Sigma(), kOrderTolerance);
  v.certificate["kronecker_factor"] = factor ? json(*factor) : json(nullptr);
  if (identical(v, x, y))
    return v;

  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);
  const Gap loc = vector_gap("location_leq", a.location(), b.location(), false);
  const Gap del = vector_gap("delta_leq", a.delta(), b.delta(), false);
  const Gap scl = matrix_gap("scale_eq", a.scale(), b.scale(), true, false);
  bool ok = c.add("M <= M'", loc.value, kOrderTolerance, loc.witness);
  ok = c.add("delta <= delta'", del.value, kOrderTolerance, del.witness) && ok;
  ok = c.add("Omega == Omega'", scl.value, scale_tolerance(a.scale(), b.scale()), scl.witness) && ok;
  if (ok)
  {
    v.status = VerdictStatus::HoldsProven;
    v.notes = "Location and skew are ordered and the scale matrices coincide.";
  }
  else
  {
    fail(v, c);
    v.notes = "A necessary condition for the usual stochastic order fails.";
  }
  return v;
}

OrderVerdict check_cx(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::Cx, x, y);
  if (identical(v, x, y))
    return v;
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);

  if (standardized(x, y))
  {
    const Gap del = vector_gap("delta_eq", a.delta(), b.delta(), true);
    const bool delta_ok = c.add("delta == delta'", del.value, kOrderTolerance, del.witness);
    const PsdResult psd = is_psd(b.correlation() - a.correlation(), kOrderTolerance);
    std::optional<Witness> dir;
    if (psd.witness)
      dir = Witness{WitnessKind::Direction, "corr_diff_psd", {}, *psd.witness, 0.0, 0.0, psd.min_eigenvalue};
    c.add("corr' - corr PSD", -psd.min_eigenvalue, kOrderTolerance * std::max(1.0, max_abs(b.correlation())),
          dir);
    if (delta_ok && psd.psd)
    {
      v.status = VerdictStatus::HoldsProven;
      v.notes = "Standardized pair: equal skew and a PSD increase of the correlation matrix.";
    }
    else
    {
      fail(v, c);
      v.notes = "Standardized pair: equal skew and a PSD correlation increase are both necessary.";
    }
    return v;
  }

  const Gap mean = vector_gap("mean_eq", mean_vec(a), mean_vec(b), true);
  if (!c.add("E X == E Y", mean.value, kOrderTolerance, mean.witness))
  {
    fail(v, c);
    v.notes = "The means differ, which rules out the convex order.";
    return v;
  }
  const Gap loc = vector_gap("location_eq", a.location(), b.location(), true);
  const Gap del = vector_gap("delta_eq", a.delta(), b.delta(), true);
  bool ok = c.add("M == M'", loc.value, kOrderTolerance);
  ok = c.add("delta == delta'", del.value, kOrderTolerance) && ok;
  const PsdResult psd = is_psd(b.scale() - a.scale(), kOrderTolerance);
  c.add_flag("Omega' - Omega PSD", psd.psd);
  ok = ok && psd.psd;
  v.status = ok ? VerdictStatus::SufficientHolds : VerdictStatus::Inconclusive;
  v.notes = ok ? "Equal location and skew with a PSD scale increase suffice for the convex order."
               : "Means agree but the sufficient conditions fail; no decision outside the standardized regime.";
  return v;
}

OrderVerdict check_icx(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::Icx, x, y);
  if (identical(v, x, y))
    return v;
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);

  if (standardized(x, y))
  {
    const Gap del = vector_gap("delta_leq", a.delta(), b.delta(), false);
    if (!c.add("delta <= delta'", del.value, kOrderTolerance, del.witness))
    {
      fail(v, c);
      v.notes = "Standardized pair: delta <= delta' is necessary (it orders the means).";
      return v;
    }
    const Mat diff = b.correlation() - a.correlation();
    const PsdResult psd = is_psd(diff, kOrderTolerance);
    c.add_flag("corr' - corr PSD", psd.psd);
    if (psd.psd)
    {
      v.status = VerdictStatus::HoldsProven;
      v.notes = "Standardized pair: delta <= delta' and a PSD correlation increase.";
      return v;
    }
    if (diff.rows() > kMaxCopositiveDim)
    {
      v.notes = "Copositivity is not decided past dimension 16.";
      return v;
    }
    const CopositivityVerdict cop = is_copositive(diff, kOrderTolerance);
    c.add("corr' - corr copositive", -cop.min_value, kOrderTolerance);
    v.certificate["copositive_min_value"] = cop.min_value;
    v.certificate["copositive_minimizer"] =
        std::vector<double>(cop.minimizer.data(), cop.minimizer.data() + cop.minimizer.size());
    if (cop.status == CopositivityStatus::Copositive)
    {
      v.notes = "Copositive but not PSD correlation increase. The stated if-and-only-if would give "
                "HoldsProven, but its sufficiency part does not hold in general: raising a correlation "
                "lowers E max(x_a, x_b), an increasing convex function. Left undecided.";
      return v;
    }
    if (auto wit = stop_loss_witness(a, b, *cop.witness))
    {
      v.status = VerdictStatus::FailsProven;
      v.witness = wit;
      v.notes = "Correlation increase is not copositive; a nonnegative direction w has a strictly larger "
                "stop-loss transform E(w'X - t)+ than E(w'Y - t)+.";
      return v;
    }
    v.notes = "Correlation increase is not copositive, but no certified stop-loss violation was found "
              "along the simplex witness.";
    return v;
  }

  const Gap mean = vector_gap("mean_leq", mean_vec(a), mean_vec(b), false);
  if (!c.add("E X <= E Y", mean.value, kOrderTolerance, mean.witness))
  {
    fail(v, c);
    v.notes = "A component mean decreases, which rules out the increasing convex order.";
    return v;
  }
  const Gap loc = vector_gap("location_leq", a.location(), b.location(), false);
  const Gap del = vector_gap("delta_leq", a.delta(), b.delta(), false);
  bool ok = c.add("M <= M'", loc.value, kOrderTolerance);
  ok = c.add("delta <= delta'", del.value, kOrderTolerance) && ok;
  const Mat diff = b.scale() - a.scale();
  const PsdResult psd = is_psd(diff, kOrderTolerance);
  c.add_flag("Omega' - Omega PSD", psd.psd);
  if (ok && psd.psd)
  {
    v.status = VerdictStatus::SufficientHolds;
    v.notes = "M <= M', delta <= delta' and a PSD scale increase suffice for the increasing convex order.";
    return v;
  }
  if (auto wit = search_stop_loss(a, b, diff))
  {
    v.status = VerdictStatus::FailsProven;
    v.witness = wit;
    v.notes = "A nonnegative projection has a strictly larger stop-loss transform under X than under Y.";
    return v;
  }
  v.notes = "Sufficient conditions fail and no certified violation was found.";
  return v;
}

OrderVerdict check_uo(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::Uo, x, y);
  if (identical(v, x, y))
    return v;
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);

  const Gap loc = vector_gap("location_leq", a.location(), b.location(), false);
  const Gap del = vector_gap("delta_leq", a.delta(), b.delta(), false);
  const Gap diag = vector_gap("scale_diag_eq", a.scale().diagonal(), b.scale().diagonal(), true);
  bool necessary = c.add("M <= M'", loc.value, kOrderTolerance, loc.witness);
  necessary = c.add("delta <= delta'", del.value, kOrderTolerance, del.witness) && necessary;
  necessary = c.add("diag Omega == diag Omega'", diag.value, scale_tolerance(a.scale(), b.scale()), diag.witness) &&
              necessary;
  const std::string corrected =
      " The sufficient condition used here needs M == M' in addition to delta <= delta', equal diagonals and "
      "elementwise larger off-diagonal scale entries.";
  if (!necessary)
  {
    fail(v, c);
    v.notes = "Each entry must be ordered in the usual stochastic order, which needs m_ij <= m'_ij, "
              "equal variances and delta_ij <= delta'_ij." + corrected;
    return v;
  }
  const Gap loc_eq = vector_gap("location_eq", a.location(), b.location(), true);
  const Gap off = matrix_gap("scale_leq", a.scale(), b.scale(), false, true);
  bool sufficient = c.add("M == M'", loc_eq.value, kOrderTolerance);
  sufficient = c.add("offdiag Omega <= Omega'", off.value, scale_tolerance(a.scale(), b.scale())) && sufficient;
  v.status = sufficient ? VerdictStatus::SufficientHolds : VerdictStatus::Inconclusive;
  v.notes = (sufficient ? std::string("Slepian branch: equal locations and diagonals with larger off-diagonal "
                                      "scale entries.")
                        : std::string("Necessary conditions hold but the sufficient branch does not apply.")) +
            corrected;
  return v;
}

OrderVerdict check_sm(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::Sm, x, y);
  if (identical(v, x, y))
    return v;
  if (!standardized(x, y))
  {
    v.notes = "The supermodular decider covers standardized pairs only (zero location, unit-diagonal scale).";
    return v;
  }
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);

  Gap marg;
  marg.witness.kind = WitnessKind::ParamInequality;
  marg.witness.quantity = "marginal_eq";
  for (Eigen::Index i = 0; i < x.n(); ++i)
    for (Eigen::Index j = 0; j < x.p(); ++j)
    {
      const UnivariateSnParams ux = univariate_marginal(x, i, j);
      const UnivariateSnParams uy = univariate_marginal(y, i, j);
      const double g = std::max({std::abs(ux.mu - uy.mu), std::abs(ux.sigma_sq - uy.sigma_sq),
                                 std::abs(ux.delta - uy.delta)});
      if (g > marg.value)
      {
        marg.value = g;
        marg.witness.indices = {i + x.n() * j};
        marg.witness.x_value = ux.delta;
        marg.witness.y_value = uy.delta;
      }
    }
  const Gap off = matrix_gap("scale_leq", a.scale(), b.scale(), false, true);
  bool ok = c.add("equal marginals", marg.value, kOrderTolerance, marg.witness);
  ok = c.add("Omega <= Omega' elementwise", off.value, kOrderTolerance, off.witness) && ok;
  if (ok)
  {
    v.status = VerdictStatus::HoldsProven;
    v.notes = "Standardized pair with equal marginals and elementwise larger scale.";
  }
  else
  {
    fail(v, c);
    v.notes = "Standardized pair: equal marginals and elementwise larger scale are both necessary.";
  }
  return v;
}

OrderVerdict check_dcx(const MsnParams& x, const MsnParams& y)
{
  OrderVerdict v = start(OrderKind::Dcx, x, y);
  if (identical(v, x, y))
    return v;
  if (!standardized(x, y))
  {
    v.notes = "The directionally convex decider covers standardized pairs only (zero location, unit-diagonal "
              "scale).";
    return v;
  }
  const auto& a = x.multivariate();
  const auto& b = y.multivariate();
  Conditions c(v);
  const Gap del = vector_gap("delta_eq", a.delta(), b.delta(), true);
  const Gap corr = matrix_gap("corr_leq", a.correlation(), b.correlation(), false, false);
  bool ok = c.add("delta == delta'", del.value, kOrderTolerance, del.witness);
  ok = c.add("corr' - corr >= 0 elementwise", corr.value, kOrderTolerance, corr.witness) && ok;
  if (ok)
  {
    v.status = VerdictStatus::HoldsProven;
    v.notes = "Standardized pair: equal skew and an elementwise nonnegative correlation increase.";
  }
  else
  {
    fail(v, c);
    v.notes = "Standardized pair: equal skew and an elementwise nonnegative correlation increase are necessary.";
  }
  return v;
}

OrderVerdict check_order(OrderKind kind, const MsnParams& x, const MsnParams& y)
{
  switch (kind)
  {
    case OrderKind::St: return check_st(x, y);
    case OrderKind::Cx: return check_cx(x, y);
    case OrderKind::Icx: return check_icx(x, y);
    case OrderKind::Uo: return check_uo(x, y);
    case OrderKind::Sm: return check_sm(x, y);
    case OrderKind::Dcx: return check_dcx(x, y);
  }
  throw Error(Errc::InvalidConfig, "unknown order");
}

OrderVerdict univariate_st(const UnivariateSnParams& a, const UnivariateSnParams& b)
{
  a.validate();
  b.validate();
  OrderVerdict v;
  v.kind = OrderKind::St;
  v.certificate["regime"] = "univariate";
  Conditions c(v);
  auto scalar = [](const char* q, double xv, double yv) {
    return Witness{WitnessKind::ParamInequality, q, {0}, Vec(), 0.0, xv, yv};
  };
  bool ok = c.add("mu1 <= mu2", a.mu - b.mu, kOrderTolerance, scalar("location_leq", a.mu, b.mu));
  ok = c.add("sigma1^2 == sigma2^2", std::abs(a.sigma_sq - b.sigma_sq),
             kOrderTolerance * std::max({1.0, a.sigma_sq, b.sigma_sq}),
             scalar("scale_diag_eq", a.sigma_sq, b.sigma_sq)) &&
       ok;
  ok = c.add("delta1 <= delta2", a.delta - b.delta, kOrderTolerance, scalar("delta_leq", a.delta, b.delta)) &&
       ok;
  if (ok)
  {
    v.status = VerdictStatus::HoldsProven;
    v.notes = "mu1 <= mu2, equal scale and delta1 <= delta2.";
  }
  else
  {
    fail(v, c);
    v.notes = "The scalar usual stochastic order needs mu1 <= mu2, equal scale and delta1 <= delta2.";
  }
  return v;
}

FamilyKind matching_family(OrderKind kind)
{
  switch (kind)
  {
    case OrderKind::St: return FamilyKind::IncreasingLinear;
    case OrderKind::Cx: return FamilyKind::ConvexQuadratic;
    case OrderKind::Icx: return FamilyKind::IncreasingConvex;
    case OrderKind::Uo: return FamilyKind::UpperOrthantIndicators;
    case OrderKind::Sm: return FamilyKind::SupermodularPairProducts;
    case OrderKind::Dcx: return FamilyKind::DcxPairProducts;
  }
  return FamilyKind::IncreasingLinear;
}

json evidence_to_json(const EvidenceReport& r)
{
  json fns = json::array();
  for (const auto& f : r.functions)
    fns.push_back({{"function", f.name},
                   {"estimate", f.estimate.value},
                   {"std_error", f.estimate.std_error},
                   {"samples", f.estimate.samples},
                   {"seed", f.estimate.seed},
                   {"z", f.z}});
  return {{"functions", fns},
          {"below_3sigma", r.below_3sigma},
          {"below_5sigma", r.below_5sigma},
          {"min_z", r.min_z},
          {"falsified", r.below_5sigma > 0}};
}

EvidenceReport mc_order_evidence(const MsnParams& x, const MsnParams& y, const FunctionFamily& family,
                                 Eigen::Index draws, std::uint64_t seed, unsigned workers)
{
  require_same_shape(x, y);
  if (draws < 2)
    throw Error(Errc::InvalidConfig, "mc_order_evidence: need at least 2 draws");
  const Rng master(seed);
  EvidenceReport report;
  report.min_z = std::numeric_limits<double>::infinity();
  Mat buf(x.n(), x.p());

  for (std::size_t g = 0; g < family.generators.size(); ++g)
  {
    const TestFunction& f = family.generators[g];
    if (f.n != x.n() || f.p != x.p())
      throw Error(Errc::ShapeMismatch, "mc_order_evidence: function arity does not match the parameters");
    const std::uint64_t ys = master.split(2 * g).seed();
    const std::uint64_t xs = master.split(2 * g + 1).seed();
    auto average = [&](const MsnParams& q, std::uint64_t s) {
      const SampleBatch batch = sample_additive(q, draws, s, workers);
      RunningStats st;
      for (Eigen::Index k = 0; k < batch.draws.cols(); ++k)
      {
        buf = Eigen::Map<const Mat>(batch.draws.col(k).data(), x.n(), x.p());
        const double val = f(buf);
        if (!std::isfinite(val))
          throw Error(Errc::NonFiniteValue, "mc_order_evidence: " + f.name + " is not finite at a draw");
        st.add(val);
      }
      return st;
    };
    const RunningStats fy = average(y, ys);
    const RunningStats fx = average(x, xs);

    FunctionEvidence e;
    e.name = f.name;
    e.estimate.value = fy.mean() - fx.mean();
    e.estimate.std_error = std::hypot(fy.std_error(), fx.std_error());
    e.estimate.samples = static_cast<std::uint64_t>(draws);
    e.estimate.seed = ys;
    e.z = e.estimate.z_score(0.0);
    report.below_3sigma += e.z < -3.0;
    report.below_5sigma += e.z < -5.0;
    report.min_z = std::min(report.min_z, e.z);
    report.functions.push_back(std::move(e));
  }
  if (report.functions.empty())
    report.min_z = 0.0;
  return report;
}

UpperOrthantResult upper_orthant_prob(const MsnParams& params, const Mat& t, Eigen::Index draws,
                                      std::uint64_t seed, unsigned workers)
{
  if (t.rows() != params.n() || t.cols() != params.p())
    throw Error(Errc::ShapeMismatch, "upper_orthant_prob: threshold must be n x p");
  if (draws < 2)
    throw Error(Errc::InvalidConfig, "upper_orthant_prob: need at least 2 draws");
  const Rng master(seed);
  const Eigen::Index d = params.dim();
  const Vec tv = vec(t);

  const SampleBatch batch = sample_additive(params, draws, master.split(0).seed(), workers);
  RunningStats direct;
  for (Eigen::Index k = 0; k < batch.draws.cols(); ++k)
    direct.add((batch.draws.col(k).array() > tv.array()).all() ? 1.0 : 0.0);

  // (vec X, U) jointly normal with cov [[Omega, delta], [delta', 1]]; X | U > 0 is the skew law.
  Mat cov(d + 1, d + 1);
  cov.topLeftCorner(d, d) = params.omega();
  cov.topRightCorner(d, 1) = params.delta();
  cov.bottomLeftCorner(1, d) = params.delta().transpose();
  cov(d, d) = 1.0;
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::NotPositiveDefinite, "upper_orthant_prob: augmented covariance is not positive definite");
  Vec loc(d + 1);
  loc << params.multivariate().location(), 0.0;
  const Mat normal = sample_normal(loc, llt.matrixL(), draws, master.split(1).seed(), workers);
  RunningStats augmented;
  for (Eigen::Index k = 0; k < normal.cols(); ++k)
  {
    const bool hit = (normal.col(k).head(d).array() > tv.array()).all() && normal(d, k) > 0.0;
    augmented.add(hit ? 2.0 : 0.0);
  }

  UpperOrthantResult r;
  r.sampler = direct.estimate(master.split(0).seed());
  r.augmented = augmented.estimate(master.split(1).seed());
  r.z = difference_z(r.sampler, r.augmented);
  return r;
}

}  // namespace msn
