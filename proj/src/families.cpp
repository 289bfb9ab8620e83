#include "msn/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msn/random.hpp"

namespace msn
{

const char* to_string(FamilyKind kind)
{
  switch (kind)
  {
    case FamilyKind::IncreasingLinear: return "IncreasingLinear";
    case FamilyKind::ConvexQuadratic: return "ConvexQuadratic";
    case FamilyKind::IncreasingConvex: return "IncreasingConvex";
    case FamilyKind::SupermodularPairProducts: return "SupermodularPairProducts";
    case FamilyKind::DcxPairProducts: return "DcxPairProducts";
    case FamilyKind::UpperOrthantIndicators: return "UpperOrthantIndicators";
    case FamilyKind::DeltaMonotoneBoxes: return "DeltaMonotoneBoxes";
  }
  return "unknown";
}

unsigned required_classes(FamilyKind kind)
{
  using C = FunctionClass;
  switch (kind)
  {
    case FamilyKind::IncreasingLinear:
      return tags(C::Increasing, C::Convex, C::Supermodular, C::DirectionallyConvex, C::DeltaMonotone);
    case FamilyKind::ConvexQuadratic: return tags(C::Convex);
    case FamilyKind::IncreasingConvex: return tags(C::Increasing, C::Convex);
    case FamilyKind::SupermodularPairProducts: return tags(C::Supermodular);
    case FamilyKind::DcxPairProducts: return tags(C::Supermodular, C::DirectionallyConvex);
    case FamilyKind::UpperOrthantIndicators: return tags(C::Increasing, C::DeltaMonotone);
    case FamilyKind::DeltaMonotoneBoxes: return tags(C::Increasing, C::DeltaMonotone);
  }
  return 0;
}

namespace
{

Eigen::Map<const Vec> as_vec(const Mat& x)
{
  return Eigen::Map<const Vec>(x.data(), x.size());
}

double softplus(double z)
{
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z)
{
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

Vec positive_weights(Rng& rng, Eigen::Index d)
{
  Vec a(d);
  for (Eigen::Index k = 0; k < d; ++k)
    a(k) = 0.1 + 0.9 * rng.uniform();
  return a;
}

// Distinct vec indices, spread over all pairs before repeating.
std::pair<Eigen::Index, Eigen::Index> pick_pair(Rng& rng, Eigen::Index d, int g)
{
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b)
      pairs.emplace_back(a, b);
  const auto base = static_cast<std::size_t>(g) % pairs.size();
  if (static_cast<std::size_t>(g) < pairs.size())
    return pairs[base];
  return pairs[static_cast<std::size_t>(rng() % pairs.size())];
}

std::vector<Eigen::Index> pick_subset(Rng& rng, Eigen::Index d)
{
  std::vector<Eigen::Index> all(static_cast<std::size_t>(d));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  const auto size = 1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d));
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

TestFunction base(const std::string& name, Eigen::Index n, Eigen::Index p, unsigned classes)
{
  TestFunction f;
  f.name = name;
  f.n = n;
  f.p = p;
  f.class_tags = classes;
  return f;
}

TestFunction increasing_convex(Rng& rng, Eigen::Index n, Eigen::Index p, int g)
{
  const Eigen::Index d = n * p;
  const unsigned cls = required_classes(FamilyKind::IncreasingConvex);
  const Vec a = positive_weights(rng, d);
  const int variant = (d < 2 && g % 4 == 2) ? 1 : g % 4;
  switch (variant)
  {
    case 0:
    {
      const Vec c = a * (0.3 / a.norm());
      TestFunction f = base("exp_ridge", n, p, cls);
      f.evaluate = [c](const Mat& x) { return std::exp(c.dot(as_vec(x))); };
      return f;
    }
    case 1:
    {
      const double t = rng.normal();
      TestFunction f = base("softplus_ridge", n, p, cls);
      f.evaluate = [a, t](const Mat& x) { return softplus(a.dot(as_vec(x)) - t); };
      return f;
    }
    case 2:
    {
      const auto [i, j] = pick_pair(rng, d, g / 4);
      TestFunction f = base("smooth_max", n, p, cls);
      f.evaluate = [i, j](const Mat& x) {
        const double u = x(i), v = x(j);
        const double hi = std::max(u, v);
        return hi + std::log(std::exp(u - hi) + std::exp(v - hi));
      };
      return f;
    }
    default:
    {
      const double t = rng.normal();
      TestFunction f = base("softplus_sq_ridge", n, p, cls);
      f.evaluate = [a, t](const Mat& x) {
        const double s = softplus(a.dot(as_vec(x)) - t);
        return s * s;
      };
      return f;
    }
  }
}

TestFunction supermodular(Rng& rng, Eigen::Index n, Eigen::Index p, int g)
{
  const Eigen::Index d = n * p;
  const unsigned cls = required_classes(FamilyKind::SupermodularPairProducts);
  const auto [i, j] = pick_pair(rng, d, g);
  const double c = 0.5 + rng.uniform();
  switch (g % 3)
  {
    case 0:
    {
      TestFunction f = base("pair_product", n, p, cls);
      f.evaluate = [i, j, c](const Mat& x) { return c * x(i) * x(j); };
      return f;
    }
    case 1:
    {
      TestFunction f = base("tanh_pair_product", n, p, cls);
      f.evaluate = [i, j, c](const Mat& x) { return c * std::tanh(x(i)) * std::tanh(x(j)); };
      return f;
    }
    default:
    {
      TestFunction f = base("smooth_min", n, p, cls);
      f.evaluate = [i, j, c](const Mat& x) {
        const double u = x(i), v = x(j);
        const double lo = std::min(u, v);
        return c * (lo - std::log(std::exp(lo - u) + std::exp(lo - v)));
      };
      return f;
    }
  }
}

TestFunction directionally_convex(Rng& rng, Eigen::Index n, Eigen::Index p, int g)
{
  const Eigen::Index d = n * p;
  const unsigned cls = required_classes(FamilyKind::DcxPairProducts);
  switch (g % 3)
  {
    case 0:
    {
      const auto [i, j] = pick_pair(rng, d, g / 3);
      const double c = 0.5 + rng.uniform();
      TestFunction f = base("pair_product", n, p, cls);
      f.evaluate = [i, j, c](const Mat& x) { return c * x(i) * x(j); };
      return f;
    }
    case 1:
    {
      const Vec a = positive_weights(rng, d);
      const Vec c = a * (0.3 / a.norm());
      TestFunction f = base("exp_ridge", n, p, cls);
      f.evaluate = [c](const Mat& x) { return std::exp(c.dot(as_vec(x))); };
      return f;
    }
    default:
    {
      const Vec a = positive_weights(rng, d);
      TestFunction f = base("square_ridge", n, p, cls);
      f.evaluate = [a](const Mat& x) {
        const double s = a.dot(as_vec(x));
        return s * s;
      };
      return f;
    }
  }
}

TestFunction orthant_indicator(Rng& rng, Eigen::Index n, Eigen::Index p)
{
  const auto subset = pick_subset(rng, n * p);
  std::vector<double> t;
  for (std::size_t k = 0; k < subset.size(); ++k)
    t.push_back(0.7 * rng.normal());
  TestFunction f = base("upper_orthant", n, p, required_classes(FamilyKind::UpperOrthantIndicators));
  f.evaluate = [subset, t](const Mat& x) {
    for (std::size_t k = 0; k < subset.size(); ++k)
      if (!(x(subset[k]) > t[k]))
        return 0.0;
    return 1.0;
  };
  return f;
}

TestFunction sigmoid_box(Rng& rng, Eigen::Index n, Eigen::Index p)
{
  const auto subset = pick_subset(rng, n * p);
  std::vector<double> t, s;
  for (std::size_t k = 0; k < subset.size(); ++k)
  {
    t.push_back(0.7 * rng.normal());
    s.push_back(1.0 + 2.0 * rng.uniform());
  }
  TestFunction f = base("sigmoid_box", n, p, required_classes(FamilyKind::DeltaMonotoneBoxes));
  f.evaluate = [subset, t, s](const Mat& x) {
    double v = 1.0;
    for (std::size_t k = 0; k < subset.size(); ++k)
      v *= sigmoid(s[k] * (x(subset[k]) - t[k]));
    return v;
  };
  return f;
}

}  // namespace

FunctionFamily make_family(FamilyKind kind, Eigen::Index n, Eigen::Index p, std::uint64_t seed, int count)
{
  if (n < 1 || p < 1)
    throw Error(Errc::ShapeMismatch, "make_family: dimensions must be positive");
  const Eigen::Index d = n * p;
  const bool pairwise = kind == FamilyKind::SupermodularPairProducts || kind == FamilyKind::DcxPairProducts;
  if (pairwise && d < 2)
    throw Error(Errc::ShapeMismatch, std::string("make_family: ") + to_string(kind) + " needs at least two entries");

  count = std::max(count, 8);
  const Rng master(seed);
  FunctionFamily family;
  family.kind = kind;
  for (int g = 0; g < count; ++g)
  {
    Rng rng = master.split(static_cast<std::uint64_t>(kind) * 1000 + static_cast<std::uint64_t>(g));
    TestFunction f;
    switch (kind)
    {
      case FamilyKind::IncreasingLinear:
        f = linear_function(unvec(positive_weights(rng, d), n, p));
        f.class_tags |= required_classes(kind);
        break;
      case FamilyKind::ConvexQuadratic:
      {
        Mat gm(d, d);
        for (Eigen::Index k = 0; k < gm.size(); ++k)
          gm(k) = rng.normal();
        Vec b(d);
        rng.fill_normal(b);
        f = quadratic_function(n, p, gm * gm.transpose() / static_cast<double>(d), 0.5 * b);
        break;
      }
      case FamilyKind::IncreasingConvex: f = increasing_convex(rng, n, p, g); break;
      case FamilyKind::SupermodularPairProducts: f = supermodular(rng, n, p, g); break;
      case FamilyKind::DcxPairProducts: f = directionally_convex(rng, n, p, g); break;
      case FamilyKind::UpperOrthantIndicators: f = orthant_indicator(rng, n, p); break;
      case FamilyKind::DeltaMonotoneBoxes: f = sigmoid_box(rng, n, p); break;
    }
    f.name = std::string(to_string(kind)) + "/" + f.name + "#" + std::to_string(g);
    family.generators.push_back(std::move(f));
  }
  return family;
}

namespace
{

struct Tracker
{
  MembershipResult result;

  void record(double value, double scale, const Mat& point, const std::string& what)
  {
    if (value < result.worst_violation)
    {
      result.worst_violation = value;
      result.worst_point = point;
    }
    if (value < -1e-9 * (1.0 + scale) && result.passed)
    {
      result.passed = false;
      result.detail = what;
    }
  }
};

// D_S f(x) with step steps[k] along index subset[k].
double iterated_difference(const TestFunction& f, const Mat& x, const std::vector<Eigen::Index>& subset,
                           const std::vector<double>& steps, double& scale)
{
  const std::size_t s = subset.size();
  double total = 0.0;
  Mat probe(x.rows(), x.cols());
  for (unsigned mask = 0; mask < (1u << s); ++mask)
  {
    probe = x;
    int bits = 0;
    for (std::size_t k = 0; k < s; ++k)
      if (mask & (1u << k))
      {
        probe(subset[k]) += steps[k];
        ++bits;
      }
    const double v = f(probe);
    scale = std::max(scale, std::abs(v));
    total += ((static_cast<int>(s) - bits) % 2 == 0) ? v : -v;
  }
  return total;
}

void check_subsets(const TestFunction& f, const Mat& x, Eigen::Index max_size, bool distinct_pairs_only,
                   const std::vector<double>& eps, Tracker& tracker)
{
  const Eigen::Index d = x.size();
  std::vector<Eigen::Index> subset;
  // Enumerate index subsets of size <= max_size in lexicographic order.
  auto recurse = [&](auto&& self, Eigen::Index start) -> void {
    if (!subset.empty())
    {
      std::vector<double> steps(subset.size(), eps.front());
      if (subset.size() <= 2)
      {
        // every combination of steps
        const std::size_t combos = subset.size() == 1 ? eps.size() : eps.size() * eps.size();
        for (std::size_t c = 0; c < combos; ++c)
        {
          steps[0] = eps[c % eps.size()];
          if (subset.size() == 2)
            steps[1] = eps[c / eps.size()];
          double scale = 0.0;
          const double v = iterated_difference(f, x, subset, steps, scale);
          tracker.record(v, scale, x, "difference over a subset of size " + std::to_string(subset.size()));
        }
      }
      else
      {
        for (double e : eps)
        {
          std::fill(steps.begin(), steps.end(), e);
          double scale = 0.0;
          const double v = iterated_difference(f, x, subset, steps, scale);
          tracker.record(v, scale, x, "difference over a subset of size " + std::to_string(subset.size()));
        }
      }
    }
    if (static_cast<Eigen::Index>(subset.size()) == max_size)
      return;
    for (Eigen::Index k = start; k < d; ++k)
    {
      subset.push_back(k);
      self(self, k + 1);
      subset.pop_back();
    }
  };

  if (max_size == 2 && !distinct_pairs_only)
  {
    // Directional convexity: D_k D_l f including k == l.
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index l = k; l < d; ++l)
        for (double e1 : eps)
          for (double e2 : eps)
          {
            Mat p00 = x, p10 = x, p01 = x, p11 = x;
            p10(k) += e1;
            p01(l) += e2;
            p11(k) += e1;
            p11(l) += e2;
            const double a = f(p11), b = f(p10), c = f(p01), z = f(p00);
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(z)});
            tracker.record(a - b - c + z, scale, x,
                           "D_" + std::to_string(k) + " D_" + std::to_string(l) + " f < 0");
          }
    return;
  }
  if (max_size == 2)
  {
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index l = k + 1; l < d; ++l)
      {
        subset = {k, l};
        for (double e1 : eps)
          for (double e2 : eps)
          {
            double scale = 0.0;
            const double v = iterated_difference(f, x, subset, {e1, e2}, scale);
            tracker.record(v, scale, x, "D_" + std::to_string(k) + " D_" + std::to_string(l) + " f < 0");
          }
      }
    return;
  }
  recurse(recurse, 0);
}

void check_convex(const TestFunction& f, const Mat& x, const std::vector<double>& eps, Tracker& tracker)
{
  const Eigen::Index d = x.size();
  const double fx = f(x);
  auto second = [&](const Vec& u, double e) {
    Mat up = x, down = x;
    for (Eigen::Index k = 0; k < d; ++k)
    {
      up(k) += e * u(k);
      down(k) -= e * u(k);
    }
    const double a = f(up), b = f(down);
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(fx)});
    tracker.record(a + b - 2.0 * fx, scale, x, "negative second difference");
  };
  for (double e : eps)
    for (Eigen::Index k = 0; k < d; ++k)
    {
      second(Vec::Unit(d, k), e);
      for (Eigen::Index l = k + 1; l < d; ++l)
      {
        second(Vec::Unit(d, k) + Vec::Unit(d, l), e);
        second(Vec::Unit(d, k) - Vec::Unit(d, l), e);
      }
    }
}

}  // namespace

MembershipResult class_membership_test(const TestFunction& f, FunctionClass cls, const std::vector<Mat>& probes,
                                       const std::vector<double>& epsilons)
{
  if (epsilons.empty())
    throw Error(Errc::InvalidConfig, "class_membership_test: no step sizes");
  Tracker tracker;
  for (const Mat& x : probes)
  {
    if (x.rows() != f.n || x.cols() != f.p)
      throw Error(Errc::ShapeMismatch, "class_membership_test: probe shape does not match the function");
    switch (cls)
    {
      case FunctionClass::Increasing: check_subsets(f, x, 1, true, epsilons, tracker); break;
      case FunctionClass::Convex: check_convex(f, x, epsilons, tracker); break;
      case FunctionClass::Supermodular: check_subsets(f, x, 2, true, epsilons, tracker); break;
      case FunctionClass::DirectionallyConvex: check_subsets(f, x, 2, false, epsilons, tracker); break;
      case FunctionClass::DeltaMonotone:
        check_subsets(f, x, std::min<Eigen::Index>(4, x.size()), true, epsilons, tracker);
        break;
    }
  }
  if (!tracker.result.passed)
    tracker.result.detail = std::string(to_string(cls)) + ": " + tracker.result.detail;
  return tracker.result;
}

std::vector<Mat> probe_grid(Eigen::Index n, Eigen::Index p, int per_axis, double lo, double hi,
                            std::size_t max_points, std::uint64_t seed)
{
  const Eigen::Index d = n * p;
  std::vector<Mat> out;
  double total = 1.0;
  for (Eigen::Index k = 0; k < d; ++k)
    total *= per_axis;
  if (per_axis >= 2 && total <= static_cast<double>(max_points))
  {
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    const double step = (hi - lo) / (per_axis - 1);
    for (std::size_t c = 0; c < static_cast<std::size_t>(total); ++c)
    {
      Mat x(n, p);
      for (Eigen::Index k = 0; k < d; ++k)
        x(k) = lo + step * idx[static_cast<std::size_t>(k)];
      out.push_back(x);
      for (std::size_t k = 0; k < idx.size(); ++k)
      {
        if (++idx[k] < per_axis)
          break;
        idx[k] = 0;
      }
    }
    return out;
  }
  Rng rng(seed);
  for (std::size_t c = 0; c < max_points; ++c)
  {
    Mat x(n, p);
    for (Eigen::Index k = 0; k < d; ++k)
      x(k) = lo + (hi - lo) * rng.uniform();
    out.push_back(x);
  }
  return out;
}

}  // namespace msn
