#include "msn/stats.hpp"

#include <algorithm>
#include <cmath>

#include "msn/special.hpp"

namespace msn
{

double McEstimate::z_score(double reference) const
{
  const double diff = value - reference;
  if (std_error > 0.0)
    return diff / std_error;
  // Deterministic estimates: agreement up to rounding counts as exact.
  if (std::abs(diff) <= 1e-12 * std::max({1.0, std::abs(value), std::abs(reference)}))
    return 0.0;
  return std::copysign(INFINITY, diff);
}

void RunningStats::add(double x)
{
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& other)
{
  if (other.n_ == 0)
    return;
  if (n_ == 0)
  {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double d = other.mean_ - mean_;
  mean_ += d * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

double RunningStats::variance() const
{
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const
{
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

McEstimate RunningStats::estimate(std::uint64_t seed) const
{
  return McEstimate{mean_, std_error(), n_, seed};
}

double difference_z(const McEstimate& a, const McEstimate& b)
{
  const McEstimate diff{a.value - b.value, std::hypot(a.std_error, b.std_error), 0, 0};
  return diff.z_score();
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size())
  {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x)
      ++i;
    while (j < b.size() && b[j] <= x)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return KsResult{d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf)
{
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double ne = std::sqrt(n);
  return KsResult{d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace msn
