#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace msn
{

/// Monte Carlo estimate; std_error is the sample standard deviation over
/// sqrt(samples) (or the propagated value for composite estimates).
struct McEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  /// (value - reference) / std_error. With a zero std_error the result is 0
  /// when the two agree to 1e-12 relative and +-inf otherwise.
  double z_score(double reference = 0.0) const;
};

/// Welford accumulator.
class RunningStats
{
public:
  void add(double x);
  void merge(const RunningStats& other);

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

  McEstimate estimate(std::uint64_t seed) const;

private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// z-score of a - b for independent estimates.
double difference_z(const McEstimate& a, const McEstimate& b);

struct KsResult
{
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

}  // namespace msn
