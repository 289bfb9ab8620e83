#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace msn
{

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

std::uint64_t splitmix64(std::uint64_t x);

/// Seedable, splittable generator. Streams derived with split() are
/// deterministic functions of (seed, stream id), so work partitioned across
/// workers reproduces bit-for-bit for a fixed partition.
class Rng
{
public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = kDefaultSeed);

  std::uint64_t seed() const noexcept { return seed_; }

  Rng split(std::uint64_t stream) const;

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  void fill_normal(Eigen::Ref<Eigen::VectorXd> out);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace msn
