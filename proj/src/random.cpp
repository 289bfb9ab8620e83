#include "msn/random.hpp"

namespace msn
{

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed))
{
}

Rng Rng::split(std::uint64_t stream) const
{
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x5851F42D4C957F2Dull)));
}

void Rng::fill_normal(Eigen::Ref<Eigen::VectorXd> out)
{
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = normal_(engine_);
}

}  // namespace msn
