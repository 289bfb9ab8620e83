#pragma once

// Seeded generators of test functions for the integral stochastic orders, and
// finite-difference membership tests for the function classes.

#include <cstdint>
#include <string>
#include <vector>

#include "msn/test_function.hpp"

namespace msn
{

enum class FamilyKind
{
  IncreasingLinear,
  ConvexQuadratic,
  IncreasingConvex,
  SupermodularPairProducts,
  DcxPairProducts,
  UpperOrthantIndicators,
  DeltaMonotoneBoxes,
};

const char* to_string(FamilyKind kind);

struct FunctionFamily
{
  FamilyKind kind = FamilyKind::IncreasingLinear;
  std::vector<TestFunction> generators;
};

/// Classes every generator of `kind` must pass in class_membership_test.
unsigned required_classes(FamilyKind kind);

/// Deterministic in (kind, n, p, seed). `count` is clamped below at 8.
FunctionFamily make_family(FamilyKind kind, Eigen::Index n, Eigen::Index p, std::uint64_t seed, int count = 8);

struct MembershipResult
{
  bool passed = true;
  double worst_violation = 0.0;  // most negative difference seen, 0 if none
  Mat worst_point;
  std::string detail;
};

/// Difference-operator checks at each probe with steps drawn from `epsilons`:
///   increasing            D_k f >= 0
///   convex                second differences along e_k and e_k +- e_l
///   supermodular          D_k D_l f >= 0 for distinct vec indices k, l
///   directionally convex  D_k D_l f >= 0 for all k, l
///   delta monotone        D_S f >= 0 for every subset S with |S| <= 4
MembershipResult class_membership_test(const TestFunction& f, FunctionClass cls, const std::vector<Mat>& probes,
                                       const std::vector<double>& epsilons = {0.1, 1.0});

/// `per_axis`^(np) grid on [lo, hi] when that has at most `max_points`
/// points, otherwise `max_points` uniform random points from `seed`.
std::vector<Mat> probe_grid(Eigen::Index n, Eigen::Index p, int per_axis, double lo, double hi,
                            std::size_t max_points = 625, std::uint64_t seed = 1);

}  // namespace msn
