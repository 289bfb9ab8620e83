#pragma once

// Deciders for stochastic orders between two skew-normal matrices X and Y,
// plus Monte Carlo evidence over function families.
//
// Status semantics:
//   HoldsProven      the conditions of an if-and-only-if result hold
//   SufficientHolds  only a one-directional result applies and it holds
//   FailsProven      a necessary condition fails; a witness is attached
//   Inconclusive     neither

#include <optional>
#include <string>
#include <vector>

#include "msn/distribution.hpp"
#include "msn/families.hpp"
#include "msn/serialize.hpp"
#include "msn/stats.hpp"

namespace msn
{

enum class OrderKind
{
  St,
  Cx,
  Icx,
  Uo,
  Sm,
  Dcx,
};

enum class VerdictStatus
{
  HoldsProven,
  FailsProven,
  SufficientHolds,
  Inconclusive,
};

const char* to_string(OrderKind kind);
const char* to_string(VerdictStatus status);
/// "st", "cx", ... Throws InvalidConfig for anything else.
OrderKind parse_order(const std::string& name);

/// Absolute tolerance for parameter (in)equalities.
inline constexpr double kOrderTolerance = 1e-9;

enum class WitnessKind
{
  IndexPair,
  Direction,
  SimplexPoint,
  ParamInequality,
};

const char* to_string(WitnessKind kind);

/// A violated scalar condition between X and Y. `quantity` names it:
///   location_leq, location_eq     vec M entries (index a)
///   delta_leq, delta_eq           delta entries (index a)
///   mean_leq, mean_eq             E vec X entries (index a)
///   scale_eq                      Omega entries (a, b)
///   scale_diag_eq                 Omega diagonal (index a)
///   scale_leq                     Omega entries, Omega_ab <= Omega'_ab (a, b)
///   corr_leq                      correlation entries (a, b)
///   corr_diff_psd                 w' (C' - C) w >= 0 for the direction w
///   corr_diff_copositive          same with w on the simplex
///   marginal_eq                   scalar law of vec entry a
///   stop_loss                     E(w'X - t)+ <= E(w'Y - t)+ for w >= 0
struct Witness
{
  WitnessKind kind = WitnessKind::ParamInequality;
  std::string quantity;
  std::vector<Eigen::Index> indices;
  Vec direction;
  double threshold = 0.0;
  double x_value = 0.0;
  double y_value = 0.0;
};

json witness_to_json(const Witness& w);

/// E(U - t)+ for U ~ SN_1(mu, sigma_sq, *, delta), by quadrature over the
/// half-normal component.
double sn_stop_loss(const UnivariateSnParams& u, double t);

/// Scalar law of w' vec X.
UnivariateSnParams projection(const MultivariateSn& mv, const Vec& w);

/// Recomputes the quantity from the parameters and returns the size of the
/// violation (positive when the witness stands).
double witness_violation(const Witness& w, const MultivariateSn& x, const MultivariateSn& y);
bool reverify_witness(const Witness& w, const MultivariateSn& x, const MultivariateSn& y,
                      double tolerance = kOrderTolerance);

struct OrderVerdict
{
  OrderKind kind = OrderKind::St;
  VerdictStatus status = VerdictStatus::Inconclusive;
  json certificate = json::object();
  std::string notes;
  std::optional<Witness> witness;

  bool holds() const { return status == VerdictStatus::HoldsProven || status == VerdictStatus::SufficientHolds; }
};

json verdict_to_json(const OrderVerdict& v);

/// Zero location and unit-diagonal scale on both sides.
bool standardized(const MsnParams& x, const MsnParams& y);
bool same_law(const MsnParams& x, const MsnParams& y, double tolerance = kOrderTolerance);

OrderVerdict check_st(const MsnParams& x, const MsnParams& y);
OrderVerdict check_cx(const MsnParams& x, const MsnParams& y);
OrderVerdict check_icx(const MsnParams& x, const MsnParams& y);
OrderVerdict check_uo(const MsnParams& x, const MsnParams& y);
OrderVerdict check_sm(const MsnParams& x, const MsnParams& y);
OrderVerdict check_dcx(const MsnParams& x, const MsnParams& y);
OrderVerdict check_order(OrderKind kind, const MsnParams& x, const MsnParams& y);

OrderVerdict univariate_st(const UnivariateSnParams& a, const UnivariateSnParams& b);

/// Family whose functions characterise (or are contained in) the order.
FamilyKind matching_family(OrderKind kind);

struct FunctionEvidence
{
  std::string name;
  McEstimate estimate;  // E f(Y) - E f(X)
  double z = 0.0;
};

struct EvidenceReport
{
  std::vector<FunctionEvidence> functions;
  int below_3sigma = 0;
  int below_5sigma = 0;
  double min_z = 0.0;

  /// A holding verdict contradicted at 5 sigma.
  bool contradicts(const OrderVerdict& v) const { return v.holds() && below_5sigma > 0; }
};

json evidence_to_json(const EvidenceReport& r);

/// Per generator g: independent draws of Y and X from streams 2g and 2g + 1.
EvidenceReport mc_order_evidence(const MsnParams& x, const MsnParams& y, const FunctionFamily& family,
                                 Eigen::Index draws, std::uint64_t seed, unsigned workers = 0);

struct UpperOrthantResult
{
  McEstimate sampler;    // P(X > t) from the additive sampler
  McEstimate augmented;  // 2 P(N > (vec t, 0)) for N ~ N((vec M, 0), [[Omega, d], [d', 1]])
  double z = 0.0;        // difference in combined standard errors
};

UpperOrthantResult upper_orthant_prob(const MsnParams& params, const Mat& t, Eigen::Index draws,
                                      std::uint64_t seed, unsigned workers = 0);

}  // namespace msn
