#pragma once

// Dense matrix helpers: vec/Kronecker algebra, correlation scaling, and the
// PSD / copositivity certificates the order deciders rely on.

#include <Eigen/Dense>

#include <optional>

#include "msn/error.hpp"

namespace msn
{

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace tol
{
inline constexpr double kEquality = 1e-10;
inline constexpr double kSlack = 1e-8;
inline constexpr double kSymmetry = 1e-12;
inline constexpr double kDefiniteness = 1e-12;
}  // namespace tol

/// Symmetric, strictly positive definite matrix. Construction validates both
/// properties; the stored entries are exactly the input entries.
class SpdMat
{
public:
  explicit SpdMat(Mat m);

  const Mat& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  static bool is_valid(const Mat& m);

private:
  Mat m_;
};

struct CorrDecomposition
{
  Vec scale_diag;  // sqrt of the diagonal of the input
  Mat correlation; // unit-diagonal

  Mat reconstruct() const;
};

struct PsdResult
{
  bool psd = false;
  double min_eigenvalue = 0.0;
  std::optional<Vec> witness;  // unit eigenvector with negative quadratic form
};

enum class CopositivityStatus
{
  Copositive,
  NotCopositive,
};

struct CopositivityVerdict
{
  CopositivityStatus status = CopositivityStatus::Copositive;
  std::optional<Vec> witness;  // on the simplex when present
  double min_value = 0.0;
  Vec minimizer;               // simplex point attaining min_value
};

inline constexpr Eigen::Index kMaxCopositiveDim = 16;

// Column-stacking: entry (i, j) lands at position i + rows * j (0-based).
Vec vec(const Mat& m);
Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols);

Mat kron(const Mat& a, const Mat& b);

CorrDecomposition corr_decompose(const Mat& omega);
inline CorrDecomposition corr_decompose(const SpdMat& omega)
{
  return corr_decompose(omega.matrix());
}

/// corr(V (x) Sigma) == corr(V) (x) corr(Sigma); should hold for every PD pair.
bool kron_corr_check(const SpdMat& v, const SpdMat& sigma, double tolerance = tol::kEquality);

bool is_symmetric(const Mat& a, double tolerance = tol::kSymmetry);

/// Throws NotSymmetric for asymmetric input. The threshold is
/// -tol * max(1, max |a_ij|) on the smallest eigenvalue.
PsdResult is_psd(const Mat& a, double tolerance = tol::kSlack);

/// Exact copositivity decision by KKT support enumeration over all 2^dim - 1
/// supports of the standard simplex. Throws DimensionTooLarge past 16.
CopositivityVerdict is_copositive(const Mat& a, double tolerance = tol::kSlack);

/// Brute-force reference: min of x' A x over simplex points with coordinates
/// in multiples of 1 / resolution.
double simplex_grid_min(const Mat& a, int resolution);

/// Returns a with V = a V2 and Sigma = Sigma2 / a when such a exists.
std::optional<double> kron_equal_up_to_scale(const SpdMat& v, const SpdMat& sigma, const SpdMat& v2,
                                             const SpdMat& sigma2, double tolerance = tol::kEquality);

bool elementwise_leq(const Mat& a, const Mat& b, double tolerance = tol::kSlack);

double max_abs(const Mat& m);

/// Smallest eigenvalue check matching the SpdMat invariant.
bool is_positive_definite(const Mat& m);

/// Symmetric square root of a PSD matrix via eigen-decomposition.
Mat symmetric_sqrt(const Mat& m);

}  // namespace msn
