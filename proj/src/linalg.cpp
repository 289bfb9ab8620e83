#include "msn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace msn
{

namespace
{

bool all_finite(const Mat& m)
{
  return m.allFinite();
}

}  // namespace

double max_abs(const Mat& m)
{
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Mat& a, double tolerance)
{
  if (a.rows() != a.cols())
    return false;
  const double scale = std::max(1.0, max_abs(a));
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tolerance * scale;
}

bool is_positive_definite(const Mat& m)
{
  if (m.rows() == 0 || m.rows() != m.cols() || !all_finite(m))
    return false;
  Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    return false;
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return hi > 0.0 && lo > static_cast<double>(m.rows()) * tol::kDefiniteness * hi;
}

bool SpdMat::is_valid(const Mat& m)
{
  if (m.rows() == 0 || m.rows() != m.cols() || !all_finite(m))
    return false;
  const double scale = max_abs(m);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetry * scale)
    return false;
  return is_positive_definite(m);
}

SpdMat::SpdMat(Mat m) : m_(std::move(m))
{
  if (m_.rows() != m_.cols())
    throw Error(Errc::ShapeMismatch, "scale matrix must be square, got " + std::to_string(m_.rows()) +
                                         "x" + std::to_string(m_.cols()));
  if (!all_finite(m_))
    throw Error(Errc::NotPositiveDefinite, "scale matrix has non-finite entries");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetry * max_abs(m_))
    throw Error(Errc::NotSymmetric, "scale matrix is not symmetric");
  if (!is_positive_definite(m_))
    throw Error(Errc::NotPositiveDefinite, "scale matrix is not positive definite");
}

Vec vec(const Mat& m)
{
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols)
{
  if (v.size() != rows * cols)
    throw Error(Errc::ShapeMismatch, "unvec: length " + std::to_string(v.size()) + " != " +
                                         std::to_string(rows) + "*" + std::to_string(cols));
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat kron(const Mat& a, const Mat& b)
{
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat CorrDecomposition::reconstruct() const
{
  return scale_diag.asDiagonal() * correlation * scale_diag.asDiagonal();
}

CorrDecomposition corr_decompose(const Mat& omega)
{
  if (omega.rows() != omega.cols())
    throw Error(Errc::ShapeMismatch, "corr_decompose needs a square matrix");
  const Vec diag = omega.diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (!(diag(i) > 0.0))
      throw Error(Errc::NonPositiveDiagonal, "diagonal entry " + std::to_string(i) + " is not positive");
  CorrDecomposition out;
  out.scale_diag = diag.cwiseSqrt();
  const Vec inv = out.scale_diag.cwiseInverse();
  out.correlation = inv.asDiagonal() * omega * inv.asDiagonal();
  out.correlation.diagonal().setOnes();
  return out;
}

bool kron_corr_check(const SpdMat& v, const SpdMat& sigma, double tolerance)
{
  const Mat lhs = corr_decompose(kron(v.matrix(), sigma.matrix())).correlation;
  const Mat rhs = kron(corr_decompose(v).correlation, corr_decompose(sigma).correlation);
  return (lhs - rhs).cwiseAbs().maxCoeff() <= tolerance;
}

PsdResult is_psd(const Mat& a, double tolerance)
{
  if (!is_symmetric(a))
    throw Error(Errc::NotSymmetric, "is_psd needs a symmetric matrix");
  PsdResult out;
  if (a.size() == 0)
  {
    out.psd = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  const Eigen::Index lo = 0;  // eigenvalues are sorted ascending
  out.min_eigenvalue = eig.eigenvalues()(lo);
  out.psd = out.min_eigenvalue >= -tolerance * std::max(1.0, max_abs(a));
  if (!out.psd)
    out.witness = eig.eigenvectors().col(lo).normalized();
  return out;
}

CopositivityVerdict is_copositive(const Mat& a, double tolerance)
{
  if (!is_symmetric(a))
    throw Error(Errc::NotSymmetric, "is_copositive needs a symmetric matrix");
  const Eigen::Index d = a.rows();
  if (d > kMaxCopositiveDim)
    throw Error(Errc::DimensionTooLarge, "copositivity enumeration limited to dim <= 16, got " +
                                             std::to_string(d));
  CopositivityVerdict out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.minimizer = Vec::Zero(d);
  if (d == 0)
  {
    out.min_value = 0.0;
    return out;
  }

  std::vector<Eigen::Index> support;
  support.reserve(static_cast<std::size_t>(d));
  const std::uint32_t subsets = 1u << d;
  for (std::uint32_t mask = 1; mask < subsets; ++mask)
  {
    support.clear();
    for (Eigen::Index i = 0; i < d; ++i)
      if (mask & (1u << i))
        support.push_back(i);
    const auto k = static_cast<Eigen::Index>(support.size());

    // Stationarity on the face: A_SS x = mu 1, 1'x = 1.
    Mat kkt = Mat::Zero(k + 1, k + 1);
    for (Eigen::Index r = 0; r < k; ++r)
    {
      for (Eigen::Index c = 0; c < k; ++c)
        kkt(r, c) = a(support[r], support[c]);
      kkt(r, k) = 1.0;
      kkt(k, r) = 1.0;
    }
    Vec rhs = Vec::Zero(k + 1);
    rhs(k) = 1.0;
    Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible())
      continue;
    const Vec sol = lu.solve(rhs);
    const Vec xs = sol.head(k);
    if ((xs.array() <= 0.0).any())
      continue;

    Vec x = Vec::Zero(d);
    for (Eigen::Index r = 0; r < k; ++r)
      x(support[r]) = xs(r);
    x /= x.sum();
    const double value = x.dot(a * x);
    if (value < out.min_value)
    {
      out.min_value = value;
      out.minimizer = x;
    }
  }

  if (out.min_value < -tolerance)
  {
    out.status = CopositivityStatus::NotCopositive;
    out.witness = out.minimizer;
  }
  return out;
}

std::optional<double> kron_equal_up_to_scale(const SpdMat& v, const SpdMat& sigma, const SpdMat& v2,
                                             const SpdMat& sigma2, double tolerance)
{
  if (v.dim() != v2.dim() || sigma.dim() != sigma2.dim())
    return std::nullopt;
  const double a = v(0, 0) / v2(0, 0);
  if (!(a > 0.0) || !std::isfinite(a))
    return std::nullopt;
  const double v_scale = std::max(1.0, max_abs(v.matrix()));
  const double s_scale = std::max(1.0, max_abs(sigma.matrix()));
  const bool v_ok = (v.matrix() - a * v2.matrix()).cwiseAbs().maxCoeff() <= tolerance * v_scale;
  const bool s_ok = (sigma.matrix() - sigma2.matrix() / a).cwiseAbs().maxCoeff() <= tolerance * s_scale;
  if (v_ok && s_ok)
    return a;
  return std::nullopt;
}

bool elementwise_leq(const Mat& a, const Mat& b, double tolerance)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(Errc::ShapeMismatch, "elementwise_leq needs equal shapes");
  return (a.array() <= b.array() + tolerance).all();
}

Mat symmetric_sqrt(const Mat& m)
{
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  const Vec root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

double simplex_grid_min(const Mat& a, int resolution)
{
  const Eigen::Index d = a.rows();
  if (d < 1 || a.cols() != d || resolution < 1)
    throw Error(Errc::ShapeMismatch, "simplex_grid_min needs a square matrix and a positive resolution");
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  Vec x(d);
  // Enumerate compositions of `resolution` into d nonnegative parts.
  auto recurse = [&](auto&& self, Eigen::Index k, int left) -> void {
    if (k == d - 1)
    {
      counts[static_cast<std::size_t>(k)] = left;
      for (Eigen::Index i = 0; i < d; ++i)
        x(i) = counts[static_cast<std::size_t>(i)] / static_cast<double>(resolution);
      best = std::min(best, x.dot(a * x));
      return;
    }
    for (int c = 0; c <= left; ++c)
    {
      counts[static_cast<std::size_t>(k)] = c;
      self(self, k + 1, left - c);
    }
  };
  recurse(recurse, 0, resolution);
  return best;
}

}  // namespace msn
