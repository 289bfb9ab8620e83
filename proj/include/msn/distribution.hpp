#pragma once

// Matrix variate skew-normal law SN_{n x p}(M, V (x) Sigma, B) and its vec'd
// multivariate counterpart SN_{np}(vec M, V (x) Sigma, vec B).

#include <complex>
#include <cstdint>
#include <vector>

#include "msn/linalg.hpp"
#include "msn/random.hpp"

namespace msn
{

/// Scalar law SN_1(mu, sigma_sq, *, delta).
struct UnivariateSnParams
{
  double mu = 0.0;
  double sigma_sq = 1.0;
  double delta = 0.0;

  /// Throws DegenerateSkew / NotPositiveDefinite when the triple is not a law.
  void validate() const;
};

struct CfLogPolar
{
  double log_magnitude = 0.0;
  double phase = 0.0;

  std::complex<double> value() const { return std::polar(std::exp(log_magnitude), phase); }
};

/// delta = (1 + a' corr a)^{-1/2} w corr a.
Vec delta_from_alpha(const Mat& omega, const Vec& alpha);

/// Inverse map: alpha = (1 - d' Omega^{-1} d)^{-1/2} w Omega^{-1} d.
/// Throws DegenerateSkew unless d' Omega^{-1} d < 1 - 1e-12.
Vec alpha_from_delta(const Mat& omega, const Vec& delta);

/// Multivariate skew-normal SN_N(location, scale, alpha, delta). Both skew
/// descriptions are kept; the one not supplied is derived on construction.
class MultivariateSn
{
public:
  static MultivariateSn from_alpha(Vec location, Mat scale, Vec alpha);
  static MultivariateSn from_delta(Vec location, Mat scale, Vec delta);

  Eigen::Index dim() const noexcept { return location_.size(); }
  const Vec& location() const noexcept { return location_; }
  const Mat& scale() const noexcept { return scale_; }
  const Vec& alpha() const noexcept { return alpha_; }
  const Vec& delta() const noexcept { return delta_; }
  const Vec& scale_diag() const noexcept { return omega_diag_; }
  const Mat& correlation() const noexcept { return correlation_; }

  double log_density(const Vec& z) const;
  double density(const Vec& z) const { return std::exp(log_density(z)); }

  std::complex<double> cf(const Vec& t) const;
  CfLogPolar cf_log_polar(const Vec& t) const;

  Vec mean() const;
  Mat second_moment() const;
  Mat covariance() const;

  /// Lower Cholesky factor of the scale matrix.
  const Mat& scale_factor() const noexcept { return chol_lower_; }
  /// Symmetric square root of scale - delta delta'.
  const Mat& residual_root() const noexcept { return residual_root_; }

private:
  MultivariateSn() = default;
  void finish();

  Vec location_;
  Mat scale_;
  Vec alpha_;
  Vec delta_;
  Vec omega_diag_;
  Mat correlation_;
  Mat chol_lower_;
  double log_det_ = 0.0;
  Mat residual_root_;
};

/// Closure of SN under X = A' Y for full column rank A (N x q).
MultivariateSn linear_transform(const MultivariateSn& mv, const Mat& a);

/// Parameters of SN_{n x p}(M, V (x) Sigma, B) with derived quantities cached.
class MsnParams
{
public:
  /// Validates shapes (M, B: n x p; V: p x p; Sigma: n x n), positive
  /// definiteness, and admissibility of the implied delta.
  static MsnParams build(Mat m, Mat v, Mat sigma, Mat b);

  Eigen::Index n() const noexcept { return m_.rows(); }
  Eigen::Index p() const noexcept { return m_.cols(); }
  Eigen::Index dim() const noexcept { return m_.size(); }

  const Mat& M() const noexcept { return m_; }
  const SpdMat& V() const noexcept { return v_; }
  const SpdMat& Sigma() const noexcept { return sigma_; }
  const Mat& B() const noexcept { return b_; }

  const Mat& omega() const noexcept { return omega_; }        // V (x) Sigma
  const Vec& omega_scale() const noexcept { return omega_scale_; }  // diag of w = v (x) s
  const Mat& omega_bar() const noexcept { return omega_bar_; }
  const Vec& delta() const noexcept { return delta_; }

  /// The vec'd law; shares delta with this parameter set.
  const MultivariateSn& multivariate() const noexcept { return mv_; }

private:
  MsnParams(Mat m, SpdMat v, SpdMat sigma, Mat b);

  Mat m_;
  SpdMat v_;
  SpdMat sigma_;
  Mat b_;
  Mat omega_;
  Vec omega_scale_;
  Mat omega_bar_;
  Vec delta_;
  MultivariateSn mv_;
};

/// delta = vec(Sigma s^-1 B v^-1 V) / sqrt(1 + tr(B' Sigma_bar B V_bar)).
Vec delta_of(const MsnParams& params);

double density(const MsnParams& params, const Mat& y);
double log_density(const MsnParams& params, const Mat& y);

/// Matrix CF etr(i M'T - T' Sigma T V / 2) (1 + i tau(u)).
std::complex<double> cf(const MsnParams& params, const Mat& t);
CfLogPolar cf_log_polar(const MsnParams& params, const Mat& t);

Mat mean(const MsnParams& params);
/// E[vec Z vec Z'] (np x np).
Mat second_moment(const MsnParams& params);
Mat covariance(const MsnParams& params);

MultivariateSn to_multivariate(const MsnParams& params);

/// G G' / d + shift * I with standard normal G.
Mat random_spd(Eigen::Index d, Rng& rng, double shift = 0.5);
/// Random M (standard normal), V, Sigma (random_spd) and B (normal times skew).
MsnParams random_params(Eigen::Index n, Eigen::Index p, Rng& rng, double skew = 1.0);

/// Scalar law of entry (i, j), 0-based: (m_ij, v_jj sigma_ii, delta_{i + n j}).
UnivariateSnParams univariate_marginal(const MsnParams& params, Eigen::Index i, Eigen::Index j);

/// Scalar law of X_ij + X_kl.
UnivariateSnParams pairwise_sum_params(const MsnParams& params, Eigen::Index i, Eigen::Index j,
                                       Eigen::Index k, Eigen::Index l);

enum class SampleMethod
{
  Rejection,
  Additive,
};

const char* to_string(SampleMethod method);

/// Draws stored column-wise in vec order: draws.col(k) == vec(X_k).
struct SampleBatch
{
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Mat draws;
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::Additive;
  double acceptance_rate = 1.0;
  std::uint64_t proposals = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(draws.cols()); }
  Mat draw(Eigen::Index k) const { return unvec(draws.col(k), n, p); }
};

/// Sampling runs in fixed-size blocks, block b drawing from Rng(seed).split(b),
/// so output does not depend on the worker count.
inline constexpr Eigen::Index kSampleBlock = 1 << 14;

struct RejectionDraws
{
  Mat draws;
  std::uint64_t proposals = 0;
};

/// X = mu + U | {V < alpha' w^-1 U}; both U and V are redrawn on rejection.
RejectionDraws sample_rejection(const MultivariateSn& mv, Eigen::Index count, std::uint64_t seed,
                                unsigned workers = 0);
/// X = mu + delta |Z0| + W, W ~ N(0, Omega - delta delta').
Mat sample_additive(const MultivariateSn& mv, Eigen::Index count, std::uint64_t seed, unsigned workers = 0);

SampleBatch sample_rejection(const MsnParams& params, Eigen::Index count, std::uint64_t seed,
                             unsigned workers = 0);
SampleBatch sample_additive(const MsnParams& params, Eigen::Index count, std::uint64_t seed,
                            unsigned workers = 0);

/// Plain Gaussian draws N(location, root root').
Mat sample_normal(const Vec& location, const Mat& root, Eigen::Index count, std::uint64_t seed,
                  unsigned workers = 0);

}  // namespace msn
