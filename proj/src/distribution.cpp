#include "msn/distribution.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "msn/parallel.hpp"
#include "msn/special.hpp"

namespace msn
{

namespace
{

constexpr double kAdmissibleBound = 1.0 - 1e-12;

void require(bool ok, Errc code, const std::string& what)
{
  if (!ok)
    throw Error(code, what);
}

Eigen::LLT<Mat> checked_llt(const Mat& m, const char* what)
{
  Eigen::LLT<Mat> llt(m);
  require(llt.info() == Eigen::Success, Errc::NotPositiveDefinite, std::string(what) + " is not positive definite");
  return llt;
}

}  // namespace

void UnivariateSnParams::validate() const
{
  require(std::isfinite(mu) && std::isfinite(sigma_sq) && std::isfinite(delta), Errc::NonFiniteValue,
          "univariate parameters must be finite");
  require(sigma_sq > 0.0, Errc::NotPositiveDefinite, "sigma_sq must be positive");
  require(delta * delta < sigma_sq, Errc::DegenerateSkew, "delta^2 must be below sigma_sq");
}

Vec delta_from_alpha(const Mat& omega, const Vec& alpha)
{
  require(omega.rows() == alpha.size(), Errc::ShapeMismatch, "delta_from_alpha: dimension mismatch");
  const CorrDecomposition cd = corr_decompose(omega);
  const Vec corr_alpha = cd.correlation * alpha;
  const double norm = std::sqrt(1.0 + alpha.dot(corr_alpha));
  return cd.scale_diag.cwiseProduct(corr_alpha) / norm;
}

Vec alpha_from_delta(const Mat& omega, const Vec& delta)
{
  require(omega.rows() == delta.size(), Errc::ShapeMismatch, "alpha_from_delta: dimension mismatch");
  const auto llt = checked_llt(omega, "scale matrix");
  const Vec solved = llt.solve(delta);
  const double s = delta.dot(solved);
  require(s < kAdmissibleBound, Errc::DegenerateSkew,
          "delta' Omega^-1 delta = " + std::to_string(s) + " is not below 1");
  const Vec w = omega.diagonal().cwiseSqrt();
  return w.cwiseProduct(solved) / std::sqrt(1.0 - s);
}

// ---------------------------------------------------------------------------
// MultivariateSn

MultivariateSn MultivariateSn::from_alpha(Vec location, Mat scale, Vec alpha)
{
  require(scale.rows() == location.size() && alpha.size() == location.size(), Errc::ShapeMismatch,
          "multivariate SN: location, scale and alpha dimensions differ");
  require(SpdMat::is_valid(scale), Errc::NotPositiveDefinite, "multivariate SN scale is not positive definite");
  MultivariateSn out;
  out.delta_ = delta_from_alpha(scale, alpha);
  out.location_ = std::move(location);
  out.scale_ = std::move(scale);
  out.alpha_ = std::move(alpha);
  out.finish();
  return out;
}

MultivariateSn MultivariateSn::from_delta(Vec location, Mat scale, Vec delta)
{
  require(scale.rows() == location.size() && delta.size() == location.size(), Errc::ShapeMismatch,
          "multivariate SN: location, scale and delta dimensions differ");
  require(SpdMat::is_valid(scale), Errc::NotPositiveDefinite, "multivariate SN scale is not positive definite");
  MultivariateSn out;
  out.alpha_ = alpha_from_delta(scale, delta);
  out.location_ = std::move(location);
  out.scale_ = std::move(scale);
  out.delta_ = std::move(delta);
  out.finish();
  return out;
}

void MultivariateSn::finish()
{
  require(location_.allFinite() && alpha_.allFinite() && delta_.allFinite(), Errc::NonFiniteValue,
          "multivariate SN parameters must be finite");
  const auto llt = checked_llt(scale_, "scale matrix");
  require(delta_.dot(llt.solve(delta_)) < kAdmissibleBound, Errc::DegenerateSkew,
          "delta' Omega^-1 delta is not below 1");
  chol_lower_ = llt.matrixL();
  log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
  const CorrDecomposition cd = corr_decompose(scale_);
  omega_diag_ = cd.scale_diag;
  correlation_ = cd.correlation;
  residual_root_ = symmetric_sqrt(scale_ - delta_ * delta_.transpose());
}

double MultivariateSn::log_density(const Vec& z) const
{
  require(z.size() == dim(), Errc::ShapeMismatch, "density point has wrong dimension");
  const Vec r = z - location_;
  const Vec y = chol_lower_.triangularView<Eigen::Lower>().solve(r);
  const double log_phi = -0.5 * y.squaredNorm() - 0.5 * log_det_ - static_cast<double>(dim()) * kLogSqrt2Pi;
  const double skew = alpha_.dot(r.cwiseQuotient(omega_diag_));
  return std::numbers::ln2 + log_phi + log_normal_cdf(skew);
}

namespace
{

CfLogPolar log_polar_from(double linear, double quadratic, double u)
{
  CfLogPolar out;
  double log_abs_factor = 0.0;  // log |1 + i tau(u)|
  double arg_factor = 0.0;
  if (std::abs(u) <= kTauMaxArgument)
  {
    const double t = tau(u);
    log_abs_factor = 0.5 * std::log1p(t * t);
    arg_factor = std::atan(t);
  }
  else
  {
    const double lt = log_tau_abs(u);
    log_abs_factor = lt + 0.5 * std::log1p(std::exp(-2.0 * lt));
    arg_factor = std::copysign(std::numbers::pi / 2 - std::atan(std::exp(-lt)), u);
  }
  out.log_magnitude = -0.5 * quadratic + log_abs_factor;
  out.phase = linear + arg_factor;
  return out;
}

std::complex<double> cf_value(double linear, double quadratic, double u)
{
  if (std::abs(u) <= kTauMaxArgument)
    return std::polar(std::exp(-0.5 * quadratic), linear) * std::complex<double>(1.0, tau(u));
  return log_polar_from(linear, quadratic, u).value();
}

}  // namespace

std::complex<double> MultivariateSn::cf(const Vec& t) const
{
  require(t.size() == dim(), Errc::ShapeMismatch, "CF argument has wrong dimension");
  return cf_value(location_.dot(t), t.dot(scale_ * t), delta_.dot(t));
}

CfLogPolar MultivariateSn::cf_log_polar(const Vec& t) const
{
  require(t.size() == dim(), Errc::ShapeMismatch, "CF argument has wrong dimension");
  return log_polar_from(location_.dot(t), t.dot(scale_ * t), delta_.dot(t));
}

Vec MultivariateSn::mean() const
{
  return location_ + kSqrt2OverPi * delta_;
}

Mat MultivariateSn::second_moment() const
{
  return scale_ + location_ * location_.transpose() +
         kSqrt2OverPi * (location_ * delta_.transpose() + delta_ * location_.transpose());
}

Mat MultivariateSn::covariance() const
{
  const Vec m = mean();
  return second_moment() - m * m.transpose();
}

MultivariateSn linear_transform(const MultivariateSn& mv, const Mat& a)
{
  require(a.rows() == mv.dim(), Errc::ShapeMismatch, "linear_transform: A must have N rows");
  require(a.cols() >= 1 && a.cols() <= a.rows(), Errc::RankDeficient, "linear_transform: need 1 <= q <= N");
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  require(qr.rank() == a.cols(), Errc::RankDeficient, "linear_transform: A is not of full column rank");

  const Mat omega_x = a.transpose() * mv.scale() * a;
  const Vec w_x = omega_x.diagonal().cwiseSqrt();
  const Mat b = mv.scale_diag().cwiseInverse().asDiagonal() * mv.scale() * a;
  const auto llt = checked_llt(omega_x, "transformed scale");
  const Mat omega_x_inv_bt = llt.solve(b.transpose());
  const Vec& alpha = mv.alpha();
  const double denom =
      std::sqrt(1.0 + alpha.dot((mv.correlation() - b * omega_x_inv_bt) * alpha));
  const Vec alpha_x = w_x.cwiseProduct(omega_x_inv_bt * alpha) / denom;

  MultivariateSn out = MultivariateSn::from_alpha(a.transpose() * mv.location(), omega_x, alpha_x);
  return out;
}

// ---------------------------------------------------------------------------
// MsnParams

MsnParams::MsnParams(Mat m, SpdMat v, SpdMat sigma, Mat b)
    : m_(std::move(m)),
      v_(std::move(v)),
      sigma_(std::move(sigma)),
      b_(std::move(b)),
      omega_(kron(v_.matrix(), sigma_.matrix())),
      mv_(MultivariateSn::from_alpha(vec(m_), omega_, vec(b_)))
{
  const CorrDecomposition cd = corr_decompose(omega_);
  omega_scale_ = cd.scale_diag;
  omega_bar_ = cd.correlation;
  delta_ = delta_of(*this);
}

MsnParams MsnParams::build(Mat m, Mat v, Mat sigma, Mat b)
{
  require(m.rows() >= 1 && m.cols() >= 1, Errc::ShapeMismatch, "M must be non-empty");
  const Eigen::Index n = m.rows();
  const Eigen::Index p = m.cols();
  require(b.rows() == n && b.cols() == p, Errc::ShapeMismatch,
          "B must be " + std::to_string(n) + "x" + std::to_string(p));
  require(v.rows() == p && v.cols() == p, Errc::ShapeMismatch, "V must be " + std::to_string(p) + "x" + std::to_string(p));
  require(sigma.rows() == n && sigma.cols() == n, Errc::ShapeMismatch,
          "Sigma must be " + std::to_string(n) + "x" + std::to_string(n));
  require(m.allFinite() && b.allFinite(), Errc::NonFiniteValue, "M and B must be finite");
  SpdMat vs(std::move(v));
  SpdMat ss(std::move(sigma));
  return MsnParams(std::move(m), std::move(vs), std::move(ss), std::move(b));
}

Vec delta_of(const MsnParams& params)
{
  const Mat& v = params.V().matrix();
  const Mat& s = params.Sigma().matrix();
  const Mat& b = params.B();
  const CorrDecomposition vd = corr_decompose(v);
  const CorrDecomposition sd = corr_decompose(s);
  const double denom =
      std::sqrt(1.0 + (b.transpose() * sd.correlation * b * vd.correlation).trace());
  const Mat top = s * sd.scale_diag.cwiseInverse().asDiagonal() * b * vd.scale_diag.cwiseInverse().asDiagonal() * v;
  return vec(top) / denom;
}

double log_density(const MsnParams& params, const Mat& y)
{
  require(y.rows() == params.n() && y.cols() == params.p(), Errc::ShapeMismatch, "density point has wrong shape");
  const auto n = static_cast<double>(params.n());
  const auto p = static_cast<double>(params.p());
  const auto v_llt = checked_llt(params.V().matrix(), "V");
  const auto s_llt = checked_llt(params.Sigma().matrix(), "Sigma");
  const Mat r = y - params.M();
  // etr(-V^{-1} R' Sigma^{-1} R / 2)
  const Mat s_inv_r = s_llt.solve(r);
  const Mat v_inv_rt_s_inv_r = v_llt.solve(r.transpose() * s_inv_r);
  const double quad = v_inv_rt_s_inv_r.trace();
  const double log_det_v = 2.0 * Mat(v_llt.matrixL()).diagonal().array().log().sum();
  const double log_det_s = 2.0 * Mat(s_llt.matrixL()).diagonal().array().log().sum();
  const double log_phi = -n * p * kLogSqrt2Pi - 0.5 * n * log_det_v - 0.5 * p * log_det_s - 0.5 * quad;

  const Vec s_scale = params.Sigma().matrix().diagonal().cwiseSqrt();
  const Vec v_scale = params.V().matrix().diagonal().cwiseSqrt();
  const double skew =
      (params.B().cwiseProduct(s_scale.cwiseInverse().asDiagonal() * r * v_scale.cwiseInverse().asDiagonal())).sum();
  return std::numbers::ln2 + log_phi + log_normal_cdf(skew);
}

double density(const MsnParams& params, const Mat& y)
{
  return std::exp(log_density(params, y));
}

namespace
{

struct MatrixCfTerms
{
  double linear;
  double quadratic;
  double u;
};

MatrixCfTerms matrix_cf_terms(const MsnParams& params, const Mat& t)
{
  require(t.rows() == params.n() && t.cols() == params.p(), Errc::ShapeMismatch, "CF argument has wrong shape");
  const Mat& v = params.V().matrix();
  const Mat& s = params.Sigma().matrix();
  const Mat& b = params.B();
  const CorrDecomposition vd = corr_decompose(v);
  const CorrDecomposition sd = corr_decompose(s);
  const double denom = std::sqrt(1.0 + (b.transpose() * sd.correlation * b * vd.correlation).trace());
  MatrixCfTerms out;
  out.linear = (params.M().transpose() * t).trace();
  out.quadratic = (t.transpose() * s * t * v).trace();
  out.u = (v * vd.scale_diag.cwiseInverse().asDiagonal() * b.transpose() * sd.scale_diag.cwiseInverse().asDiagonal() *
           s * t)
              .trace() /
          denom;
  return out;
}

}  // namespace

std::complex<double> cf(const MsnParams& params, const Mat& t)
{
  const auto terms = matrix_cf_terms(params, t);
  return cf_value(terms.linear, terms.quadratic, terms.u);
}

CfLogPolar cf_log_polar(const MsnParams& params, const Mat& t)
{
  const auto terms = matrix_cf_terms(params, t);
  return log_polar_from(terms.linear, terms.quadratic, terms.u);
}

Mat mean(const MsnParams& params)
{
  return unvec(vec(params.M()) + kSqrt2OverPi * params.delta(), params.n(), params.p());
}

Mat second_moment(const MsnParams& params)
{
  const Vec mu = vec(params.M());
  const Vec& d = params.delta();
  return params.omega() + mu * mu.transpose() + kSqrt2OverPi * (mu * d.transpose() + d * mu.transpose());
}

Mat covariance(const MsnParams& params)
{
  const Vec m = vec(mean(params));
  return second_moment(params) - m * m.transpose();
}

MultivariateSn to_multivariate(const MsnParams& params)
{
  return params.multivariate();
}

namespace
{

void check_index(const MsnParams& params, Eigen::Index i, Eigen::Index j)
{
  require(i >= 0 && i < params.n() && j >= 0 && j < params.p(), Errc::IndexOutOfRange,
          "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside " + std::to_string(params.n()) + "x" +
              std::to_string(params.p()));
}

}  // namespace

UnivariateSnParams univariate_marginal(const MsnParams& params, Eigen::Index i, Eigen::Index j)
{
  check_index(params, i, j);
  const Eigen::Index k = i + params.n() * j;
  return UnivariateSnParams{params.M()(i, j), params.V()(j, j) * params.Sigma()(i, i), params.delta()(k)};
}

UnivariateSnParams pairwise_sum_params(const MsnParams& params, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                                       Eigen::Index l)
{
  check_index(params, i, j);
  check_index(params, k, l);
  require(!(i == k && j == l), Errc::IndexOutOfRange, "pairwise_sum_params needs distinct entries");
  const Eigen::Index a = i + params.n() * j;
  const Eigen::Index c = k + params.n() * l;
  const double cross = params.V()(j, l) * params.Sigma()(i, k);
  return UnivariateSnParams{params.M()(i, j) + params.M()(k, l),
                            params.V()(j, j) * params.Sigma()(i, i) + params.V()(l, l) * params.Sigma()(k, k) +
                                2.0 * cross,
                            params.delta()(a) + params.delta()(c)};
}

const char* to_string(SampleMethod method)
{
  return method == SampleMethod::Rejection ? "rejection" : "additive";
}

// ---------------------------------------------------------------------------
// Samplers

RejectionDraws sample_rejection(const MultivariateSn& mv, Eigen::Index count, std::uint64_t seed, unsigned workers)
{
  require(count >= 0, Errc::InvalidConfig, "sample count must be nonnegative");
  const Eigen::Index dim = mv.dim();
  RejectionDraws out;
  out.draws.resize(dim, count);
  const Vec c = mv.alpha().cwiseQuotient(mv.scale_diag());
  const Mat& l = mv.scale_factor();
  const Rng master(seed);
  const auto blocks = static_cast<std::size_t>((count + kSampleBlock - 1) / kSampleBlock);
  std::vector<std::uint64_t> proposals(blocks, 0);

  for_each_block(count, kSampleBlock, workers, [&](std::uint64_t b, Eigen::Index begin, Eigen::Index end) {
    Rng rng = master.split(b);
    Vec z(dim);
    Vec u(dim);
    std::uint64_t tried = 0;
    for (Eigen::Index k = begin; k < end;)
    {
      rng.fill_normal(z);
      u.noalias() = l.triangularView<Eigen::Lower>() * z;
      const double v = rng.normal();
      ++tried;
      if (v < c.dot(u))
      {
        out.draws.col(k) = mv.location() + u;
        ++k;
      }
    }
    proposals[b] = tried;
  });
  for (auto t : proposals)
    out.proposals += t;
  return out;
}

Mat sample_additive(const MultivariateSn& mv, Eigen::Index count, std::uint64_t seed, unsigned workers)
{
  require(count >= 0, Errc::InvalidConfig, "sample count must be nonnegative");
  const Eigen::Index dim = mv.dim();
  Mat out(dim, count);
  const Rng master(seed);
  const Mat& root = mv.residual_root();

  for_each_block(count, kSampleBlock, workers, [&](std::uint64_t b, Eigen::Index begin, Eigen::Index end) {
    Rng rng = master.split(b);
    const Eigen::Index len = end - begin;
    Mat z(dim, len);
    Vec half(len);
    for (Eigen::Index k = 0; k < len; ++k)
    {
      half(k) = std::abs(rng.normal());
      rng.fill_normal(z.col(k));
    }
    auto block = out.middleCols(begin, len);
    block.noalias() = root * z;
    block += mv.delta() * half.transpose();
    block.colwise() += mv.location();
  });
  return out;
}

Mat sample_normal(const Vec& location, const Mat& root, Eigen::Index count, std::uint64_t seed, unsigned workers)
{
  require(count >= 0, Errc::InvalidConfig, "sample count must be nonnegative");
  const Eigen::Index dim = location.size();
  Mat out(dim, count);
  const Rng master(seed);
  for_each_block(count, kSampleBlock, workers, [&](std::uint64_t b, Eigen::Index begin, Eigen::Index end) {
    Rng rng = master.split(b);
    const Eigen::Index len = end - begin;
    Mat z(dim, len);
    for (Eigen::Index k = 0; k < len; ++k)
      rng.fill_normal(z.col(k));
    auto block = out.middleCols(begin, len);
    block.noalias() = root * z;
    block.colwise() += location;
  });
  return out;
}

SampleBatch sample_rejection(const MsnParams& params, Eigen::Index count, std::uint64_t seed, unsigned workers)
{
  RejectionDraws r = sample_rejection(params.multivariate(), count, seed, workers);
  SampleBatch batch;
  batch.n = params.n();
  batch.p = params.p();
  batch.draws = std::move(r.draws);
  batch.seed = seed;
  batch.method = SampleMethod::Rejection;
  batch.proposals = r.proposals;
  batch.acceptance_rate = r.proposals > 0 ? static_cast<double>(count) / static_cast<double>(r.proposals) : 1.0;
  return batch;
}

SampleBatch sample_additive(const MsnParams& params, Eigen::Index count, std::uint64_t seed, unsigned workers)
{
  SampleBatch batch;
  batch.n = params.n();
  batch.p = params.p();
  batch.draws = sample_additive(params.multivariate(), count, seed, workers);
  batch.seed = seed;
  batch.method = SampleMethod::Additive;
  batch.proposals = static_cast<std::uint64_t>(count);
  return batch;
}

Mat random_spd(Eigen::Index d, Rng& rng, double shift)
{
  Mat g(d, d);
  for (Eigen::Index k = 0; k < g.size(); ++k)
    g(k) = rng.normal();
  Mat a = g * g.transpose() / static_cast<double>(d);
  a.diagonal().array() += shift;
  return 0.5 * (a + a.transpose());
}

MsnParams random_params(Eigen::Index n, Eigen::Index p, Rng& rng, double skew)
{
  Mat m(n, p), b(n, p);
  for (Eigen::Index k = 0; k < m.size(); ++k)
    m(k) = rng.normal();
  for (Eigen::Index k = 0; k < b.size(); ++k)
    b(k) = skew * rng.normal();
  Mat v = random_spd(p, rng);
  Mat sigma = random_spd(n, rng);
  return MsnParams::build(std::move(m), std::move(v), std::move(sigma), std::move(b));
}

}  // namespace msn
