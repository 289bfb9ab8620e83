#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msn
{

enum class Errc
{
  ShapeMismatch,
  NotSymmetric,
  NotPositiveDefinite,
  NonPositiveDiagonal,
  DimensionTooLarge,
  DegenerateSkew,
  ArgumentTooLarge,
  RankDeficient,
  IndexOutOfRange,
  NonFiniteValue,
  MixturePdFailure,
  InvalidConfig,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
  {
  }

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

/// Raised when the interpolated law of the expectation identity is not a
/// valid skew-normal law at some lambda.
class MixtureError : public Error
{
public:
  MixtureError(double lambda, const std::string& what)
      : Error(Errc::MixturePdFailure, what), lambda_(lambda)
  {
  }

  double lambda() const noexcept { return lambda_; }

private:
  double lambda_;
};

inline std::string_view errc_name(Errc code)
{
  switch (code)
  {
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::DegenerateSkew: return "DegenerateSkew";
    case Errc::ArgumentTooLarge: return "ArgumentTooLarge";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::MixturePdFailure: return "MixturePdFailure";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace msn
