#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "msn/distribution.hpp"
#include "msn/test_function.hpp"

namespace msn
{

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Row-major nested arrays. Throws InvalidConfig on ragged or non-numeric input.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, const std::string& what);

/// {"n", "p", "M", "V", "Sigma", "B"}; unknown keys are rejected.
json params_to_json(const MsnParams& params);
MsnParams params_from_json(const json& j);

Vec vector_from_json(const json& j, const std::string& what);
json vector_to_json(const Vec& v);

/// Builds a built-in test function for n x p arguments from
///   {"name": "linear", "coef": [[...]]}
///   {"name": "quadratic", "Q": [[...]], "b": [...], "c": 0}
///   {"name": "tanh", "a": [...], "scale": 1, "shift": 0}
///   {"name": "product", "entries": [[i, j], [k, l]], "coef": 1}   (1-based)
///   {"name": "polynomial", "terms": [{"coef": c, "exponents": [[...]]}, ...]}
///   {"name": "trace"}, {"name": "frobenius_sq"}, {"name": "constant", "c": 0}
TestFunction function_from_json(const json& j, Eigen::Index n, Eigen::Index p);

MsnParams read_params_file(const std::string& path);
json read_json_file(const std::string& path);

/// Rejects keys outside `allowed`.
void require_known_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what);

/// Header x_1_1, x_2_1, ... (1-based, vec order) then one row per draw.
void write_samples_csv(std::ostream& out, const SampleBatch& batch);

/// Writes text to path via a temporary file and rename, so a failure never
/// leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string format_double(double x);

}  // namespace msn
