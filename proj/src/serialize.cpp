#include "msn/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace msn
{

namespace
{

[[noreturn]] void config_error(const std::string& what)
{
  throw Error(Errc::InvalidConfig, what);
}

}  // namespace

std::string format_double(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json matrix_to_json(const Mat& m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, const std::string& what)
{
  if (!j.is_array() || j.empty())
    config_error(what + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    config_error(what + " rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
  {
    if (!j[i].is_array() || j[i].size() != cols)
      config_error(what + " is ragged at row " + std::to_string(i + 1));
    for (std::size_t c = 0; c < cols; ++c)
    {
      if (!j[i][c].is_number())
        config_error(what + " entry (" + std::to_string(i + 1) + "," + std::to_string(c + 1) + ") is not a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  if (!m.allFinite())
    config_error(what + " has non-finite entries");
  return m;
}

void require_known_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what)
{
  if (!j.is_object())
    config_error(what + " must be a JSON object");
  for (const auto& item : j.items())
  {
    bool known = false;
    for (const char* key : allowed)
      known = known || item.key() == key;
    if (!known)
      config_error(what + ": unknown key \"" + item.key() + "\"");
  }
}

json params_to_json(const MsnParams& params)
{
  return json{{"n", params.n()},
              {"p", params.p()},
              {"M", matrix_to_json(params.M())},
              {"V", matrix_to_json(params.V().matrix())},
              {"Sigma", matrix_to_json(params.Sigma().matrix())},
              {"B", matrix_to_json(params.B())}};
}

MsnParams params_from_json(const json& j)
{
  require_known_keys(j, {"n", "p", "M", "V", "Sigma", "B"}, "params");
  for (const char* key : {"n", "p", "M", "V", "Sigma", "B"})
    if (!j.contains(key))
      config_error(std::string("params: missing key \"") + key + "\"");
  if (!j["n"].is_number_integer() || !j["p"].is_number_integer() || j["n"].get<long long>() < 1 ||
      j["p"].get<long long>() < 1)
    config_error("params: n and p must be positive integers");
  const auto n = static_cast<Eigen::Index>(j["n"].get<long long>());
  const auto p = static_cast<Eigen::Index>(j["p"].get<long long>());
  Mat m = matrix_from_json(j["M"], "M");
  Mat v = matrix_from_json(j["V"], "V");
  Mat s = matrix_from_json(j["Sigma"], "Sigma");
  Mat b = matrix_from_json(j["B"], "B");
  if (m.rows() != n || m.cols() != p)
    throw Error(Errc::ShapeMismatch, "M is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                         ", expected n x p = " + std::to_string(n) + "x" + std::to_string(p));
  return MsnParams::build(std::move(m), std::move(v), std::move(s), std::move(b));
}

json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    config_error("cannot open " + path);
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    config_error(path + ": malformed JSON (" + e.what() + ")");
  }
}

MsnParams read_params_file(const std::string& path)
{
  return params_from_json(read_json_file(path));
}

void write_samples_csv(std::ostream& out, const SampleBatch& batch)
{
  for (Eigen::Index j = 0; j < batch.p; ++j)
    for (Eigen::Index i = 0; i < batch.n; ++i)
      out << (i == 0 && j == 0 ? "" : ",") << "x_" << i + 1 << "_" << j + 1;
  out << '\n';
  for (Eigen::Index k = 0; k < batch.draws.cols(); ++k)
  {
    for (Eigen::Index r = 0; r < batch.draws.rows(); ++r)
      out << (r == 0 ? "" : ",") << format_double(batch.draws(r, k));
    out << '\n';
  }
}

void write_file_atomic(const std::string& path, const std::string& contents)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      config_error("cannot write " + path);
    out << contents;
    out.flush();
    if (!out)
    {
      std::filesystem::remove(tmp);
      config_error("write failed for " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

Vec vector_from_json(const json& j, const std::string& what)
{
  if (!j.is_array() || j.empty())
    config_error(what + " must be a non-empty array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
  {
    if (!j[k].is_number())
      config_error(what + " entry " + std::to_string(k + 1) + " is not a number");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  if (!v.allFinite())
    config_error(what + " has non-finite entries");
  return v;
}

json vector_to_json(const Vec& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

namespace
{

double number_or(const json& j, const char* key, double fallback)
{
  if (!j.contains(key))
    return fallback;
  if (!j[key].is_number())
    config_error(std::string("function: \"") + key + "\" must be a number");
  return j[key].get<double>();
}

void require_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const std::string& what)
{
  if (m.rows() != rows || m.cols() != cols)
    throw Error(Errc::ShapeMismatch, what + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                         ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

TestFunction function_from_json(const json& j, Eigen::Index n, Eigen::Index p)
{
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    config_error("function: expected an object with a string \"name\"");
  const std::string name = j["name"].get<std::string>();
  const Eigen::Index d = n * p;

  if (name == "linear")
  {
    require_known_keys(j, {"name", "coef"}, "function linear");
    if (!j.contains("coef"))
      config_error("function linear: missing \"coef\"");
    Mat coef = matrix_from_json(j["coef"], "coef");
    require_shape(coef, n, p, "coef");
    return linear_function(coef);
  }
  if (name == "quadratic")
  {
    require_known_keys(j, {"name", "Q", "b", "c"}, "function quadratic");
    if (!j.contains("Q"))
      config_error("function quadratic: missing \"Q\"");
    Mat q = matrix_from_json(j["Q"], "Q");
    require_shape(q, d, d, "Q");
    Vec b = j.contains("b") ? vector_from_json(j["b"], "b") : Vec::Zero(d);
    if (b.size() != d)
      throw Error(Errc::ShapeMismatch, "b must have length np");
    return quadratic_function(n, p, q, b, number_or(j, "c", 0.0));
  }
  if (name == "tanh")
  {
    require_known_keys(j, {"name", "a", "scale", "shift"}, "function tanh");
    if (!j.contains("a"))
      config_error("function tanh: missing \"a\"");
    Vec a = vector_from_json(j["a"], "a");
    return tanh_function(n, p, a, number_or(j, "scale", 1.0), number_or(j, "shift", 0.0));
  }
  if (name == "product")
  {
    require_known_keys(j, {"name", "entries", "coef"}, "function product");
    const json& e = j.contains("entries") ? j["entries"] : json();
    if (!e.is_array() || e.size() != 2 || !e[0].is_array() || !e[1].is_array() || e[0].size() != 2 ||
        e[1].size() != 2)
      config_error("function product: \"entries\" must be [[i, j], [k, l]]");
    auto idx = [](const json& v) {
      if (!v.is_number_integer())
        config_error("function product: entries must be integers");
      return static_cast<Eigen::Index>(v.get<long long>()) - 1;
    };
    return product_function(n, p, idx(e[0][0]), idx(e[0][1]), idx(e[1][0]), idx(e[1][1]),
                            number_or(j, "coef", 1.0));
  }
  if (name == "polynomial")
  {
    require_known_keys(j, {"name", "terms"}, "function polynomial");
    if (!j.contains("terms") || !j["terms"].is_array())
      config_error("function polynomial: \"terms\" must be an array");
    std::vector<PolynomialTerm> terms;
    for (const json& t : j["terms"])
    {
      require_known_keys(t, {"coef", "exponents"}, "polynomial term");
      PolynomialTerm term;
      term.coef = number_or(t, "coef", 1.0);
      if (!t.contains("exponents"))
        config_error("polynomial term: missing \"exponents\"");
      const Mat e = matrix_from_json(t["exponents"], "exponents");
      require_shape(e, n, p, "exponents");
      if ((e.array() < 0.0).any() || (e.array() != e.array().round()).any())
        config_error("polynomial term: exponents must be nonnegative integers");
      term.exponents = e.cast<int>();
      terms.push_back(std::move(term));
    }
    return polynomial_function(n, p, std::move(terms));
  }
  if (name == "trace")
  {
    require_known_keys(j, {"name"}, "function trace");
    return trace_function(n, p);
  }
  if (name == "frobenius_sq")
  {
    require_known_keys(j, {"name"}, "function frobenius_sq");
    return frobenius_sq_function(n, p);
  }
  if (name == "constant")
  {
    require_known_keys(j, {"name", "c"}, "function constant");
    return constant_function(n, p, number_or(j, "c", 0.0));
  }
  config_error("function: unknown name \"" + name + "\"");
}

}  // namespace msn
