#include "commands.hpp"

#include <sstream>

#include "msn/identity.hpp"
#include "msn/orders.hpp"

namespace msn::cli
{

namespace
{

[[noreturn]] void config_error(const std::string& what)
{
  throw Error(Errc::InvalidConfig, what);
}

std::string get_string(const json& j, const char* key)
{
  if (!j[key].is_string())
    config_error(std::string("config: \"") + key + "\" must be a string");
  return j[key].get<std::string>();
}

std::int64_t get_int(const json& j, const char* key, std::int64_t min)
{
  if (!j[key].is_number_integer())
    config_error(std::string("config: \"") + key + "\" must be an integer");
  const auto v = j[key].get<std::int64_t>();
  if (v < min)
    config_error(std::string("config: \"") + key + "\" must be at least " + std::to_string(min));
  return v;
}

bool get_bool(const json& j, const char* key)
{
  if (!j[key].is_boolean())
    config_error(std::string("config: \"") + key + "\" must be true or false");
  return j[key].get<bool>();
}

json estimate_json(const McEstimate& e)
{
  return {{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}, {"seed", e.seed}};
}

MsnParams load(const std::string& path, const char* what)
{
  if (path.empty())
    config_error(std::string("missing ") + what + " params file");
  return read_params_file(path);
}

}  // namespace

json RunConfig::to_json() const
{
  json j;
  j["command"] = command;
  if (!params.empty())
    j["params"] = params;
  if (!x.empty())
    j["x"] = x;
  if (!y.empty())
    j["y"] = y;
  if (!descriptor.empty())
    j["descriptor"] = descriptor;
  if (!output.empty())
    j["output"] = output;
  if (!format.empty())
    j["format"] = format;
  j["seed"] = resolved_seed();
  j["count"] = count;
  j["method"] = method;
  j["draws"] = draws;
  if (lambda_nodes)
    j["lambda_nodes"] = *lambda_nodes;
  if (mc_per_node)
    j["mc_per_node"] = *mc_per_node;
  if (!order.empty())
    j["order"] = order;
  j["evidence"] = evidence;
  j["quick"] = quick;
  j["workers"] = workers;
  if (!at.is_null())
    j["at"] = at;
  if (!t.is_null())
    j["t"] = t;
  return j;
}

void apply_config_json(RunConfig& cfg, const json& j)
{
  require_known_keys(j,
                     {"command", "params", "x", "y", "descriptor", "output", "format", "seed", "count", "method",
                      "draws", "lambda_nodes", "mc_per_node", "order", "evidence", "quick", "workers", "at", "t"},
                     "config");
  if (j.contains("command"))
    cfg.command = get_string(j, "command");
  if (j.contains("params"))
    cfg.params = get_string(j, "params");
  if (j.contains("x"))
    cfg.x = get_string(j, "x");
  if (j.contains("y"))
    cfg.y = get_string(j, "y");
  if (j.contains("descriptor"))
    cfg.descriptor = get_string(j, "descriptor");
  if (j.contains("output"))
    cfg.output = get_string(j, "output");
  if (j.contains("format"))
    cfg.format = get_string(j, "format");
  if (j.contains("seed"))
  {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      config_error("config: \"seed\" must be an unsigned 64-bit integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("count"))
    cfg.count = get_int(j, "count", 0);
  if (j.contains("method"))
    cfg.method = get_string(j, "method");
  if (j.contains("draws"))
    cfg.draws = get_int(j, "draws", 2);
  if (j.contains("lambda_nodes"))
    cfg.lambda_nodes = static_cast<int>(get_int(j, "lambda_nodes", 1));
  if (j.contains("mc_per_node"))
    cfg.mc_per_node = get_int(j, "mc_per_node", 2);
  if (j.contains("order"))
    cfg.order = get_string(j, "order");
  if (j.contains("evidence"))
    cfg.evidence = get_bool(j, "evidence");
  if (j.contains("quick"))
    cfg.quick = get_bool(j, "quick");
  if (j.contains("workers"))
    cfg.workers = static_cast<unsigned>(get_int(j, "workers", 0));
  if (j.contains("at"))
    cfg.at = j["at"];
  if (j.contains("t"))
    cfg.t = j["t"];
}

json report_header(const RunConfig& cfg)
{
  return {{"schema_version", kSchemaVersion},
          {"command", cfg.command},
          {"seed", cfg.resolved_seed()},
          {"config", cfg.to_json()}};
}

CommandOutput cmd_sample(RunConfig& cfg)
{
  const MsnParams params = load(cfg.params, "--params");
  if (cfg.count < 0)
    config_error("count must be nonnegative");
  if (cfg.format.empty())
    cfg.format = "csv";
  if (cfg.format != "csv" && cfg.format != "json")
    config_error("format must be csv or json");
  SampleBatch batch;
  if (cfg.method == "additive")
    batch = sample_additive(params, cfg.count, cfg.resolved_seed(), cfg.workers);
  else if (cfg.method == "rejection")
    batch = sample_rejection(params, cfg.count, cfg.resolved_seed(), cfg.workers);
  else
    config_error("method must be additive or rejection");

  CommandOutput out;
  out.report = report_header(cfg);
  out.report["n"] = params.n();
  out.report["p"] = params.p();
  out.report["count"] = cfg.count;
  out.report["method"] = to_string(batch.method);
  out.report["column_order"] = "vec";
  if (batch.method == SampleMethod::Rejection)
  {
    out.report["acceptance_rate"] = batch.acceptance_rate;
    out.report["proposals"] = batch.proposals;
  }
  if (cfg.format == "csv")
  {
    std::ostringstream csv;
    write_samples_csv(csv, batch);
    out.text = csv.str();
    out.csv = true;
  }
  else
  {
    json draws = json::array();
    for (Eigen::Index k = 0; k < batch.draws.cols(); ++k)
      draws.push_back(vector_to_json(batch.draws.col(k)));
    out.report["draws"] = std::move(draws);
  }
  return out;
}

CommandOutput cmd_density(RunConfig& cfg)
{
  const MsnParams params = load(cfg.params, "--params");
  if (cfg.at.is_null())
    config_error("density needs --at with a matrix or a list of matrices");
  // A list of matrices is an array whose first element is itself a matrix.
  const bool many = cfg.at.is_array() && !cfg.at.empty() && cfg.at[0].is_array() && !cfg.at[0].empty() &&
                    cfg.at[0][0].is_array();
  std::vector<Mat> points;
  if (many)
    for (const json& m : cfg.at)
      points.push_back(matrix_from_json(m, "at"));
  else
    points.push_back(matrix_from_json(cfg.at, "at"));

  json dens = json::array();
  json logs = json::array();
  for (const Mat& y : points)
  {
    if (y.rows() != params.n() || y.cols() != params.p())
      throw Error(Errc::ShapeMismatch, "density point must be n x p");
    const double ld = log_density(params, y);
    logs.push_back(ld);
    dens.push_back(std::exp(ld));
  }
  CommandOutput out;
  out.report = report_header(cfg);
  out.report["density"] = many ? dens : dens[0];
  out.report["log_density"] = many ? logs : logs[0];
  return out;
}

CommandOutput cmd_cf(RunConfig& cfg)
{
  const MsnParams params = load(cfg.params, "--params");
  if (cfg.t.is_null())
    config_error("cf needs --t with an n x p matrix");
  const Mat t = matrix_from_json(cfg.t, "t");
  if (t.rows() != params.n() || t.cols() != params.p())
    throw Error(Errc::ShapeMismatch, "cf argument must be n x p");
  const CfLogPolar lp = cf_log_polar(params, t);
  const std::complex<double> value = lp.value();
  CommandOutput out;
  out.report = report_header(cfg);
  out.report["re"] = value.real();
  out.report["im"] = value.imag();
  out.report["log_magnitude"] = lp.log_magnitude;
  out.report["phase"] = lp.phase;
  return out;
}

CommandOutput cmd_moments(RunConfig& cfg)
{
  const MsnParams params = load(cfg.params, "--params");
  CommandOutput out;
  out.report = report_header(cfg);
  out.report["mean"] = matrix_to_json(mean(params));
  out.report["second_moment"] = matrix_to_json(second_moment(params));
  out.report["covariance"] = matrix_to_json(covariance(params));
  out.report["delta"] = vector_to_json(params.delta());
  return out;
}

CommandOutput cmd_check_order(RunConfig& cfg)
{
  const MsnParams x = load(cfg.x, "--x");
  const MsnParams y = load(cfg.y, "--y");
  if (cfg.order.empty())
    config_error("check-order needs --order (st, cx, icx, uo, sm or dcx)");
  const OrderKind kind = parse_order(cfg.order);
  const OrderVerdict verdict = check_order(kind, x, y);

  CommandOutput out;
  out.report = report_header(cfg);
  out.report["verdict"] = verdict_to_json(verdict);
  if (cfg.evidence)
  {
    const FamilyKind fk = matching_family(kind);
    const FunctionFamily family = make_family(fk, x.n(), x.p(), cfg.resolved_seed());
    const EvidenceReport ev = mc_order_evidence(x, y, family, cfg.draws, cfg.resolved_seed(), cfg.workers);
    json e = evidence_to_json(ev);
    e["family"] = to_string(fk);
    e["draws"] = cfg.draws;
    e["contradicts_verdict"] = ev.contradicts(verdict);
    out.report["evidence"] = std::move(e);
  }
  return out;
}

CommandOutput cmd_verify_identity(RunConfig& cfg)
{
  if (cfg.descriptor.empty())
    config_error("verify-identity needs --descriptor");
  const json d = read_json_file(cfg.descriptor);
  require_known_keys(d, {"f", "x", "y", "lambda_nodes", "mc_per_node", "samples", "seed", "convergence_check"},
                     "descriptor");
  for (const char* key : {"f", "x", "y"})
    if (!d.contains(key))
      config_error(std::string("descriptor: missing \"") + key + "\"");
  const MsnParams x = params_from_json(d["x"]);
  const MsnParams y = params_from_json(d["y"]);
  if (x.n() != y.n() || x.p() != y.p())
    throw Error(Errc::ShapeMismatch, "descriptor: x and y have different shapes");
  const TestFunction f = function_from_json(d["f"], x.n(), x.p());

  if (!cfg.lambda_nodes)
    cfg.lambda_nodes = d.contains("lambda_nodes") ? static_cast<int>(get_int(d, "lambda_nodes", 1)) : 16;
  if (!cfg.mc_per_node)
    cfg.mc_per_node = d.contains("mc_per_node") ? get_int(d, "mc_per_node", 2) : 200000;
  if (!cfg.seed && d.contains("seed"))
  {
    if (!d["seed"].is_number_unsigned())
      config_error("descriptor: \"seed\" must be an unsigned 64-bit integer");
    cfg.seed = d["seed"].get<std::uint64_t>();
  }
  const std::int64_t samples = d.contains("samples") ? get_int(d, "samples", 2) : 4 * *cfg.mc_per_node;
  const bool convergence = d.contains("convergence_check") ? get_bool(d, "convergence_check") : true;
  const std::uint64_t seed = cfg.resolved_seed();

  const MultivariateSn& xm = x.multivariate();
  const MultivariateSn& ym = y.multivariate();
  const RhsResult rhs = rhs_estimate(f, xm, ym, *cfg.lambda_nodes, *cfg.mc_per_node, Rng(seed).split(1).seed(),
                                     cfg.workers);
  const McEstimate lhs = lhs_estimate(f, xm, ym, samples, Rng(seed).split(2).seed(), cfg.workers);
  const double combined = std::hypot(lhs.std_error, rhs.estimate.std_error);
  const double diff = lhs.value - rhs.estimate.value;
  const double z = McEstimate{diff, combined, 0, 0}.z_score();

  CommandOutput out;
  out.report = report_header(cfg);
  out.report["function"] = f.name;
  out.report["lhs"] = estimate_json(lhs);
  out.report["rhs"] = estimate_json(rhs.estimate);
  out.report["difference"] = diff;
  out.report["combined_std_error"] = combined;
  out.report["z"] = z;
  out.report["pass"] = std::abs(z) <= 3.0;
  out.report["lambda_nodes"] = *cfg.lambda_nodes;
  out.report["mc_per_node"] = *cfg.mc_per_node;
  out.report["lhs_samples"] = samples;
  json nodes = json::array();
  for (const auto& nd : rhs.nodes)
    nodes.push_back({{"lambda", nd.lambda},
                     {"weight", nd.weight},
                     {"smooth_term", estimate_json(nd.smooth_term)},
                     {"skew_term", estimate_json(nd.skew_term)}});
  out.report["nodes"] = std::move(nodes);
  if (convergence && *cfg.lambda_nodes >= 2)
  {
    const int half = *cfg.lambda_nodes / 2;
    const RhsResult coarse =
        rhs_estimate(f, xm, ym, half, *cfg.mc_per_node, Rng(seed).split(3).seed(), cfg.workers);
    const double dz = difference_z(rhs.estimate, coarse.estimate);
    out.report["convergence"] = {{"coarse_nodes", half},
                                 {"coarse_rhs", estimate_json(coarse.estimate)},
                                 {"difference", rhs.estimate.value - coarse.estimate.value},
                                 {"z", dz}};
  }
  if (d["f"].value("name", "") == "linear")
  {
    const Vec a = vec(matrix_from_json(d["f"]["coef"], "coef"));
    const double exact = linear_identity_value(a, xm, ym);
    out.report["closed_form"] = {{"value", exact}, {"rhs_z", rhs.estimate.z_score(exact)}};
  }
  return out;
}

}  // namespace msn::cli
