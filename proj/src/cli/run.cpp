#include <filesystem>
#include <limits>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "msn/cli.hpp"

namespace msn
{

namespace
{

int exit_code_for(Errc code)
{
  switch (code)
  {
    case Errc::MixturePdFailure:
    case Errc::NonFiniteValue:
    case Errc::ArgumentTooLarge:
    case Errc::RankDeficient: return kExitNumeric;
    default: return kExitConfig;
  }
}

void emit(const cli::RunConfig& cfg, const cli::CommandOutput& result, std::ostream& out)
{
  const std::string report = result.report.dump(2) + "\n";
  if (cfg.output.empty())
  {
    out << (result.csv ? result.text : report);
    return;
  }
  if (result.csv)
  {
    write_file_atomic(cfg.output, result.text);
    write_file_atomic(cfg.output + ".meta.json", report);
  }
  else
  {
    write_file_atomic(cfg.output, report);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Matrix variate skew-normal toolkit"};
  app.name("msn");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output, format;
  unsigned workers = 0;
  auto* o_config = app.add_option("--config", config_path, "RunConfig JSON; flags override its values");
  auto* o_seed = app.add_option("--seed", seed, "Master seed (default 0xC0FFEE)");
  auto* o_output = app.add_option("-o,--output", output, "Output file (default: standard output)");
  auto* o_format = app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* o_workers = app.add_option("--workers", workers, "Worker threads (0: all cores)");

  std::string params, x, y, descriptor, method, order, at, t;
  std::int64_t count = 0, draws = 0, mc_per_node = 0;
  int lambda_nodes = 0;

  auto* sample = app.add_subcommand("sample", "Draw samples (CSV in vec column order)");
  auto* s_params = sample->add_option("--params", params, "Parameter JSON file");
  auto* s_count = sample->add_option("--count", count, "Number of draws (default 1000)")->check(CLI::NonNegativeNumber);
  auto* s_method =
      sample->add_option("--method", method, "additive or rejection")->check(CLI::IsMember({"additive", "rejection"}));

  auto* density = app.add_subcommand("density", "Evaluate the density");
  auto* d_params = density->add_option("--params", params, "Parameter JSON file");
  auto* d_at = density->add_option("--at", at, "JSON matrix or list of matrices");

  auto* cf = app.add_subcommand("cf", "Evaluate the characteristic function");
  auto* c_params = cf->add_option("--params", params, "Parameter JSON file");
  auto* c_t = cf->add_option("--t", t, "JSON n x p matrix");

  auto* moments = app.add_subcommand("moments", "Mean, second moment and covariance of vec X");
  auto* m_params = moments->add_option("--params", params, "Parameter JSON file");

  auto* check = app.add_subcommand("check-order", "Decide a stochastic order between X and Y");
  auto* k_x = check->add_option("--x", x, "Parameter JSON file for X");
  auto* k_y = check->add_option("--y", y, "Parameter JSON file for Y");
  auto* k_order = check->add_option("--order", order, "st, cx, icx, uo, sm or dcx");
  auto* k_evidence = check->add_flag("--evidence", "Also run Monte Carlo evidence over the matching family");
  auto* k_draws = check->add_option("--draws", draws, "Draws per function for --evidence (default 100000)")
                      ->check(CLI::Range(std::int64_t{2}, std::numeric_limits<std::int64_t>::max()));

  auto* verify = app.add_subcommand("verify-identity", "Estimate both sides of the expectation identity");
  auto* v_desc = verify->add_option("--descriptor", descriptor, "Experiment descriptor JSON");
  auto* v_nodes = verify->add_option("--lambda-nodes", lambda_nodes, "Gauss-Legendre nodes (default 16)")
                      ->check(CLI::PositiveNumber);
  auto* v_mc = verify->add_option("--mc-per-node", mc_per_node, "Draws per node (default 200000)")
                   ->check(CLI::Range(std::int64_t{2}, std::numeric_limits<std::int64_t>::max()));

  auto* selftest = app.add_subcommand("selftest", "Run the invariant battery");
  auto* q_quick = selftest->add_flag("--quick", "Reduced battery");

  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  cli::RunConfig cfg;
  try
  {
    if (o_config->count())
      cli::apply_config_json(cfg, read_json_file(config_path));
    if (!app.get_subcommands().empty())
    {
      const std::string name = app.get_subcommands().front()->get_name();
      if (!cfg.command.empty() && cfg.command != name)
        throw Error(Errc::InvalidConfig, "config command \"" + cfg.command + "\" conflicts with " + name);
      cfg.command = name;
    }
    if (o_seed->count())
      cfg.seed = seed;
    if (o_output->count())
      cfg.output = output;
    if (o_format->count())
      cfg.format = format;
    if (o_workers->count())
      cfg.workers = workers;
    for (auto* o : {s_params, d_params, c_params, m_params})
      if (o->count())
        cfg.params = params;
    if (s_count->count())
      cfg.count = count;
    if (s_method->count())
      cfg.method = method;
    if (d_at->count())
      cfg.at = json::parse(at);
    if (c_t->count())
      cfg.t = json::parse(t);
    if (k_x->count())
      cfg.x = x;
    if (k_y->count())
      cfg.y = y;
    if (k_order->count())
      cfg.order = order;
    if (k_evidence->count())
      cfg.evidence = true;
    if (k_draws->count())
      cfg.draws = draws;
    if (v_desc->count())
      cfg.descriptor = descriptor;
    if (v_nodes->count())
      cfg.lambda_nodes = lambda_nodes;
    if (v_mc->count())
      cfg.mc_per_node = mc_per_node;
    if (q_quick->count())
      cfg.quick = true;

    cli::CommandOutput result;
    if (cfg.command == "sample")
      result = cli::cmd_sample(cfg);
    else if (cfg.command == "density")
      result = cli::cmd_density(cfg);
    else if (cfg.command == "cf")
      result = cli::cmd_cf(cfg);
    else if (cfg.command == "moments")
      result = cli::cmd_moments(cfg);
    else if (cfg.command == "check-order")
      result = cli::cmd_check_order(cfg);
    else if (cfg.command == "verify-identity")
      result = cli::cmd_verify_identity(cfg);
    else if (cfg.command == "selftest")
      result = cli::cmd_selftest(cfg, err);
    else if (cfg.command.empty())
    {
      err << app.help();
      return kExitConfig;
    }
    else
      throw Error(Errc::InvalidConfig, "unknown command \"" + cfg.command + "\"");

    emit(cfg, result, out);
    return result.exit_code;
  }
  catch (const MixtureError& e)
  {
    err << json{{"error", errc_name(e.code())}, {"message", e.what()}, {"lambda", e.lambda()}}.dump() << "\n";
    return kExitNumeric;
  }
  catch (const Error& e)
  {
    err << json{{"error", errc_name(e.code())}, {"message", e.what()}}.dump() << "\n";
    return exit_code_for(e.code());
  }
  catch (const json::exception& e)
  {
    err << json{{"error", "InvalidConfig"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  }
  catch (const std::filesystem::filesystem_error& e)
  {
    err << json{{"error", "InvalidConfig"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  }
}

}  // namespace msn
