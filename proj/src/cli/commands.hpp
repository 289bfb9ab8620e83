#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "msn/serialize.hpp"

namespace msn::cli
{

/// Resolved run configuration. Every report embeds to_json() of it, and the
/// same object fed back through --config reproduces the run.
struct RunConfig
{
  std::string command;
  std::string params;
  std::string x;
  std::string y;
  std::string descriptor;
  std::string output;  // empty: standard output
  std::string format;  // json or csv; empty: command default
  std::optional<std::uint64_t> seed;
  std::int64_t count = 1000;
  std::string method = "additive";
  std::int64_t draws = 100000;
  std::optional<int> lambda_nodes;
  std::optional<std::int64_t> mc_per_node;
  std::string order;
  bool evidence = false;
  bool quick = false;
  unsigned workers = 0;
  json at;  // density evaluation point(s)
  json t;   // CF argument

  std::uint64_t resolved_seed() const { return seed.value_or(kDefaultSeed); }
  json to_json() const;
};

/// Fail-closed: unknown keys and wrong types raise InvalidConfig.
void apply_config_json(RunConfig& cfg, const json& j);

struct CommandOutput
{
  json report;
  std::string text;  // CSV body when the format is csv
  bool csv = false;
  int exit_code = 0;
};

json report_header(const RunConfig& cfg);

CommandOutput cmd_sample(RunConfig& cfg);
CommandOutput cmd_density(RunConfig& cfg);
CommandOutput cmd_cf(RunConfig& cfg);
CommandOutput cmd_moments(RunConfig& cfg);
CommandOutput cmd_check_order(RunConfig& cfg);
CommandOutput cmd_verify_identity(RunConfig& cfg);
CommandOutput cmd_selftest(RunConfig& cfg, std::ostream& progress);

}  // namespace msn::cli
