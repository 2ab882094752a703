// rrm: command-line front end for the bandwidth allocation and scheduling library.
//
//   rrm allocate --config cfg.json --out alloc.json
//   rrm schedule --config cfg.json
//   rrm joint    --config cfg.json --lambda 1530
//   rrm sweep    --config cfg.json --mode joint --out sweep.csv
//   rrm validate --level fast
//
// Exit codes: 0 success, 2 config error, 3 infeasible problem, 4 validation failure.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rrm/bandwidth.hpp"
#include "rrm/config.hpp"
#include "rrm/joint.hpp"
#include "rrm/kernels.hpp"
#include "rrm/scheduling.hpp"
#include "rrm/sim.hpp"
#include "rrm/validate.hpp"

#ifndef RRM_VERSION
#define RRM_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace rrm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitValidation = 4;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("RRM_LOG");
    const std::string v = env ? env : "warn";
    if (v == "error") return LogLevel::error;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) std::cerr << "[rrm " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<int> trials;
  std::optional<std::string> mode;
  bool dump_config = false;
};

config::RunConfig resolve(const CommonOptions& o) {
  config::RunConfig cfg = o.config_path.empty() ? config::RunConfig{} : config::load_file(o.config_path);
  config::Overrides ov;
  ov.seed = o.seed;
  ov.lambda = o.lambda;
  ov.trials = o.trials;
  if (o.mode) ov.mode = config::parse_mode(*o.mode);
  config::apply(cfg, ov);
  return cfg;
}

json manifest(const std::string& command, const config::RunConfig& cfg) {
  return {{"command", command},
          {"config_digest", config::digest(config::dump(cfg))},
          {"seed", cfg.scenario.rng_seed},
          {"tool_version", RRM_VERSION},
          {"timestamp", utc_timestamp()},
          {"kernels", std::string(kernels::active().name)}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << text;
  log(LogLevel::info, "wrote " + path);
}

json allocation_rows(std::span<const Device> devices, const SystemParams& p, const Allocation& a) {
  json rows = json::array();
  for (std::size_t k = 0; k < devices.size(); ++k) {
    rows.push_back({{"id", devices[k].id},
                    {"power_gain", devices[k].power_gain()},
                    {"allowed_time", allowed_upload_time(devices[k], p)},
                    {"beta", a.beta[k]},
                    {"gamma", a.gamma[k]},
                    {"upload_time", a.upload_time[k]},
                    {"power", a.power[k]},
                    {"energy", a.energy[k]}});
  }
  return rows;
}

json totals(const SystemParams& p, const Allocation& a) {
  return {{"upload_energy", a.total_upload_energy()},
          {"compute_energy", p.compute_energy * a.scheduled_count()},
          {"total_energy", reported_energy(p, a)},
          {"scheduled_count", a.scheduled_count()}};
}

int cmd_allocate(const CommonOptions& o) {
  const auto cfg = resolve(o);
  const auto devices = cfg.resolve_devices();
  const SystemParams& p = cfg.params();
  const std::vector<double> beta(devices.size(), 1.0);
  const auto [alloc, dual] = bandwidth::solve_p1(devices, p, beta);
  const auto uniform = bandwidth::uniform_baseline(devices, p, beta);

  json doc;
  doc["manifest"] = manifest("allocate", cfg);
  doc["lambda"] = p.tradeoff;
  doc["round_time"] = p.round_time;
  doc["devices"] = allocation_rows(devices, p, alloc);
  doc["dual"] = {{"nu_star", dual.nu_star}, {"iterations", dual.iterations}, {"residual", dual.residual}};
  doc["totals"] = totals(p, alloc);
  doc["baseline_totals"] = totals(p, uniform);
  write_text(o.out_path, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_schedule(const CommonOptions& o) {
  const auto cfg = resolve(o);
  const auto devices = cfg.resolve_devices();
  const SystemParams& p = cfg.params();
  std::vector<double> gamma = cfg.gamma;
  if (gamma.empty()) gamma.assign(devices.size(), 1.0 / static_cast<double>(devices.size()));
  if (gamma.size() != devices.size()) throw ConfigError("gamma does not match the device count");
  std::vector<double> allowed(devices.size());
  for (std::size_t k = 0; k < devices.size(); ++k) allowed[k] = allowed_upload_time(devices[k], p);
  const auto pr = scheduling::schedule_all(devices, p, gamma, allowed);

  json doc;
  doc["manifest"] = manifest("schedule", cfg);
  doc["lambda"] = p.tradeoff;
  json rows = json::array();
  for (std::size_t k = 0; k < devices.size(); ++k) {
    rows.push_back({{"id", devices[k].id},
                    {"power_gain", devices[k].power_gain()},
                    {"allowed_time", allowed[k]},
                    {"gamma", gamma[k]},
                    {"unclamped", pr.unclamped[k]},
                    {"beta", pr.beta[k]}});
  }
  doc["devices"] = rows;
  write_text(o.out_path, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_joint(const CommonOptions& o) {
  const auto cfg = resolve(o);
  const auto devices = cfg.resolve_devices();
  const SystemParams& p = cfg.params();
  const auto res = joint::solve_joint(devices, p, cfg.scenario.joint);
  if (!res.converged) log(LogLevel::warn, "alternation stopped at max_iters without converging");

  json rows = allocation_rows(devices, p, res.final);
  for (std::size_t k = 0; k < devices.size(); ++k) rows[k]["relaxed_beta"] = res.relaxed_beta[k];

  json doc;
  doc["manifest"] = manifest("joint", cfg);
  doc["lambda"] = p.tradeoff;
  doc["round_time"] = p.round_time;
  doc["devices"] = rows;
  doc["convergence"] = {{"converged", res.converged},
                        {"iterations", res.iterations_used},
                        {"objective_trajectory", res.objective_trajectory}};
  doc["objective"] = res.objective;
  doc["dual"] = {{"nu_star", res.final_dual.nu_star}, {"residual", res.final_dual.residual}};
  doc["totals"] = totals(p, res.final);
  write_text(o.out_path, doc.dump(2) + "\n");
  return kExitOk;
}

std::string sweep_csv(const std::vector<sim::SweepResult>& rows) {
  std::string out = "T,energy_proposed,energy_baseline,scheduled_count,reduction_ratio\n";
  for (const auto& r : rows) {
    out += fmt(r.T) + ',' + fmt(r.mean_total_energy_proposed) + ',' + fmt(r.mean_total_energy_baseline) + ',' +
           fmt(r.mean_scheduled_count) + ',' + fmt(r.energy_reduction_ratio) + '\n';
  }
  return out;
}

int cmd_sweep(const CommonOptions& o, std::optional<double> calibrate_target) {
  config::RunConfig cfg = resolve(o);
  cfg.scenario.fixed_population = cfg.devices;
  if (calibrate_target) {
    const double lambda = sim::calibrate_lambda(cfg.scenario, *calibrate_target, 1e2, 1e4, 16);
    std::cout << fmt(lambda) << '\n';
    return kExitOk;
  }
  const auto start = std::chrono::steady_clock::now();
  const auto rows = cfg.mode == config::SweepMode::joint ? sim::run_sweep_joint(cfg.scenario, cfg.params().tradeoff)
                                                         : sim::run_sweep_allocation(cfg.scenario);
  log(LogLevel::info, "sweep finished in " +
                          fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) + " s");
  write_text(o.out_path, sweep_csv(rows));
  if (!o.out_path.empty() && o.out_path != "-") {
    json m = manifest("sweep", cfg);
    m["mode"] = config::to_string(cfg.mode);
    m["lambda"] = cfg.params().tradeoff;
    m["resolved_config"] = json::parse(config::dump(cfg));
    write_text(o.out_path + ".manifest.json", m.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_validate(const std::string& level, std::uint64_t seed, bool inject_fault) {
  if (level != "fast" && level != "full") throw ConfigError("--level must be 'fast' or 'full'");
  std::optional<kernels::ScopedTable> fault;
  if (inject_fault) fault.emplace(validate::faulty_table());
  const auto results = validate::run_validation(level == "full" ? validate::Level::full : validate::Level::fast, seed);

  bool ok = true;
  std::printf("%-48s %8s %14s %10s  %s\n", "check", "cases", "worst", "tolerance", "result");
  for (const auto& r : results) {
    std::printf("%-48s %8d %14.6e %10.1e  %s\n", r.name.c_str(), r.cases, r.worst, r.tolerance,
                r.passed ? "PASS" : "FAIL");
    log(LogLevel::info, r.name + ": " + fmt(r.seconds) + " s");
    ok = ok && r.passed;
  }
  std::printf("kernels: %s\n", std::string(kernels::active().name).c_str());
  return ok ? kExitOk : kExitValidation;
}

void add_common(CLI::App* sub, CommonOptions& o, bool with_mode) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--seed", o.seed, "RNG seed (population and joint initialization)");
  sub->add_option("--lambda", o.lambda, "energy/learning tradeoff factor");
  sub->add_option("--out", o.out_path, "output file (stdout when omitted)");
  sub->add_option("--trials", o.trials, "Monte-Carlo trials per sweep point");
  if (with_mode) sub->add_option("--mode", o.mode, "sweep mode: allocation or joint");
  sub->add_flag("--dump-config", o.dump_config, "print the resolved configuration and exit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient bandwidth allocation and device scheduling for federated edge learning"};
  app.set_version_flag("--version", RRM_VERSION);
  app.require_subcommand(1);

  CommonOptions opts;
  auto* allocate = app.add_subcommand("allocate", "optimal bandwidth split with every device scheduled");
  add_common(allocate, opts, false);
  auto* schedule = app.add_subcommand("schedule", "selection priorities for a given bandwidth split");
  add_common(schedule, opts, false);
  auto* joint_cmd = app.add_subcommand("joint", "joint scheduling and bandwidth allocation");
  add_common(joint_cmd, opts, false);
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over the round time T (CSV)");
  add_common(sweep, opts, true);
  std::optional<double> calibrate_target;
  sweep->add_option("--calibrate-lambda", calibrate_target,
                    "print the lambda that schedules this fraction of devices at the largest T");

  auto* validate_cmd = app.add_subcommand("validate", "oracle agreement checks");
  std::string level = "fast";
  std::uint64_t validate_seed = 2024;
  bool inject_fault = false;
  validate_cmd->add_option("--level", level, "fast or full");
  validate_cmd->add_option("--seed", validate_seed, "instance seed");
  validate_cmd->add_flag("--inject-fault", inject_fault, "perturb the Lambert W kernel (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (opts.dump_config) {
      std::cout << config::dump(resolve(opts)) << '\n';
      return kExitOk;
    }
    if (*allocate) return cmd_allocate(opts);
    if (*schedule) return cmd_schedule(opts);
    if (*joint_cmd) return cmd_joint(opts);
    if (*sweep) return cmd_sweep(opts, calibrate_target);
    if (*validate_cmd) return cmd_validate(level, validate_seed, inject_fault);
  } catch (const ConfigError& e) {
    log(LogLevel::error, std::string("config error: ") + e.what());
    return kExitConfig;
  } catch (const rrm::Error& e) {
    log(LogLevel::error, std::string("infeasible: ") + e.what());
    return kExitInfeasible;
  }
  return kExitConfig;
}
