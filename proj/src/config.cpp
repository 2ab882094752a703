#include "rrm/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rrm::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

template <class Int>
Int integer(const json& obj, const char* key, Int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) return v.get<Int>();
    if (v.get<std::int64_t>() < 0) throw ConfigError(where + "." + key + " must be >= 0");
  }
  return v.get<Int>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

joint::InitMode parse_init(const std::string& s) {
  if (s == "random-uniform") return joint::InitMode::random_uniform;
  if (s == "all-ones") return joint::InitMode::all_ones;
  throw ConfigError("joint.init_mode must be 'random-uniform' or 'all-ones', got '" + s + "'");
}

const char* init_name(joint::InitMode m) {
  return m == joint::InitMode::all_ones ? "all-ones" : "random-uniform";
}

void parse_params(const json& j, SystemParams& p) {
  const std::string w = "params";
  reject_unknown(j, {"bandwidth", "noise", "model_size", "round_time", "lambda", "compute_energy"}, w);
  p.bandwidth = number(j, "bandwidth", p.bandwidth, w);
  p.noise = number(j, "noise", p.noise, w);
  p.model_size = number(j, "model_size", p.model_size, w);
  p.round_time = number(j, "round_time", p.round_time, w);
  p.tradeoff = number(j, "lambda", p.tradeoff, w);
  p.compute_energy = number(j, "compute_energy", p.compute_energy, w);
}

void parse_scenario(const json& j, sim::ScenarioConfig& s) {
  const std::string w = "scenario";
  reject_unknown(j, {"num_devices", "path_loss", "compute_time_range", "t_sweep", "trials", "seed", "threads"}, w);
  s.num_devices = integer<int>(j, "num_devices", s.num_devices, w);
  s.path_loss = number(j, "path_loss", s.path_loss, w);
  if (j.contains("compute_time_range")) {
    const auto range = numbers(j.at("compute_time_range"), w + ".compute_time_range");
    if (range.size() != 2) throw ConfigError("scenario.compute_time_range must have two entries");
    s.compute_lo = range[0];
    s.compute_hi = range[1];
  }
  if (j.contains("t_sweep")) s.t_sweep = numbers(j.at("t_sweep"), w + ".t_sweep");
  s.trials = integer<int>(j, "trials", s.trials, w);
  s.rng_seed = integer<std::uint64_t>(j, "seed", s.rng_seed, w);
  s.threads = integer<int>(j, "threads", s.threads, w);
}

void parse_joint(const json& j, joint::JointConfig& c) {
  const std::string w = "joint";
  reject_unknown(j, {"max_iters", "convergence_tol", "rounding_threshold", "init_mode", "seed"}, w);
  c.max_iters = integer<int>(j, "max_iters", c.max_iters, w);
  c.convergence_tol = number(j, "convergence_tol", c.convergence_tol, w);
  c.rounding_threshold = number(j, "rounding_threshold", c.rounding_threshold, w);
  if (j.contains("init_mode")) {
    if (!j.at("init_mode").is_string()) throw ConfigError("joint.init_mode must be a string");
    c.init_mode = parse_init(j.at("init_mode").get<std::string>());
  }
  c.rng_seed = integer<std::uint64_t>(j, "seed", c.rng_seed, w);
}

std::vector<Device> parse_devices(const json& j) {
  if (!j.is_array()) throw ConfigError("devices must be an array");
  std::vector<Device> out;
  int index = 0;
  for (const json& d : j) {
    const std::string w = "devices[" + std::to_string(index) + "]";
    reject_unknown(d, {"id", "channel_gain", "power_gain", "compute_time"}, w);
    Device dev;
    dev.id = integer<int>(d, "id", index, w);
    const bool amp = d.contains("channel_gain");
    const bool pow = d.contains("power_gain");
    if (amp == pow) throw ConfigError(w + " needs exactly one of channel_gain, power_gain");
    dev.channel_gain = amp ? number(d, "channel_gain", 0.0, w) : std::sqrt(number(d, "power_gain", 0.0, w));
    if (!d.contains("compute_time")) throw ConfigError(w + ".compute_time is required");
    dev.compute_time = number(d, "compute_time", 0.0, w);
    try {
      dev.validate();
    } catch (const DomainError& e) {
      throw ConfigError(w + ": " + e.what());
    }
    out.push_back(dev);
    ++index;
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() { scenario.params.tradeoff = sim::kDefaultLambda; }

std::vector<Device> RunConfig::resolve_devices() const {
  return devices.empty() ? sim::generate_population(scenario, 0) : devices;
}

std::string to_string(SweepMode mode) { return mode == SweepMode::joint ? "joint" : "allocation"; }

SweepMode parse_mode(const std::string& text) {
  if (text == "allocation") return SweepMode::allocation;
  if (text == "joint") return SweepMode::joint;
  throw ConfigError("mode must be 'allocation' or 'joint', got '" + text + "'");
}

RunConfig parse(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, {"params", "scenario", "joint", "devices", "gamma", "sweep"}, "config");

  RunConfig cfg;
  try {
    if (root.contains("params")) parse_params(root.at("params"), cfg.scenario.params);
    if (root.contains("scenario")) parse_scenario(root.at("scenario"), cfg.scenario);
    if (root.contains("joint")) parse_joint(root.at("joint"), cfg.scenario.joint);
    if (root.contains("devices")) cfg.devices = parse_devices(root.at("devices"));
    if (root.contains("gamma")) cfg.gamma = numbers(root.at("gamma"), "gamma");
    if (root.contains("sweep")) {
      const json& s = root.at("sweep");
      reject_unknown(s, {"mode"}, "sweep");
      if (s.contains("mode")) {
        if (!s.at("mode").is_string()) throw ConfigError("sweep.mode must be a string");
        cfg.mode = parse_mode(s.at("mode").get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.scenario.validate();
  if (!cfg.gamma.empty() && !cfg.devices.empty() && cfg.gamma.size() != cfg.devices.size()) {
    throw ConfigError("gamma has " + std::to_string(cfg.gamma.size()) + " entries for " +
                      std::to_string(cfg.devices.size()) + " devices");
  }
  return cfg;
}

RunConfig load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.scenario.rng_seed = *o.seed;
    cfg.scenario.joint.rng_seed = *o.seed;
  }
  if (o.lambda) cfg.scenario.params.tradeoff = *o.lambda;
  if (o.trials) cfg.scenario.trials = *o.trials;
  if (o.mode) cfg.mode = *o.mode;
  cfg.scenario.validate();
}

std::string dump(const RunConfig& cfg) {
  const auto& s = cfg.scenario;
  const auto& p = s.params;
  json root;
  root["params"] = {{"bandwidth", p.bandwidth},   {"noise", p.noise},   {"model_size", p.model_size},
                    {"round_time", p.round_time}, {"lambda", p.tradeoff}, {"compute_energy", p.compute_energy}};
  root["scenario"] = {{"num_devices", s.num_devices},
                      {"path_loss", s.path_loss},
                      {"compute_time_range", {s.compute_lo, s.compute_hi}},
                      {"t_sweep", s.t_sweep},
                      {"trials", s.trials},
                      {"seed", s.rng_seed},
                      {"threads", s.threads}};
  root["joint"] = {{"max_iters", s.joint.max_iters},
                   {"convergence_tol", s.joint.convergence_tol},
                   {"rounding_threshold", s.joint.rounding_threshold},
                   {"init_mode", init_name(s.joint.init_mode)},
                   {"seed", s.joint.rng_seed}};
  json devs = json::array();
  for (const Device& d : cfg.devices) {
    devs.push_back({{"id", d.id}, {"channel_gain", d.channel_gain}, {"compute_time", d.compute_time}});
  }
  root["devices"] = devs;
  root["gamma"] = cfg.gamma;
  root["sweep"] = {{"mode", to_string(cfg.mode)}};
  return root.dump(2);
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rrm::config
