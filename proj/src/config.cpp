#include "spinmem/config.hpp"

#include <cmath>
#include <fstream>

#include "spinmem/analysis.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"

namespace spinmem {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

SiteLayout parse_layout(const json& j) {
  SiteLayout layout;
  layout.n_a = need(j, "n_a").get<int>();
  layout.n_c = need(j, "n_c").get<int>();
  layout.n_b = need(j, "n_b").get<int>();
  try {
    layout.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return layout;
}

json layout_to_json(const SiteLayout& l) {
  return json{{"n_a", l.n_a}, {"n_c", l.n_c}, {"n_b", l.n_b}};
}

std::uint32_t parse_pattern(const json& j) {
  if (j.is_number_integer() || j.is_number_unsigned()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) fail("input pattern must be nonnegative");
    return static_cast<std::uint32_t>(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty() || s.size() > 32) fail("bad input pattern string '" + s + "'");
    std::uint32_t p = 0;
    for (char c : s) {
      if (c != '0' && c != '1') fail("bad input pattern string '" + s + "'");
      p = (p << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return p;
  }
  fail("input pattern must be an integer or a binary string");
}

std::vector<double> parse_tau_grid(const json& j) {
  std::vector<double> grid;
  if (j.is_array()) {
    grid = j.get<std::vector<double>>();
  } else if (j.is_object()) {
    const double start = need(j, "start").get<double>();
    const double stop = need(j, "stop").get<double>();
    const int points = need(j, "points").get<int>();
    if (points < 1) fail("tau_grid.points must be >= 1");
    if (!(start > 0.0) || !(stop >= start)) fail("tau_grid range must be positive and ordered");
    for (int i = 0; i < points; ++i)
      grid.push_back(points == 1 ? start
                                 : start + (stop - start) * static_cast<double>(i) / (points - 1));
  } else {
    fail("tau_grid must be an array or {start, stop, points}");
  }
  for (double t : grid)
    if (!(t > 0.0)) fail("tau_grid values must be positive");
  return grid;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;

  const json& chain = need(j, "chain");
  cfg.chain.model = model_from_name(need(chain, "model").get<std::string>());
  cfg.chain.layout = parse_layout(need(chain, "layout"));
  const bool has_list = chain.contains("couplings");
  const bool has_range = chain.contains("coupling_range");
  if (has_list == has_range) fail("chain needs exactly one of 'couplings' or 'coupling_range'");
  if (has_list) cfg.chain.couplings = chain["couplings"].get<std::vector<double>>();
  if (has_range) {
    const auto r = chain["coupling_range"].get<std::vector<double>>();
    if (r.size() != 2) fail("coupling_range must be [lo, hi]");
    cfg.chain.coupling_range = {r[0], r[1]};
    if (!chain.contains("seed")) fail("coupling_range needs a 'seed'");
  }
  if (chain.contains("seed")) cfg.chain.seed = chain["seed"].get<std::uint64_t>();
  if (chain.contains("fields")) cfg.chain.fields = chain["fields"].get<std::vector<double>>();

  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    const int sources = static_cast<int>(s.contains("tau")) +
                        static_cast<int>(s.contains("taus")) +
                        static_cast<int>(s.contains("optimize"));
    if (sources != 1) fail("schedule needs exactly one of 'tau', 'taus', 'optimize'");
    if (s.contains("tau")) {
      cfg.schedule.kind = ScheduleConfig::Kind::Uniform;
      cfg.schedule.tau = s["tau"].get<double>();
      cfg.schedule.steps = need(s, "steps").get<int>();
      if (cfg.schedule.steps < 1) fail("schedule.steps must be >= 1");
    } else if (s.contains("taus")) {
      cfg.schedule.kind = ScheduleConfig::Kind::Explicit;
      cfg.schedule.taus = s["taus"].get<std::vector<double>>();
      if (cfg.schedule.taus.empty()) fail("schedule.taus must not be empty");
    } else {
      const json& o = s["optimize"];
      cfg.schedule.kind = ScheduleConfig::Kind::Optimized;
      cfg.schedule.opt_steps = need(o, "steps").get<int>();
      const auto w = need(o, "tau_window").get<std::vector<double>>();
      if (w.size() != 2) fail("optimize.tau_window must be [lo, hi]");
      cfg.schedule.window_lo = w[0];
      cfg.schedule.window_hi = w[1];
      cfg.schedule.grid_points = need(o, "grid_points").get<int>();
    }
  }

  if (j.contains("input")) {
    const json& in = j["input"];
    if (in.is_string()) {
      const std::string name = in.get<std::string>();
      if (name == "all_up")
        cfg.input.kind = InputConfig::Kind::AllUp;
      else if (name == "plus_state")
        cfg.input.kind = InputConfig::Kind::PlusState;
      else
        fail("unknown input preset '" + name + "'");
    } else if (in.is_array()) {
      cfg.input.kind = InputConfig::Kind::Explicit;
      for (const json& entry : in) {
        if (!entry.is_array() || entry.size() != 2) fail("input entries are [pattern, [re, im]]");
        const auto amp = entry[1].get<std::vector<double>>();
        if (amp.size() != 2) fail("input amplitudes are [re, im] pairs");
        cfg.input.amplitudes.emplace_back(parse_pattern(entry[0]),
                                          std::complex<double>(amp[0], amp[1]));
      }
      if (cfg.input.amplitudes.empty()) fail("explicit input must not be empty");
    } else {
      fail("input must be a preset name or a list of [pattern, [re, im]]");
    }
  }

  if (j.contains("analysis")) {
    const json& a = j["analysis"];
    if (a.contains("tau_grid")) cfg.analysis.tau_grid = parse_tau_grid(a["tau_grid"]);
    if (a.contains("sectors")) cfg.analysis.sectors = a["sectors"].get<std::vector<int>>();
    if (a.contains("condition_tol")) cfg.analysis.condition_tol = a["condition_tol"].get<double>();
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (s.contains("seeds")) cfg.sweep.seeds = s["seeds"].get<std::vector<std::uint64_t>>();
    if (s.contains("layouts"))
      for (const json& l : s["layouts"]) cfg.sweep.layouts.push_back(parse_layout(l));
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
    if (o.contains("formats")) {
      cfg.formats = o["formats"].get<std::vector<std::string>>();
      for (const auto& f : cfg.formats)
        if (f != "csv" && f != "json") fail("unknown output format '" + f + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    fail(std::string("bad value: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j;
  json chain_j;
  chain_j["model"] = model_name(chain.model);
  chain_j["layout"] = layout_to_json(chain.layout);
  if (chain.couplings) chain_j["couplings"] = *chain.couplings;
  if (chain.coupling_range)
    chain_j["coupling_range"] = {chain.coupling_range->first, chain.coupling_range->second};
  if (chain.seed) chain_j["seed"] = *chain.seed;
  if (!chain.fields.empty()) chain_j["fields"] = chain.fields;
  j["chain"] = std::move(chain_j);

  json sched_j;
  switch (schedule.kind) {
    case ScheduleConfig::Kind::Uniform:
      sched_j["tau"] = schedule.tau;
      sched_j["steps"] = schedule.steps;
      break;
    case ScheduleConfig::Kind::Explicit:
      sched_j["taus"] = schedule.taus;
      break;
    case ScheduleConfig::Kind::Optimized:
      sched_j["optimize"] = {{"steps", schedule.opt_steps},
                             {"tau_window", {schedule.window_lo, schedule.window_hi}},
                             {"grid_points", schedule.grid_points}};
      break;
  }
  j["schedule"] = std::move(sched_j);

  switch (input.kind) {
    case InputConfig::Kind::AllUp:
      j["input"] = "all_up";
      break;
    case InputConfig::Kind::PlusState:
      j["input"] = "plus_state";
      break;
    case InputConfig::Kind::Explicit: {
      json arr = json::array();
      for (const auto& [pattern, amp] : input.amplitudes)
        arr.push_back(json::array({pattern, {amp.real(), amp.imag()}}));
      j["input"] = std::move(arr);
      break;
    }
  }

  if (!analysis.tau_grid.empty() || !analysis.sectors.empty()) {
    json a;
    if (!analysis.tau_grid.empty()) a["tau_grid"] = analysis.tau_grid;
    if (!analysis.sectors.empty()) a["sectors"] = analysis.sectors;
    a["condition_tol"] = analysis.condition_tol;
    j["analysis"] = std::move(a);
  }

  if (!sweep.seeds.empty() || !sweep.layouts.empty()) {
    json s;
    if (!sweep.seeds.empty()) s["seeds"] = sweep.seeds;
    if (!sweep.layouts.empty()) {
      json arr = json::array();
      for (const auto& l : sweep.layouts) arr.push_back(layout_to_json(l));
      s["layouts"] = std::move(arr);
    }
    j["sweep"] = std::move(s);
  }

  j["output"] = {{"dir", out_dir}, {"formats", formats}};
  return j;
}

ChainSpec resolve_chain(const ChainConfig& cfg, std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(cfg.seed.value_or(0));
  ChainSpec spec;
  if (cfg.coupling_range) {
    try {
      spec = random_chain(cfg.layout, cfg.model, cfg.coupling_range->first,
                          cfg.coupling_range->second, seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else {
    spec.layout = cfg.layout;
    spec.model = cfg.model;
    spec.couplings = cfg.couplings.value_or(std::vector<double>{});
    spec.fields.assign(static_cast<std::size_t>(cfg.layout.total()), 0.0);
    if (cfg.seed || seed_override) spec.rng_seed = seed;
  }
  if (!cfg.fields.empty()) spec.fields = cfg.fields;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

Eigen::VectorXcd resolve_input(const InputConfig& cfg, int n_a) {
  switch (cfg.kind) {
    case InputConfig::Kind::AllUp:
      return preset_all_up(n_a);
    case InputConfig::Kind::PlusState:
      return preset_plus_state(n_a);
    case InputConfig::Kind::Explicit:
      break;
  }
  const Eigen::Index dim = Eigen::Index{1} << n_a;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (const auto& [pattern, amp] : cfg.amplitudes) {
    if (pattern >= static_cast<std::uint32_t>(dim))
      throw ConfigError("config: input pattern " + std::to_string(pattern) +
                        " needs more than N_A sender sites");
    v[pattern] += amp;
  }
  const double norm = v.norm();
  const double dev = std::abs(norm - 1.0);
  if (dev > 1e-3)
    throw ConfigError("config: input norm deviates by " + format_double(dev) +
                      " (limit 1e-3)");
  if (norm == 0.0) throw ConfigError("config: input state has zero norm");
  if (dev > 1e-9)
    warn("input norm deviates by " + format_double(dev) + "; normalizing");
  return v / norm;
}

ProtocolSchedule resolve_schedule(const ScheduleConfig& cfg, const ChainSpec& chain,
                                  const Eigen::VectorXcd& alice_input) {
  try {
    switch (cfg.kind) {
      case ScheduleConfig::Kind::Uniform:
        return ProtocolSchedule::uniform(cfg.tau, cfg.steps);
      case ScheduleConfig::Kind::Explicit: {
        ProtocolSchedule s;
        s.taus = cfg.taus;
        s.validate();
        return s;
      }
      case ScheduleConfig::Kind::Optimized:
        return optimize_schedule(chain, cfg.opt_steps, cfg.window_lo, cfg.window_hi,
                                 cfg.grid_points, alice_input);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unreachable schedule kind");
}

}  // namespace spinmem
