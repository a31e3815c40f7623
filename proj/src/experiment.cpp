#include "nrm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nrm {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::invalid_input, "config-error", key + ": " + why);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where, "expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) config_error(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where.empty() ? key : where + "." + key, e.what());
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

InstanceSpec parse_instance_spec(const json& obj) {
  InstanceSpec spec;
  const auto gen = get<std::string>(obj, "generator", "instance");
  if (gen == "single_resource") {
    reject_unknown_keys(obj, {"generator", "c_ratio", "r1", "r2"}, "instance");
    spec.generator = InstanceSpec::Generator::single_resource;
    spec.c_ratio = get_or(obj, "c_ratio", spec.c_ratio, "instance");
    spec.r1 = get_or(obj, "r1", spec.r1, "instance");
    spec.r2 = get_or(obj, "r2", spec.r2, "instance");
    if (!(spec.c_ratio > 0.0 && spec.c_ratio <= 1.0)) config_error("instance.c_ratio", "must lie in (0, 1]");
  } else if (gen == "multi_resource") {
    reject_unknown_keys(obj, {"generator", "seed", "types"}, "instance");
    spec.generator = InstanceSpec::Generator::multi_resource;
    spec.network_seed = get_or<std::uint64_t>(obj, "seed", spec.network_seed, "instance");
    spec.types = get_or<std::size_t>(obj, "types", spec.types, "instance");
    if (spec.types < 1) config_error("instance.types", "must be positive");
  } else if (gen == "inline") {
    reject_unknown_keys(obj, {"generator", "base"}, "instance");
    spec.generator = InstanceSpec::Generator::inline_base;
    if (!obj.contains("base")) config_error("instance.base", "missing");
    spec.base = instance_from_json(obj.at("base").dump());
  } else {
    config_error("instance.generator", "unknown generator '" + gen + "'");
  }
  return spec;
}

PolicySpec parse_policy(const json& obj, std::size_t index) {
  const std::string where = "policies[" + std::to_string(index) + "]";
  reject_unknown_keys(obj, {"name", "alpha", "beta", "gamma", "lpt_beta", "lpt_d", "U", "warm_start", "fd_floor"},
                      where);
  PolicySpec spec;
  const auto name = get<std::string>(obj, "name", where);
  try {
    spec.kind = parse_policy_kind(name);
  } catch (const Error&) {
    config_error(where + ".name", "unknown policy '" + name + "'");
  }
  const int fd_keys = static_cast<int>(obj.contains("alpha")) + obj.contains("beta") + obj.contains("gamma");
  if (fd_keys != 0 && fd_keys != 3) config_error(where, "alpha, beta and gamma must be given together");
  if (fd_keys == 3) {
    FdParams p;
    p.alpha = get<double>(obj, "alpha", where);
    p.beta = get<double>(obj, "beta", where);
    p.gamma = get<double>(obj, "gamma", where);
    spec.fd = p;
  }
  spec.lpt.beta = get_or(obj, "lpt_beta", spec.lpt.beta, where);
  spec.lpt.d = get_or(obj, "lpt_d", spec.lpt.d, where);
  spec.U = get_or<std::size_t>(obj, "U", spec.U, where);
  spec.warm_start = get_or(obj, "warm_start", spec.warm_start, where);
  spec.fd_floor = get_or<std::int64_t>(obj, "fd_floor", spec.fd_floor, where);
  return spec;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::int64_t> grid(std::int64_t from, std::int64_t to, std::int64_t step) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = from; k <= to; k += step) out.push_back(k);
  return out;
}

PolicySpec policy(PolicyKind kind, std::size_t U = 0, bool warm = false) {
  PolicySpec p;
  p.kind = kind;
  p.U = U;
  p.warm_start = warm;
  return p;
}

std::string ratio_tag(double c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%02d", static_cast<int>(c * 10.0 + 0.5));
  return buf;
}

}  // namespace

Instance InstanceSpec::at(std::int64_t k) const {
  switch (generator) {
    case Generator::single_resource: return gen_single_resource(k, c_ratio, r1, r2);
    case Generator::multi_resource: return gen_multi_resource(k, network_seed, types);
    case Generator::inline_base: return ScaledFamily{*base}.at(k);
  }
  throw Error(ErrorKind::invalid_input, "config-error", "instance generator");
}

std::string InstanceSpec::describe() const {
  std::ostringstream os;
  switch (generator) {
    case Generator::single_resource: os << "single_resource(c=" << c_ratio << ",r=" << r1 << "/" << r2 << ")"; break;
    case Generator::multi_resource: os << "multi_resource(n=" << types << ",seed=" << network_seed << ")"; break;
    case Generator::inline_base: os << "inline(n=" << base->n << ",m=" << base->m << ")"; break;
  }
  return os.str();
}

void validate_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.experiment_id.empty()) config_error("experiment_id", "must be non-empty");
  if (cfg.policies.empty()) config_error("policies", "must list at least one policy");
  if (cfg.k_grid.empty()) config_error("k", "must list at least one scale");
  for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
    if (cfg.k_grid[i] < 1) config_error("k", "scales must be positive");
    if (i > 0 && cfg.k_grid[i] <= cfg.k_grid[i - 1]) config_error("k", "grid must be strictly increasing");
  }
  if (cfg.replications < 2) config_error("replications", "must be at least 2");
  if (cfg.instance.generator == InstanceSpec::Generator::multi_resource &&
      cfg.k_grid.front() < static_cast<std::int64_t>(cfg.instance.types))
    config_error("k", "multi_resource needs k >= number of types");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error("<document>", e.what());
  }
  reject_unknown_keys(doc, {"schema", "experiment_id", "instance", "policies", "k", "replications", "base_seed", "output"},
                      "");
  const auto schema = get<std::string>(doc, "schema", "");
  if (schema != kExperimentSchema) config_error("schema", "expected '" + std::string(kExperimentSchema) + "'");

  ExperimentConfig cfg;
  cfg.experiment_id = get<std::string>(doc, "experiment_id", "");
  if (!doc.contains("instance")) config_error("instance", "missing");
  cfg.instance = parse_instance_spec(doc.at("instance"));
  if (!doc.contains("policies") || !doc.at("policies").is_array()) config_error("policies", "expected an array");
  for (std::size_t i = 0; i < doc.at("policies").size(); ++i)
    cfg.policies.push_back(parse_policy(doc.at("policies")[i], i));
  cfg.k_grid = get<std::vector<std::int64_t>>(doc, "k", "");
  cfg.replications = get_or<std::int64_t>(doc, "replications", cfg.replications, "");
  cfg.base_seed = get_or<std::uint64_t>(doc, "base_seed", cfg.base_seed, "");
  cfg.output = get_or<std::string>(doc, "output", "", "");
  validate_experiment_config(cfg);
  return cfg;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  validate_experiment_config(cfg);
  std::vector<ExperimentRow> rows;
  for (std::int64_t k : cfg.k_grid) {
    const Instance inst = cfg.instance.at(k);
    validate_instance(inst);
    for (const auto& pol : cfg.policies) {
      RegretOptions opts;
      opts.threads = threads;
      opts.instance_id = cfg.instance.describe();
      const auto start = std::chrono::steady_clock::now();
      ExperimentRow row;
      row.experiment_id = cfg.experiment_id;
      row.k = k;
      row.report = estimate_regret(pol, inst, cfg.replications, cfg.base_seed, opts);
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool include_wall) {
  std::string out = std::string(kCsvHeader) + '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += row.experiment_id + ',' + std::to_string(row.k) + ',' + r.policy + ',' + r.params + ',' +
           std::to_string(r.replications) + ',' + fmt17(r.mean_regret) + ',' + fmt17(r.stderr_regret) + ',' +
           fmt17(r.mean_revenue) + ',' + fmt17(r.mean_hindsight) + ',' + fmt17(r.v_dlp) + ',' +
           std::to_string(r.base_seed) + ',' + fmt17(include_wall ? row.wall_ms : 0.0) + '\n';
  }
  return out;
}

std::vector<std::string> preset_names() {
  return {"single_resource_fig1", "hybrid_fig2", "warm_start", "multi_resource"};
}

std::vector<ExperimentConfig> make_preset(const std::string& name, const PresetOptions& opts) {
  const std::int64_t R = opts.replications.value_or(200);
  const std::uint64_t seed = opts.base_seed.value_or(20240601);
  const auto single_grid = grid(1000, 10000, 1000);
  std::vector<ExperimentConfig> out;

  auto single = [&](const std::string& id, double c, double r1, std::vector<PolicySpec> pols) {
    ExperimentConfig cfg;
    cfg.experiment_id = id;
    cfg.instance.generator = InstanceSpec::Generator::single_resource;
    cfg.instance.c_ratio = c;
    cfg.instance.r1 = r1;
    cfg.instance.r2 = 1.0;
    cfg.policies = std::move(pols);
    cfg.k_grid = single_grid;
    cfg.replications = R;
    cfg.base_seed = seed;
    out.push_back(std::move(cfg));
  };

  if (name == "single_resource_fig1") {
    for (double c : {0.7, 0.8, 0.9})
      for (double r1 : {2.0, 5.0})
        single("fig1_" + ratio_tag(c) + "_r" + std::to_string(static_cast<int>(r1)), c, r1,
               {policy(PolicyKind::ff), policy(PolicyKind::fd), policy(PolicyKind::restart)});
  } else if (name == "hybrid_fig2") {
    for (double r1 : {2.0, 5.0}) {
      std::vector<PolicySpec> pols;
      for (std::size_t U = 0; U <= 4; ++U) pols.push_back(policy(PolicyKind::hybrid, U));
      single("fig2_c08_r" + std::to_string(static_cast<int>(r1)), 0.8, r1, std::move(pols));
    }
  } else if (name == "warm_start") {
    for (double r1 : {2.0, 5.0}) {
      std::vector<PolicySpec> pols{policy(PolicyKind::restart), policy(PolicyKind::restart, 0, true)};
      for (std::size_t U = 0; U <= 4; ++U) pols.push_back(policy(PolicyKind::hybrid, U, true));
      single("warm_c08_r" + std::to_string(static_cast<int>(r1)), 0.8, r1, std::move(pols));
    }
  } else if (name == "multi_resource") {
    ExperimentConfig cfg;
    cfg.experiment_id = opts.full_scale ? "multi_full" : "multi_desk";
    cfg.instance.generator = InstanceSpec::Generator::multi_resource;
    cfg.instance.network_seed = 7;
    cfg.instance.types = opts.full_scale ? 1000 : 100;
    cfg.policies = {policy(PolicyKind::ff), policy(PolicyKind::fd), policy(PolicyKind::restart),
                    policy(PolicyKind::restart, 0, true)};
    cfg.k_grid = opts.full_scale ? grid(50000, 500000, 50000) : grid(2000, 10000, 2000);
    cfg.replications = opts.full_scale ? opts.replications.value_or(1000) : R;
    cfg.base_seed = seed;
    out.push_back(std::move(cfg));
  } else {
    throw Error(ErrorKind::invalid_input, "unknown-preset", name);
  }
  return out;
}

}  // namespace nrm
