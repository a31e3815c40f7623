#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nrm/model.hpp"
#include "nrm/policies.hpp"
#include "nrm/sim.hpp"

namespace nrm {

inline constexpr const char* kExperimentSchema = "nrmlab.experiment/1";

/// How the instance at scale k is built.
struct InstanceSpec {
  enum class Generator { single_resource, multi_resource, inline_base };
  Generator generator = Generator::single_resource;
  double c_ratio = 0.8;
  double r1 = 2.0;
  double r2 = 1.0;
  std::uint64_t network_seed = 1;
  std::size_t types = 1000;
  /// Unscaled base for inline instances; scaled as T = k T_base, C = k C_base.
  std::optional<Instance> base;

  Instance at(std::int64_t k) const;
  std::string describe() const;
};

struct ExperimentConfig {
  std::string experiment_id;
  InstanceSpec instance;
  std::vector<PolicySpec> policies;
  std::vector<std::int64_t> k_grid;
  std::int64_t replications = 200;
  std::uint64_t base_seed = 1;
  std::string output;
};

/// Fail-closed parse of the JSON config: unknown keys, a missing or wrong
/// schema tag, unknown policy names and non-increasing k grids all throw
/// Error(invalid_input) naming the offending key.
ExperimentConfig parse_experiment_config(const std::string& json_text);

void validate_experiment_config(const ExperimentConfig& cfg);

/// One CSV row per (k, policy).
struct ExperimentRow {
  std::string experiment_id;
  std::int64_t k = 0;
  RegretReport report;
  double wall_ms = 0.0;
};

/// Rows in (k, policy-list) order. Every policy at a given k sees the same
/// paths (same base seed), so differences between policies are paired.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

inline constexpr const char* kCsvHeader =
    "experiment_id,k,policy,params,replications,mean_regret,stderr,mean_revenue,mean_hindsight,v_dlp,base_seed,wall_ms";

/// Header plus one line per row; reals with 17 significant digits. With
/// include_wall false the wall_ms column is written as 0 (for determinism checks).
std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool include_wall = true);

struct PresetOptions {
  std::optional<std::int64_t> replications;
  std::optional<std::uint64_t> base_seed;
  bool full_scale = false;
};

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// Throws Error(invalid_input, "unknown-preset").
std::vector<ExperimentConfig> make_preset(const std::string& name, const PresetOptions& opts = {});

}  // namespace nrm
