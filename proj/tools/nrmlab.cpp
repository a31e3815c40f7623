// nrmlab: single runs, JSON-configured experiments and preset reproductions.
//
// Exit codes: 0 ok, 2 invalid input or config, 3 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nrm/error.hpp"
#include "nrm/experiment.hpp"
#include "nrm/model.hpp"
#include "nrm/policies.hpp"
#include "nrm/rng.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;
constexpr const char* kOutDirEnv = "NRMLAB_OUT_DIR";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nrm::Error(nrm::ErrorKind::invalid_input, "unreadable-file", path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw nrm::Error(nrm::ErrorKind::runtime, "write-failed", path.string());
}

// --out beats the environment; both beat the config's own output path.
fs::path output_path(const std::string& out_flag, const nrm::ExperimentConfig& cfg) {
  std::string dir = out_flag;
  if (dir.empty())
    if (const char* env = std::getenv(kOutDirEnv)) dir = env;
  if (dir.empty()) return cfg.output.empty() ? fs::path(cfg.experiment_id + ".csv") : fs::path(cfg.output);
  const fs::path name = cfg.output.empty() ? fs::path(cfg.experiment_id + ".csv") : fs::path(cfg.output).filename();
  return fs::path(dir) / name;
}

// Comma-separated 1-based types.
nrm::ArrivalPath parse_path(const std::string& text, const nrm::Instance& inst) {
  nrm::ArrivalPath path;
  path.num_types = inst.n;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v < 1 || v > static_cast<long>(inst.n))
      throw nrm::Error(nrm::ErrorKind::invalid_input, "invalid-path", "path entry '" + tok + "'");
    path.types.push_back(static_cast<std::uint32_t>(v - 1));
  }
  if (static_cast<std::int64_t>(path.types.size()) != inst.T)
    throw nrm::Error(nrm::ErrorKind::invalid_input, "invalid-path",
                     "path has " + std::to_string(path.types.size()) + " periods, instance has T = " + std::to_string(inst.T));
  return path;
}

void run_configs(const std::vector<nrm::ExperimentConfig>& configs, const std::string& out_flag, unsigned threads,
                 bool verbose) {
  for (const auto& cfg : configs) {
    if (verbose) std::cerr << "running " << cfg.experiment_id << " (" << cfg.instance.describe() << ")\n";
    const auto rows = nrm::run_experiment(cfg, threads);
    const auto path = output_path(out_flag, cfg);
    write_file(path, nrm::rows_to_csv(rows));
    std::cout << path.string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nrmlab: bid-price policies for network revenue management"};
  app.require_subcommand(1);

  std::string out_dir;
  unsigned threads = 1;
  bool verbose = false;
  app.add_option("--out", out_dir, "Output directory (overrides $" + std::string(kOutDirEnv) + ")");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "Verbose output");

  auto* run = app.add_subcommand("run", "Run one policy on one sampled or given path");
  std::string policy_name, instance_file, path_text;
  std::uint64_t seed = 1;
  std::size_t hybrid_U = 0;
  bool warm = false;
  run->add_option("policy", policy_name, "ff, fd, lpt, restart or hybrid")->required();
  run->add_option("instance", instance_file, "Instance JSON file")->required();
  run->add_option("--seed", seed, "Path and policy seed");
  run->add_option("--path", path_text, "Explicit arrival path: comma-separated 1-based types");
  run->add_option("--U", hybrid_U, "Hybrid: number of LPT epochs");
  run->add_flag("--warm-start", warm, "Restart/hybrid: warm-start bid prices");
  run->add_flag("-v,--verbose", verbose, "Print the per-period decision CSV");

  auto* exp = app.add_subcommand("experiment", "Run a JSON experiment config");
  std::string config_file;
  std::optional<std::int64_t> reps;
  std::optional<std::uint64_t> base_seed;
  exp->add_option("config", config_file, "Config file")->required();
  exp->add_option("--reps", reps, "Override replications");
  exp->add_option("--seed", base_seed, "Override base seed");

  auto* pre = app.add_subcommand("preset", "Run a named preset");
  std::string preset_name;
  bool full = false;
  std::optional<std::int64_t> preset_reps;
  std::optional<std::uint64_t> preset_seed;
  pre->add_option("name", preset_name, "One of: single_resource_fig1, hybrid_fig2, warm_start, multi_resource")
      ->required();
  pre->add_option("--reps", preset_reps, "Override replications");
  pre->add_option("--seed", preset_seed, "Override base seed");
  pre->add_flag("--full", full, "Full-scale multi_resource (n = 1000, k up to 5e5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*run) {
      const auto inst = nrm::instance_from_json(read_file(instance_file));
      nrm::PolicySpec spec;
      spec.kind = nrm::parse_policy_kind(policy_name);
      spec.U = hybrid_U;
      spec.warm_start = warm;
      const auto path = path_text.empty() ? nrm::sample_path(inst, seed) : parse_path(path_text, inst);
      const auto trace = nrm::run_policy(spec, inst, path, seed, verbose);
      std::printf("revenue %.17g\n", trace.revenue);
      std::printf("x");
      for (auto v : trace.x) std::printf(" %lld", static_cast<long long>(v));
      std::printf("\ncapacity");
      for (double b : trace.ledger.B) std::printf(" %.17g", b);
      std::printf("\n");
      if (trace.halted_at) std::printf("halted %lld\n", static_cast<long long>(*trace.halted_at));
      if (verbose) std::fputs(nrm::decisions_csv(trace, inst.m).c_str(), stdout);
    } else if (*exp) {
      auto cfg = nrm::parse_experiment_config(read_file(config_file));
      if (reps) cfg.replications = *reps;
      if (base_seed) cfg.base_seed = *base_seed;
      nrm::validate_experiment_config(cfg);
      run_configs({cfg}, out_dir, threads, verbose);
    } else if (*pre) {
      nrm::PresetOptions opts;
      opts.replications = preset_reps;
      opts.base_seed = preset_seed;
      opts.full_scale = full;
      run_configs(nrm::make_preset(preset_name, opts), out_dir, threads, verbose);
    }
  } catch (const nrm::Error& e) {
    std::cerr << "nrmlab: " << e.what() << '\n';
    return e.kind() == nrm::ErrorKind::invalid_input ? kExitInvalid : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "nrmlab: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
