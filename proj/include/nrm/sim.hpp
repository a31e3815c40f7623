#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nrm/model.hpp"
#include "nrm/policies.hpp"

namespace nrm {

/// Monte-Carlo estimate of E[V^HO - V^ALG].
struct RegretReport {
  std::string policy;
  std::string params;
  std::string instance_id;
  std::int64_t replications = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_revenue = 0.0;
  double mean_hindsight = 0.0;
  double stderr_hindsight = 0.0;
  double min_path_regret = 0.0;
  double v_dlp = 0.0;
  std::uint64_t base_seed = 0;
};

/// Policy trace together with the path it ran on.
struct Replication {
  ArrivalPath path;
  PolicyTrace trace;
};

/// Samples a path from `seed` and runs the policy over [1, T] from C.
PolicyTrace simulate(const PolicySpec& spec, const Instance& inst, std::uint64_t seed, bool record = false);

/// simulate(), keeping the path.
Replication replicate(const PolicySpec& spec, const Instance& inst, std::uint64_t seed, bool record = false);

struct RegretOptions {
  unsigned threads = 1;
  std::string instance_id;
  /// Per-replication hook (index, replication, V^HO); called after the barrier
  /// in index order.
  std::function<void(std::int64_t, const Replication&, double)> on_replication;
};

/// R >= 2 replications with seed_i = stream_seed(base_seed, i); V^HO and V^ALG
/// share each path. Aggregation runs in index order, so the report does not
/// depend on the thread count.
RegretReport estimate_regret(const PolicySpec& spec, const Instance& inst, std::int64_t R, std::uint64_t base_seed,
                             const RegretOptions& opts = {});

struct AuditResult {
  bool ok = true;
  std::string violation;
  std::string detail;
};

/// Checks conservation, ledger nonnegativity, revenue accounting, x_j <= Lambda_j
/// and, when decisions were recorded, the per-period log against the path and
/// the bid-price box.
AuditResult audit_trace(const PolicyTrace& trace, const Instance& inst, const ArrivalPath& path);

struct ConcentrationRow {
  std::int64_t k = 0;
  std::int64_t T = 0;
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
};

/// For each scale k, averages max_j |x_j^FF - w*_j| / (sqrt(T) sqrt(ln T)) over R paths.
std::vector<ConcentrationRow> concentration_probe(const std::function<Instance(std::int64_t)>& family,
                                                  std::span<const std::int64_t> scales, std::int64_t R,
                                                  std::uint64_t base_seed);

}  // namespace nrm
