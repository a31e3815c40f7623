#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrm/model.hpp"
#include "nrm/ogd.hpp"
#include "nrm/rng.hpp"

namespace nrm {

/// Inclusive period range [t_start, t_end], 1-based.
struct Window {
  std::int64_t t_start = 1;
  std::int64_t t_end = 1;

  std::int64_t length() const { return t_end - t_start + 1; }
};

/// Technical parameters of the diffusion-scale policy.
///
/// Phase lengths on a horizon of L periods: phase I lasts ceil(L^a), phase II
/// ceil(L - L^a - L^b) and phase III the remainder, with a = alpha,
/// b = 1/2 + beta and thresholding exponent c = alpha/2 + gamma.
struct FdParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// When false every type lands in the middle class (test hook).
  bool thresholds_enabled = true;

  double a() const { return alpha; }
  double b() const { return 0.5 + beta; }
  double c() const { return 0.5 * alpha + gamma; }
};

/// FdParams resolved against a horizon length.
struct FdPlan {
  FdParams params;
  std::int64_t L = 0;
  std::int64_t l1 = 0;
  std::int64_t l2 = 0;
  double L_a = 0.0;
  double L_b = 0.0;
  double L_c = 0.0;
};

/// Horizon below which the default parameters are rejected.
inline constexpr std::int64_t kFdMinHorizon = 100;

/// alpha = 3 lnln L / (2 ln L), beta = lnln L / ln L, gamma = 2 lnln L / (3 ln L).
/// Throws Error(runtime, "horizon-too-short") for L < 100 or when any
/// parameter constraint fails.
FdParams fd_default_params(std::int64_t L);

/// Validates 0 < alpha < 1/2, alpha/2 <= beta < 1/2, 0 < gamma < alpha/2 and
/// l1 + l2 <= L; throws "horizon-too-short" otherwise.
FdPlan plan_fd(const FdParams& params, std::int64_t L);

struct ThresholdClasses {
  std::vector<bool> accept;
  std::vector<bool> reject;

  bool middle(std::size_t j) const { return !accept[j] && !reject[j]; }
};

/// j -> reject if x_j < lambda_j L^c, else accept if x_j > lambda_j (L^a - L^c).
ThresholdClasses classify_types(std::span<const std::int64_t> x_phase1, const Instance& inst, const FdPlan& plan);

/// Real remaining capacity plus the virtual copies of the last FD run.
struct CapacityLedger {
  std::vector<double> B;
  std::optional<std::vector<double>> B_prime;
  std::optional<std::vector<double>> B_dprime;
};

/// One period: arriving type, subroutine decision y, real decision z, and the
/// bid prices (with their box bound) in force when y was computed.
struct Decision {
  std::int64_t t = 0;
  std::uint32_t j = 0;
  bool y = false;
  bool z = false;
  std::vector<double> theta;
  double theta_bar = 0.0;
};

struct PolicyTrace {
  Window window;
  std::vector<std::int64_t> x;
  double revenue = 0.0;
  std::vector<double> initial_capacity;
  CapacityLedger ledger;
  std::vector<double> theta;
  std::vector<Decision> decisions;
  std::optional<std::int64_t> halted_at;
};

struct RunOptions {
  std::optional<std::vector<double>> theta0;
  /// Overrides the FF horizon length L = T - t_start + 1.
  std::optional<std::int64_t> L;
  bool record = false;
};

/// Fluid-scale primal-dual policy on `window` starting from capacity B.
PolicyTrace run_ff(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                   const RunOptions& opts = {});

/// Diffusion-scale policy. The horizon length defaults to T - t_start + 1.
PolicyTrace run_fd(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                   const FdParams& params, const RunOptions& opts = {});

struct LptParams {
  double beta = 0.1;
  double d = -0.125;
};

/// Acceptance probabilities from the per-period DLP solution x*:
/// 0 below lambda_j L^d, 1 above lambda_j (1 - L^d), else x*_j / lambda_j.
std::vector<double> lpt_probabilities(std::span<const double> x_star, std::span<const double> lambda, std::int64_t L,
                                      double d);

/// LP-based thresholding: randomized admission for ceil(L - L^b) periods,
/// then FF on the remaining capacity. Bernoulli draws come from `rng`.
PolicyTrace run_lpt(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                    const LptParams& params, Engine& rng, const RunOptions& opts = {});

struct RestartSchedule {
  /// tau_0 = T > tau_1 > ... > tau_S >= 1; tau_{S+1} = 0 is implicit.
  std::vector<std::int64_t> taus;
  /// Leading epochs that run LPT (hybrid only).
  std::size_t U = 0;
  bool warm_start = false;

  std::size_t epochs() const { return taus.size(); }
  /// Periods of epoch u for horizon T.
  Window epoch(std::size_t u, std::int64_t T) const;
};

/// tau_u = ceil(T^{(2/3)^u}), u = 0..S, S = ceil(lnln T / ln 1.5), deduplicated.
RestartSchedule restart_schedule(std::int64_t T);

struct EpochParams {
  /// One entry per epoch, or empty for defaults derived from tau_u.
  std::vector<FdParams> fd;
  std::vector<LptParams> lpt;
  LptParams lpt_default;
  /// Epochs shorter than this run plain FF.
  std::int64_t fd_floor = kFdMinHorizon;
};

PolicyTrace run_restart(const Instance& inst, const ArrivalPath& path, const RestartSchedule& schedule,
                        const EpochParams& params = {}, bool record = false);

PolicyTrace run_hybrid(const Instance& inst, const ArrivalPath& path, const RestartSchedule& schedule,
                       const EpochParams& params, Engine& rng, bool record = false);

enum class PolicyKind { ff, fd, lpt, restart, hybrid };

/// Named policy with its parameters, as used by the simulator and CLI.
struct PolicySpec {
  PolicyKind kind = PolicyKind::ff;
  std::optional<FdParams> fd;
  LptParams lpt;
  std::size_t U = 0;
  bool warm_start = false;
  std::int64_t fd_floor = kFdMinHorizon;

  std::string name() const;
  /// Compact parameter description for reports.
  std::string params_label() const;
};

/// Throws Error(invalid_input, "unknown-policy").
PolicyKind parse_policy_kind(const std::string& name);
std::string policy_kind_name(PolicyKind kind);

/// Runs `spec` over the whole horizon from C. LPT draws use `rng_seed`.
PolicyTrace run_policy(const PolicySpec& spec, const Instance& inst, const ArrivalPath& path, std::uint64_t rng_seed,
                       bool record = false);

/// Decision log as CSV: t,j,y,z,theta_1..theta_m.
std::string decisions_csv(const PolicyTrace& trace, std::size_t m);

}  // namespace nrm
