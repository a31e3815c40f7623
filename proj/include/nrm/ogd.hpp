#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrm/model.hpp"

namespace nrm {

/// Box [0, theta_bar]^m, OGD constants and the per-period capacity rate B/L.
struct OgdConfig {
  double theta_bar = 0.0;
  double D = 0.0;
  double G = 0.0;
  std::int64_t t1 = 1;
  std::vector<double> B_over_L;
};

/// Bid prices plus the number of dual updates executed since initialization.
struct DualState {
  std::vector<double> theta;
  std::int64_t step_index = 0;
};

/// (B_max / B_min) * sum_i alpha_i with alpha_i = max_{j: a_ij != 0} r_j / a_ij.
/// Throws Error(runtime, "zero-capacity") when min B <= 0.
double theta_bar(std::span<const double> B, const Instance& inst);

struct OgdConstants {
  double D = 0.0;
  double G = 0.0;
};

/// D = theta_bar sqrt(m), G = (B_max / L) sqrt(m) + a_max sqrt(m).
OgdConstants ogd_constants(std::span<const double> B, std::int64_t L, const Instance& inst);

/// Full configuration for an FF subroutine on capacity B over L periods.
OgdConfig make_ogd_config(std::span<const double> B, std::int64_t L, std::int64_t t1, const Instance& inst);

/// eta = D / (G sqrt(step_index + 1)). Throws Error(runtime, "zero-G").
double step_size(const DualState& state, const OgdConfig& cfg);

/// Accept iff r_j > theta . A_j (strict).
bool bid_price_decision(std::span<const double> theta, double r_j, std::span<const double> A_j);

/// theta <- clamp(theta - eta (B/L - y A_j), 0, theta_bar); step_index + 1.
DualState dual_step(const DualState& state, const OgdConfig& cfg, bool y, std::span<const double> A_j);

/// In-place variant used on the hot path of the policies.
void dual_step_inplace(DualState& state, const OgdConfig& cfg, bool y, std::span<const double> A_j);

/// Linear cost g_s(x) = gradient . x on the box [0, width]^m.
struct LinearCost {
  std::vector<double> gradient;
};

struct OgdRegretResult {
  double incurred = 0.0;
  double best_fixed = 0.0;
  double bound = 0.0;
  double regret() const { return incurred - best_fixed; }
};

/// Runs projected OGD from x_1 = 0 on [0, width]^m with eta_s = D / (G sqrt(s)),
/// D = width sqrt(m) and G = max gradient norm, and reports the incurred cost,
/// the best fixed point in hindsight (minimized at a box vertex coordinatewise),
/// and the bound 1.5 G D sqrt(t).
OgdRegretResult ogd_regret_oracle(std::span<const LinearCost> costs, double width);

}  // namespace nrm
