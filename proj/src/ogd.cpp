#include "nrm/ogd.hpp"

#include <algorithm>
#include <cmath>

namespace nrm {
namespace {

void require_capacity(std::span<const double> B) {
  if (B.empty() || !(*std::min_element(B.begin(), B.end()) > 0.0))
    throw Error(ErrorKind::runtime, "zero-capacity");
}

}  // namespace

double theta_bar(std::span<const double> B, const Instance& inst) {
  require_capacity(B);
  const auto [lo, hi] = std::minmax_element(B.begin(), B.end());
  double alpha_sum = 0.0;
  for (std::size_t i = 0; i < inst.m; ++i) {
    double alpha = 0.0;
    for (std::size_t j = 0; j < inst.n; ++j)
      if (inst.a(i, j) != 0.0) alpha = std::max(alpha, inst.r[j] / inst.a(i, j));
    alpha_sum += alpha;
  }
  return (*hi / *lo) * alpha_sum;
}

OgdConstants ogd_constants(std::span<const double> B, std::int64_t L, const Instance& inst) {
  require_capacity(B);
  if (L < 1) throw Error(ErrorKind::runtime, "invalid-window", "L < 1");
  const double root_m = std::sqrt(static_cast<double>(inst.m));
  const double b_max = *std::max_element(B.begin(), B.end());
  return {theta_bar(B, inst) * root_m, (b_max / static_cast<double>(L)) * root_m + inst.a_max() * root_m};
}

OgdConfig make_ogd_config(std::span<const double> B, std::int64_t L, std::int64_t t1, const Instance& inst) {
  const auto k = ogd_constants(B, L, inst);
  OgdConfig cfg;
  cfg.theta_bar = theta_bar(B, inst);
  cfg.D = k.D;
  cfg.G = k.G;
  cfg.t1 = t1;
  cfg.B_over_L.resize(B.size());
  for (std::size_t i = 0; i < B.size(); ++i) cfg.B_over_L[i] = B[i] / static_cast<double>(L);
  return cfg;
}

double step_size(const DualState& state, const OgdConfig& cfg) {
  if (!(cfg.G > 0.0)) throw Error(ErrorKind::runtime, "zero-G");
  return cfg.D / (cfg.G * std::sqrt(static_cast<double>(state.step_index + 1)));
}

bool bid_price_decision(std::span<const double> theta, double r_j, std::span<const double> A_j) {
  double cost = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) cost += theta[i] * A_j[i];
  return r_j > cost;
}

void dual_step_inplace(DualState& state, const OgdConfig& cfg, bool y, std::span<const double> A_j) {
  const double eta = step_size(state, cfg);
  for (std::size_t i = 0; i < state.theta.size(); ++i) {
    const double grad = cfg.B_over_L[i] - (y ? A_j[i] : 0.0);
    state.theta[i] = std::min(std::max(0.0, state.theta[i] - eta * grad), cfg.theta_bar);
  }
  ++state.step_index;
}

DualState dual_step(const DualState& state, const OgdConfig& cfg, bool y, std::span<const double> A_j) {
  DualState next = state;
  dual_step_inplace(next, cfg, y, A_j);
  return next;
}

OgdRegretResult ogd_regret_oracle(std::span<const LinearCost> costs, double width) {
  OgdRegretResult res;
  if (costs.empty()) return res;
  const std::size_t m = costs.front().gradient.size();
  const double D = width * std::sqrt(static_cast<double>(m));
  double G = 0.0;
  for (const auto& g : costs) {
    double norm2 = 0.0;
    for (double v : g.gradient) norm2 += v * v;
    G = std::max(G, std::sqrt(norm2));
  }

  std::vector<double> x(m, 0.0), total(m, 0.0);
  std::size_t s = 0;
  for (const auto& g : costs) {
    ++s;
    for (std::size_t i = 0; i < m; ++i) {
      res.incurred += g.gradient[i] * x[i];
      total[i] += g.gradient[i];
    }
    if (G > 0.0) {
      const double eta = D / (G * std::sqrt(static_cast<double>(s)));
      for (std::size_t i = 0; i < m; ++i) x[i] = std::clamp(x[i] - eta * g.gradient[i], 0.0, width);
    }
  }
  for (double v : total) res.best_fixed += std::min(0.0, v * width);
  res.bound = 1.5 * G * D * std::sqrt(static_cast<double>(costs.size()));
  return res;
}

}  // namespace nrm
