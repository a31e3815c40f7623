#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrm/model.hpp"

namespace nrm {

/// max c.x  s.t.  A x <= b,  0 <= x <= u.   A is m x n row-major.
///
/// b >= 0 and u >= 0 make x = 0 feasible, and the box keeps the LP bounded.
struct BoxLp {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> c;
  std::vector<double> A;
  std::vector<double> b;
  std::vector<double> u;
};

enum class LpStatus { optimal, error };

struct LpSolution {
  LpStatus status = LpStatus::error;
  std::vector<double> x;
  double objective_value = 0.0;
  std::int64_t iterations = 0;
};

/// Bounded-variable revised simplex over the slack-augmented system with a
/// dense explicit basis inverse and Bland's rule. Tolerance 1e-9, iteration
/// cap 50 (n + m). Throws Error(runtime, "numerical-failure") when the cap is
/// hit or the basis degrades; throws Error(invalid_input, "invalid-lp") on
/// shape errors or negative b/u.
LpSolution solve_box_lp(const BoxLp& p);

/// max sum r_j w_j  s.t.  sum A_j w_j <= C,  0 <= w_j <= lambda_j T.
LpSolution solve_dlp(const Instance& inst);

/// Same LP as solve_dlp, per period: w*/T.
std::vector<double> dlp_per_period(const LpSolution& dlp, const Instance& inst);

/// Hindsight LP with z_j <= Lambda_j(1, T) realized on `path`.
LpSolution solve_hindsight(const Instance& inst, const ArrivalPath& path);

/// Hindsight LP for an arbitrary upper-bound vector (counts or lambda T).
LpSolution solve_capped(const Instance& inst, std::span<const double> caps);

/// LP(theta) = T sum_j lambda_j max(0, r_j - theta.A_j) + theta.C.
/// Throws Error(invalid_input, "negative-theta").
double lagrangian_value(const Instance& inst, std::span<const double> theta);

/// Copy of `inst` with r_j + xi_j, xi_j ~ U[0, eta] i.i.d., deterministic in seed.
Instance perturb_revenues(const Instance& inst, double eta, std::uint64_t seed);

}  // namespace nrm
