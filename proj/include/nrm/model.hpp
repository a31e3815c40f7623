#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nrm/error.hpp"

namespace nrm {

// Conventions used throughout the library:
//   * customer types and resources are 0-based indices;
//   * periods are 1-based, t = 1..T, and windows are inclusive.

/// Problem data of a quantity-based network revenue management instance.
///
/// `A` is stored row-major, m rows (resources) by n columns (types).
struct Instance {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> lambda;
  std::vector<double> r;
  std::vector<double> A;
  std::vector<double> C;
  std::int64_t T = 0;

  double a(std::size_t i, std::size_t j) const { return A[i * n + j]; }
  /// Largest single consumption entry.
  double a_max() const;
  /// Column A_j as a fresh vector.
  std::vector<double> column(std::size_t j) const;
};

/// Realized type sequence j(1..T).
struct ArrivalPath {
  std::vector<std::uint32_t> types;
  std::uint64_t seed = 0;
  std::size_t num_types = 0;  // n of the generating instance

  std::int64_t length() const { return static_cast<std::int64_t>(types.size()); }
  /// Type arriving in period t (1-based).
  std::uint32_t at(std::int64_t t) const { return types[static_cast<std::size_t>(t - 1)]; }
};

/// Base instance scaled by k: T = k * T_base, C = k * C_base.
struct ScaledFamily {
  Instance base;

  Instance at(std::int64_t k) const;
};

/// Throws Error(invalid_input) naming the first violated invariant:
/// "empty-dimension", "probabilities-do-not-sum", "nonpositive-capacity",
/// "negative-entry". Shape mismatches report "empty-dimension".
void validate_instance(const Instance& inst);

/// Same check, returning the violated code or an empty string.
std::string instance_violation(const Instance& inst);

/// i.i.d. categorical draws with probabilities lambda, deterministic in seed.
ArrivalPath sample_path(const Instance& inst, std::uint64_t seed);

/// Per-type arrival counts over periods [t1, t2]; throws "invalid-window".
std::vector<std::int64_t> arrival_counts(const ArrivalPath& path, std::int64_t t1, std::int64_t t2);

/// One resource, two equally likely types consuming one unit each,
/// C = c_ratio * k and T = k.
Instance gen_single_resource(std::int64_t k, double c_ratio, double r1, double r2);

/// n types and n resources, lambda_j = 1/n, r_j uniform on {1..10},
/// a_ij ~ Bernoulli(0.5), C_i = 0.8 k, T = k. (r, A) depend only on
/// (seed, n), so one seed yields the same network at every scale.
Instance gen_multi_resource(std::int64_t k, std::uint64_t seed, std::size_t n = 1000);

std::string instance_to_json(const Instance& inst);
/// Parses and validates; unknown keys are rejected.
Instance instance_from_json(const std::string& text);

}  // namespace nrm
