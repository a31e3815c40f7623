#include "nrm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nrm/rng.hpp"

namespace nrm {
namespace {

constexpr double kTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefactorEvery = 50;

[[noreturn]] void numerical_failure(const std::string& why) {
  throw Error(ErrorKind::runtime, "numerical-failure", why);
}

// Columns 0..n-1 are structural, n..n+m-1 are slacks.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const BoxLp& p)
      : p_(p), n_(p.n), m_(p.m), total_(p.n + p.m),
        basis_(m_), row_of_(total_, -1), at_upper_(total_, false),
        binv_(m_ * m_, 0.0), xb_(p.b) {
    for (std::size_t r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      row_of_[n_ + r] = static_cast<std::ptrdiff_t>(r);
      binv_[r * m_ + r] = 1.0;
    }
  }

  LpSolution solve() {
    const std::int64_t cap = 50 * static_cast<std::int64_t>(n_ + m_) + 1;
    std::vector<double> y(m_), w(m_);
    std::int64_t iter = 0;
    int since_refactor = 0;
    for (;; ++iter) {
      if (iter >= cap) numerical_failure("iteration cap reached");
      duals(y);
      const auto entering = choose_entering(y);
      if (!entering) break;
      const std::size_t q = *entering;
      ftran(q, w);
      if (pivot(q, w) && ++since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
    }

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.iterations = iter;
    sol.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = 0.0;
      if (row_of_[j] >= 0)
        v = xb_[static_cast<std::size_t>(row_of_[j])];
      else if (at_upper_[j])
        v = p_.u[j];
      sol.x[j] = std::clamp(v, 0.0, p_.u[j]);
      sol.objective_value += p_.c[j] * sol.x[j];
    }
    return sol;
  }

 private:
  double cost(std::size_t k) const { return k < n_ ? p_.c[k] : 0.0; }
  double upper(std::size_t k) const { return k < n_ ? p_.u[k] : kInf; }

  // y = c_B^T B^{-1}
  void duals(std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost(basis_[r]);
      if (cb == 0.0) continue;
      const double* row = &binv_[r * m_];
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
  }

  double reduced_cost(std::size_t k, const std::vector<double>& y) const {
    if (k >= n_) return -y[k - n_];
    double d = p_.c[k];
    for (std::size_t i = 0; i < m_; ++i) d -= y[i] * p_.A[i * n_ + k];
    return d;
  }

  // Bland: lowest-index improving nonbasic column.
  std::optional<std::size_t> choose_entering(const std::vector<double>& y) const {
    for (std::size_t k = 0; k < total_; ++k) {
      if (row_of_[k] >= 0) continue;
      if (upper(k) <= 0.0) continue;  // fixed at zero
      const double d = reduced_cost(k, y);
      if ((!at_upper_[k] && d > kTol) || (at_upper_[k] && d < -kTol)) return k;
    }
    return std::nullopt;
  }

  // w = B^{-1} a_q
  void ftran(std::size_t q, std::vector<double>& w) const {
    if (q >= n_) {
      const std::size_t i = q - n_;
      for (std::size_t r = 0; r < m_; ++r) w[r] = binv_[r * m_ + i];
      return;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &binv_[r * m_];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += row[i] * p_.A[i * n_ + q];
      w[r] = s;
    }
  }

  // Returns true when the basis changed (false on a bound flip).
  bool pivot(std::size_t q, const std::vector<double>& w) {
    const double sigma = at_upper_[q] ? -1.0 : 1.0;
    double best = upper(q);
    std::ptrdiff_t leave_row = -1;  // -1 with finite best means bound flip
    std::size_t leave_var = q;
    bool leave_to_upper = false;

    for (std::size_t r = 0; r < m_; ++r) {
      const double delta = -sigma * w[r];
      const std::size_t var = basis_[r];
      double step;
      bool to_upper;
      if (delta < -kPivotTol) {
        step = std::max(0.0, xb_[r]) / -delta;
        to_upper = false;
      } else if (delta > kPivotTol && std::isfinite(upper(var))) {
        step = std::max(0.0, upper(var) - xb_[r]) / delta;
        to_upper = true;
      } else {
        continue;
      }
      const bool tie = std::isfinite(best) && std::abs(step - best) <= 1e-12 * std::max(1.0, best);
      if ((step < best && !tie) || (tie && var < leave_var)) {
        best = step;
        leave_row = static_cast<std::ptrdiff_t>(r);
        leave_var = var;
        leave_to_upper = to_upper;
      }
    }
    if (!std::isfinite(best)) numerical_failure("unbounded ray in a boxed LP");

    for (std::size_t r = 0; r < m_; ++r) xb_[r] -= sigma * best * w[r];

    if (leave_row < 0) {
      at_upper_[q] = !at_upper_[q];
      return false;
    }

    const auto r = static_cast<std::size_t>(leave_row);
    const double entering_value = (at_upper_[q] ? upper(q) : 0.0) + sigma * best;
    row_of_[leave_var] = -1;
    at_upper_[leave_var] = leave_to_upper;
    basis_[r] = q;
    row_of_[q] = leave_row;
    at_upper_[q] = false;
    xb_[r] = entering_value;

    const double piv = w[r];
    double* prow = &binv_[r * m_];
    for (std::size_t i = 0; i < m_; ++i) prow[i] /= piv;
    for (std::size_t k = 0; k < m_; ++k) {
      if (k == r || w[k] == 0.0) continue;
      const double f = w[k];
      double* row = &binv_[k * m_];
      for (std::size_t i = 0; i < m_; ++i) row[i] -= f * prow[i];
    }
    return true;
  }

  // Rebuilds B^{-1} by Gauss-Jordan and recomputes x_B from the nonbasic bounds.
  void refactor() {
    std::vector<double> basis_mat(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t k = basis_[r];
      for (std::size_t i = 0; i < m_; ++i)
        basis_mat[i * m_ + r] = k < n_ ? p_.A[i * n_ + k] : (i == k - n_ ? 1.0 : 0.0);
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      for (std::size_t i = col + 1; i < m_; ++i)
        if (std::abs(basis_mat[i * m_ + col]) > std::abs(basis_mat[piv * m_ + col])) piv = i;
      if (std::abs(basis_mat[piv * m_ + col]) < kPivotTol) numerical_failure("singular basis");
      if (piv != col)
        for (std::size_t j = 0; j < m_; ++j) {
          std::swap(basis_mat[piv * m_ + j], basis_mat[col * m_ + j]);
          std::swap(inv[piv * m_ + j], inv[col * m_ + j]);
        }
      const double d = basis_mat[col * m_ + col];
      for (std::size_t j = 0; j < m_; ++j) {
        basis_mat[col * m_ + j] /= d;
        inv[col * m_ + j] /= d;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = basis_mat[i * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < m_; ++j) {
          basis_mat[i * m_ + j] -= f * basis_mat[col * m_ + j];
          inv[i * m_ + j] -= f * inv[col * m_ + j];
        }
      }
    }
    binv_ = std::move(inv);

    std::vector<double> rhs = p_.b;
    for (std::size_t k = 0; k < n_; ++k)
      if (row_of_[k] < 0 && at_upper_[k])
        for (std::size_t i = 0; i < m_; ++i) rhs[i] -= p_.A[i * n_ + k] * p_.u[k];
    for (std::size_t r = 0; r < m_; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += binv_[r * m_ + i] * rhs[i];
      xb_[r] = s;
    }
  }

  const BoxLp& p_;
  std::size_t n_, m_, total_;
  std::vector<std::size_t> basis_;
  std::vector<std::ptrdiff_t> row_of_;
  std::vector<bool> at_upper_;
  std::vector<double> binv_;
  std::vector<double> xb_;
};

BoxLp instance_lp(const Instance& inst, std::span<const double> caps) {
  BoxLp p;
  p.n = inst.n;
  p.m = inst.m;
  p.c = inst.r;
  p.A = inst.A;
  p.b = inst.C;
  p.u.assign(caps.begin(), caps.end());
  return p;
}

}  // namespace

LpSolution solve_box_lp(const BoxLp& p) {
  if (p.c.size() != p.n || p.u.size() != p.n || p.b.size() != p.m || p.A.size() != p.n * p.m)
    throw Error(ErrorKind::invalid_input, "invalid-lp", "dimension mismatch");
  for (double v : p.b)
    if (!(v >= 0.0)) throw Error(ErrorKind::invalid_input, "invalid-lp", "negative rhs");
  for (double v : p.u)
    if (!(v >= 0.0)) throw Error(ErrorKind::invalid_input, "invalid-lp", "negative upper bound");
  if (p.n == 0) {
    LpSolution sol;
    sol.status = LpStatus::optimal;
    return sol;
  }
  return BoundedSimplex(p).solve();
}

LpSolution solve_capped(const Instance& inst, std::span<const double> caps) {
  return solve_box_lp(instance_lp(inst, caps));
}

LpSolution solve_dlp(const Instance& inst) {
  std::vector<double> caps(inst.n);
  for (std::size_t j = 0; j < inst.n; ++j) caps[j] = inst.lambda[j] * static_cast<double>(inst.T);
  return solve_capped(inst, caps);
}

std::vector<double> dlp_per_period(const LpSolution& dlp, const Instance& inst) {
  std::vector<double> x = dlp.x;
  for (double& v : x) v /= static_cast<double>(inst.T);
  return x;
}

LpSolution solve_hindsight(const Instance& inst, const ArrivalPath& path) {
  if (path.length() != inst.T)
    throw Error(ErrorKind::invalid_input, "invalid-window", "path length differs from T");
  const auto counts = arrival_counts(path, 1, inst.T);
  std::vector<double> caps(inst.n, 0.0);
  for (std::size_t j = 0; j < inst.n && j < counts.size(); ++j) caps[j] = static_cast<double>(counts[j]);
  return solve_capped(inst, caps);
}

double lagrangian_value(const Instance& inst, std::span<const double> theta) {
  if (theta.size() != inst.m) throw Error(ErrorKind::invalid_input, "invalid-theta", "length differs from m");
  for (double v : theta)
    if (!(v >= 0.0)) throw Error(ErrorKind::invalid_input, "negative-theta");
  double per_period = 0.0;
  for (std::size_t j = 0; j < inst.n; ++j) {
    double cost = 0.0;
    for (std::size_t i = 0; i < inst.m; ++i) cost += theta[i] * inst.a(i, j);
    per_period += inst.lambda[j] * std::max(0.0, inst.r[j] - cost);
  }
  double value = static_cast<double>(inst.T) * per_period;
  for (std::size_t i = 0; i < inst.m; ++i) value += theta[i] * inst.C[i];
  return value;
}

Instance perturb_revenues(const Instance& inst, double eta, std::uint64_t seed) {
  if (!(eta > 0.0)) throw Error(ErrorKind::invalid_input, "nonpositive-eta");
  Instance out = inst;
  Engine engine(mix64(seed ^ 0x5EED5EED5EED5EEDULL));
  for (double& rj : out.r) rj += eta * uniform01(engine);
  return out;
}

}  // namespace nrm
