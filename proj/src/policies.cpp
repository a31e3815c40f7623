#include "nrm/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nrm/lp.hpp"

namespace nrm {
namespace {

// Ceiling that absorbs pow/exp rounding just above an integer (1000^{2/3} -> 100).
std::int64_t ceil_to_int(double v) {
  return static_cast<std::int64_t>(std::ceil(v - 1e-10 * std::max(1.0, std::abs(v))));
}

double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

// Mutable state of one policy run: the instance view, the true remaining
// capacity, acceptance counts and the optional decision log.
class Episode {
 public:
  Episode(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B, bool record)
      : inst_(inst), path_(path), record_(record), cols_(inst.n), row_max_(inst.m, 0.0) {
    if (path.length() < window.t_end || window.t_start < 1 || window.t_start > window.t_end)
      throw Error(ErrorKind::invalid_input, "invalid-window",
                  "[" + std::to_string(window.t_start) + ", " + std::to_string(window.t_end) + "]");
    if (B.size() != inst.m) throw Error(ErrorKind::invalid_input, "invalid-capacity", "length differs from m");
    for (std::size_t j = 0; j < inst.n; ++j) cols_[j] = inst.column(j);
    for (std::size_t i = 0; i < inst.m; ++i)
      for (std::size_t j = 0; j < inst.n; ++j) row_max_[i] = std::max(row_max_[i], inst.a(i, j));
    trace_.window = window;
    trace_.x.assign(inst.n, 0);
    trace_.initial_capacity.assign(B.begin(), B.end());
    trace_.ledger.B.assign(B.begin(), B.end());
  }

  const Instance& inst() const { return inst_; }
  const ArrivalPath& path() const { return path_; }
  const std::vector<double>& col(std::size_t j) const { return cols_[j]; }
  std::vector<double>& remaining() { return trace_.ledger.B; }
  PolicyTrace& trace() { return trace_; }
  bool recording() const { return record_; }

  // A_j <= cap for every type j.
  bool fits_all(std::span<const double> cap) const {
    for (std::size_t i = 0; i < row_max_.size(); ++i)
      if (row_max_[i] > cap[i]) return false;
    return true;
  }

  bool fits(std::size_t j, std::span<const double> cap) const {
    const auto& a = cols_[j];
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > cap[i]) return false;
    return true;
  }

  void debit(std::vector<double>& ledger, std::size_t j) const {
    const auto& a = cols_[j];
    for (std::size_t i = 0; i < a.size(); ++i) ledger[i] -= a[i];
  }

  // Real acceptance: counts and true remaining capacity.
  void accept(std::size_t j) {
    ++trace_.x[j];
    debit(trace_.ledger.B, j);
  }

  void log(std::int64_t t, std::uint32_t j, bool y, bool z, const std::vector<double>* theta, double theta_bar) {
    if (!record_) return;
    Decision d;
    d.t = t;
    d.j = j;
    d.y = y;
    d.z = z;
    if (theta) d.theta = *theta;
    d.theta_bar = theta_bar;
    trace_.decisions.push_back(std::move(d));
  }

  void log_rejections(std::int64_t from, std::int64_t to, const std::vector<double>* theta, double theta_bar) {
    if (!record_) return;
    for (std::int64_t t = from; t <= to; ++t) log(t, path_.at(t), false, false, theta, theta_bar);
  }

  void mark_halt(std::int64_t t) {
    if (!trace_.halted_at) trace_.halted_at = t;
  }

  PolicyTrace finish(std::vector<double> theta) {
    trace_.revenue = 0.0;
    for (std::size_t j = 0; j < inst_.n; ++j) trace_.revenue += inst_.r[j] * static_cast<double>(trace_.x[j]);
    trace_.theta = std::move(theta);
    return std::move(trace_);
  }

 private:
  const Instance& inst_;
  const ArrivalPath& path_;
  bool record_;
  std::vector<std::vector<double>> cols_;
  std::vector<double> row_max_;
  PolicyTrace trace_;
};

DualState start_dual(const std::optional<std::vector<double>>& theta0, const OgdConfig& cfg, std::size_t m) {
  DualState dual;
  dual.theta.assign(m, 0.0);
  if (theta0) {
    if (theta0->size() != m) throw Error(ErrorKind::invalid_input, "invalid-theta", "length differs from m");
    for (std::size_t i = 0; i < m; ++i) dual.theta[i] = std::clamp((*theta0)[i], 0.0, cfg.theta_bar);
  }
  return dual;
}

bool decide(const Episode& ep, const DualState& dual, std::size_t j) {
  return bid_price_decision(dual.theta, ep.inst().r[j], ep.col(j));
}

// FF main loop over [from, to]. `budget` is the subroutine's own ledger; real
// capacity is debited through ep.accept. Returns false when it halted.
bool ff_loop(Episode& ep, std::vector<double>& budget, std::int64_t from, std::int64_t to, const OgdConfig& cfg,
             DualState& dual) {
  for (std::int64_t t = from; t <= to; ++t) {
    const std::uint32_t j = ep.path().at(t);
    if (!ep.fits_all(budget)) {
      ep.mark_halt(t);
      ep.log_rejections(t, to, &dual.theta, cfg.theta_bar);
      return false;
    }
    const bool y = decide(ep, dual, j);
    ep.log(t, j, y, y, &dual.theta, cfg.theta_bar);
    if (y) {
      ep.accept(j);
      if (&budget != &ep.remaining()) ep.debit(budget, j);
    }
    dual_step_inplace(dual, cfg, y, ep.col(j));
  }
  return true;
}

std::vector<double> ff_impl(Episode& ep, Window w, std::int64_t L, const std::optional<std::vector<double>>& theta0) {
  const auto& inst = ep.inst();
  const OgdConfig cfg = make_ogd_config(ep.remaining(), L, w.t_start, inst);
  DualState dual = start_dual(theta0, cfg, inst.m);
  ff_loop(ep, ep.remaining(), w.t_start, w.t_end, cfg, dual);
  return dual.theta;
}

std::vector<double> fd_impl(Episode& ep, Window w, const FdPlan& plan,
                            const std::optional<std::vector<double>>& theta0) {
  const auto& inst = ep.inst();
  const std::vector<double> B0 = ep.remaining();
  const std::int64_t s = w.t_start;
  const std::int64_t e = w.t_end;
  const double L = static_cast<double>(plan.L);

  // Phase I: FF on the pro-rata budget B0 * l1 / L over l1 periods.
  std::vector<double> budget1 = B0;
  for (double& b : budget1) b *= static_cast<double>(plan.l1) / L;
  const OgdConfig cfg1 = make_ogd_config(budget1, plan.l1, s, inst);
  DualState dual = start_dual(theta0, cfg1, inst.m);
  const std::vector<std::int64_t> x_before = ep.trace().x;
  ff_loop(ep, budget1, s, std::min(e, s + plan.l1 - 1), cfg1, dual);
  if (e < s + plan.l1) return dual.theta;

  std::vector<std::int64_t> x_phase1(inst.n);
  for (std::size_t j = 0; j < inst.n; ++j) x_phase1[j] = ep.trace().x[j] - x_before[j];
  ThresholdClasses classes;
  if (plan.params.thresholds_enabled) {
    classes = classify_types(x_phase1, inst, plan);
  } else {
    classes.accept.assign(inst.n, false);
    classes.reject.assign(inst.n, false);
  }

  // Phase II: working capacity B0 (L - l1) / L with virtual copy B'.
  std::vector<double> work = B0;
  for (double& b : work) b *= (L - static_cast<double>(plan.l1)) / L;
  std::vector<double> virt = work;
  const std::int64_t s2 = s + plan.l1;
  const std::int64_t e2 = std::min(e, s + plan.l1 + plan.l2 - 1);
  if (plan.l2 > 0) {
    const OgdConfig cfg2 = make_ogd_config(work, plan.L - plan.l1, s2, inst);
    dual = start_dual(dual.theta, cfg2, inst.m);
    for (std::int64_t t = s2; t <= e2; ++t) {
      const std::uint32_t j = ep.path().at(t);
      if (!ep.fits_all(work)) {
        ep.mark_halt(t);
        ep.log_rejections(t, e2, &dual.theta, cfg2.theta_bar);
        break;
      }
      bool y = decide(ep, dual, j);
      bool z = false;
      bool update = false;
      if (classes.reject[j]) {
        z = false;
      } else if (classes.accept[j]) {
        z = true;
      } else if (ep.fits_all(virt)) {
        z = y;
        update = true;
      } else {
        y = false;
      }
      ep.log(t, j, y, z, &dual.theta, cfg2.theta_bar);
      if (update) {
        if (y) ep.debit(virt, j);
        dual_step_inplace(dual, cfg2, y, ep.col(j));
      }
      if (z) {
        ep.accept(j);
        ep.debit(work, j);
      }
    }
    ep.trace().ledger.B_prime = virt;
  }

  // Phase III: FF on B''_i = max(L^{3b/4}, min(B_i, a_max L^b)), copying its
  // decisions when the arriving type still fits the working capacity.
  const std::int64_t s3 = s + plan.l1 + plan.l2;
  const std::int64_t L3 = plan.L - plan.l1 - plan.l2;
  if (s3 > e || L3 < 1) return dual.theta;
  const double floor3 = std::pow(L, 0.75 * plan.params.b());
  const double cap3 = inst.a_max() * plan.L_b;
  std::vector<double> virt3(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) virt3[i] = std::max(floor3, std::min(work[i], cap3));
  const OgdConfig cfg3 = make_ogd_config(virt3, L3, s3, inst);
  dual = start_dual(dual.theta, cfg3, inst.m);
  for (std::int64_t t = s3; t <= e; ++t) {
    const std::uint32_t j = ep.path().at(t);
    bool y = decide(ep, dual, j);
    bool z = false;
    const bool active = ep.fits_all(virt3);
    if (active) {
      z = y && ep.fits(j, work);
    } else {
      y = false;
    }
    ep.log(t, j, y, z, &dual.theta, cfg3.theta_bar);
    if (active) {
      if (y) ep.debit(virt3, j);
      dual_step_inplace(dual, cfg3, y, ep.col(j));
    }
    if (z) {
      ep.accept(j);
      ep.debit(work, j);
    }
  }
  ep.trace().ledger.B_dprime = virt3;
  return dual.theta;
}

std::vector<double> lpt_impl(Episode& ep, Window w, std::int64_t L, const LptParams& params, Engine& rng,
                             const std::optional<std::vector<double>>& theta0) {
  const auto& inst = ep.inst();
  if (!(params.beta > 0.0 && params.beta < 0.5))
    throw Error(ErrorKind::invalid_input, "invalid-lpt-params", "beta must lie in (0, 1/2)");
  if (!(params.d < 0.0)) throw Error(ErrorKind::invalid_input, "invalid-lpt-params", "d must be negative");
  const double Ld = static_cast<double>(L);
  const std::int64_t l1 = std::max<std::int64_t>(0, ceil_to_int(Ld - std::pow(Ld, 0.5 + params.beta)));

  BoxLp lp;
  lp.n = inst.n;
  lp.m = inst.m;
  lp.c = inst.r;
  lp.A = inst.A;
  lp.b = ep.remaining();
  for (double& b : lp.b) b = std::max(0.0, b) / Ld;
  lp.u = inst.lambda;
  const LpSolution sol = solve_box_lp(lp);
  const std::vector<double> p = lpt_probabilities(sol.x, inst.lambda, L, params.d);

  const std::int64_t e1 = std::min(w.t_end, w.t_start + l1 - 1);
  for (std::int64_t t = w.t_start; t <= e1; ++t) {
    const std::uint32_t j = ep.path().at(t);
    const double u = uniform01(rng);
    const bool z = ep.fits_all(ep.remaining()) && u < p[j];
    ep.log(t, j, z, z, nullptr, 0.0);
    if (z) ep.accept(j);
  }

  const std::int64_t s2 = w.t_start + l1;
  if (s2 > w.t_end) return theta0.value_or(std::vector<double>(inst.m, 0.0));
  if (!(min_of(ep.remaining()) > 0.0)) {
    ep.mark_halt(s2);
    ep.log_rejections(s2, w.t_end, nullptr, 0.0);
    return theta0.value_or(std::vector<double>(inst.m, 0.0));
  }
  return ff_impl(ep, {s2, w.t_end}, L - l1, theta0);
}

// Runs FD or its short-epoch fallback on one epoch of horizon tau.
std::vector<double> epoch_free(Episode& ep, Window w, std::int64_t tau, std::size_t u, const EpochParams& params,
                               const std::optional<std::vector<double>>& theta0) {
  if (tau < params.fd_floor) return ff_impl(ep, w, tau, theta0);
  const FdParams fp = u < params.fd.size() ? params.fd[u] : fd_default_params(tau);
  return fd_impl(ep, w, plan_fd(fp, tau), theta0);
}

PolicyTrace run_epochs(const Instance& inst, const ArrivalPath& path, const RestartSchedule& schedule,
                       const EpochParams& params, Engine* rng, bool record) {
  if (schedule.taus.empty() || schedule.taus.front() != inst.T)
    throw Error(ErrorKind::invalid_input, "invalid-schedule", "tau_0 must equal T");
  for (std::size_t u = 1; u < schedule.taus.size(); ++u)
    if (!(schedule.taus[u] < schedule.taus[u - 1] && schedule.taus[u] >= 1))
      throw Error(ErrorKind::invalid_input, "invalid-schedule", "taus must strictly decrease to >= 1");
  if (schedule.U > schedule.epochs())
    throw Error(ErrorKind::invalid_input, "invalid-schedule", "U exceeds the number of epochs");

  Episode ep(inst, path, {1, inst.T}, inst.C, record);
  std::optional<std::vector<double>> carried;
  std::vector<double> theta(inst.m, 0.0);
  for (std::size_t u = 0; u < schedule.epochs(); ++u) {
    const Window w = schedule.epoch(u, inst.T);
    const std::int64_t tau = schedule.taus[u];
    if (!(min_of(ep.remaining()) > 0.0)) {
      ep.mark_halt(w.t_start);
      ep.log_rejections(w.t_start, w.t_end, nullptr, 0.0);
      continue;
    }
    const auto theta0 = schedule.warm_start ? carried : std::nullopt;
    if (u < schedule.U) {
      const LptParams& lp = u < params.lpt.size() ? params.lpt[u] : params.lpt_default;
      theta = lpt_impl(ep, w, tau, lp, *rng, theta0);
    } else {
      theta = epoch_free(ep, w, tau, u, params, theta0);
    }
    carried = theta;
  }
  return ep.finish(theta);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FdPlan plan_fd(const FdParams& params, std::int64_t L) {
  const double a = params.alpha, b = params.beta, g = params.gamma;
  if (!(a > 0.0 && a < 0.5) || !(b >= a / 2.0 && b < 0.5) || !(g > 0.0 && g < a / 2.0))
    throw Error(ErrorKind::runtime, "horizon-too-short",
                "parameter constraints fail at L=" + std::to_string(L));
  if (L < 1) throw Error(ErrorKind::runtime, "horizon-too-short", "L < 1");
  FdPlan plan;
  plan.params = params;
  plan.L = L;
  const double Ld = static_cast<double>(L);
  plan.L_a = std::pow(Ld, params.a());
  plan.L_b = std::pow(Ld, params.b());
  plan.L_c = std::pow(Ld, params.c());
  plan.l1 = std::max<std::int64_t>(1, ceil_to_int(plan.L_a));
  plan.l2 = std::max<std::int64_t>(0, ceil_to_int(Ld - plan.L_a - plan.L_b));
  if (plan.l1 + plan.l2 > L)
    throw Error(ErrorKind::runtime, "horizon-too-short", "phases I and II exceed L=" + std::to_string(L));
  return plan;
}

FdParams fd_default_params(std::int64_t L) {
  if (L < kFdMinHorizon)
    throw Error(ErrorKind::runtime, "horizon-too-short",
                "default parameters need L >= " + std::to_string(kFdMinHorizon) + ", got " + std::to_string(L));
  const double ln_l = std::log(static_cast<double>(L));
  const double ratio = std::log(ln_l) / ln_l;
  FdParams p;
  p.alpha = 1.5 * ratio;
  p.beta = ratio;
  p.gamma = 2.0 * ratio / 3.0;
  plan_fd(p, L);
  return p;
}

ThresholdClasses classify_types(std::span<const std::int64_t> x_phase1, const Instance& inst, const FdPlan& plan) {
  ThresholdClasses cls;
  cls.accept.assign(inst.n, false);
  cls.reject.assign(inst.n, false);
  for (std::size_t j = 0; j < inst.n; ++j) {
    const double x = static_cast<double>(x_phase1[j]);
    if (x < inst.lambda[j] * plan.L_c)
      cls.reject[j] = true;
    else if (x > inst.lambda[j] * (plan.L_a - plan.L_c))
      cls.accept[j] = true;
  }
  return cls;
}

PolicyTrace run_ff(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                   const RunOptions& opts) {
  Episode ep(inst, path, window, B, opts.record);
  const std::int64_t L = opts.L.value_or(inst.T - window.t_start + 1);
  auto theta = ff_impl(ep, window, L, opts.theta0);
  return ep.finish(std::move(theta));
}

PolicyTrace run_fd(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                   const FdParams& params, const RunOptions& opts) {
  Episode ep(inst, path, window, B, opts.record);
  if (!(min_of(B) > 0.0)) throw Error(ErrorKind::runtime, "zero-capacity");
  const std::int64_t L = opts.L.value_or(inst.T - window.t_start + 1);
  auto theta = fd_impl(ep, window, plan_fd(params, L), opts.theta0);
  return ep.finish(std::move(theta));
}

std::vector<double> lpt_probabilities(std::span<const double> x_star, std::span<const double> lambda, std::int64_t L,
                                      double d) {
  const double Ld = std::pow(static_cast<double>(L), d);
  std::vector<double> p(x_star.size());
  for (std::size_t j = 0; j < x_star.size(); ++j) {
    if (x_star[j] < lambda[j] * Ld)
      p[j] = 0.0;
    else if (x_star[j] > lambda[j] * (1.0 - Ld))
      p[j] = 1.0;
    else
      p[j] = x_star[j] / lambda[j];
  }
  return p;
}

PolicyTrace run_lpt(const Instance& inst, const ArrivalPath& path, Window window, std::span<const double> B,
                    const LptParams& params, Engine& rng, const RunOptions& opts) {
  Episode ep(inst, path, window, B, opts.record);
  if (!(min_of(B) > 0.0)) throw Error(ErrorKind::runtime, "zero-capacity");
  const std::int64_t L = opts.L.value_or(inst.T - window.t_start + 1);
  auto theta = lpt_impl(ep, window, L, params, rng, opts.theta0);
  return ep.finish(std::move(theta));
}

Window RestartSchedule::epoch(std::size_t u, std::int64_t T) const {
  const std::int64_t next = u + 1 < taus.size() ? taus[u + 1] : 0;
  return {T - taus[u] + 1, T - next};
}

RestartSchedule restart_schedule(std::int64_t T) {
  RestartSchedule sched;
  if (T < 3) {
    sched.taus = {T};
    return sched;
  }
  const double lnT = std::log(static_cast<double>(T));
  const auto S = static_cast<int>(std::ceil(std::log(lnT) / std::log(1.5)));
  for (int u = 0; u <= S; ++u) {
    const std::int64_t tau = u == 0 ? T : ceil_to_int(std::exp(lnT * std::pow(2.0 / 3.0, u)));
    if (sched.taus.empty() || tau < sched.taus.back()) sched.taus.push_back(std::max<std::int64_t>(1, tau));
  }
  return sched;
}

PolicyTrace run_restart(const Instance& inst, const ArrivalPath& path, const RestartSchedule& schedule,
                        const EpochParams& params, bool record) {
  RestartSchedule plain = schedule;
  plain.U = 0;
  return run_epochs(inst, path, plain, params, nullptr, record);
}

PolicyTrace run_hybrid(const Instance& inst, const ArrivalPath& path, const RestartSchedule& schedule,
                       const EpochParams& params, Engine& rng, bool record) {
  return run_epochs(inst, path, schedule, params, &rng, record);
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "ff") return PolicyKind::ff;
  if (name == "fd") return PolicyKind::fd;
  if (name == "lpt") return PolicyKind::lpt;
  if (name == "restart") return PolicyKind::restart;
  if (name == "hybrid") return PolicyKind::hybrid;
  throw Error(ErrorKind::invalid_input, "unknown-policy", name);
}

std::string policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ff: return "ff";
    case PolicyKind::fd: return "fd";
    case PolicyKind::lpt: return "lpt";
    case PolicyKind::restart: return "restart";
    case PolicyKind::hybrid: return "hybrid";
  }
  return "?";
}

std::string PolicySpec::name() const { return policy_kind_name(kind); }

std::string PolicySpec::params_label() const {
  std::ostringstream os;
  auto fd_part = [&] {
    if (fd)
      os << "alpha=" << fd->alpha << ";beta=" << fd->beta << ";gamma=" << fd->gamma;
    else
      os << "fd=default";
  };
  switch (kind) {
    case PolicyKind::ff: os << "-"; break;
    case PolicyKind::fd: fd_part(); break;
    case PolicyKind::lpt: os << "beta=" << lpt.beta << ";d=" << lpt.d; break;
    case PolicyKind::restart:
      fd_part();
      os << ";warm=" << (warm_start ? 1 : 0);
      break;
    case PolicyKind::hybrid:
      fd_part();
      os << ";U=" << U << ";beta=" << lpt.beta << ";d=" << lpt.d << ";warm=" << (warm_start ? 1 : 0);
      break;
  }
  return os.str();
}

PolicyTrace run_policy(const PolicySpec& spec, const Instance& inst, const ArrivalPath& path, std::uint64_t rng_seed,
                       bool record) {
  const Window whole{1, inst.T};
  Engine rng(mix64(rng_seed ^ 0xA5A5A5A5A5A5A5A5ULL));
  RunOptions opts;
  opts.record = record;
  switch (spec.kind) {
    case PolicyKind::ff:
      return run_ff(inst, path, whole, inst.C, opts);
    case PolicyKind::fd:
      return run_fd(inst, path, whole, inst.C, spec.fd ? *spec.fd : fd_default_params(inst.T), opts);
    case PolicyKind::lpt:
      return run_lpt(inst, path, whole, inst.C, spec.lpt, rng, opts);
    case PolicyKind::restart:
    case PolicyKind::hybrid: {
      RestartSchedule sched = restart_schedule(inst.T);
      sched.warm_start = spec.warm_start;
      EpochParams params;
      params.fd_floor = spec.fd_floor;
      params.lpt_default = spec.lpt;
      if (spec.fd) params.fd.assign(sched.epochs(), *spec.fd);
      if (spec.kind == PolicyKind::restart) return run_restart(inst, path, sched, params, record);
      sched.U = std::min(spec.U, sched.epochs());
      return run_hybrid(inst, path, sched, params, rng, record);
    }
  }
  throw Error(ErrorKind::invalid_input, "unknown-policy");
}

std::string decisions_csv(const PolicyTrace& trace, std::size_t m) {
  std::string out = "t,j,y,z";
  for (std::size_t i = 1; i <= m; ++i) out += ",theta_" + std::to_string(i);
  out += '\n';
  for (const auto& d : trace.decisions) {
    out += std::to_string(d.t) + ',' + std::to_string(d.j + 1) + ',' + (d.y ? '1' : '0') + ',' + (d.z ? '1' : '0');
    for (std::size_t i = 0; i < m; ++i) out += ',' + (i < d.theta.size() ? fmt_double(d.theta[i]) : std::string());
    out += '\n';
  }
  return out;
}

}  // namespace nrm
