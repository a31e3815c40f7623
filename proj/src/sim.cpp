#include "nrm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "nrm/lp.hpp"
#include "nrm/rng.hpp"

namespace nrm {
namespace {

struct Moments {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

Moments moments(std::span<const double> v) {
  Moments out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.stderr_mean = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  return out;
}

// Calls work(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers join.
template <class Work>
void parallel_for(std::int64_t count, unsigned threads, Work&& work) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(1, count))));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); }

AuditResult fail(std::string violation, std::string detail) { return {false, std::move(violation), std::move(detail)}; }

}  // namespace

Replication replicate(const PolicySpec& spec, const Instance& inst, std::uint64_t seed, bool record) {
  Replication rep;
  rep.path = sample_path(inst, seed);
  rep.trace = run_policy(spec, inst, rep.path, seed, record);
  return rep;
}

PolicyTrace simulate(const PolicySpec& spec, const Instance& inst, std::uint64_t seed, bool record) {
  validate_instance(inst);
  return replicate(spec, inst, seed, record).trace;
}

RegretReport estimate_regret(const PolicySpec& spec, const Instance& inst, std::int64_t R, std::uint64_t base_seed,
                             const RegretOptions& opts) {
  validate_instance(inst);
  if (R < 2) throw Error(ErrorKind::invalid_input, "too-few-replications", "R must be at least 2");

  std::vector<double> revenue(static_cast<std::size_t>(R)), hindsight(static_cast<std::size_t>(R));
  std::vector<Replication> kept(opts.on_replication ? static_cast<std::size_t>(R) : 0);
  parallel_for(R, opts.threads, [&](std::int64_t i) {
    auto rep = replicate(spec, inst, stream_seed(base_seed, static_cast<std::uint64_t>(i)));
    const auto idx = static_cast<std::size_t>(i);
    revenue[idx] = rep.trace.revenue;
    hindsight[idx] = solve_hindsight(inst, rep.path).objective_value;
    if (opts.on_replication) kept[idx] = std::move(rep);
  });

  std::vector<double> regret(static_cast<std::size_t>(R));
  for (std::size_t i = 0; i < regret.size(); ++i) regret[i] = hindsight[i] - revenue[i];
  if (opts.on_replication)
    for (std::size_t i = 0; i < kept.size(); ++i) opts.on_replication(static_cast<std::int64_t>(i), kept[i], hindsight[i]);

  RegretReport rep;
  rep.policy = spec.name();
  rep.params = spec.params_label();
  rep.instance_id = opts.instance_id;
  rep.replications = R;
  rep.base_seed = base_seed;
  const auto mr = moments(regret);
  const auto mh = moments(hindsight);
  rep.mean_regret = mr.mean;
  rep.stderr_regret = mr.stderr_mean;
  rep.mean_revenue = moments(revenue).mean;
  rep.mean_hindsight = mh.mean;
  rep.stderr_hindsight = mh.stderr_mean;
  rep.min_path_regret = *std::min_element(regret.begin(), regret.end());
  rep.v_dlp = solve_dlp(inst).objective_value;
  return rep;
}

AuditResult audit_trace(const PolicyTrace& trace, const Instance& inst, const ArrivalPath& path) {
  const Window w = trace.window;
  if (trace.x.size() != inst.n || trace.ledger.B.size() != inst.m || trace.initial_capacity.size() != inst.m)
    return fail("shape", "trace dimensions differ from the instance");
  if (w.t_start < 1 || w.t_end > path.length() || w.t_start > w.t_end) return fail("shape", "window outside path");

  for (std::size_t i = 0; i < inst.m; ++i) {
    double used = 0.0;
    for (std::size_t j = 0; j < inst.n; ++j) used += inst.a(i, j) * static_cast<double>(trace.x[j]);
    const double c0 = trace.initial_capacity[i];
    if (!close(c0 - trace.ledger.B[i], used, c0))
      return fail("conservation", "resource " + std::to_string(i) + ": consumed " + std::to_string(c0 - trace.ledger.B[i]) +
                                      " vs A x = " + std::to_string(used));
  }

  auto nonnegative = [&](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double b) { return b >= -1e-9; });
  };
  if (!nonnegative(trace.ledger.B)) return fail("negative-capacity", "real ledger");
  if (trace.ledger.B_prime && !nonnegative(*trace.ledger.B_prime)) return fail("negative-capacity", "phase-II ledger");
  if (trace.ledger.B_dprime && !nonnegative(*trace.ledger.B_dprime)) return fail("negative-capacity", "phase-III ledger");

  double revenue = 0.0;
  for (std::size_t j = 0; j < inst.n; ++j) revenue += inst.r[j] * static_cast<double>(trace.x[j]);
  if (!close(revenue, trace.revenue, revenue)) return fail("accounting", "revenue differs from r.x");

  const auto counts = arrival_counts(path, w.t_start, w.t_end);
  for (std::size_t j = 0; j < inst.n; ++j) {
    const std::int64_t arrivals = j < counts.size() ? counts[j] : 0;
    if (trace.x[j] < 0 || trace.x[j] > arrivals)
      return fail("demand", "type " + std::to_string(j) + " accepted beyond its arrivals");
  }

  if (trace.decisions.empty()) return {};
  if (static_cast<std::int64_t>(trace.decisions.size()) != w.length())
    return fail("decision-log", "log does not cover the window");
  std::vector<std::int64_t> accepted(inst.n, 0);
  std::vector<double> ledger = trace.initial_capacity;
  for (std::size_t k = 0; k < trace.decisions.size(); ++k) {
    const auto& d = trace.decisions[k];
    if (d.t != w.t_start + static_cast<std::int64_t>(k) || d.j != path.at(d.t))
      return fail("decision-log", "period " + std::to_string(d.t) + " does not match the path");
    for (double th : d.theta)
      if (th < 0.0 || th > d.theta_bar) return fail("theta-box", "period " + std::to_string(d.t));
    if (!d.z) continue;
    ++accepted[d.j];
    for (std::size_t i = 0; i < inst.m; ++i) {
      ledger[i] -= inst.a(i, d.j);
      if (ledger[i] < -1e-9) return fail("negative-capacity", "period " + std::to_string(d.t));
    }
  }
  if (accepted != trace.x) return fail("decision-log", "accepted counts differ from the log");
  return {};
}

std::vector<ConcentrationRow> concentration_probe(const std::function<Instance(std::int64_t)>& family,
                                                  std::span<const std::int64_t> scales, std::int64_t R,
                                                  std::uint64_t base_seed) {
  if (R < 1) throw Error(ErrorKind::invalid_input, "too-few-replications", "R must be at least 1");
  PolicySpec ff;
  ff.kind = PolicyKind::ff;
  std::vector<ConcentrationRow> rows;
  for (std::int64_t k : scales) {
    const Instance inst = family(k);
    validate_instance(inst);
    const auto dlp = solve_dlp(inst);
    const double T = static_cast<double>(inst.T);
    const double norm = std::sqrt(T) * std::sqrt(std::log(T));
    std::vector<double> ratios(static_cast<std::size_t>(R));
    for (std::int64_t i = 0; i < R; ++i) {
      const auto seed = stream_seed(base_seed ^ static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i));
      const auto trace = simulate(ff, inst, seed);
      double dev = 0.0;
      for (std::size_t j = 0; j < inst.n; ++j)
        dev = std::max(dev, std::abs(static_cast<double>(trace.x[j]) - dlp.x[j]));
      ratios[static_cast<std::size_t>(i)] = dev / norm;
    }
    const auto mo = moments(ratios);
    rows.push_back({k, inst.T, mo.mean, mo.stderr_mean});
  }
  return rows;
}

}  // namespace nrm
