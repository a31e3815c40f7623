// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: nrm_acceptance [--only N]... [--threads K]
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nrm/lp.hpp"
#include "nrm/ogd.hpp"
#include "nrm/policies.hpp"
#include "nrm/rng.hpp"
#include "nrm/sim.hpp"
#include "oracles.hpp"

using namespace nrm;

namespace {

unsigned g_threads = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double pooled(double se_a, double se_b) { return std::sqrt(se_a * se_a + se_b * se_b); }

PolicySpec spec_of(PolicyKind kind, std::size_t U = 0, bool warm = false) {
  PolicySpec s;
  s.kind = kind;
  s.U = U;
  s.warm_start = warm;
  return s;
}

RegretReport regret(const PolicySpec& spec, const Instance& inst, std::int64_t R, std::uint64_t seed) {
  RegretOptions opts;
  opts.threads = g_threads;
  return estimate_regret(spec, inst, R, seed, opts);
}

// 1. Projected OGD through the library's dual_step stays within 1.5 G D sqrt(t).
Outcome ogd_bound() {
  Engine eng(mix64(101));
  double worst = -1e300;
  int agree = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 1 + eng() % 4;
    const std::size_t t = 1 + eng() % 1000;
    const double width = 0.1 + 5.0 * uniform01(eng);
    const double scale = 0.1 + 3.0 * uniform01(eng);
    // Half the sequences carry a persistent drift so the hindsight vertex is nontrivial.
    std::vector<double> drift(m);
    for (double& d : drift) d = rep % 2 ? scale * (2.0 * uniform01(eng) - 1.0) : 0.0;
    std::vector<std::vector<double>> grads(t, std::vector<double>(m));
    std::vector<LinearCost> costs(t);
    for (std::size_t s = 0; s < t; ++s) {
      for (std::size_t i = 0; i < m; ++i) grads[s][i] = drift[i] + scale * (2.0 * uniform01(eng) - 1.0);
      costs[s].gradient = grads[s];
    }
    const auto ref = oracle::ogd_brute_force(grads, width);

    // dual_step applies theta - eta (B/L - y A); with y = 0 and B/L = g it is a plain OGD step.
    OgdConfig cfg;
    cfg.theta_bar = width;
    cfg.D = ref.D;
    cfg.G = ref.G;
    DualState st{std::vector<double>(m, 0.0), 0};
    double incurred = 0.0;
    const std::vector<double> zero(m, 0.0);
    for (std::size_t s = 0; s < t; ++s) {
      for (std::size_t i = 0; i < m; ++i) incurred += grads[s][i] * st.theta[i];
      cfg.B_over_L = grads[s];
      st = dual_step(st, cfg, false, zero);
    }
    const double bound = 1.5 * ref.G * ref.D * std::sqrt(static_cast<double>(t));
    const double r = incurred - ref.best_vertex;
    worst = std::max(worst, r / bound);
    if (!(r <= bound)) return {false, fmt("sequence %d: regret %.6g > bound %.6g", rep, r, bound)};
    const auto lib = ogd_regret_oracle(costs, width);
    if (std::abs(lib.incurred - incurred) <= 1e-9 * std::max(1.0, std::abs(incurred)) &&
        std::abs(lib.best_fixed - ref.best_vertex) <= 1e-9 * std::max(1.0, std::abs(ref.best_vertex)))
      ++agree;
  }
  if (agree != 100) return {false, fmt("library oracle disagrees with brute force on %d sequences", 100 - agree)};
  return {true, fmt("100 sequences, max regret/bound = %.4f", worst)};
}

// 2. Simplex against exhaustive vertex enumeration.
Outcome lp_oracle() {
  Engine eng(mix64(202));
  auto pick = [&](int lo, int hi) { return static_cast<double>(lo + static_cast<int>(eng() % (hi - lo + 1))); };
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    BoxLp p;
    p.n = 1 + eng() % 5;
    p.m = 1 + eng() % (6 - p.n);
    for (std::size_t j = 0; j < p.n; ++j) p.c.push_back(pick(-3, 9));
    for (std::size_t k = 0; k < p.n * p.m; ++k) p.A.push_back(pick(-2, 5));
    // Every fourth instance gets tied rows or zero bounds to exercise degeneracy.
    for (std::size_t i = 0; i < p.m; ++i) p.b.push_back(rep % 4 == 0 ? pick(0, 1) : pick(0, 10));
    for (std::size_t j = 0; j < p.n; ++j) p.u.push_back(rep % 4 == 0 ? pick(0, 1) : pick(0, 4));
    const double got = solve_box_lp(p).objective_value;
    const double want = oracle::box_lp_by_vertices(p);
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= 1e-6)) return {false, fmt("instance %d: simplex %.9g vs vertices %.9g", rep, got, want)};
  }
  return {true, fmt("200 instances, max |diff| = %.3g", worst)};
}

// 3. V^ALG <= V^HO on every path; mean V^HO <= V^DLP + 3 stderr.
Outcome sandwich() {
  const auto inst = gen_single_resource(2000, 0.8, 2, 1);
  const std::int64_t R = 500;
  const double v_dlp = solve_dlp(inst).objective_value;
  std::string worst;
  int violations = 0;
  double hind_mean = 0.0, hind_se = 0.0;
  for (auto kind : {PolicyKind::ff, PolicyKind::fd, PolicyKind::lpt, PolicyKind::restart, PolicyKind::hybrid}) {
    RegretOptions opts;
    opts.threads = g_threads;
    opts.on_replication = [&](std::int64_t i, const Replication& rep, double ho) {
      if (!(rep.trace.revenue <= ho + 1e-9 * std::max(1.0, ho))) {
        ++violations;
        worst = fmt("%s path %lld: V^ALG %.17g > V^HO %.17g", policy_kind_name(kind).c_str(),
                    static_cast<long long>(i), rep.trace.revenue, ho);
      }
    };
    const auto rep = estimate_regret(spec_of(kind, 2), inst, R, 303, opts);
    hind_mean = rep.mean_hindsight;
    hind_se = rep.stderr_hindsight;
  }
  if (violations) return {false, fmt("%d dominance violations; %s", violations, worst.c_str())};
  const bool upper = hind_mean <= v_dlp + 3.0 * hind_se;
  return {upper, fmt("5 policies x %lld paths dominated; mean V^HO %.3f vs V^DLP %.3f + 3*%.3f", static_cast<long long>(R),
                     hind_mean, v_dlp, hind_se)};
}

// 4. V^DLP <= theta_bar C_min on random instances where every type uses some resource.
Outcome weak_duality() {
  Engine eng(mix64(404));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Instance inst;
    inst.n = 1 + eng() % 6;
    inst.m = 1 + eng() % 4;
    double total = 0.0;
    for (std::size_t j = 0; j < inst.n; ++j) {
      inst.lambda.push_back(0.05 + uniform01(eng));
      total += inst.lambda.back();
      inst.r.push_back(10.0 * uniform01(eng));
    }
    for (double& l : inst.lambda) l /= total;
    inst.A.assign(inst.n * inst.m, 0.0);
    for (std::size_t j = 0; j < inst.n; ++j) {
      for (std::size_t i = 0; i < inst.m; ++i)
        if (uniform01(eng) < 0.5) inst.A[i * inst.n + j] = 0.1 + 3.0 * uniform01(eng);
      inst.A[(eng() % inst.m) * inst.n + j] = 0.1 + 3.0 * uniform01(eng);
    }
    inst.T = 10 + static_cast<std::int64_t>(eng() % 5000);
    for (std::size_t i = 0; i < inst.m; ++i) inst.C.push_back(1.0 + uniform01(eng) * static_cast<double>(inst.T));
    validate_instance(inst);
    const double v = solve_dlp(inst).objective_value;
    const double bound = theta_bar(inst.C, inst) * *std::min_element(inst.C.begin(), inst.C.end());
    worst = std::max(worst, v / bound);
    if (!(v <= bound * (1.0 + 1e-7))) return {false, fmt("instance %d: V^DLP %.9g > %.9g", rep, v, bound)};
  }
  return {true, fmt("100 instances, max V^DLP / (theta_bar C_min) = %.4f", worst)};
}

const std::vector<std::int64_t> kGrid{1000, 4000, 16000};

// 5. mean_regret(FF)/sqrt(k) within a factor 3 across the grid.
Outcome ff_sqrt_scale() {
  std::vector<double> ratio;
  std::string rows;
  for (auto k : kGrid) {
    const auto rep = regret(spec_of(PolicyKind::ff), gen_single_resource(k, 0.8, 2, 1), 300, 505);
    ratio.push_back(rep.mean_regret / std::sqrt(static_cast<double>(k)));
    rows += fmt(" k=%lld:%.4g(+-%.2g)", static_cast<long long>(k), rep.mean_regret, rep.stderr_regret);
  }
  const double spread = *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
  return {spread < 3.0, fmt("regret/sqrt(k) spread %.3f (need < 3);", spread) + rows};
}

// 6. mean_regret(FD)/sqrt(k) strictly smaller at the largest scale than the smallest.
Outcome fd_sublinear() {
  std::vector<double> ratio;
  std::string rows;
  for (auto k : kGrid) {
    const auto rep = regret(spec_of(PolicyKind::fd), gen_single_resource(k, 0.8, 2, 1), 300, 606);
    ratio.push_back(rep.mean_regret / std::sqrt(static_cast<double>(k)));
    rows += fmt(" k=%lld:%.4g(+-%.2g)", static_cast<long long>(k), rep.mean_regret, rep.stderr_regret);
  }
  return {ratio.back() < ratio.front(), fmt("regret/sqrt(k) %.4g at 1e3 -> %.4g at 1.6e4;", ratio.front(), ratio.back()) + rows};
}

// 7. restart < FD < FF at k = 1e4 with gaps above 2 pooled stderr, both revenue cases.
Outcome ordering() {
  bool pass = true;
  std::string detail;
  for (double r1 : {2.0, 5.0}) {
    const auto inst = gen_single_resource(10000, 0.8, r1, 1);
    const auto rs = regret(spec_of(PolicyKind::restart), inst, 500, 707);
    const auto fd = regret(spec_of(PolicyKind::fd), inst, 500, 707);
    const auto ff = regret(spec_of(PolicyKind::ff), inst, 500, 707);
    const bool a = fd.mean_regret - rs.mean_regret > 2.0 * pooled(rs.stderr_regret, fd.stderr_regret);
    const bool b = ff.mean_regret - fd.mean_regret > 2.0 * pooled(fd.stderr_regret, ff.stderr_regret);
    pass = pass && a && b;
    detail += fmt(" r1=%g: restart %.4g(+-%.2g) fd %.4g(+-%.2g) ff %.4g(+-%.2g);", r1, rs.mean_regret, rs.stderr_regret,
                  fd.mean_regret, fd.stderr_regret, ff.mean_regret, ff.stderr_regret);
  }
  return {pass, detail};
}

// 8. Hybrid regret nonincreasing in U = 0..4 up to 2 pooled stderr, both revenue cases.
Outcome hybrid_benefit() {
  bool pass = true;
  std::string detail;
  for (double r1 : {2.0, 5.0}) {
    const auto inst = gen_single_resource(10000, 0.8, r1, 1);
    std::vector<RegretReport> reps;
    for (std::size_t U = 0; U <= 4; ++U) reps.push_back(regret(spec_of(PolicyKind::hybrid, U), inst, 300, 808));
    detail += fmt(" r1=%g:", r1);
    for (std::size_t U = 0; U < reps.size(); ++U) {
      detail += fmt(" U%zu=%.4g(+-%.2g)", U, reps[U].mean_regret, reps[U].stderr_regret);
      if (U > 0 && reps[U].mean_regret > reps[U - 1].mean_regret +
                                              2.0 * pooled(reps[U].stderr_regret, reps[U - 1].stderr_regret))
        pass = false;
    }
    detail += ";";
  }
  return {pass, detail};
}

// 9. Warm-started restart no worse than plain restart beyond 2 pooled stderr.
Outcome warm_start() {
  const auto inst = gen_single_resource(10000, 0.8, 2, 1);
  const auto plain = regret(spec_of(PolicyKind::restart), inst, 500, 909);
  const auto warm = regret(spec_of(PolicyKind::restart, 0, true), inst, 500, 909);
  const double slack = 2.0 * pooled(plain.stderr_regret, warm.stderr_regret);
  return {warm.mean_regret <= plain.mean_regret + slack,
          fmt("warm %.4g(+-%.2g) vs plain %.4g(+-%.2g), slack %.3g", warm.mean_regret, warm.stderr_regret,
              plain.mean_regret, plain.stderr_regret, slack)};
}

// 10. FF concentration ratio at 1.6e4 at most twice its value at 1e3.
Outcome concentration() {
  const auto rows = concentration_probe([](std::int64_t k) { return gen_single_resource(k, 0.8, 2, 1); }, kGrid, 200, 1010);
  std::string detail;
  for (const auto& r : rows) detail += fmt(" k=%lld:%.4g(+-%.2g)", static_cast<long long>(r.k), r.mean_ratio, r.stderr_ratio);
  return {rows.back().mean_ratio <= 2.0 * rows.front().mean_ratio, "ratios" + detail};
}

// 11. Audit, dominance and determinism over 10^4 randomized runs of all five policies.
Outcome invariants() {
  Engine eng(mix64(1111));
  const PolicyKind kinds[] = {PolicyKind::ff, PolicyKind::fd, PolicyKind::lpt, PolicyKind::restart, PolicyKind::hybrid};
  std::int64_t runs = 0;
  for (int i = 0; i < 10000; ++i) {
    Instance inst;
    const std::int64_t T = 100 + static_cast<std::int64_t>(eng() % 1400);
    if (eng() % 2) {
      inst = gen_single_resource(T, 0.3 + 0.7 * uniform01(eng), 1.0 + std::floor(9.0 * uniform01(eng)), 1.0);
    } else {
      inst.n = 1 + eng() % 5;
      inst.m = 1 + eng() % 3;
      double total = 0.0;
      for (std::size_t j = 0; j < inst.n; ++j) {
        inst.lambda.push_back(0.05 + uniform01(eng));
        total += inst.lambda.back();
        inst.r.push_back(1.0 + std::floor(10.0 * uniform01(eng)));
      }
      for (double& l : inst.lambda) l /= total;
      for (std::size_t k = 0; k < inst.n * inst.m; ++k) inst.A.push_back(static_cast<double>(eng() % 3));
      inst.T = T;
      for (std::size_t q = 0; q < inst.m; ++q) inst.C.push_back(std::floor((0.1 + uniform01(eng)) * static_cast<double>(T)));
    }
    const auto kind = kinds[i % 5];
    const auto spec = spec_of(kind, eng() % 3, eng() % 2);
    const std::uint64_t seed = eng();
    const auto rep = replicate(spec, inst, seed, true);
    const auto audit = audit_trace(rep.trace, inst, rep.path);
    if (!audit.ok)
      return {false, fmt("run %d (%s): %s %s", i, spec.name().c_str(), audit.violation.c_str(), audit.detail.c_str())};
    const double ho = solve_hindsight(inst, rep.path).objective_value;
    if (!(rep.trace.revenue <= ho + 1e-9 * std::max(1.0, ho)))
      return {false, fmt("run %d (%s): V^ALG %.17g > V^HO %.17g", i, spec.name().c_str(), rep.trace.revenue, ho)};
    const auto again = replicate(spec, inst, seed, true);
    if (again.trace.x != rep.trace.x || decisions_csv(again.trace, inst.m) != decisions_csv(rep.trace, inst.m))
      return {false, fmt("run %d (%s): rerun differs", i, spec.name().c_str())};
    ++runs;
  }
  return {true, fmt("%lld runs audited, dominated and reproduced", static_cast<long long>(runs))};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--only", only, "Criterion ids to run (default: all)");
  app.add_option("--threads", g_threads, "Worker threads for replications");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "ogd-regret-bound", ogd_bound},        {2, "lp-oracle-equivalence", lp_oracle},
      {3, "benchmark-sandwich", sandwich},       {4, "dlp-below-theta-bar-capacity", weak_duality},
      {5, "ff-sqrt-k-scale", ff_sqrt_scale},     {6, "fd-sublinear-normalized", fd_sublinear},
      {7, "policy-ordering", ordering},          {8, "hybrid-benefit", hybrid_benefit},
      {9, "warm-start-benefit", warm_start},     {10, "concentration-probe", concentration},
      {11, "invariant-suite", invariants},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %-30s %.1fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
