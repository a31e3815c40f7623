#include <doctest.h>

#include <cmath>

#include "nrm/lp.hpp"
#include "nrm/rng.hpp"
#include "nrm/sim.hpp"

using namespace nrm;

namespace {

PolicySpec spec_of(PolicyKind kind) {
  PolicySpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("stream_seed derivation") {
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  CHECK(stream_seed(7, 3) == mix64(7 + 4 * 0xD1B54A32D192ED03ULL));
  // Reference SplitMix64 output for state 0.
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("simulate and replicate share one path") {
  const auto inst = gen_single_resource(500, 0.8, 2, 1);
  const auto rep = replicate(spec_of(PolicyKind::ff), inst, 4);
  CHECK(rep.path.types == sample_path(inst, 4).types);
  CHECK(simulate(spec_of(PolicyKind::ff), inst, 4).x == rep.trace.x);
  auto bad = inst;
  bad.C = {0};
  CHECK_THROWS_WITH(simulate(spec_of(PolicyKind::ff), bad, 4), doctest::Contains("nonpositive-capacity"));
  const auto short_inst = gen_single_resource(50, 0.8, 2, 1);
  CHECK_THROWS_WITH(simulate(spec_of(PolicyKind::fd), short_inst, 4), doctest::Contains("horizon-too-short"));
}

TEST_CASE("estimate_regret with slack capacity is exactly zero") {
  const auto inst = gen_single_resource(400, 1.0, 3, 1);
  const auto rep = estimate_regret(spec_of(PolicyKind::ff), inst, 20, 5);
  CHECK(rep.mean_regret == 0.0);
  CHECK(rep.stderr_regret == 0.0);
  CHECK(rep.mean_revenue == doctest::Approx(rep.mean_hindsight));
  CHECK(rep.replications == 20);
  CHECK(rep.policy == "ff");
}

TEST_CASE("estimate_regret on identical paths has zero stderr") {
  Instance inst;
  inst.n = 1;
  inst.m = 1;
  inst.lambda = {1.0};
  inst.r = {1.0};
  inst.A = {1.0};
  inst.C = {30};
  inst.T = 100;
  const auto rep = estimate_regret(spec_of(PolicyKind::ff), inst, 2, 1);
  CHECK(rep.stderr_regret == 0.0);
  CHECK_THROWS_WITH(estimate_regret(spec_of(PolicyKind::ff), inst, 1, 1), doctest::Contains("too-few-replications"));
}

TEST_CASE("estimate_regret matches a hand aggregation and ignores thread count") {
  const auto inst = gen_single_resource(800, 0.7, 2, 1);
  const auto spec = spec_of(PolicyKind::restart);
  const std::int64_t R = 12;
  std::vector<double> regret;
  for (std::int64_t i = 0; i < R; ++i) {
    const auto seed = stream_seed(3, static_cast<std::uint64_t>(i));
    const auto path = sample_path(inst, seed);
    const auto tr = run_policy(spec, inst, path, seed);
    regret.push_back(solve_hindsight(inst, path).objective_value - tr.revenue);
  }
  double mean = 0.0;
  for (double v : regret) mean += v;
  mean /= static_cast<double>(R);
  double ss = 0.0;
  for (double v : regret) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));

  RegretOptions one, four;
  four.threads = 4;
  const auto a = estimate_regret(spec, inst, R, 3, one);
  const auto b = estimate_regret(spec, inst, R, 3, four);
  CHECK(a.mean_regret == doctest::Approx(mean));
  CHECK(a.stderr_regret == doctest::Approx(se));
  CHECK(a.mean_regret == b.mean_regret);
  CHECK(a.stderr_regret == b.stderr_regret);
  CHECK(a.mean_hindsight == b.mean_hindsight);
  CHECK(a.v_dlp == doctest::Approx(solve_dlp(inst).objective_value));
  CHECK(a.min_path_regret >= -1e-9);
}

TEST_CASE("on_replication sees every replication in order") {
  const auto inst = gen_single_resource(300, 0.8, 2, 1);
  std::vector<std::int64_t> seen;
  RegretOptions opts;
  opts.threads = 3;
  opts.on_replication = [&](std::int64_t i, const Replication& rep, double ho) {
    seen.push_back(i);
    CHECK(ho >= rep.trace.revenue - 1e-9);
  };
  estimate_regret(spec_of(PolicyKind::ff), inst, 7, 2, opts);
  CHECK(seen == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6});
}

TEST_CASE("audit_trace negative controls") {
  const auto inst = gen_single_resource(1000, 0.8, 2, 1);
  const auto rep = replicate(spec_of(PolicyKind::fd), inst, 6, true);
  CHECK(audit_trace(rep.trace, inst, rep.path).ok);

  auto t = rep.trace;
  t.x[0] += 1;
  CHECK(audit_trace(t, inst, rep.path).violation == "conservation");

  t = rep.trace;
  t.revenue += 1.0;
  CHECK(audit_trace(t, inst, rep.path).violation == "accounting");

  t = rep.trace;
  t.ledger.B[0] = -1.0;
  t.initial_capacity[0] = t.initial_capacity[0] - 1.0 - rep.trace.ledger.B[0];
  CHECK(audit_trace(t, inst, rep.path).violation == "negative-capacity");

  t = rep.trace;
  for (auto& d : t.decisions)
    if (!d.theta.empty()) {
      d.theta[0] = d.theta_bar + 1.0;
      break;
    }
  CHECK(audit_trace(t, inst, rep.path).violation == "theta-box");

  t = rep.trace;
  t.decisions.pop_back();
  CHECK(audit_trace(t, inst, rep.path).violation == "decision-log");

  // Accept more type-2 customers than arrived: consistent ledger, broken demand.
  const auto counts = arrival_counts(rep.path, 1, inst.T);
  t = rep.trace;
  const auto extra = counts[1] - t.x[1] + 1;
  t.x[1] += extra;
  t.x[0] -= extra;
  t.revenue = inst.r[0] * static_cast<double>(t.x[0]) + inst.r[1] * static_cast<double>(t.x[1]);
  CHECK(audit_trace(t, inst, rep.path).violation == "demand");
}

TEST_CASE("concentration_probe") {
  const auto family = [](std::int64_t k) { return gen_single_resource(k, 0.8, 2, 1); };
  const std::vector<std::int64_t> scales{1000, 4000, 16000};
  const auto rows = concentration_probe(family, scales, 1, 9);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].T == 16000);

  // Slack capacity: FF accepts every arrival and w* = lambda T.
  const auto slack = [](std::int64_t k) { return gen_single_resource(k, 1.0, 2, 1); };
  const std::vector<std::int64_t> one{2000};
  const auto r = concentration_probe(slack, one, 1, 9);
  const auto inst = slack(2000);
  const auto path = sample_path(inst, stream_seed(9 ^ 2000ULL, 0));
  const auto counts = arrival_counts(path, 1, inst.T);
  double dev = 0.0;
  for (auto c : counts) dev = std::max(dev, std::abs(static_cast<double>(c) - 1000.0));
  CHECK(r[0].mean_ratio == doctest::Approx(dev / (std::sqrt(2000.0) * std::sqrt(std::log(2000.0)))));
  CHECK_THROWS(concentration_probe(family, scales, 0, 9));
}
