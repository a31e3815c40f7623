#include "nrm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "nrm/rng.hpp"

namespace nrm {

double Instance::a_max() const {
  return A.empty() ? 0.0 : *std::max_element(A.begin(), A.end());
}

std::vector<double> Instance::column(std::size_t j) const {
  std::vector<double> col(m);
  for (std::size_t i = 0; i < m; ++i) col[i] = a(i, j);
  return col;
}

Instance ScaledFamily::at(std::int64_t k) const {
  Instance inst = base;
  inst.T = base.T * k;
  for (double& c : inst.C) c *= static_cast<double>(k);
  return inst;
}

std::string instance_violation(const Instance& inst) {
  if (inst.n < 1 || inst.m < 1 || inst.T < 1) return "empty-dimension";
  if (inst.lambda.size() != inst.n || inst.r.size() != inst.n || inst.C.size() != inst.m ||
      inst.A.size() != inst.m * inst.n)
    return "empty-dimension";
  double sum = 0.0;
  for (double l : inst.lambda) {
    if (!(l > 0.0) || l > 1.0) return "probabilities-do-not-sum";
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-12) return "probabilities-do-not-sum";
  for (double c : inst.C)
    if (!(c > 0.0)) return "nonpositive-capacity";
  for (double rj : inst.r)
    if (!(rj >= 0.0)) return "negative-entry";
  for (double aij : inst.A)
    if (!(aij >= 0.0)) return "negative-entry";
  return {};
}

void validate_instance(const Instance& inst) {
  if (auto code = instance_violation(inst); !code.empty())
    throw Error(ErrorKind::invalid_input, code);
}

ArrivalPath sample_path(const Instance& inst, std::uint64_t seed) {
  std::vector<double> cdf(inst.n);
  std::partial_sum(inst.lambda.begin(), inst.lambda.end(), cdf.begin());
  const auto last = static_cast<std::uint32_t>(inst.n - 1);

  Engine engine(seed);
  ArrivalPath path;
  path.seed = seed;
  path.num_types = inst.n;
  path.types.resize(static_cast<std::size_t>(inst.T));
  for (auto& type : path.types) {
    const double u = uniform01(engine);
    const auto idx = static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    type = std::min(idx, last);
  }
  return path;
}

std::vector<std::int64_t> arrival_counts(const ArrivalPath& path, std::int64_t t1, std::int64_t t2) {
  if (t1 < 1 || t1 > t2 || t2 > path.length())
    throw Error(ErrorKind::invalid_input, "invalid-window",
                "[" + std::to_string(t1) + ", " + std::to_string(t2) + "]");
  std::size_t width = path.num_types;
  for (auto j : path.types) width = std::max<std::size_t>(width, j + 1);
  std::vector<std::int64_t> counts(width, 0);
  for (std::int64_t t = t1; t <= t2; ++t) ++counts[path.at(t)];
  return counts;
}

Instance gen_single_resource(std::int64_t k, double c_ratio, double r1, double r2) {
  Instance inst;
  inst.n = 2;
  inst.m = 1;
  inst.lambda = {0.5, 0.5};
  inst.r = {r1, r2};
  inst.A = {1.0, 1.0};
  inst.C = {c_ratio * static_cast<double>(k)};
  inst.T = k;
  return inst;
}

Instance gen_multi_resource(std::int64_t k, std::uint64_t seed, std::size_t n) {
  Instance inst;
  inst.n = n;
  inst.m = n;
  inst.lambda.assign(n, 1.0 / static_cast<double>(n));
  inst.r.resize(n);
  inst.A.resize(n * n);
  inst.C.assign(n, 0.8 * static_cast<double>(k));
  inst.T = k;

  Engine engine(mix64(seed));
  for (auto& rj : inst.r) rj = 1.0 + std::floor(uniform01(engine) * 10.0);
  for (auto& aij : inst.A) aij = (engine() >> 63) ? 1.0 : 0.0;

  // n equal shares of 1/n may not sum to 1 within 1e-12 in floating point.
  const double sum = std::accumulate(inst.lambda.begin(), inst.lambda.end(), 0.0);
  inst.lambda.back() += 1.0 - sum;
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["lambda"] = inst.lambda;
  j["r"] = inst.r;
  j["A"] = inst.A;
  j["C"] = inst.C;
  j["T"] = inst.T;
  return j.dump();
}

Instance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, "malformed-json", e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::invalid_input, "malformed-json", "expected an object");
  static const char* const kKeys[] = {"n", "m", "lambda", "r", "A", "C", "T"};
  for (const auto& item : j.items())
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return item.key() == k; }) ==
        std::end(kKeys))
      throw Error(ErrorKind::invalid_input, "unknown-key", item.key());

  Instance inst;
  try {
    inst.n = j.at("n").get<std::size_t>();
    inst.m = j.at("m").get<std::size_t>();
    inst.lambda = j.at("lambda").get<std::vector<double>>();
    inst.r = j.at("r").get<std::vector<double>>();
    inst.A = j.at("A").get<std::vector<double>>();
    inst.C = j.at("C").get<std::vector<double>>();
    inst.T = j.at("T").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, "malformed-instance", e.what());
  }
  validate_instance(inst);
  return inst;
}

}  // namespace nrm
