#include <doctest.h>

#include <cmath>

#include "flost/dft.hpp"
#include "flost/estimator.hpp"
#include "flost/rng.hpp"
#include "flost/synthesis.hpp"
#include "oracles.hpp"

using namespace flost;

namespace {

double rel_err(const DenseTensor3& got, const DenseTensor3& want) {
  double num = 0.0;
  for (index_t i = 0; i < got.size(); ++i) {
    const double d = got.values()[i] - want.values()[i];
    num += d * d;
  }
  return std::sqrt(num) / (frobenius_norm(want) + 1e-300);
}

RegularizationConfig uniform_config(index_t k, double lambda1, double lambda2) {
  RegularizationConfig cfg;
  cfg.k = k;
  cfg.lambda1.assign(k, lambda1);
  cfg.lambda2 = lambda2;
  return cfg;
}

ObservationSet bernoulli_obs(const DenseTensor3& x, double p, double sigma, std::uint64_t seed) {
  return sample_observations(x, SamplingSpec{p, sigma, seed});
}

}  // namespace

TEST_CASE("rescaled_projection") {
  DenseTensor3 x({2, 2, 3});
  RandomStream stream(31, 0);
  for (double& v : x.values()) v = stream.normal();

  SUBCASE("p = 1 with full observation returns the data") {
    ObservationSet obs = bernoulli_obs(x, 1.0, 0.0, 1);
    CHECK(rel_err(rescaled_projection(obs), x) < 1e-15);
  }

  SUBCASE("no entries gives the zero tensor") {
    ObservationSet obs;
    obs.dims = {2, 2, 3};
    obs.p = 0.5;
    CHECK(frobenius_norm(rescaled_projection(obs)) == 0.0);
  }

  SUBCASE("single entry is rescaled by 1/p") {
    ObservationSet obs;
    obs.dims = {2, 2, 3};
    obs.p = 0.5;
    obs.entries.push_back({1, 0, 2, 2.0});
    DenseTensor3 out = rescaled_projection(obs);
    CHECK(out(1, 0, 2) == 4.0);
    CHECK(frobenius_norm(out) == 4.0);
  }

  SUBCASE("invalid p") {
    ObservationSet obs;
    obs.dims = {2, 2, 3};
    obs.p = 0.0;
    CHECK_THROWS_AS(rescaled_projection(obs), std::invalid_argument);
  }
}

TEST_CASE("theorem_lambda_schedule") {
  SUBCASE("frozen evaluation at M=N=T=100, p=0.5") {
    RegularizationConfig cfg = theorem_lambda_schedule(100, 100, 100, 0.5, 1.0, 1.0, 1.0, 10);
    REQUIRE(cfg.lambda1.size() == 10);
    CHECK(cfg.lambda1[0] == doctest::Approx(32.325050340585136).epsilon(1e-12));
    CHECK(cfg.lambda2 == doctest::Approx(3.9558882959679114).epsilon(1e-12));
    // independent evaluation with the terms assembled in a different order
    const double log100 = std::log(100.0);
    const double ref1 = std::sqrt(100.0 * log100) / std::sqrt(0.5) +
                        std::pow(log100, 1.5) / (0.5 * std::sqrt(100.0));
    const double ref2 = std::sqrt(log100) / std::sqrt(0.5) + log100 / (std::sqrt(100.0) * 0.5);
    CHECK(cfg.lambda1[0] == doctest::Approx(ref1).epsilon(1e-12));
    CHECK(cfg.lambda2 == doctest::Approx(ref2).epsilon(1e-12));
  }

  SUBCASE("homogeneous in sigma_gamma") {
    RegularizationConfig a = theorem_lambda_schedule(40, 30, 20, 0.3, 1.0, 2.0, 3.0, 4);
    RegularizationConfig b = theorem_lambda_schedule(40, 30, 20, 0.3, 2.0, 2.0, 3.0, 4);
    for (index_t l = 0; l < 4; ++l)
      CHECK(b.lambda1[l] == doctest::Approx(2.0 * a.lambda1[l]).epsilon(1e-14));
    CHECK(b.lambda2 == doctest::Approx(2.0 * a.lambda2).epsilon(1e-14));
  }

  SUBCASE("p = 1 and huge T leave only the leading lambda2 term") {
    const index_t huge_t = index_t{1} << 40;
    RegularizationConfig cfg = theorem_lambda_schedule(100, 100, huge_t, 1.0, 1.0, 1.0, 1.0, 1);
    const double limit = std::sqrt(std::log(static_cast<double>(huge_t)));
    CHECK(cfg.lambda2 == doctest::Approx(limit).epsilon(1e-4));
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(theorem_lambda_schedule(10, 10, 10, 0.0, 1.0, 1.0, 1.0, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(theorem_lambda_schedule(10, 10, 10, 0.5, 1.0, 1.0, 1.0, 7),
                    std::invalid_argument);
  }
}

TEST_CASE("error_bound") {
  SUBCASE("all zero lambdas") {
    RegularizationConfig cfg = uniform_config(2, 0.0, 0.0);
    BoundReport report = error_bound(cfg, {3, 1}, 10);
    CHECK(report.bound_value == 0.0);
  }

  SUBCASE("arithmetic example: 16(4*3 + 1*5) = 272") {
    RegularizationConfig cfg = uniform_config(1, 2.0, 1.0);
    BoundReport report = error_bound(cfg, {3}, 5);
    CHECK(report.bound_value == doctest::Approx(272.0));
    REQUIRE(report.lowrank_terms.size() == 1);
    CHECK(report.lowrank_terms[0] == doctest::Approx(192.0));
    CHECK(report.sparse_term == doctest::Approx(80.0));
  }

  SUBCASE("ranks length must equal K") {
    RegularizationConfig cfg = uniform_config(2, 1.0, 1.0);
    CHECK_THROWS_AS(error_bound(cfg, {1}, 0), std::invalid_argument);
  }
}

TEST_CASE("parameter_count") {
  FlostModel model;
  model.dims = {10, 10, 8};
  model.k = 2;
  model.lowrank.resize(2);
  SUBCASE("empty model counts zero") { CHECK(parameter_count(model) == 0); }

  SUBCASE("one rank-2 slice in 10x10 counts 2*21") {
    model.lowrank[0].u = ComplexMatrix::Zero(10, 2);
    model.lowrank[0].sigma = Eigen::VectorXd::Ones(2);
    model.lowrank[0].v = ComplexMatrix::Zero(10, 2);
    CHECK(parameter_count(model) == 42);
    model.sparse_tail.push_back({2, 0, 0, cxd(1.0, 1.0)});
    CHECK(parameter_count(model) == 44);
  }

  SUBCASE("all-low-rank stack costs more than the sparse tail when r(M+N+1)(half-K) > 2s") {
    // formula-level comparison at M=N=10, T=8, r=2: half=5
    const index_t r = 2, m = 10, n = 10, half = 5, k = 2, s = 3;
    const index_t flost_count = k * r * (m + n + 1) + 2 * s;
    const index_t tubal_count = half * r * (m + n + 1);
    CHECK(r * (m + n + 1) * (half - k) > 2 * s);
    CHECK(tubal_count > flost_count);
  }
}

TEST_CASE("fit recovers exactly with full clean data and zero lambdas") {
  DenseTensor3 truth = generate_flost_truth({{8, 7, 12}, 2, 3, 20, 77});
  ObservationSet obs = bernoulli_obs(truth, 1.0, 0.0, 5);
  FlostModel model = fit(obs, uniform_config(3, 0.0, 0.0));
  CHECK(rel_err(reconstruct(model), truth) < 1e-10);
}

TEST_CASE("fit of all-zero observations is the zero model") {
  ObservationSet obs;
  obs.dims = {4, 4, 6};
  obs.p = 0.5;
  for (index_t i = 0; i < 4; ++i) obs.entries.push_back({i, i, 0, 0.0});
  FlostModel model = fit(obs, uniform_config(2, 0.0, 0.0));
  CHECK(model.sparse_tail.empty());
  for (const SvdFactors& f : model.lowrank) CHECK(f.rank() == 0);
  CHECK(frobenius_norm(reconstruct(model)) == 0.0);
  CHECK(parameter_count(model) == 0);
}

TEST_CASE("fitted slices solve the per-slice subproblems") {
  RandomStream stream(32, 0);
  DenseTensor3 x = oracle::random_tensor({4, 4, 4}, stream);
  ObservationSet obs = bernoulli_obs(x, 0.7, 0.3, 9);
  const double lambda1 = 0.4 + stream.uniform();
  const double lambda2 = 0.2 + 0.5 * stream.uniform();
  const index_t k = 2;
  FlostModel model = fit(obs, uniform_config(k, lambda1, lambda2));
  const double p = effective_sampling_rate(obs);
  const SliceIndexPlan plan(4, k);

  for (index_t l = 0; l < k; ++l) {
    const ComplexMatrix data = observation_slice(obs, l, p);
    const ComplexMatrix got = model.lowrank[l].compose();
    CHECK((got - oracle::svt_oracle(data, lambda1)).norm() < 1e-6);
  }
  for (index_t l = k; l < plan.half; ++l) {
    ComplexMatrix got = ComplexMatrix::Zero(4, 4);
    for (const TailEntry& e : model.sparse_tail)
      if (e.slice == l) got(e.i, e.j) = e.value;
    const ComplexMatrix data = observation_slice(obs, l, p);
    for (index_t i = 0; i < 4; ++i)
      for (index_t j = 0; j < 4; ++j)
        CHECK(std::abs(got(i, j) - oracle::soft_threshold_oracle(data(i, j), lambda2)) < 1e-6);
  }
}

TEST_CASE("fit is identical for any worker count") {
  DenseTensor3 truth = generate_flost_truth({{10, 9, 14}, 2, 3, 30, 123});
  ObservationSet obs = bernoulli_obs(truth, 0.6, 0.2, 4);
  RegularizationConfig cfg = uniform_config(3, 0.8, 0.3);
  FlostModel one = fit(obs, cfg, 1);
  FlostModel four = fit(obs, cfg, 4);
  REQUIRE(one.lowrank.size() == four.lowrank.size());
  for (std::size_t l = 0; l < one.lowrank.size(); ++l) {
    CHECK(one.lowrank[l].u == four.lowrank[l].u);
    CHECK(one.lowrank[l].sigma == four.lowrank[l].sigma);
    CHECK(one.lowrank[l].v == four.lowrank[l].v);
  }
  REQUIRE(one.sparse_tail.size() == four.sparse_tail.size());
  for (std::size_t e = 0; e < one.sparse_tail.size(); ++e) {
    CHECK(one.sparse_tail[e].slice == four.sparse_tail[e].slice);
    CHECK(one.sparse_tail[e].value == four.sparse_tail[e].value);
  }
  CHECK(reconstruct(one).values() == reconstruct(four).values());
}

TEST_CASE("degenerate K = half reduces to all-slices SVT") {
  RandomStream stream(33, 0);
  DenseTensor3 x = oracle::random_tensor({6, 5, 9}, stream);
  ObservationSet obs = bernoulli_obs(x, 0.8, 0.2, 6);
  const index_t half = SliceIndexPlan::half_slices(9);
  const double lambda = 1.3;
  FlostModel model = fit(obs, uniform_config(half, lambda, 0.0));
  DenseTensor3 got = reconstruct(model);
  DenseTensor3 want = oracle::all_slices_svt(obs, lambda);
  CHECK(rel_err(got, want) < 1e-12);
}

TEST_CASE("estimate improves the objective over reference points") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    DenseTensor3 truth = generate_flost_truth({{12, 10, 16}, 2, 3, 40, seed});
    ObservationSet obs = bernoulli_obs(truth, 0.5, 0.1, seed + 10);
    double sum = 0.0, sq = 0.0;
    for (const ObservationEntry& e : obs.entries) {
      sum += e.value;
      sq += e.value * e.value;
    }
    const double n = static_cast<double>(obs.entries.size());
    const double sg = std::sqrt(std::max(sq / n - (sum / n) * (sum / n), 0.0));
    RegularizationConfig cfg =
        theorem_lambda_schedule(12, 10, 16, 0.5, sg, 1.0, 1.0, 3);
    DenseTensor3 est = reconstruct(fit(obs, cfg));
    const double at_est = oracle::objective_value(est, obs, cfg);
    const double at_truth = oracle::objective_value(truth, obs, cfg);
    const double at_zero = oracle::objective_value(DenseTensor3(truth.dims()), obs, cfg);
    CHECK(at_est <= at_truth * (1.0 + 1e-12));
    CHECK(at_est <= at_zero * (1.0 + 1e-12));
  }
}

TEST_CASE("shrinkage is monotone in the lambdas") {
  DenseTensor3 truth = generate_flost_truth({{10, 10, 12}, 3, 3, 60, 321});
  ObservationSet obs = bernoulli_obs(truth, 0.7, 0.2, 9);
  FitWorkspace workspace(obs, 3);
  index_t prev_rank = -1;
  std::size_t prev_nnz = 0;
  bool first = true;
  for (double lambda : {0.0, 0.4, 0.9, 1.8, 4.0, 9.0}) {
    FlostModel model = workspace.solve(uniform_config(3, lambda, lambda * 0.3));
    index_t rank_sum = 0;
    for (const SvdFactors& f : model.lowrank) rank_sum += f.rank();
    if (!first) {
      CHECK(rank_sum <= prev_rank);
      CHECK(model.sparse_tail.size() <= prev_nnz);
    }
    prev_rank = rank_sum;
    prev_nnz = model.sparse_tail.size();
    first = false;
  }
}

TEST_CASE("reconstruct_at agrees with the dense reconstruction") {
  DenseTensor3 truth = generate_flost_truth({{7, 6, 11}, 2, 2, 25, 55});
  ObservationSet obs = bernoulli_obs(truth, 0.6, 0.1, 2);
  FlostModel model = fit(obs, uniform_config(2, 0.7, 0.2));
  DenseTensor3 dense = reconstruct(model);
  std::vector<Index3> at;
  RandomStream stream(34, 0);
  for (int q = 0; q < 60; ++q)
    at.push_back({static_cast<index_t>(stream.below(7)), static_cast<index_t>(stream.below(6)),
                  static_cast<index_t>(stream.below(11))});
  const std::vector<double> got = reconstruct_at(model, at);
  for (std::size_t q = 0; q < at.size(); ++q)
    CHECK(got[q] == doctest::Approx(dense(at[q].i, at[q].j, at[q].t)).epsilon(1e-10));
}

TEST_CASE("estimated p uses the empirical rate") {
  DenseTensor3 truth = generate_flost_truth({{6, 6, 8}, 2, 2, 16, 8});
  ObservationSet obs = bernoulli_obs(truth, 0.5, 0.0, 3);
  obs.p_source = PSource::Estimated;
  const double p_hat =
      static_cast<double>(obs.entries.size()) / static_cast<double>(obs.dims.size());
  CHECK(effective_sampling_rate(obs) == doctest::Approx(p_hat).epsilon(1e-15));

  ObservationSet given = obs;
  given.p_source = PSource::Given;
  given.p = p_hat;
  RegularizationConfig cfg = uniform_config(2, 0.5, 0.2);
  CHECK(reconstruct(fit(obs, cfg)).values() == reconstruct(fit(given, cfg)).values());
}

TEST_CASE("config validation") {
  DenseTensor3 truth = generate_flost_truth({{4, 4, 6}, 1, 2, 5, 1});
  ObservationSet obs = bernoulli_obs(truth, 1.0, 0.0, 1);
  RegularizationConfig bad = uniform_config(2, 1.0, 0.1);
  bad.lambda1.pop_back();
  CHECK_THROWS_AS(fit(obs, bad), std::invalid_argument);
  RegularizationConfig negative = uniform_config(2, -1.0, 0.1);
  CHECK_THROWS_AS(fit(obs, negative), std::invalid_argument);
  CHECK_THROWS_AS(fit(obs, uniform_config(9, 1.0, 0.1)), std::invalid_argument);
}
