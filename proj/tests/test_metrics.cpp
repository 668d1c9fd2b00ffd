#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flost/metrics.hpp"
#include "flost/rng.hpp"
#include "flost/synthesis.hpp"
#include "oracles.hpp"

using namespace flost;

namespace {

DenseTensor3 shifted(const DenseTensor3& x, double delta) {
  DenseTensor3 out = x;
  for (double& v : out.values()) v += delta;
  return out;
}

}  // namespace

TEST_CASE("rmse basics") {
  RandomStream stream(51, 0);
  DenseTensor3 truth = oracle::random_tensor({4, 5, 6}, stream);
  const IndexSet all = IndexSet::all(truth.dims());

  SUBCASE("identical tensors score zero") {
    RmseReport r = rmse(truth, truth, all);
    CHECK(r.value == 0.0);
    CHECK(r.count == 120);
    CHECK(!r.absent());
  }

  SUBCASE("constant offset of one scores one") {
    CHECK(rmse(shifted(truth, 1.0), truth, all).value == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("symmetric and scale covariant") {
    DenseTensor3 est = oracle::random_tensor({4, 5, 6}, stream);
    CHECK(rmse(est, truth, all).value == doctest::Approx(rmse(truth, est, all).value));
    DenseTensor3 est3 = est, truth3 = truth;
    for (double& v : est3.values()) v *= -3.0;
    for (double& v : truth3.values()) v *= -3.0;
    CHECK(rmse(est3, truth3, all).value ==
          doctest::Approx(3.0 * rmse(est, truth, all).value).epsilon(1e-12));
  }

  SUBCASE("observed/missing decomposition") {
    DenseTensor3 est = oracle::random_tensor({4, 5, 6}, stream);
    ObservationSet obs = sample_observations(truth, {0.5, 0.0, 11});
    const IndexSet on = IndexSet::observed(obs);
    const IndexSet off = IndexSet::missing(obs);
    REQUIRE(on.size() + off.size() == all.size());
    const double total = rmse(est, truth, all).value;
    const double a = rmse(est, truth, on).value;
    const double b = rmse(est, truth, off).value;
    const double lhs = total * total * static_cast<double>(all.size());
    const double rhs = a * a * static_cast<double>(on.size()) +
                       b * b * static_cast<double>(off.size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  SUBCASE("empty set is an error") {
    ObservationSet obs;
    obs.dims = truth.dims();
    obs.p = 1.0;
    CHECK_THROWS_AS(rmse(truth, truth, IndexSet::observed(obs)), std::invalid_argument);
    CHECK_THROWS_AS(rmse(truth, truth, IndexSet::explicit_list(truth.dims(), {})),
                    std::invalid_argument);
  }

  SUBCASE("dims must agree") {
    DenseTensor3 other({4, 5, 7});
    CHECK_THROWS_AS(rmse(other, truth, all), std::invalid_argument);
  }
}

TEST_CASE("percentile_rmse") {
  SUBCASE("q = 0 equals the plain rmse") {
    RandomStream stream(52, 0);
    DenseTensor3 truth = oracle::random_tensor({3, 4, 5}, stream);
    DenseTensor3 est = oracle::random_tensor({3, 4, 5}, stream);
    const IndexSet all = IndexSet::all(truth.dims());
    auto reports = percentile_rmse(est, truth, all, {0.0});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].value == doctest::Approx(rmse(est, truth, all).value).epsilon(1e-14));
    CHECK(reports[0].label == "q0");
  }

  SUBCASE("constant truth leaves positive quantile sets empty") {
    DenseTensor3 truth({2, 2, 2}, 1.5);
    DenseTensor3 est({2, 2, 2}, 2.0);
    auto reports = percentile_rmse(est, truth, IndexSet::all(truth.dims()), {0.5, 0.9});
    for (const RmseReport& r : reports) {
      CHECK(r.absent());
      CHECK(std::isnan(r.value));
    }
  }

  SUBCASE("tiled four-value truth at q=0.75 selects the top value") {
    // truth cycles 1,2,3,4 along tubes; threshold at the 75th percentile is 3
    DenseTensor3 truth({2, 3, 8});
    DenseTensor3 est({2, 3, 8});
    RandomStream stream(53, 0);
    for (index_t i = 0; i < 2; ++i)
      for (index_t j = 0; j < 3; ++j)
        for (index_t t = 0; t < 8; ++t) {
          truth(i, j, t) = static_cast<double>(t % 4 + 1);
          est(i, j, t) = truth(i, j, t) + stream.normal();
        }
    CHECK(oracle::nearest_rank_percentile(truth.values(), 0.75) == 3.0);
    const IndexSet all = IndexSet::all(truth.dims());
    auto reports = percentile_rmse(est, truth, all, {0.75});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].count == 12);
    std::vector<index_t> top;
    for (index_t idx = 0; idx < truth.size(); ++idx)
      if (truth.values()[idx] == 4.0) top.push_back(idx);
    const double direct = rmse(est, truth, IndexSet::explicit_list(truth.dims(), top)).value;
    CHECK(reports[0].value == doctest::Approx(direct).epsilon(1e-14));
  }

  SUBCASE("higher quantiles give nested index sets") {
    RandomStream stream(54, 0);
    DenseTensor3 truth = oracle::random_tensor({4, 4, 8}, stream);
    DenseTensor3 est = oracle::random_tensor({4, 4, 8}, stream);
    auto reports =
        percentile_rmse(est, truth, IndexSet::all(truth.dims()), {0.0, 0.25, 0.75, 0.95});
    for (std::size_t q = 1; q < reports.size(); ++q)
      CHECK(reports[q].count <= reports[q - 1].count);
  }

  SUBCASE("quantiles outside [0,1) rejected") {
    DenseTensor3 t({1, 1, 2});
    CHECK_THROWS_AS(percentile_rmse(t, t, IndexSet::all(t.dims()), {1.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("chunked_rmse") {
  RandomStream stream(55, 0);

  SUBCASE("one chunk of length T equals the plain rmse") {
    DenseTensor3 truth = oracle::random_tensor({3, 3, 10}, stream);
    DenseTensor3 est = oracle::random_tensor({3, 3, 10}, stream);
    const IndexSet all = IndexSet::all(truth.dims());
    auto reports = chunked_rmse(est, truth, all, 10);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].value == doctest::Approx(rmse(est, truth, all).value).epsilon(1e-14));
  }

  SUBCASE("1728 frames in chunks of 192 give nine reports") {
    DenseTensor3 truth({2, 2, 1728});
    auto reports = chunked_rmse(truth, truth, IndexSet::all(truth.dims()), 192);
    CHECK(reports.size() == 9);
    for (const RmseReport& r : reports) {
      CHECK(r.value == 0.0);
      CHECK(r.count == 4 * 192);
    }
  }

  SUBCASE("short last chunk reports its true count") {
    DenseTensor3 truth = oracle::random_tensor({2, 2, 10}, stream);
    auto reports = chunked_rmse(truth, truth, IndexSet::all(truth.dims()), 4);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].count == 16);
    CHECK(reports[2].count == 8);
    CHECK(reports[2].label == "chunk2");
  }

  SUBCASE("chunk_len must be positive") {
    DenseTensor3 t({1, 1, 2});
    CHECK_THROWS_AS(chunked_rmse(t, t, IndexSet::all(t.dims()), 0), std::invalid_argument);
  }
}

TEST_CASE("localtime_shift") {
  RandomStream stream(56, 0);
  DenseTensor3 x = oracle::random_tensor({3, 4, 5}, stream);

  SUBCASE("zero and full-cycle offsets are the identity") {
    CHECK(localtime_shift(x, {0, 0, 0, 0, 0}).values() == x.values());
    CHECK(localtime_shift(x, {4, 4, 4, 4, 4}).values() == x.values());
  }

  SUBCASE("single-frame offset permutes columns") {
    DenseTensor3 y = localtime_shift(x, {1, 0, 0, 0, 0});
    for (index_t i = 0; i < 3; ++i) {
      for (index_t j = 0; j < 4; ++j) {
        CHECK(y(i, (j + 1) % 4, 0) == x(i, j, 0));
        for (index_t t = 1; t < 5; ++t) CHECK(y(i, j, t) == x(i, j, t));
      }
    }
  }

  SUBCASE("norm preserved, inverted by negated offsets") {
    const std::vector<index_t> offsets{1, -2, 7, 0, 3};
    DenseTensor3 y = localtime_shift(x, offsets);
    // a permutation: the exact multiset of values is preserved
    std::vector<double> xs = x.values(), ys = y.values();
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    CHECK(xs == ys);
    CHECK(frobenius_norm(y) == doctest::Approx(frobenius_norm(x)).epsilon(1e-15));
    std::vector<index_t> negated;
    for (index_t o : offsets) negated.push_back(-o);
    CHECK(localtime_shift(y, negated).values() == x.values());
  }

  SUBCASE("offsets length must equal T") {
    CHECK_THROWS_AS(localtime_shift(x, {1, 2}), std::invalid_argument);
  }
}
