#include "ciiq/correlation.hpp"

#include <doctest.h>

#include <random>

#include "ciiq/errors.hpp"
#include "testutil.hpp"

using namespace ciiq;

TEST_CASE("spearman: monotone, reversed and tied cases") {
  CHECK(spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spearman({1, 2, 3}, {30, 20, 10}) == doctest::Approx(-1.0).epsilon(1e-12));
  // mid-rank arithmetic enumerated by hand: ranks (1, 2.5, 2.5, 4) vs (1,3,2,4)
  CHECK(spearman({1, 2, 2, 3}, {1, 3, 2, 4}) ==
        doctest::Approx(0.9486832980505138).epsilon(1e-12));
}

TEST_CASE("kendall: monotone, reversed and the one-swap case") {
  CHECK(kendall({1, 2, 3}, {5, 9, 11}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kendall({1, 2, 3}, {11, 9, 5}) == doctest::Approx(-1.0).epsilon(1e-12));
  // six pairs, five concordant one discordant
  CHECK(kendall({1, 2, 3, 4}, {1, 2, 4, 3}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("pearson and rmse hand cases") {
  CHECK(pearson({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(1.0).epsilon(1e-12));
  // five-point case computed by hand from means and covariance
  CHECK(pearson({1, 2, 3, 4, 5}, {2, 4, 5, 4, 5}) ==
        doctest::Approx(0.7745966692414834).epsilon(1e-12));
  CHECK(spearman({1, 2, 3, 4, 5}, {2, 4, 5, 4, 5}) ==
        doctest::Approx(0.7378647873726218).epsilon(1e-12));
  CHECK(kendall({1, 2, 3, 4, 5}, {2, 4, 5, 4, 5}) ==
        doctest::Approx(0.6708203932499369).epsilon(1e-12));
  CHECK(rmse({1, 2, 3, 4, 5}, {2, 4, 5, 4, 5}) ==
        doctest::Approx(1.3416407864998738).epsilon(1e-12));
  CHECK(rmse({3, 3}, {3, 3}) == 0.0);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(spearman({1}, {2}), DegenerateInput);
  CHECK_THROWS_AS(spearman({1, 2}, {3, 3}), DegenerateInput);
  CHECK_THROWS_AS(kendall({2, 2, 2}, {1, 2, 3}), DegenerateInput);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {1, 2}), DegenerateInput);
}

TEST_CASE("all four statistics match brute-force oracles on random data") {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> len(5, 40);
  std::uniform_int_distribution<int> val(0, 9);  // small range forces ties
  for (int rep = 0; rep < 60; ++rep) {
    const int n = len(rng);
    std::vector<double> x(n), y(n);
    bool cx = true, cy = true;
    for (int i = 0; i < n; ++i) {
      x[i] = val(rng);
      y[i] = val(rng);
      cx &= x[i] == x[0];
      cy &= y[i] == y[0];
    }
    if (cx || cy) continue;
    CHECK(spearman(x, y) ==
          doctest::Approx(testutil::oracle_spearman(x, y)).epsilon(1e-12));
    CHECK(kendall(x, y) ==
          doctest::Approx(testutil::oracle_kendall(x, y)).epsilon(1e-12));
    CHECK(pearson(x, y) ==
          doctest::Approx(testutil::oracle_pearson(x, y)).epsilon(1e-12));
    CHECK(rmse(x, y) ==
          doctest::Approx(testutil::oracle_rmse(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("rank statistics are invariant under monotone transforms") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.1, 50.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(15), y(15);
    for (int i = 0; i < 15; ++i) {
      x[i] = uni(rng);
      y[i] = uni(rng);
    }
    std::vector<double> tx(15);
    for (int i = 0; i < 15; ++i) tx[i] = std::exp(0.2 * x[i]) + 3.0;
    CHECK(spearman(tx, y) == doctest::Approx(spearman(x, y)).epsilon(1e-12));
    CHECK(kendall(tx, y) == doctest::Approx(kendall(x, y)).epsilon(1e-12));
  }
}
