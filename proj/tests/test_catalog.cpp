#include "ggc/catalog.hpp"

#include "doctest.h"

using namespace ggc;

TEST_CASE("first_marked_index closed forms: sqrt weighting") {
  const int n = 4;
  std::vector<double> alpha, beta;
  for (int j = 1; j <= n; ++j) {
    alpha.push_back(1.0 / std::sqrt(double(j)));
    beta.push_back(std::sqrt(double(j)));
  }
  auto fx = first_marked_index(n, alpha, beta);
  // i(x) = 3: R+ = R- = 1 + 1/sqrt(2) + sqrt(3)
  double want = 1.0 + 1.0 / std::sqrt(2.0) + std::sqrt(3.0);
  CHECK(fx.expected_plus[2] == doctest::Approx(want));
  CHECK(fx.expected_minus[2] == doctest::Approx(want));
  for (int x = 0; x < n; ++x) {
    CHECK(fx.composed.plus_sizes[x] ==
          doctest::Approx(fx.expected_plus[x]).epsilon(1e-10));
    CHECK(fx.composed.minus_sizes[x] ==
          doctest::Approx(fx.expected_minus[x]).epsilon(1e-10));
  }
  CHECK(fx.composed.feasibility.feasible);
}

TEST_CASE("first_marked_index closed forms: 1/j weighting") {
  const int n = 4;
  std::vector<double> alpha, beta;
  for (int j = 1; j <= n; ++j) {
    alpha.push_back(1.0 / j);
    beta.push_back(1.0);
  }
  auto fx = first_marked_index(n, alpha, beta);
  // i(x) = 4: R+ = 1 + 1/2 + 1/3 + 1 = 17/6, R- = 3 + 4 = 7
  CHECK(fx.expected_plus[3] == doctest::Approx(17.0 / 6.0));
  CHECK(fx.expected_minus[3] == doctest::Approx(7.0));
  CHECK(fx.composed.plus_sizes[3] == doctest::Approx(17.0 / 6.0));
  CHECK(fx.composed.minus_sizes[3] == doctest::Approx(7.0));
  // i(x) = 1: empty prefix sums
  CHECK(fx.expected_plus[0] == doctest::Approx(1.0));
  CHECK(fx.expected_minus[0] == doctest::Approx(1.0));
}

TEST_CASE("first_marked_position rejects the all-zeros string") {
  CHECK(first_marked_position({false, true, false}) == 2);
  CHECK_THROWS_AS(first_marked_position({false, false}), AllZeroInput);
}

TEST_CASE("first_marked_index sqrt weighting is O(sqrt(i)) at desk scale") {
  // sum_{j<i} 1/sqrt(j) <= 2 sqrt(i) - 1, so both sizes stay below 3 sqrt(i).
  const int n = 64;
  std::vector<double> alpha, beta;
  for (int j = 1; j <= n; ++j) {
    alpha.push_back(1.0 / std::sqrt(double(j)));
    beta.push_back(std::sqrt(double(j)));
  }
  auto fx = first_marked_index(n, alpha, beta);
  for (int x = 0; x < n; ++x) {
    double bound = 3.0 * std::sqrt(double(x + 1));
    CHECK(fx.composed.plus_sizes[x] <= bound + 1e-9);
    CHECK(fx.composed.minus_sizes[x] <= bound + 1e-9);
  }
}

TEST_CASE("dense_learning gives R+- = n") {
  for (int n : {1, 3}) {
    auto fx = dense_learning(n);
    for (size_t x = 0; x < fx.expected_plus.size(); ++x) {
      CHECK(fx.composed.plus_sizes[x] == doctest::Approx(double(n)));
      CHECK(fx.composed.minus_sizes[x] == doctest::Approx(double(n)));
    }
    CHECK(fx.composed.feasibility.feasible);
  }
}

TEST_CASE("minimum_finding: harmonic negative sizes") {
  {
    auto fx = minimum_finding(4, minimum_finding_inputs(4, 3));
    for (size_t x = 0; x < fx.expected_plus.size(); ++x) {
      CHECK(fx.composed.plus_sizes[x] == doctest::Approx(4.0));
      CHECK(fx.composed.minus_sizes[x] == doctest::Approx(11.0 / 6.0));
    }
    CHECK(fx.composed.feasibility.feasible);
  }
  {
    auto fx = minimum_finding(2, minimum_finding_inputs(2, 2));
    CHECK(fx.composed.plus_sizes[0] == doctest::Approx(2.0));
    CHECK(fx.composed.minus_sizes[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("minimum_finding negative size grows logarithmically") {
  auto h = [](int n) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += 1.0 / j;
    return s;
  };
  auto a = minimum_finding(6, minimum_finding_inputs(6, 1));
  CHECK(a.composed.minus_sizes[0] == doctest::Approx(h(5)));
  auto b = minimum_finding(12, minimum_finding_inputs(12, 1));
  CHECK(b.composed.minus_sizes[0] == doctest::Approx(h(11)));
  CHECK(b.composed.minus_sizes[0] - a.composed.minus_sizes[0] <= 1.0);
}

TEST_CASE("minimum_finding rejects non-permutations") {
  CHECK_THROWS_AS(minimum_finding(3, {{0, 0, 2}}), NotDistinct);
}
