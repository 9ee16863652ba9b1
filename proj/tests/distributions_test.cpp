// Copyright 2026 The infauct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "infauct/distributions.hpp"
#include "infauct/error.hpp"

using namespace infauct;

namespace {

// Composite Simpson rule.
template <typename F>
double simpson(F f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// P[X + Y >= s] for independent standard ER draws, by quadrature over the
// first draw: P[X + Y < s] = int_1^{s-1} x^-2 (1 - 1/(s - x)) dx.
double pair_sum_tail(double s) {
  if (s <= 2.0) return 1.0;
  const double below = simpson([s](double x) { return (1.0 - 1.0 / (s - x)) / (x * x); }, 1.0,
                               s - 1.0, 200000);
  return 1.0 - below;
}

}  // namespace

TEST_CASE("equal revenue cdf and quantile") {
  const EqualRevenueDist d(2.0);
  CHECK(er_cdf(d, 1.0) == 0.0);
  CHECK(er_cdf(d, 2.0) == doctest::Approx(0.0));
  CHECK(er_cdf(d, 4.0) == doctest::Approx(0.5));
  CHECK(er_quantile(d, 0.0) == doctest::Approx(2.0));
  CHECK(er_quantile(d, 0.75) == doctest::Approx(8.0));
  CHECK_THROWS_AS(er_quantile(d, 1.0), DomainError);
  CHECK_THROWS_AS(er_quantile(d, -0.1), DomainError);
  CHECK_THROWS_AS(EqualRevenueDist(0.0), DomainError);
  CHECK_THROWS_AS(EqualRevenueDist(-1.0), DomainError);
}

TEST_CASE("quantile inverts the cdf") {
  for (double scale : {0.25, 1.0, 3.5}) {
    const EqualRevenueDist d(scale);
    for (int k = 0; k < 100; ++k) {
      const double u = k / 100.0;
      CHECK(er_cdf(d, er_quantile(d, u)) == doctest::Approx(u).epsilon(1e-12));
    }
  }
}

TEST_CASE("every price in the support earns the scale") {
  for (double scale : {0.5, 1.0, 2.0}) {
    const ValuationDist d = EqualRevenueDist(scale);
    for (double p = scale; p < 100.0 * scale; p *= 1.37) {
      CHECK(p * survival(d, p) == doctest::Approx(scale));
    }
    CHECK(survival(d, 0.5 * scale) == 1.0);
  }
}

TEST_CASE("truncated mean matches quadrature of the survival function") {
  struct Case {
    double scale, cap;
  };
  for (const Case c : {Case{1.0, 8.0}, Case{0.5, 3.0}, Case{2.0, 2.0}, Case{1.0, 100.0}}) {
    const ValuationDist d = EqualRevenueDist(c.scale);
    const double quad =
        c.scale + (c.cap > c.scale ? simpson([&](double x) { return survival(d, x); }, c.scale,
                                             c.cap, 100000)
                                   : 0.0);
    CHECK(er_truncated_mean(EqualRevenueDist(c.scale), c.cap) == doctest::Approx(quad).epsilon(1e-9));
  }
  CHECK(er_truncated_mean(EqualRevenueDist(1.0), 8.0) == doctest::Approx(3.0794415417));
  CHECK_THROWS_AS(er_truncated_mean(EqualRevenueDist(2.0), 1.0), DomainError);
}

TEST_CASE("discrete distribution validation") {
  CHECK_THROWS_AS(DiscreteDist({2.0, 1.0}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({1.0, 1.0}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({-1.0, 1.0}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({1.0, 2.0}, {0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({1.0, 2.0}, {1.2, -0.2}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({1.0, 2.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(DiscreteDist({}, {}), DomainError);
  CHECK_NOTHROW(DiscreteDist({0.0, 2.0}, {0.0, 1.0}));
}

TEST_CASE("discrete sampling follows the cumulative buckets") {
  const DiscreteDist d({1.0, 2.1, 5.0}, {0.2, 0.5, 0.3});
  const ValuationDist v = d;
  CHECK(sample(v, 0.0) == 1.0);
  CHECK(sample(v, 0.19) == 1.0);
  CHECK(sample(v, 0.2) == 2.1);
  CHECK(sample(v, 0.69) == 2.1);
  CHECK(sample(v, 0.7) == 5.0);
  CHECK(sample(v, 0.999999) == 5.0);
  CHECK(d.mean() == doctest::Approx(0.2 + 1.05 + 1.5));
  CHECK(survival(v, 2.1) == doctest::Approx(0.8));
  CHECK(survival(v, 2.2) == doctest::Approx(0.3));
  CHECK(survival(v, 0.5) == 1.0);
  CHECK(survival(v, 5.1) == 0.0);
  CHECK(support_min(v) == 1.0);
  CHECK(is_discrete(v));
  CHECK_FALSE(is_discrete(ValuationDist(EqualRevenueDist(1.0))));
  CHECK(support_min(ValuationDist(EqualRevenueDist(3.0))) == 3.0);
}

TEST_CASE("sampled ER values have the right tail frequency") {
  const ValuationDist d = EqualRevenueDist(1.0);
  int above = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    if (sample(d, (k + 0.5) / n) >= 4.0) ++above;
  }
  CHECK(above / static_cast<double>(n) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("ER average check against a two-draw quadrature oracle") {
  const std::vector<double> grid{1.5, 4.0, 10.0};
  const std::uint64_t trials = 200000;
  const auto res = lemma1_check(2, trials, 17, grid);
  CHECK(res.n == 2);
  CHECK(res.trials == trials);
  CHECK(res.threshold == doctest::Approx(std::log(2.0) / 2));
  CHECK(res.p_half == 1.0);  // every draw is at least 1
  REQUIRE(res.tail.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    // The mean reaches P exactly when the sum reaches 2P.
    const double exact = pair_sum_tail(2.0 * grid[k]);
    const double sigma = binomial_std_error(exact, trials);
    CHECK(res.tail[k].price == grid[k]);
    CHECK(std::abs(res.tail[k].frequency - exact) <= 4.0 * sigma);
  }
}

TEST_CASE("ER average check is deterministic and monotone") {
  const auto a = lemma1_check(50, 30000, 5);
  const auto b = lemma1_check(50, 30000, 5);
  CHECK(a.p_half == b.p_half);
  REQUIRE(a.tail.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a.tail[k].frequency == b.tail[k].frequency);
  CHECK(a.tail[0].frequency >= a.tail[1].frequency);
  CHECK(a.tail[1].frequency >= a.tail[2].frequency);
  const auto grid = lemma1_default_grid(50);
  CHECK(grid[0] == doctest::Approx(6 * std::log(50.0)));
  CHECK(grid[2] == doctest::Approx(24 * std::log(50.0)));
  CHECK_THROWS_AS(lemma1_check(1, 100, 1), DomainError);
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_std_error(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_std_error(0.0, 100) == 0.0);
  CHECK(binomial_std_error(1.0, 100) == 0.0);
}
