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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "infauct/error.hpp"
#include "infauct/experiments.hpp"

using namespace infauct;

namespace {

struct ThreadsEnv {
  explicit ThreadsEnv(const char* value) { setenv("INFAUCT_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("INFAUCT_THREADS"); }
};

double brute_force_posted_price(const std::vector<double>& values, double upper, double count) {
  double best = 0.0;
  std::vector<double> candidates(values);
  candidates.push_back(upper);
  for (double p : candidates) {
    if (p > upper) continue;
    const auto buyers = std::count_if(values.begin(), values.end(), [p](double w) { return w >= p; });
    best = std::max(best, p * static_cast<double>(buyers) / count);
  }
  return best;
}

double harmonic(int m) {
  double h = 0.0;
  for (int k = 1; k <= m; ++k) h += 1.0 / k;
  return h;
}

std::size_t bell_number(std::size_t n) {
  std::vector<std::vector<std::size_t>> t(n + 1, std::vector<std::size_t>(n + 1, 0));
  t[0][0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    t[i][0] = t[i - 1][i - 1];
    for (std::size_t j = 1; j <= i; ++j) t[i][j] = t[i][j - 1] + t[i - 1][j - 1];
  }
  return t[n][0];
}

}  // namespace

TEST_CASE("posted price optimizer is exact on small samples") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values;
    const std::size_t k = 1 + gen() % 120;
    for (std::size_t j = 0; j < k; ++j) values.push_back(1.0 / (1.0 - u(gen)));
    const double upper = 1.0 + 10.0 * u(gen);
    const std::uint64_t count = k + gen() % 10;
    const PriceChoice c = optimize_posted_price(values, upper, count);
    CHECK(c.price <= upper);
    CHECK(c.in_sample_revenue ==
          doctest::Approx(brute_force_posted_price(values, upper, static_cast<double>(count))));
  }
}

TEST_CASE("posted price optimizer on large samples") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values;
  for (int j = 0; j < 20000; ++j) values.push_back(2.0 + 3.0 * u(gen));
  const PriceChoice c = optimize_posted_price(values, 100.0, values.size());
  const double best = brute_force_posted_price(values, 100.0, static_cast<double>(values.size()));
  // Uniform on [2, 5]: the optimum is p = 2.5 with revenue 2.5 * 5/6.
  CHECK(c.in_sample_revenue == doctest::Approx(best).epsilon(1e-3));
  CHECK(c.price == doctest::Approx(2.5).epsilon(0.02));
  CHECK_THROWS_AS(optimize_posted_price({1.0, 2.0}, 5.0, 1), DomainError);
}

TEST_CASE("group-revealing instance layout") {
  const Example1 ex = build_example1(4);
  CHECK(ex.instance.num_types() == 16);
  CHECK(ex.scheme.num_signals() == 4);
  REQUIRE(ex.partition.groups.size() == 4);
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto& g = ex.partition.groups[k - 1];
    CHECK(g.size() == 4);
    CHECK(g.front() == (k - 1) * 4);
    CHECK(ex.partition.prices[k - 1] == doctest::Approx(std::log(4.0) / (2.0 * k)));
    const auto& d = std::get<EqualRevenueDist>(ex.instance.valuation(g.front()));
    CHECK(d.scale() == doctest::Approx(1.0 / k));
    CHECK(ex.scheme(k - 1, g.back()) == 1.0);
  }
  CHECK_THROWS_AS(build_example1(1), DomainError);
}

TEST_CASE("group-revealing experiment") {
  const RunReport r = run_example1(4, 20000, 3);
  CHECK(r.n == 16);
  CHECK(r.row("item_type_pricing").revenue.value == doctest::Approx(25.0 / 48.0).epsilon(1e-15));
  CHECK(r.row("item_type_pricing").revenue.value == doctest::Approx(harmonic(4) / 4));
  const auto& part = r.row("group_partition").revenue;
  CHECK(part.std_error > 0.0);
  const auto& bundle = r.row("item_type_bundling");
  REQUIRE(bundle.price.has_value());
  const double denom = std::max(bundle.revenue.value, r.row("item_type_pricing").revenue.value);
  CHECK(r.row("partition_over_best_simple").revenue.value ==
        doctest::Approx(part.value / denom));
  CHECK_THROWS_AS(r.row("missing"), DomainError);
}

TEST_CASE("simulation output is identical across worker counts") {
  std::string one, many;
  {
    ThreadsEnv env("1");
    std::ostringstream os;
    write_csv(os, run_example1(6, 3 * kTrialBlock + 11, 21));
    one = os.str();
  }
  {
    ThreadsEnv env("6");
    std::ostringstream os;
    write_csv(os, run_example1(6, 3 * kTrialBlock + 11, 21));
    many = os.str();
  }
  CHECK(one == many);
  CHECK(one.rfind("mechanism,m,n,trials,seed,revenue,stderr\n", 0) == 0);
  CHECK(std::count(one.begin(), one.end(), '\n') == 5);
}

TEST_CASE("dyadic instance layout") {
  const Example2 ex = build_example2(4);
  CHECK(ex.n == 16);
  CHECK(ex.num_signals() == 15);
  double total = 0.0;
  for (double p : ex.size_probs) total += p;
  CHECK(total == doctest::Approx(1.0));
  CHECK(ex.size_probs[0] == doctest::Approx(0.5));
  CHECK(ex.size_probs[2] == doctest::Approx(1.0 / 12));
  CHECK(ex.size_probs[3] == doctest::Approx(0.25));
  const SignalingScheme scheme = ex.scheme();
  CHECK(scheme.num_signals() == 15);
  // Signal (2, 3) covers types 8..11 with weight P[2].
  const std::size_t s = ex.signal_index(2, 3);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(scheme(s, i) == doctest::Approx(i >= 8 && i < 12 ? 1.0 / 6 : 0.0));
  }
  CHECK_THROWS_AS(build_example2(kMaxExample2Levels + 1), DomainError);
  CHECK_THROWS_AS(build_example2(kMaxMaterializedExample2Levels + 1).scheme(), DomainError);
}

TEST_CASE("size indicator draws follow their distribution") {
  const Example2 ex = build_example2(5);
  Rng rng(4, StreamTag::kTest);
  std::vector<int> counts(6, 0);
  const int n = 200000;
  for (int t = 0; t < n; ++t) ++counts[ex.draw_level(rng)];
  for (int k = 1; k <= 5; ++k) {
    const double p = ex.size_probs[k - 1];
    CHECK(std::abs(counts[k] / static_cast<double>(n) - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("dyadic fast path agrees with full-menu best response") {
  for (int m : {2, 3, 5}) {
    const CrossCheck c = mechanism1_cross_check(m, 5000, 6);
    CHECK(c.trials == 5000);
    CHECK(c.agreements == c.trials);
  }
  // A block worth buying as a whole.
  const std::vector<double> block{4.0, 6.0, 5.0, 7.0};
  CHECK(mechanism1_fast_choice(3, 2, 2, block) == mechanism1_option_index(3, 2, 2));
  // Values too low for any option.
  const std::vector<double> low{0.0, 0.0};
  CHECK_FALSE(mechanism1_fast_choice(3, 1, 1, low).has_value());
  CHECK_THROWS_AS(mechanism1_fast_choice(3, 2, 1, low), DomainError);
}

TEST_CASE("dyadic menu revenue: fast path against generic Monte Carlo") {
  const int m = 4;
  const Example2 ex = build_example2(m);
  const Estimate fast = mechanism1_revenue(m, 200000, 7);
  const Estimate generic =
      menu_revenue_mc(mechanism1_build(m), ex.instance(), ex.scheme(), 200000, 8);
  const double sigma = std::hypot(fast.std_error, generic.std_error);
  CHECK(std::abs(fast.value - generic.value) <= 4.0 * sigma);
}

TEST_CASE("dyadic partitions: specialised sampler against generic partition revenue") {
  const Example2 ex = build_example2(4);
  const std::vector<double> prices{1.2, 2.0};
  const int kappa = 2;
  const auto points = dyadic_partition_revenues(ex, kappa, prices, 200000, 9);
  PartitionMechanism mech;
  for (std::size_t iota = 0; iota < 4; ++iota) {
    mech.groups.push_back({4 * iota, 4 * iota + 1, 4 * iota + 2, 4 * iota + 3});
  }
  for (std::size_t p = 0; p < prices.size(); ++p) {
    mech.prices.assign(4, prices[p]);
    const Estimate generic = partition_revenue(ex.instance(), ex.scheme(), mech, 200000, 10);
    const double sigma = std::hypot(points[p].revenue.std_error, generic.std_error);
    CHECK(std::abs(points[p].revenue.value - generic.value) <= 4.0 * sigma);
  }
  const auto grid = dyadic_price_grid(3);
  CHECK(grid.front() == doctest::Approx(0.25));
  CHECK(grid.back() == doctest::Approx(36.0 * std::numbers::ln2));
  CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("dyadic experiment report") {
  const RunReport r = run_example2(4, 20000, 11);
  CHECK(r.n == 16);
  CHECK(r.rows.size() == 5);
  CHECK(r.row("mechanism1").revenue.value > 0.0);
  for (int kappa = 1; kappa <= 4; ++kappa) {
    const auto& row = r.row("dyadic_partition_k" + std::to_string(kappa));
    CHECK(row.revenue.value <= kDyadicPartitionBound + 3.0 * row.revenue.std_error);
  }
  REQUIRE(r.notes.size() == 2);
  CHECK(r.notes[1].find("20000/20000") != std::string::npos);
}

TEST_CASE("garbling family and sweep") {
  const SignalingScheme s = example3_scheme(0.14);
  CHECK(s.num_signals() == 3);
  CHECK(s(0, 0) == doctest::Approx(0.86 * 2.0 / 3.0));
  CHECK(s(2, 1) == doctest::Approx(0.14));
  CHECK_THROWS_AS(epsilon_garbling(1.5), DomainError);

  const std::vector<double> grid{0.5, 0.1};
  const auto rows = garble_sweep(grid);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].eps == 0.0);
  CHECK(rows[0].revenue == doctest::Approx(1.10625));
  CHECK(rows[2].eps == doctest::Approx(0.14));
  CHECK(rows[2].revenue == doctest::Approx(1.0990833333).epsilon(1e-9));
  CHECK(rows[3].eps == 0.5);
}

TEST_CASE("eps range parsing") {
  const auto g = parse_eps_range("0:0.2:0.05");
  REQUIRE(g.size() == 5);
  CHECK(g[4] == doctest::Approx(0.2));
  CHECK(parse_eps_range("0.3:0.3:0.1").size() == 1);
  CHECK_THROWS_AS(parse_eps_range("0:1"), DomainError);
  CHECK_THROWS_AS(parse_eps_range("0:1:0"), DomainError);
  CHECK_THROWS_AS(parse_eps_range("0:2:0.5"), DomainError);
  CHECK_THROWS_AS(parse_eps_range("a:1:0.5"), DomainError);
  CHECK_THROWS_AS(parse_eps_range("0.5:0.1:0.1"), DomainError);
}

TEST_CASE("exhaustive partition search") {
  const MarketInstance inst = example3_instance();
  const BestPartition best = best_partition(inst, example3_provider_scheme(), 20000, 12);
  CHECK(best.partitions_searched == bell_number(2));
  CHECK_NOTHROW(validate(best.mechanism, 2));
  CHECK(best.revenue.value > 0.0);

  std::vector<ValuationDist> vals(4, DiscreteDist({1.0, 3.0}, {0.5, 0.5}));
  const MarketInstance four(ProbVector(4, 0.25), vals);
  const BestPartition b4 = best_partition(four, SignalingScheme::full_revelation(4), 5000, 13);
  CHECK(b4.partitions_searched == bell_number(4));
  // Revealed types priced separately at 3 earn 1.5; no partition does better.
  CHECK(b4.in_sample_revenue == doctest::Approx(1.5).epsilon(0.05));

  const MarketInstance eleven(ProbVector(11, 1.0 / 11),
                              std::vector<ValuationDist>(11, DiscreteDist::point(1.0)));
  CHECK_THROWS_AS(best_partition(eleven, SignalingScheme::uninformative(11), 10, 1), DomainError);
}

TEST_CASE("ER verification report") {
  const ErReport r = er_verify(100, 20000, 14);
  CHECK(r.passed());
  CHECK(r.half_bound == doctest::Approx(0.5 - 3.0 * r.half_std_error));
  REQUIRE(r.tail.size() == 3);
  CHECK(r.tail[0].price == doctest::Approx(6.0 * std::log(100.0)));
  std::ostringstream os;
  write_er_report(os, r);
  CHECK(os.str().find("p_half=") != std::string::npos);
  CHECK(os.str().find("overall PASS") != std::string::npos);
}

TEST_CASE("format_fixed") {
  CHECK(format_fixed(1.5, 3) == "1.500");
  CHECK(format_fixed(-0.125, 2) == "-0.12");
}
