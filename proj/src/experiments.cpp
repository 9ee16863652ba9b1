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

#include "infauct/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "infauct/error.hpp"

namespace infauct {

namespace {

// H_m / m, accumulated in extended precision and rounded once.
double harmonic_mean_term(int m) {
  long double h = 0.0L;
  for (int k = m; k >= 1; --k) h += 1.0L / k;
  return static_cast<double>(h / m);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

const ReportRow& RunReport::row(std::string_view mechanism) const {
  for (const auto& r : rows) {
    if (r.mechanism == mechanism) return r;
  }
  throw DomainError("report has no row '" + std::string(mechanism) + "'");
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

void write_csv(std::ostream& os, const RunReport& report) {
  os << "mechanism,m,n,trials,seed,revenue,stderr\n";
  for (const auto& r : report.rows) {
    os << r.mechanism << ',' << report.m << ',' << report.n << ',' << report.trials << ','
       << report.seed << ',' << format_fixed(r.revenue.value, 9) << ','
       << format_fixed(r.revenue.std_error, 9) << '\n';
  }
}

void write_summary(std::ostream& os, const RunReport& report) {
  os << "example " << report.example << "  m=" << report.m << "  n=" << report.n
     << "  trials=" << report.trials << "  seed=" << report.seed << '\n';
  for (const auto& r : report.rows) {
    os << "  " << r.mechanism << ": " << format_fixed(r.revenue.value, 6) << " +/- "
       << format_fixed(r.revenue.std_error, 6);
    if (r.price) os << "  (price " << format_fixed(*r.price, 6) << ')';
    os << '\n';
  }
  for (const auto& note : report.notes) os << "  " << note << '\n';
  os << "  wall time " << format_fixed(report.wall_seconds, 3) << " s\n";
}

// ---------------------------------------------------------------------------
// Posted prices

PriceChoice optimize_posted_price(std::vector<double> values, double upper, std::uint64_t count) {
  require(count >= values.size() && count > 0, "posted price: bad normalization count");
  std::sort(values.begin(), values.end());
  const double denom = static_cast<double>(count);
  auto revenue = [&](double p) {
    const auto it = std::lower_bound(values.begin(), values.end(), p);
    return p * static_cast<double>(values.end() - it) / denom;
  };
  // Within a step of the empirical survival function revenue grows with p,
  // so the best price in (w_(j-1), w_(j)] is w_(j).
  auto snap_up = [&](double p) {
    const auto it = std::lower_bound(values.begin(), values.end(), p);
    return (it != values.end() && *it <= upper) ? *it : p;
  };

  std::vector<double> candidates{0.0};
  constexpr std::size_t kQuantiles = 128;
  for (std::size_t q = 0; q < kQuantiles && !values.empty(); ++q) {
    const double w = values[q * values.size() / kQuantiles];
    if (w > 0.0 && w <= upper) candidates.push_back(w);
  }
  candidates.push_back(upper);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (revenue(candidates[c]) > revenue(candidates[best])) best = c;
  }
  PriceChoice choice{candidates[best], revenue(candidates[best])};

  double lo = best > 0 ? candidates[best - 1] : 0.0;
  double hi = best + 1 < candidates.size() ? candidates[best + 1] : upper;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = revenue(x1);
  double f2 = revenue(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = revenue(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = revenue(x2);
    }
  }
  const double refined = snap_up(f1 >= f2 ? x1 : x2);
  if (revenue(refined) > choice.in_sample_revenue) choice = {refined, revenue(refined)};
  return choice;
}

BundlingChoice optimal_bundling(const MarketInstance& inst, const SignalingScheme& scheme,
                                std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1, "bundling optimization requires at least one trial");
  double max_scale = 0.0;
  double max_value = 0.0;
  for (const auto& d : inst.valuations()) {
    if (const auto* er = std::get_if<EqualRevenueDist>(&d)) {
      max_scale = std::max(max_scale, er->scale());
    } else {
      max_value = std::max(max_value, std::get<DiscreteDist>(d).values().back());
    }
  }
  const double log_n = std::max(1.0, std::log(static_cast<double>(inst.num_types())));
  const double upper = std::max(6.0 * log_n * max_scale, max_value);

  auto pilot = bundling_value_samples(inst, scheme, trials, seed, StreamTag::kBundlingPilot);
  const PriceChoice choice = optimize_posted_price(std::move(pilot), upper, trials);
  BundlingChoice out;
  out.price = choice.price;
  out.revenue = bundling_revenue(inst, scheme, Bundling{choice.price}, trials, seed);
  return out;
}

// ---------------------------------------------------------------------------
// Group-revealing instance

Example1 build_example1(int m) {
  require(m >= 2, "example 1 needs m >= 2");
  require(m <= 256, "example 1 is limited to m <= 256");
  const std::size_t groups = static_cast<std::size_t>(m);
  const std::size_t n = groups * groups;

  std::vector<ValuationDist> valuations;
  valuations.reserve(n);
  Matrix likelihood(groups, n);
  PartitionMechanism partition;
  const double log_m = std::log(static_cast<double>(m));
  for (std::size_t k = 1; k <= groups; ++k) {
    std::vector<std::size_t> block;
    for (std::size_t i = (k - 1) * groups; i < k * groups; ++i) {
      valuations.emplace_back(EqualRevenueDist(1.0 / static_cast<double>(k)));
      likelihood(k - 1, i) = 1.0;
      block.push_back(i);
    }
    partition.groups.push_back(std::move(block));
    partition.prices.push_back(log_m / (2.0 * static_cast<double>(k)));
  }
  return Example1{m,
                  MarketInstance(ProbVector(n, 1.0 / static_cast<double>(n)), std::move(valuations)),
                  SignalingScheme(std::move(likelihood)), std::move(partition)};
}

RunReport run_example1(int m, std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1, "simulation requires at least one trial");
  const auto start = std::chrono::steady_clock::now();
  const Example1 ex = build_example1(m);

  RunReport report;
  report.example = 1;
  report.m = m;
  report.n = ex.instance.num_types();
  report.trials = trials;
  report.seed = seed;

  // Any price at or above the ER scale earns the scale: sum_k (1/m)(1/k).
  const double pricing = harmonic_mean_term(m);
  report.rows.push_back({"item_type_pricing", {pricing, 0.0}, std::nullopt});

  const BundlingChoice bundle = optimal_bundling(ex.instance, ex.scheme, trials, seed);
  report.rows.push_back({"item_type_bundling", bundle.revenue, bundle.price});

  const Estimate partition = partition_revenue(ex.instance, ex.scheme, ex.partition, trials, seed);
  report.rows.push_back({"group_partition", partition, std::nullopt});

  // Delta-method error of partition / max(pricing, bundling).
  const bool bundling_wins = bundle.revenue.value > pricing;
  const double denom = bundling_wins ? bundle.revenue.value : pricing;
  const double denom_se = bundling_wins ? bundle.revenue.std_error : 0.0;
  const double ratio = partition.value / denom;
  const double rel_p = partition.value > 0.0 ? partition.std_error / partition.value : 0.0;
  const double rel_d = denom > 0.0 ? denom_se / denom : 0.0;
  report.rows.push_back({"partition_over_best_simple",
                         {ratio, std::abs(ratio) * std::sqrt(rel_p * rel_p + rel_d * rel_d)},
                         std::nullopt});
  report.wall_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Dyadic instance

std::size_t Example2::num_signals() const { return n - 1; }

std::size_t Example2::signal_index(int k, std::size_t j) const {
  return mechanism1_option_index(m, k, j);
}

int Example2::draw_level(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(level_cdf.begin(), level_cdf.end(), u);
  if (it == level_cdf.end()) return m;
  return static_cast<int>(it - level_cdf.begin()) + 1;
}

MarketInstance Example2::instance() const {
  require(m <= kMaxMaterializedExample2Levels, "example 2 instance too large to materialize");
  return MarketInstance(ProbVector(n, 1.0 / static_cast<double>(n)),
                        std::vector<ValuationDist>(n, EqualRevenueDist(1.0)));
}

SignalingScheme Example2::scheme() const {
  require(m <= kMaxMaterializedExample2Levels, "example 2 scheme too large to materialize");
  Matrix likelihood(num_signals(), n);
  for (int k = 1; k <= m; ++k) {
    const std::size_t block = std::size_t{1} << k;
    for (std::size_t j = 1; j <= n / block; ++j) {
      const std::size_t s = signal_index(k, j);
      for (std::size_t i = (j - 1) * block; i < j * block; ++i) likelihood(s, i) = size_probs[k - 1];
    }
  }
  return SignalingScheme(std::move(likelihood));
}

Example2 build_example2(int m) {
  require(m >= 1, "example 2 needs m >= 1");
  require(m <= kMaxExample2Levels,
          "example 2 is limited to m <= " + std::to_string(kMaxExample2Levels));
  Example2 ex;
  ex.m = m;
  ex.n = std::size_t{1} << m;
  double acc = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double p = k < m ? 1.0 / (static_cast<double>(k) * (k + 1)) : 1.0 / m;
    ex.size_probs.push_back(p);
    acc += p;
    ex.level_cdf.push_back(acc);
  }
  return ex;
}

namespace {

struct Mechanism1Choice {
  std::size_t index = 0;
  int kappa = 0;
};

std::optional<Mechanism1Choice> fast_choice(int m, int k, std::size_t j,
                                            std::span<const double> block,
                                            std::vector<double>& prefix) {
  const std::size_t size = std::size_t{1} << k;
  const double w = 1.0 / static_cast<double>(size);
  prefix.resize(size + 1);
  prefix[0] = 0.0;
  for (std::size_t x = 0; x < size; ++x) prefix[x + 1] = prefix[x] + block[x];

  // Same acceptance and tie rule as best_response, visited in option order.
  std::optional<Mechanism1Choice> best;
  double best_u = 0.0;
  double best_pay = 0.0;
  auto consider = [&](std::size_t index, int kappa, double u) {
    if (u < -kTieTol) return;
    const double pay = mechanism1_price(kappa);
    if (!best || u > best_u + kTieTol || (u >= best_u - kTieTol && pay > best_pay + kTieTol)) {
      best = Mechanism1Choice{index, kappa};
      best_u = u;
      best_pay = pay;
    }
  };

  const std::size_t base = (j - 1) * size;
  for (int kappa = 1; kappa < k; ++kappa) {
    const std::size_t sub = std::size_t{1} << kappa;
    const double price = mechanism1_price(kappa);
    for (std::size_t local = 0; local < size / sub; ++local) {
      const double sum = prefix[(local + 1) * sub] - prefix[local * sub];
      const std::size_t iota = base / sub + local + 1;
      consider(mechanism1_option_index(m, kappa, iota), kappa, w * sum - price);
    }
  }
  consider(mechanism1_option_index(m, k, j), k, w * prefix[size] - mechanism1_price(k));
  // Coarser options holding the block cost more for the same value; options
  // disjoint from it have utility -P_kappa. Neither can win.
  return best;
}

}  // namespace

std::optional<std::size_t> mechanism1_fast_choice(int m, int k, std::size_t j,
                                                  std::span<const double> block_values) {
  require(k >= 1 && k <= m, "signal level out of range");
  require(j >= 1 && j <= (std::size_t{1} << (m - k)), "signal block out of range");
  require(block_values.size() == (std::size_t{1} << k), "block must hold 2^k values");
  std::vector<double> prefix;
  const auto choice = fast_choice(m, k, j, block_values, prefix);
  if (!choice) return std::nullopt;
  return choice->index;
}

Estimate mechanism1_revenue(int m, std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1, "dyadic menu revenue requires at least one trial");
  const Example2 ex = build_example2(m);
  const EqualRevenueDist standard(1.0);
  return mc_mean(trials, seed, StreamTag::kMechanism1, [&](Rng& rng) {
    thread_local std::vector<double> values;
    thread_local std::vector<double> prefix;
    const int k = ex.draw_level(rng);
    const std::size_t j = 1 + rng.below(std::size_t{1} << (m - k));
    values.resize(std::size_t{1} << k);
    for (double& v : values) v = er_quantile(standard, rng.uniform());
    const auto choice = fast_choice(m, k, j, values, prefix);
    return choice ? mechanism1_price(choice->kappa) : 0.0;
  });
}

CrossCheck mechanism1_cross_check(int m, std::uint64_t trials, std::uint64_t seed) {
  const Example2 ex = build_example2(m);
  require(m <= kMaxMaterializedExample2Levels, "cross-check needs a materializable menu");
  const ConditionalMenu menu = mechanism1_build(m);
  const EqualRevenueDist standard(1.0);

  std::vector<Posterior> beliefs;
  beliefs.reserve(ex.num_signals());
  for (int k = 1; k <= m; ++k) {
    const std::size_t block = std::size_t{1} << k;
    for (std::size_t j = 1; j <= ex.n / block; ++j) {
      ProbVector p(ex.n, 0.0);
      for (std::size_t i = (j - 1) * block; i < j * block; ++i) p[i] = 1.0 / static_cast<double>(block);
      beliefs.emplace_back(std::move(p));
    }
  }

  auto blocks = map_blocks<CrossCheck>(trials, [&](std::uint64_t b, std::uint64_t begin,
                                                   std::uint64_t end) {
    Rng rng(seed, StreamTag::kCrossValidation, b);
    CrossCheck c;
    std::vector<double> v(ex.n);
    for (std::uint64_t t = begin; t < end; ++t) {
      const int k = ex.draw_level(rng);
      const std::size_t j = 1 + rng.below(std::size_t{1} << (m - k));
      for (double& x : v) x = er_quantile(standard, rng.uniform());
      const std::size_t size = std::size_t{1} << k;
      const std::span<const double> block(v.data() + (j - 1) * size, size);
      const auto fast = mechanism1_fast_choice(m, k, j, block);
      const auto naive = best_response(menu, v, beliefs[ex.signal_index(k, j)]);
      ++c.trials;
      if (fast == naive) ++c.agreements;
    }
    return c;
  });
  CrossCheck total;
  for (const auto& c : blocks) {
    total.trials += c.trials;
    total.agreements += c.agreements;
  }
  return total;
}

std::vector<double> dyadic_price_grid(int kappa) {
  constexpr int kPoints = 24;
  const double lo = 0.25;
  const double hi = 12.0 * kappa * std::numbers::ln2;
  std::vector<double> grid;
  for (int p = 0; p < kPoints; ++p) {
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(p) / (kPoints - 1)));
  }
  return grid;
}

std::vector<PricePoint> dyadic_partition_revenues(const Example2& ex, int kappa,
                                                  std::span<const double> prices,
                                                  std::uint64_t trials, std::uint64_t seed) {
  require(kappa >= 1 && kappa <= ex.m, "partition level out of range");
  require(trials >= 1, "partition revenue requires at least one trial");
  for (double p : prices) require(p >= 0.0, "partition prices must be non-negative");
  const EqualRevenueDist standard(1.0);

  auto blocks = map_blocks<std::vector<Moments>>(
      trials, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        Rng rng(seed, StreamTag::kDyadicPartition, b);
        std::vector<Moments> acc(prices.size());
        for (std::uint64_t t = begin; t < end; ++t) {
          const int k = ex.draw_level(rng);
          const std::size_t size = std::size_t{1} << std::min(kappa, k);
          double sum = 0.0;
          for (std::size_t x = 0; x < size; ++x) sum += er_quantile(standard, rng.uniform());
          const double mean = sum / static_cast<double>(size);
          for (std::size_t p = 0; p < prices.size(); ++p) {
            acc[p].add(accepts(mean, prices[p]) ? prices[p] : 0.0);
          }
        }
        return acc;
      });

  std::vector<PricePoint> out(prices.size());
  for (std::size_t p = 0; p < prices.size(); ++p) {
    Moments total;
    for (const auto& block : blocks) total.merge(block[p]);
    out[p] = {prices[p], total.estimate()};
  }
  return out;
}

RunReport run_example2(int m, std::uint64_t trials, std::uint64_t seed) {
  require(m >= 2, "example 2 simulation needs m >= 2");
  require(trials >= 1, "simulation requires at least one trial");
  const auto start = std::chrono::steady_clock::now();
  const Example2 ex = build_example2(m);

  RunReport report;
  report.example = 2;
  report.m = m;
  report.n = ex.n;
  report.trials = trials;
  report.seed = seed;

  report.rows.push_back({"mechanism1", mechanism1_revenue(m, trials, seed), std::nullopt});

  bool bound_ok = true;
  for (int kappa = 1; kappa <= m; ++kappa) {
    const auto grid = dyadic_price_grid(kappa);
    const auto points = dyadic_partition_revenues(ex, kappa, grid, trials, seed);
    const auto best = std::max_element(points.begin(), points.end(), [](const auto& a, const auto& b) {
      return a.revenue.value < b.revenue.value;
    });
    for (const auto& p : points) {
      if (p.revenue.value > kDyadicPartitionBound + 3.0 * p.revenue.std_error) bound_ok = false;
    }
    report.rows.push_back(
        {"dyadic_partition_k" + std::to_string(kappa), best->revenue, best->price});
  }
  report.notes.push_back("dyadic partitions within 9 + 6 ln 2 = " + format_fixed(kDyadicPartitionBound, 6) +
                         " (+3 sigma) at every grid price: " + (bound_ok ? "yes" : "NO"));

  if (m <= 6) {
    const CrossCheck check = mechanism1_cross_check(m, trials, seed);
    report.notes.push_back("fast path vs full menu agreement: " + std::to_string(check.agreements) +
                           "/" + std::to_string(check.trials));
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

// ---------------------------------------------------------------------------
// Two-type instance

MarketInstance example3_instance() {
  const DiscreteDist values({1.0, 2.1}, {0.5, 0.5});
  return MarketInstance({0.75, 0.25}, {values, values});
}

SignalingScheme example3_provider_scheme() {
  return SignalingScheme(Matrix::from_rows({{2.0 / 3.0, 0.0}, {1.0 / 3.0, 1.0}}));
}

Garbling epsilon_garbling(double eps) {
  require(eps >= 0.0 && eps <= 1.0, "garbling probability must lie in [0, 1]");
  return Garbling(Matrix::from_rows({{1.0 - eps, 0.0}, {0.0, 1.0 - eps}, {eps, eps}}));
}

SignalingScheme example3_scheme(double eps) {
  return compose(epsilon_garbling(eps), example3_provider_scheme());
}

std::vector<GarbleRow> garble_sweep(std::span<const double> eps_grid) {
  std::vector<double> grid(eps_grid.begin(), eps_grid.end());
  grid.push_back(0.0);
  grid.push_back(kExample3Epsilon);
  for (double e : grid) require(e >= 0.0 && e <= 1.0, "garbling probability must lie in [0, 1]");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             grid.end());

  const MarketInstance inst = example3_instance();
  std::vector<GarbleRow> rows;
  for (double eps : grid) {
    rows.push_back({eps, optimal_revenue(inst, example3_scheme(eps)).revenue});
  }
  return rows;
}

std::vector<double> parse_eps_range(std::string_view range) {
  std::vector<double> parts;
  std::string text(range);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      require(used == item.size(), "bad number in eps range");
    } catch (const std::logic_error&) {
      throw DomainError("eps range must look like start:stop:step, got '" + text + "'");
    }
  }
  require(parts.size() == 3, "eps range must look like start:stop:step, got '" + text + "'");
  const double start = parts[0], stop = parts[1], step = parts[2];
  require(step > 0.0, "eps step must be positive");
  require(start >= 0.0 && stop <= 1.0 && start <= stop, "eps range must lie within [0, 1]");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> grid;
  for (std::size_t k = 0; k <= count; ++k) {
    grid.push_back(std::min(1.0, start + static_cast<double>(k) * step));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Exhaustive partition search

namespace {

struct PilotTrial {
  std::size_t item = 0;
  std::size_t signal = 0;
};

// Best in-sample revenue of offering `mask` as one group at a quantile price.
double group_value(const std::vector<PilotTrial>& trials, const std::vector<double>& values,
                   std::size_t n, unsigned mask, const std::vector<Posterior>& beliefs,
                   double& best_price) {
  std::vector<double> w;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (!((mask >> trials[t].item) & 1U)) continue;
    const Posterior& belief = beliefs[trials[t].signal];
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1U)) continue;
      num += belief[i] * values[t * n + i];
      den += belief[i];
    }
    w.push_back(num / den);
  }
  best_price = 0.0;
  if (w.empty()) return 0.0;
  std::sort(w.begin(), w.end());
  const double total = static_cast<double>(trials.size());
  double best = 0.0;
  constexpr std::size_t kGrid = 100;
  for (std::size_t q = 0; q < kGrid; ++q) {
    const double p = w[q * w.size() / kGrid];
    const auto it = std::lower_bound(w.begin(), w.end(), p);
    const double rev = p * static_cast<double>(w.end() - it) / total;
    if (rev > best) {
      best = rev;
      best_price = p;
    }
  }
  return best;
}

}  // namespace

BestPartition best_partition(const MarketInstance& inst, const SignalingScheme& scheme,
                             std::uint64_t trials, std::uint64_t seed) {
  const std::size_t n = inst.num_types();
  require(n <= kMaxPartitionSearchTypes, "exhaustive partition search is limited to n <= " +
                                             std::to_string(kMaxPartitionSearchTypes));
  require(trials >= 1, "partition search requires at least one trial");
  require(scheme.num_types() == n, "signaling scheme and instance disagree on item types");

  const detail::TrialSampler sampler(inst, scheme);
  struct Block {
    std::vector<PilotTrial> trials;
    std::vector<double> values;
  };
  auto blocks = map_blocks<Block>(trials, [&](std::uint64_t b, std::uint64_t begin,
                                              std::uint64_t end) {
    Rng rng(seed, StreamTag::kPartitionPilot, b);
    Block out;
    for (std::uint64_t t = begin; t < end; ++t) {
      const std::size_t item = sampler.draw_type(rng);
      const std::size_t s = sampler.draw_signal(rng, item);
      out.trials.push_back({item, s});
      for (std::size_t i = 0; i < n; ++i) out.values.push_back(sample(inst.valuation(i), rng.uniform()));
    }
    return out;
  });
  std::vector<PilotTrial> pilot;
  std::vector<double> values;
  for (auto& b : blocks) {
    pilot.insert(pilot.end(), b.trials.begin(), b.trials.end());
    values.insert(values.end(), b.values.begin(), b.values.end());
  }

  std::vector<Posterior> beliefs;
  const ProbVector marginals = signal_marginals(scheme, inst.prior());
  for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
    beliefs.push_back(marginals[s] > 0.0 ? posterior_of(scheme, inst.prior(), s)
                                         : Posterior(ProbVector(n, 1.0 / static_cast<double>(n))));
  }

  const unsigned full = (1U << n) - 1U;
  std::vector<double> value(full + 1, 0.0);
  std::vector<double> price(full + 1, 0.0);
  for (unsigned mask = 1; mask <= full; ++mask) {
    value[mask] = group_value(pilot, values, n, mask, beliefs, price[mask]);
  }

  // Restricted growth strings enumerate each set partition once.
  std::vector<std::size_t> label(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  std::vector<std::size_t> best_label = label;
  double best_value = -1.0;
  std::size_t searched = 0;
  for (;;) {
    std::vector<unsigned> masks(n, 0U);
    for (std::size_t i = 0; i < n; ++i) masks[label[i]] |= 1U << i;
    double total = 0.0;
    for (unsigned mask : masks) total += mask ? value[mask] : 0.0;
    ++searched;
    if (total > best_value) {
      best_value = total;
      best_label = label;
    }
    // Advance to the next restricted growth string.
    std::size_t pos = n;
    bool advanced = false;
    while (pos > 1) {
      --pos;
      if (label[pos] <= prefix_max[pos - 1]) {
        ++label[pos];
        prefix_max[pos] = std::max(prefix_max[pos - 1], label[pos]);
        for (std::size_t x = pos + 1; x < n; ++x) {
          label[x] = 0;
          prefix_max[x] = prefix_max[pos];
        }
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }

  BestPartition result;
  std::size_t groups = 0;
  for (std::size_t l : best_label) groups = std::max(groups, l + 1);
  result.mechanism.groups.assign(groups, {});
  for (std::size_t i = 0; i < n; ++i) result.mechanism.groups[best_label[i]].push_back(i);
  for (const auto& g : result.mechanism.groups) {
    unsigned mask = 0;
    for (std::size_t i : g) mask |= 1U << i;
    result.mechanism.prices.push_back(price[mask]);
  }
  result.in_sample_revenue = best_value;
  result.partitions_searched = searched;
  result.revenue = partition_revenue(inst, scheme, result.mechanism, trials, seed);
  return result;
}

// ---------------------------------------------------------------------------
// ER lemma

bool ErReport::passed() const {
  return half_pass && std::all_of(tail.begin(), tail.end(), [](const ErCheck& c) { return c.pass; });
}

ErReport er_verify(std::size_t n, std::uint64_t trials, std::uint64_t seed) {
  ErReport report;
  report.raw = lemma1_check(n, trials, seed);
  report.half_std_error = binomial_std_error(report.raw.p_half, trials);
  report.half_bound = 0.5 - 3.0 * report.half_std_error;
  report.half_pass = report.raw.p_half >= report.half_bound;
  for (const auto& point : report.raw.tail) {
    ErCheck c;
    c.price = point.price;
    c.frequency = point.frequency;
    c.bound = 9.0 / point.price + 3.0 * binomial_std_error(point.frequency, trials);
    c.pass = c.frequency <= c.bound;
    report.tail.push_back(c);
  }
  return report;
}

void write_er_report(std::ostream& os, const ErReport& report) {
  os << "verify-er n=" << report.raw.n << " trials=" << report.raw.trials << '\n';
  os << "p_half=" << format_fixed(report.raw.p_half, 6) << " (mean >= "
     << format_fixed(report.raw.threshold, 6) << ") need >= " << format_fixed(report.half_bound, 6)
     << ' ' << (report.half_pass ? "PASS" : "FAIL") << '\n';
  for (const auto& c : report.tail) {
    os << "tail P=" << format_fixed(c.price, 6) << " freq=" << format_fixed(c.frequency, 6)
       << " need <= " << format_fixed(c.bound, 6) << ' ' << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  os << "overall " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

}  // namespace infauct
