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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infauct/distributions.hpp"
#include "infauct/market.hpp"
#include "infauct/mechanisms.hpp"
#include "infauct/optrev.hpp"
#include "infauct/parallel.hpp"

namespace infauct {

// ---------------------------------------------------------------------------
// Reports

struct ReportRow {
  std::string mechanism;
  Estimate revenue;
  std::optional<double> price;
};

struct RunReport {
  int example = 0;
  int m = 0;
  std::size_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;

  const ReportRow& row(std::string_view mechanism) const;
};

// mechanism,m,n,trials,seed,revenue,stderr. Wall time is deliberately not
// part of the CSV so identical seeds give identical bytes.
void write_csv(std::ostream& os, const RunReport& report);
// Human-readable summary including prices (6 decimals) and notes.
void write_summary(std::ostream& os, const RunReport& report);

std::string format_fixed(double value, int decimals);

// ---------------------------------------------------------------------------
// Posted-price optimization on sampled buyer values

struct PriceChoice {
  double price = 0.0;
  double in_sample_revenue = 0.0;
};

// Maximizes p * #{w >= p} / count over p in [0, upper]. Candidate prices are
// sampled-value quantiles; the best quantile's bracket is refined by
// golden-section search. `count` is the sample size used for normalization
// (it may exceed values.size() when some trials never face the price).
PriceChoice optimize_posted_price(std::vector<double> values, double upper, std::uint64_t count);

// Pilot sample picks the price, an independent stream evaluates it.
struct BundlingChoice {
  double price = 0.0;
  Estimate revenue;
};
BundlingChoice optimal_bundling(const MarketInstance& inst, const SignalingScheme& scheme,
                                std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Group-revealing instance: n = m^2 types in m groups of m, valuations
// ER(1/k) in group k, uniform prior, the signal names the group.

struct Example1 {
  int m = 0;
  MarketInstance instance;
  SignalingScheme scheme;
  PartitionMechanism partition;  // the groups, priced ln(m) / (2k)
};

Example1 build_example1(int m);

// Rows: item_type_pricing (closed form H_m / m), item_type_bundling,
// group_partition, partition_over_best_simple.
RunReport run_example1(int m, std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dyadic instance: n = 2^m standard-ER types, uniform prior. The provider
// draws a size indicator k (P[k] = 1/(k(k+1)) for k < m, P[m] = 1/m) and
// reveals the block I_{k,j} of size 2^k holding the item.

inline constexpr int kMaxExample2Levels = 24;
inline constexpr int kMaxMaterializedExample2Levels = 10;
inline constexpr double kDyadicPartitionBound = 9.0 + 6.0 * 0.69314718055994530942;

struct Example2 {
  int m = 0;
  std::size_t n = 0;
  std::vector<double> size_probs;  // size_probs[k - 1] = P[k]

  // Signals (k, j) are laid out like the dyadic menu's options.
  std::size_t num_signals() const;
  std::size_t signal_index(int k, std::size_t j) const;
  // Draws the size indicator.
  int draw_level(Rng& rng) const;

  std::vector<double> level_cdf;   // running sums of size_probs

  // Explicit instance and scheme; only for m <= kMaxMaterializedExample2Levels.
  MarketInstance instance() const;
  SignalingScheme scheme() const;
};

Example2 build_example2(int m);

// Dyadic menu best response after signal s_{k,j}, from the 2^k values of the
// signaled block alone. Options disjoint from the block cost P_kappa and
// allocate nothing, so only sub-blocks and the block itself compete; sub-block
// sums come from prefix sums. Returns the option index in mechanism1_build(m)
// order, or nullopt when the bidder abstains.
std::optional<std::size_t> mechanism1_fast_choice(int m, int k, std::size_t j,
                                                  std::span<const double> block_values);

// Monte Carlo revenue of the dyadic menu using the fast path; only the 2^k
// values of the signaled block are drawn per trial.
Estimate mechanism1_revenue(int m, std::uint64_t trials, std::uint64_t seed);

struct CrossCheck {
  std::uint64_t trials = 0;
  std::uint64_t agreements = 0;
};

// Compares the fast path with naive best_response over the full menu on
// shared valuation draws. m <= kMaxMaterializedExample2Levels.
CrossCheck mechanism1_cross_check(int m, std::uint64_t trials, std::uint64_t seed);

struct PricePoint {
  double price = 0.0;
  Estimate revenue;
};

// Revenue of the dyadic partition {I_{kappa, iota}} at each price, on common
// random numbers. The offered group intersected with the signaled block has
// 2^min(kappa, k) types, over which the bidder's belief is uniform.
std::vector<PricePoint> dyadic_partition_revenues(const Example2& ex, int kappa,
                                                  std::span<const double> prices,
                                                  std::uint64_t trials, std::uint64_t seed);

// Log-spaced grid on [0.25, 12 kappa ln 2].
std::vector<double> dyadic_price_grid(int kappa);

// Rows: mechanism1, dyadic_partition_k<kappa> (best grid price) for each
// kappa. Notes carry the fast/naive agreement when m <= 6.
RunReport run_example2(int m, std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-type instance with a partially informed provider.

inline constexpr double kExample3Epsilon = 0.14;

MarketInstance example3_instance();
// X: P[x1 | 1] = 2/3, P[x2 | 1] = 1/3, P[x2 | 2] = 1.
SignalingScheme example3_provider_scheme();
// Pass x through w.p. 1 - eps, emit x3 w.p. eps.
Garbling epsilon_garbling(double eps);
// The provider scheme composed with the eps-garbling.
SignalingScheme example3_scheme(double eps);

struct GarbleRow {
  double eps = 0.0;
  double revenue = 0.0;
};

// Optimal revenue for each eps; eps = 0 and eps = 0.14 are always included.
std::vector<GarbleRow> garble_sweep(std::span<const double> eps_grid);

// Parses "start:stop:step" into an inclusive grid.
std::vector<double> parse_eps_range(std::string_view range);

// ---------------------------------------------------------------------------
// Exhaustive partition search

inline constexpr std::size_t kMaxPartitionSearchTypes = 10;

struct BestPartition {
  PartitionMechanism mechanism;
  Estimate revenue;              // fresh-stream estimate of the chosen mechanism
  double in_sample_revenue = 0;  // pilot-sample value used for selection
  std::size_t partitions_searched = 0;
};

// Every set partition of the item types; each group priced at its best
// pilot-sample price.
BestPartition best_partition(const MarketInstance& inst, const SignalingScheme& scheme,
                             std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// ER lemma verification

struct ErCheck {
  double price = 0.0;
  double frequency = 0.0;
  double bound = 0.0;  // 9/P + 3 sigma
  bool pass = false;
};

struct ErReport {
  Lemma1Result raw;
  double half_std_error = 0.0;
  double half_bound = 0.0;  // 0.5 - 3 sigma
  bool half_pass = false;
  std::vector<ErCheck> tail;

  bool passed() const;
};

ErReport er_verify(std::size_t n, std::uint64_t trials, std::uint64_t seed);
void write_er_report(std::ostream& os, const ErReport& report);

}  // namespace infauct
