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
#include <optional>
#include <span>
#include <vector>

#include "infauct/market.hpp"
#include "infauct/parallel.hpp"

namespace infauct {

// Utilities within this distance are treated as equal by best_response; the
// same slack admits options whose utility is a rounding error below zero.
inline constexpr double kTieTol = 1e-9;

// Relative slack for "accept iff value >= price" comparisons in posted-price
// style mechanisms, so that exact indifference survives rounding.
inline constexpr double kAcceptTol = 1e-12;

inline bool accepts(double expected_value, double price) {
  return expected_value >= price - kAcceptTol * (price > 1.0 ? price : 1.0);
}

// One menu entry: allocation probability and conditional price per realized
// item type. The price is owed whether or not the item is allocated.
struct MenuOption {
  std::vector<double> alloc;
  std::vector<double> price;
};

struct ConditionalMenu {
  std::vector<MenuOption> options;
};

// Groups are disjoint, non-empty and cover every item type; prices[r] is
// offered whenever the realized type falls in groups[r].
struct PartitionMechanism {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> prices;
};

// Reveal the type, then post prices[i].
struct TypePricing {
  std::vector<double> prices;
};

// One price, no information released by the seller.
struct Bundling {
  double price = 0.0;
};

// A bidder type (valuation vector, posterior) with its probability.
struct BidderType {
  std::vector<double> v;
  Posterior posterior;
  double prob = 0.0;
};

void validate(const MenuOption& opt, std::size_t n);
void validate(const ConditionalMenu& menu, std::size_t n);
void validate(const PartitionMechanism& mech, std::size_t n);
void validate(const TypePricing& pricing, std::size_t n);
void validate(const Bundling& bundle);

// Maps each item type to the index of its group.
std::vector<std::size_t> group_index(const PartitionMechanism& mech, std::size_t n);

// Interim expected utility sum_i pi(i) (z_i v_i - c_i).
double option_utility(const MenuOption& opt, std::span<const double> v, const Posterior& belief);

// Expected payment sum_i pi(i) c_i.
double expected_payment(const MenuOption& opt, const Posterior& belief);

// The bidder's choice: the utility-maximizing option if its utility is
// non-negative, otherwise nullopt (abstain). Ties go to the option with the
// larger expected payment, then to the lower index.
std::optional<std::size_t> best_response(const ConditionalMenu& menu, std::span<const double> v,
                                         const Posterior& belief, double tie_tol = kTieTol);

// Exact seller revenue over an enumerated type space.
double menu_revenue_exact(const ConditionalMenu& menu, std::span<const BidderType> types);

// Realized-payment Monte Carlo estimate: draw item type, signal, valuations;
// the bidder best-responds to his posterior and pays the conditional price of
// the realized type.
Estimate menu_revenue_mc(const ConditionalMenu& menu, const MarketInstance& inst,
                         const SignalingScheme& scheme, std::uint64_t trials, std::uint64_t seed);

// Closed form: sum_i prior(i) P(i) P[V(i) >= P(i)].
double pricing_revenue(const MarketInstance& inst, const TypePricing& pricing);

// Grand price against the provider's signal only. Exact (std_error 0) when
// every valuation is discrete and the instance is small, Monte Carlo
// otherwise.
Estimate bundling_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                          const Bundling& bundle, std::uint64_t trials, std::uint64_t seed);

// Per-trial posterior expected value sum_i pi_s(i) v_i, the quantity a
// bundling buyer compares against the price.
std::vector<double> bundling_value_samples(const MarketInstance& inst,
                                           const SignalingScheme& scheme, std::uint64_t trials,
                                           std::uint64_t seed, StreamTag tag);

// Sequential partition game: the bidder sees the offered group price, updates
// pi_s on the realized group, and buys iff the conditional expected value
// covers the price.
Estimate partition_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                           const PartitionMechanism& mech, std::uint64_t trials,
                           std::uint64_t seed);

// Dyadic menu: for every level kappa in [1, m] and
// block iota, pay (ln 2 / 8) kappa up front and receive the item iff it lies
// in the block [(iota-1) 2^kappa, iota 2^kappa).
inline constexpr int kMaxMechanism1Levels = 10;
ConditionalMenu mechanism1_build(int m);
double mechanism1_price(int kappa);
// Index of option L_{kappa, iota} (iota 1-based) in mechanism1_build(m).
std::size_t mechanism1_option_index(int m, int kappa, std::size_t iota);

namespace detail {

// Precomputed draws for (item type, signal) and per-signal posteriors.
class TrialSampler {
 public:
  TrialSampler(const MarketInstance& inst, const SignalingScheme& scheme);

  std::size_t draw_type(Rng& rng) const;
  std::size_t draw_signal(Rng& rng, std::size_t item) const;

  // Valid only for signals that can occur.
  const Posterior& posterior(std::size_t s) const { return *posteriors_[s]; }
  // Item types with positive posterior weight after signal s.
  const std::vector<std::size_t>& support(std::size_t s) const { return supports_[s]; }

 private:
  std::vector<double> prior_cdf_;
  std::vector<std::vector<std::size_t>> signal_ids_;
  std::vector<std::vector<double>> signal_cdfs_;
  std::vector<std::optional<Posterior>> posteriors_;
  std::vector<std::vector<std::size_t>> supports_;
};

}  // namespace detail

}  // namespace infauct
