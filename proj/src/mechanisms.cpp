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

#include "infauct/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "infauct/error.hpp"

namespace infauct {

namespace {

// Exact bundling enumeration is used up to this many valuation profiles.
constexpr double kMaxExactProfiles = 1e6;
constexpr std::size_t kMaxExactBundlingTypes = 12;

std::size_t draw_from_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

void validate(const MenuOption& opt, std::size_t n) {
  require(opt.alloc.size() == n && opt.price.size() == n,
          "menu option vectors must have one entry per item type");
  for (std::size_t i = 0; i < n; ++i) {
    require(opt.alloc[i] >= 0.0 && opt.alloc[i] <= 1.0, "allocations must lie in [0, 1]");
    require(std::isfinite(opt.price[i]) && opt.price[i] >= 0.0,
            "conditional prices must be non-negative");
  }
}

void validate(const ConditionalMenu& menu, std::size_t n) {
  for (const auto& opt : menu.options) validate(opt, n);
}

void validate(const PartitionMechanism& mech, std::size_t n) {
  require(!mech.groups.empty(), "partition needs at least one group");
  require(mech.prices.size() == mech.groups.size(), "partition needs one price per group");
  std::vector<bool> seen(n, false);
  for (std::size_t r = 0; r < mech.groups.size(); ++r) {
    require(!mech.groups[r].empty(), "partition groups must be non-empty");
    require(std::isfinite(mech.prices[r]) && mech.prices[r] >= 0.0,
            "partition prices must be non-negative");
    for (std::size_t i : mech.groups[r]) {
      require(i < n, "partition refers to an unknown item type");
      require(!seen[i], "partition groups must be disjoint");
      seen[i] = true;
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }),
          "partition groups must cover every item type");
}

void validate(const TypePricing& pricing, std::size_t n) {
  require(pricing.prices.size() == n, "item-type pricing needs one price per item type");
  for (double p : pricing.prices) {
    require(std::isfinite(p) && p >= 0.0, "item-type prices must be non-negative");
  }
}

void validate(const Bundling& bundle) {
  require(std::isfinite(bundle.price) && bundle.price >= 0.0,
          "bundling price must be non-negative");
}

std::vector<std::size_t> group_index(const PartitionMechanism& mech, std::size_t n) {
  validate(mech, n);
  std::vector<std::size_t> index(n);
  for (std::size_t r = 0; r < mech.groups.size(); ++r) {
    for (std::size_t i : mech.groups[r]) index[i] = r;
  }
  return index;
}

double option_utility(const MenuOption& opt, std::span<const double> v, const Posterior& belief) {
  const std::size_t n = belief.size();
  require(v.size() == n && opt.alloc.size() == n && opt.price.size() == n,
          "option utility: dimension mismatch");
  double u = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (belief[i] == 0.0) continue;
    u += belief[i] * (opt.alloc[i] * v[i] - opt.price[i]);
  }
  return u;
}

double expected_payment(const MenuOption& opt, const Posterior& belief) {
  require(opt.price.size() == belief.size(), "expected payment: dimension mismatch");
  double pay = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) pay += belief[i] * opt.price[i];
  return pay;
}

std::optional<std::size_t> best_response(const ConditionalMenu& menu, std::span<const double> v,
                                         const Posterior& belief, double tie_tol) {
  std::optional<std::size_t> best;
  double best_u = 0.0;
  double best_pay = 0.0;
  for (std::size_t k = 0; k < menu.options.size(); ++k) {
    const double u = option_utility(menu.options[k], v, belief);
    if (u < -tie_tol) continue;
    const double pay = expected_payment(menu.options[k], belief);
    if (!best || u > best_u + tie_tol || (u >= best_u - tie_tol && pay > best_pay + tie_tol)) {
      best = k;
      best_u = u;
      best_pay = pay;
    }
  }
  return best;
}

double menu_revenue_exact(const ConditionalMenu& menu, std::span<const BidderType> types) {
  double revenue = 0.0;
  for (const auto& t : types) {
    const auto choice = best_response(menu, t.v, t.posterior);
    if (!choice) continue;
    revenue += t.prob * expected_payment(menu.options[*choice], t.posterior);
  }
  return revenue;
}

namespace detail {

TrialSampler::TrialSampler(const MarketInstance& inst, const SignalingScheme& scheme) {
  const std::size_t n = inst.num_types();
  require(scheme.num_types() == n, "signaling scheme and instance disagree on item types");
  double acc = 0.0;
  for (double p : inst.prior()) {
    acc += p;
    prior_cdf_.push_back(acc);
  }
  signal_ids_.resize(n);
  signal_cdfs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
      if (scheme(s, i) <= 0.0) continue;
      c += scheme(s, i);
      signal_ids_[i].push_back(s);
      signal_cdfs_[i].push_back(c);
    }
  }
  const ProbVector marginals = signal_marginals(scheme, inst.prior());
  posteriors_.resize(scheme.num_signals());
  supports_.resize(scheme.num_signals());
  for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
    if (marginals[s] <= 0.0) continue;
    posteriors_[s] = posterior_of(scheme, inst.prior(), s);
    for (std::size_t i = 0; i < n; ++i) {
      if ((*posteriors_[s])[i] > 0.0) supports_[s].push_back(i);
    }
  }
}

std::size_t TrialSampler::draw_type(Rng& rng) const {
  return draw_from_cdf(prior_cdf_, rng.uniform());
}

std::size_t TrialSampler::draw_signal(Rng& rng, std::size_t item) const {
  return signal_ids_[item][draw_from_cdf(signal_cdfs_[item], rng.uniform())];
}

}  // namespace detail

Estimate menu_revenue_mc(const ConditionalMenu& menu, const MarketInstance& inst,
                         const SignalingScheme& scheme, std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1, "menu_revenue_mc requires at least one trial");
  const std::size_t n = inst.num_types();
  validate(menu, n);
  const detail::TrialSampler sampler(inst, scheme);
  return mc_mean(trials, seed, StreamTag::kMenu, [&](Rng& rng) {
    const std::size_t item = sampler.draw_type(rng);
    const std::size_t s = sampler.draw_signal(rng, item);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = sample(inst.valuation(i), rng.uniform());
    const auto choice = best_response(menu, v, sampler.posterior(s));
    return choice ? menu.options[*choice].price[item] : 0.0;
  });
}

double pricing_revenue(const MarketInstance& inst, const TypePricing& pricing) {
  validate(pricing, inst.num_types());
  double revenue = 0.0;
  for (std::size_t i = 0; i < inst.num_types(); ++i) {
    const double p = pricing.prices[i];
    revenue += inst.prior()[i] * p * survival(inst.valuation(i), p);
  }
  return revenue;
}

namespace {

// Exact bundling revenue by enumerating posteriors and valuation profiles.
std::optional<double> bundling_revenue_exact(const MarketInstance& inst,
                                             const SignalingScheme& scheme, double price) {
  const std::size_t n = inst.num_types();
  if (!inst.all_discrete() || n > kMaxExactBundlingTypes) return std::nullopt;
  double profiles = 1.0;
  for (const auto& d : inst.valuations()) profiles *= static_cast<double>(std::get<DiscreteDist>(d).size());
  if (profiles > kMaxExactProfiles) return std::nullopt;

  const PosteriorFamily family = posterior_family(scheme, inst.prior());
  std::vector<std::size_t> digits(n, 0);
  double revenue = 0.0;
  for (;;) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) prob *= std::get<DiscreteDist>(inst.valuation(i)).probs()[digits[i]];
    if (prob > 0.0) {
      for (const auto& member : family) {
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          value += member.posterior[i] * std::get<DiscreteDist>(inst.valuation(i)).values()[digits[i]];
        }
        if (accepts(value, price)) revenue += member.prob * prob * price;
      }
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < std::get<DiscreteDist>(inst.valuation(pos)).size()) break;
      digits[pos] = 0;
      if (pos == 0) return revenue;
    }
    if (n == 0) return revenue;
  }
}

}  // namespace

std::vector<double> bundling_value_samples(const MarketInstance& inst,
                                           const SignalingScheme& scheme, std::uint64_t trials,
                                           std::uint64_t seed, StreamTag tag) {
  const detail::TrialSampler sampler(inst, scheme);
  return mc_collect(trials, seed, tag, [&](Rng& rng) {
    const std::size_t item = sampler.draw_type(rng);
    const std::size_t s = sampler.draw_signal(rng, item);
    const Posterior& belief = sampler.posterior(s);
    double value = 0.0;
    for (std::size_t i : sampler.support(s)) {
      value += belief[i] * sample(inst.valuation(i), rng.uniform());
    }
    return value;
  });
}

Estimate bundling_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                          const Bundling& bundle, std::uint64_t trials, std::uint64_t seed) {
  validate(bundle);
  require(scheme.num_types() == inst.num_types(),
          "signaling scheme and instance disagree on item types");
  if (bundle.price == 0.0) return {0.0, 0.0};
  if (auto exact = bundling_revenue_exact(inst, scheme, bundle.price)) return {*exact, 0.0};
  require(trials >= 1, "bundling_revenue requires at least one trial");

  const detail::TrialSampler sampler(inst, scheme);
  return mc_mean(trials, seed, StreamTag::kBundling, [&](Rng& rng) {
    const std::size_t item = sampler.draw_type(rng);
    const std::size_t s = sampler.draw_signal(rng, item);
    const Posterior& belief = sampler.posterior(s);
    double value = 0.0;
    for (std::size_t i : sampler.support(s)) {
      value += belief[i] * sample(inst.valuation(i), rng.uniform());
    }
    return accepts(value, bundle.price) ? bundle.price : 0.0;
  });
}

Estimate partition_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                           const PartitionMechanism& mech, std::uint64_t trials,
                           std::uint64_t seed) {
  require(trials >= 1, "partition_revenue requires at least one trial");
  const std::size_t n = inst.num_types();
  const std::vector<std::size_t> group_of = group_index(mech, n);
  const detail::TrialSampler sampler(inst, scheme);

  // Belief after signal s and offered group r, restricted to its support.
  struct Conditional {
    std::vector<std::size_t> items;
    std::vector<double> weights;
  };
  const std::size_t groups = mech.groups.size();
  std::vector<Conditional> conditional(scheme.num_signals() * groups);
  const ProbVector marginals = signal_marginals(scheme, inst.prior());
  for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
    if (marginals[s] <= 0.0) continue;
    const Posterior& belief = sampler.posterior(s);
    for (std::size_t r = 0; r < groups; ++r) {
      Conditional& c = conditional[s * groups + r];
      double mass = 0.0;
      for (std::size_t i : mech.groups[r]) mass += belief[i];
      if (mass <= 0.0) continue;
      for (std::size_t i : sampler.support(s)) {
        if (group_of[i] != r) continue;
        c.items.push_back(i);
        c.weights.push_back(belief[i] / mass);
      }
    }
  }

  return mc_mean(trials, seed, StreamTag::kPartition, [&](Rng& rng) {
    const std::size_t item = sampler.draw_type(rng);
    const std::size_t s = sampler.draw_signal(rng, item);
    const std::size_t r = group_of[item];
    const Conditional& c = conditional[s * groups + r];
    double value = 0.0;
    for (std::size_t k = 0; k < c.items.size(); ++k) {
      value += c.weights[k] * sample(inst.valuation(c.items[k]), rng.uniform());
    }
    return accepts(value, mech.prices[r]) ? mech.prices[r] : 0.0;
  });
}

double mechanism1_price(int kappa) { return std::numbers::ln2 / 8.0 * kappa; }

std::size_t mechanism1_option_index(int m, int kappa, std::size_t iota) {
  std::size_t offset = 0;
  for (int level = 1; level < kappa; ++level) offset += std::size_t{1} << (m - level);
  return offset + iota - 1;
}

ConditionalMenu mechanism1_build(int m) {
  require(m >= 1, "dyadic menu needs m >= 1");
  require(m <= kMaxMechanism1Levels, "dyadic menu is materialized only for m <= " +
                                         std::to_string(kMaxMechanism1Levels));
  const std::size_t n = std::size_t{1} << m;
  ConditionalMenu menu;
  for (int kappa = 1; kappa <= m; ++kappa) {
    const std::size_t block = std::size_t{1} << kappa;
    const std::size_t blocks = n / block;
    for (std::size_t iota = 1; iota <= blocks; ++iota) {
      MenuOption opt;
      opt.alloc.assign(n, 0.0);
      opt.price.assign(n, mechanism1_price(kappa));
      for (std::size_t i = (iota - 1) * block; i < iota * block; ++i) opt.alloc[i] = 1.0;
      menu.options.push_back(std::move(opt));
    }
  }
  return menu;
}

}  // namespace infauct
