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

#include "infauct/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infauct/error.hpp"
#include "infauct/parallel.hpp"

namespace infauct {

EqualRevenueDist::EqualRevenueDist(double scale) : scale_(scale) {
  require(std::isfinite(scale) && scale > 0.0, "ER scale must be positive and finite");
}

DiscreteDist::DiscreteDist(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  require(!values_.empty(), "discrete distribution needs at least one value");
  require(values_.size() == probs_.size(), "discrete distribution: values/probs size mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    require(std::isfinite(values_[j]) && values_[j] >= 0.0,
            "discrete distribution: values must be non-negative");
    require(std::isfinite(probs_[j]) && probs_[j] >= 0.0,
            "discrete distribution: probabilities must be non-negative");
    if (j > 0) {
      require(values_[j] > values_[j - 1],
              "discrete distribution: values must be distinct and ascending");
    }
    total += probs_[j];
    cumulative_.push_back(total);
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete distribution: probabilities must sum to 1");
}

double DiscreteDist::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) m += values_[j] * probs_[j];
  return m;
}

std::size_t DiscreteDist::bucket(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  // Rounding can leave the last cumulative a hair below 1.
  if (it == cumulative_.end()) return values_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double er_cdf(const EqualRevenueDist& d, double x) {
  if (x < d.scale()) return 0.0;
  return 1.0 - d.scale() / x;
}

double er_quantile(const EqualRevenueDist& d, double u) {
  require(u >= 0.0 && u < 1.0, "ER quantile requires u in [0, 1)");
  return d.scale() / (1.0 - u);
}

double er_truncated_mean(const EqualRevenueDist& d, double cap) {
  require(cap >= d.scale(), "ER truncation cap must be at least the scale");
  return d.scale() * (1.0 + std::log(cap / d.scale()));
}

double sample(const ValuationDist& d, double u) {
  if (const auto* er = std::get_if<EqualRevenueDist>(&d)) return er->scale() / (1.0 - u);
  const auto& disc = std::get<DiscreteDist>(d);
  return disc.values()[disc.bucket(u)];
}

double survival(const ValuationDist& d, double price) {
  if (const auto* er = std::get_if<EqualRevenueDist>(&d)) {
    if (price <= er->scale()) return 1.0;
    return er->scale() / price;
  }
  const auto& disc = std::get<DiscreteDist>(d);
  double p = 0.0;
  for (std::size_t j = 0; j < disc.size(); ++j) {
    if (disc.values()[j] >= price) p += disc.probs()[j];
  }
  return std::min(p, 1.0);
}

double support_min(const ValuationDist& d) {
  if (const auto* er = std::get_if<EqualRevenueDist>(&d)) return er->scale();
  return std::get<DiscreteDist>(d).values().front();
}

bool is_discrete(const ValuationDist& d) { return std::holds_alternative<DiscreteDist>(d); }

std::vector<double> lemma1_default_grid(std::size_t n) {
  const double ln_n = std::log(static_cast<double>(n));
  return {6.0 * ln_n, 12.0 * ln_n, 24.0 * ln_n};
}

namespace {

struct Lemma1Counts {
  std::uint64_t trials = 0;
  std::uint64_t half_hits = 0;
  std::vector<std::uint64_t> tail_hits;
};

}  // namespace

Lemma1Result lemma1_check(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                          std::span<const double> grid) {
  require(n >= 2, "lemma1_check requires n >= 2");
  require(trials >= 1, "lemma1_check requires at least one trial");
  const double threshold = std::log(static_cast<double>(n)) / 2.0;
  const EqualRevenueDist standard(1.0);

  auto blocks = map_blocks<Lemma1Counts>(trials, [&](std::uint64_t b, std::uint64_t begin,
                                                     std::uint64_t end) {
    Rng rng(seed, StreamTag::kLemma1, b);
    Lemma1Counts c;
    c.tail_hits.assign(grid.size(), 0);
    for (std::uint64_t t = begin; t < end; ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += er_quantile(standard, rng.uniform());
      const double mean = sum / static_cast<double>(n);
      ++c.trials;
      if (mean >= threshold) ++c.half_hits;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        if (mean >= grid[g]) ++c.tail_hits[g];
      }
    }
    return c;
  });

  std::uint64_t half = 0;
  std::vector<std::uint64_t> tails(grid.size(), 0);
  for (const auto& c : blocks) {
    half += c.half_hits;
    for (std::size_t g = 0; g < grid.size(); ++g) tails[g] += c.tail_hits[g];
  }

  Lemma1Result result;
  result.n = n;
  result.trials = trials;
  result.threshold = threshold;
  result.p_half = static_cast<double>(half) / static_cast<double>(trials);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    result.tail.push_back({grid[g], static_cast<double>(tails[g]) / static_cast<double>(trials)});
  }
  return result;
}

Lemma1Result lemma1_check(std::size_t n, std::uint64_t trials, std::uint64_t seed) {
  const auto grid = lemma1_default_grid(n);
  return lemma1_check(n, trials, seed, grid);
}

double binomial_std_error(double p, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

}  // namespace infauct
