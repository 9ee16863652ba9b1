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
#include <span>
#include <variant>
#include <vector>

namespace infauct {

// Equal-revenue distribution scaled by `scale`: P[V <= x] = 1 - scale/x on
// [scale, inf). Every posted price in the support earns exactly `scale`.
class EqualRevenueDist {
 public:
  explicit EqualRevenueDist(double scale = 1.0);
  double scale() const { return scale_; }

 private:
  double scale_;
};

// Finite-support distribution. Values are distinct and ascending, probs sum
// to one within 1e-12.
class DiscreteDist {
 public:
  DiscreteDist(std::vector<double> values, std::vector<double> probs);
  static DiscreteDist point(double value) { return DiscreteDist({value}, {1.0}); }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return values_.size(); }
  double mean() const;

  // Index of the bucket whose cumulative interval contains u.
  std::size_t bucket(double u) const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

using ValuationDist = std::variant<EqualRevenueDist, DiscreteDist>;

double er_cdf(const EqualRevenueDist& d, double x);
double er_quantile(const EqualRevenueDist& d, double u);
// E[min(V, cap)] = scale * (1 + ln(cap/scale)).
double er_truncated_mean(const EqualRevenueDist& d, double cap);

// Inverse-CDF transform of a uniform u in [0, 1).
double sample(const ValuationDist& d, double u);

// P[V >= price]; buying at exact indifference counts as a sale.
double survival(const ValuationDist& d, double price);

// Smallest point of the support (the scale for ER).
double support_min(const ValuationDist& d);

bool is_discrete(const ValuationDist& d);

struct TailPoint {
  double price = 0.0;
  double frequency = 0.0;
};

struct Lemma1Result {
  std::size_t n = 0;
  std::uint64_t trials = 0;
  double threshold = 0.0;  // ln(n)/2
  double p_half = 0.0;     // empirical P[mean >= ln(n)/2]
  std::vector<TailPoint> tail;
};

// Default tail grid {6 ln n, 12 ln n, 24 ln n}.
std::vector<double> lemma1_default_grid(std::size_t n);

// Empirical behaviour of the mean of n i.i.d. standard ER draws: how often it
// clears ln(n)/2, and how often it reaches each price in `grid`.
Lemma1Result lemma1_check(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                          std::span<const double> grid);
Lemma1Result lemma1_check(std::size_t n, std::uint64_t trials, std::uint64_t seed);

// Binomial standard error sqrt(p(1-p)/trials).
double binomial_std_error(double p, std::uint64_t trials);

}  // namespace infauct
