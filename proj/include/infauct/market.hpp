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
#include <span>
#include <vector>

#include "infauct/distributions.hpp"
#include "infauct/matrix.hpp"

namespace infauct {

using ProbVector = std::vector<double>;

// Max-norm distance below which two posteriors count as the same bidder
// belief.
inline constexpr double kPosteriorDedupTol = 1e-9;

// Checks non-negativity and unit sum within `tol`; throws DomainError.
void validate_probability_vector(std::span<const double> p, double tol, const char* what);

// n item types, a public prior over them, and an independent valuation
// distribution per type.
class MarketInstance {
 public:
  MarketInstance(ProbVector prior, std::vector<ValuationDist> valuations);

  std::size_t num_types() const { return prior_.size(); }
  const ProbVector& prior() const { return prior_; }
  const std::vector<ValuationDist>& valuations() const { return valuations_; }
  const ValuationDist& valuation(std::size_t i) const { return valuations_[i]; }
  bool all_discrete() const;

 private:
  ProbVector prior_;
  std::vector<ValuationDist> valuations_;
};

// Likelihood matrix L(s, i) = P[signal s | item type i]. Columns are
// distributions over signals.
class SignalingScheme {
 public:
  explicit SignalingScheme(Matrix likelihood);

  static SignalingScheme full_revelation(std::size_t n);
  static SignalingScheme uninformative(std::size_t n);

  std::size_t num_signals() const { return likelihood_.rows(); }
  std::size_t num_types() const { return likelihood_.cols(); }
  double operator()(std::size_t s, std::size_t i) const { return likelihood_(s, i); }
  const Matrix& likelihood() const { return likelihood_; }

 private:
  Matrix likelihood_;
};

// Stochastic post-processing G(s', x) = P[output s' | input signal x].
class Garbling {
 public:
  explicit Garbling(Matrix matrix);

  static Garbling identity(std::size_t k);

  std::size_t num_outputs() const { return matrix_.rows(); }
  std::size_t num_inputs() const { return matrix_.cols(); }
  double operator()(std::size_t out, std::size_t in) const { return matrix_(out, in); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

// Bidder belief over item types.
class Posterior {
 public:
  explicit Posterior(ProbVector p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const ProbVector& values() const { return p_; }

 private:
  ProbVector p_;
};

struct PosteriorFamilyMember {
  Posterior posterior;
  double prob = 0.0;
  std::size_t first_signal = 0;  // lowest signal index merged into this member
};

using PosteriorFamily = std::vector<PosteriorFamilyMember>;

// Bayes update after observing signal s. Throws if s has zero probability.
Posterior posterior_of(const SignalingScheme& scheme, std::span<const double> prior,
                       std::size_t s);

// P[s] = sum_i L(s, i) prior(i).
ProbVector signal_marginals(const SignalingScheme& scheme, std::span<const double> prior);

// The scheme whose signal is g applied to the output of `scheme`.
SignalingScheme compose(const Garbling& g, const SignalingScheme& scheme);

// Distribution over posteriors induced by the scheme. Zero-probability
// signals are dropped and posteriors within `tol` (max norm) are merged, in
// signal order.
PosteriorFamily posterior_family(const SignalingScheme& scheme, std::span<const double> prior,
                                 double tol = kPosteriorDedupTol);

}  // namespace infauct
