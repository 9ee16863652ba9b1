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

#include "infauct/linprog.hpp"
#include "infauct/market.hpp"
#include "infauct/mechanisms.hpp"

namespace infauct {

// Dense tableau memory grows with the square of the type count.
inline constexpr std::size_t kMaxBidderTypes = 5000;

// Every (valuation profile, posterior) pair with positive probability.
// Profiles are enumerated lexicographically (item type 0 most significant),
// posteriors in signal order; profile-major. Requires discrete valuations.
std::vector<BidderType> enumerate_bidder_types(const MarketInstance& inst,
                                               const SignalingScheme& scheme,
                                               double tol = kPosteriorDedupTol);

// Collapses types with the same posterior and the same values on its
// support; they rank every option identically, so the LP optimum is
// unchanged. Probabilities add up; the first occurrence represents the class
// and the original order is kept.
std::vector<BidderType> merge_equivalent_types(std::span<const BidderType> types);

// Column of z_i(t) and c_i(t) in the revenue LP.
inline std::size_t alloc_var(std::size_t t, std::size_t i, std::size_t n) { return t * 2 * n + i; }
inline std::size_t price_var(std::size_t t, std::size_t i, std::size_t n) {
  return t * 2 * n + n + i;
}

// Rows: IC(t, t') for every ordered pair t != t' (t-major), then IR(t).
// Variables z in [0, 1], c >= 0. Objective: sum_t prob(t) sum_i pi_t(i) c_i(t).
LinearProgram build_revenue_lp(std::span<const BidderType> types, std::size_t n);

// Row indices of the IR block in build_revenue_lp's layout.
std::vector<std::size_t> revenue_lp_ir_rows(std::size_t num_types);

struct OptimalResult {
  double revenue = 0.0;
  ConditionalMenu menu;  // option t is the LP's (z(t), c(t))
  LpStatus status = LpStatus::kSolverFailure;
  std::vector<BidderType> types;  // after merge_equivalent_types
  std::size_t lp_iterations = 0;
};

struct OptRevOptions {
  double dedup_tol = kPosteriorDedupTol;
  SolverOptions solver{.rule = PivotRule::kDantzigBlandFallback};
  // Start from the IR rows and add violated IC rows on demand.
  bool row_generation = true;
};

// Optimal seller revenue over all IC and interim-IR conditional-price menus.
// Throws UnsupportedInstance for continuous valuations or oversized type
// spaces and SolverFailure if the LP is not solved to optimality.
OptimalResult optimal_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                              const OptRevOptions& options = {});

}  // namespace infauct
