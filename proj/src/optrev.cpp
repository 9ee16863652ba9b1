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

#include "infauct/optrev.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "infauct/error.hpp"

namespace infauct {

std::vector<BidderType> enumerate_bidder_types(const MarketInstance& inst,
                                               const SignalingScheme& scheme, double tol) {
  const std::size_t n = inst.num_types();
  require(scheme.num_types() == n, "signaling scheme and instance disagree on item types");
  if (!inst.all_discrete()) {
    throw UnsupportedInstance(
        "exact optimal revenue needs discrete valuations; use the Monte Carlo evaluators for "
        "equal-revenue types");
  }
  std::vector<const DiscreteDist*> dists;
  double profiles = 1.0;
  for (const auto& d : inst.valuations()) {
    dists.push_back(&std::get<DiscreteDist>(d));
    profiles *= static_cast<double>(dists.back()->size());
  }
  const PosteriorFamily family = posterior_family(scheme, inst.prior(), tol);
  if (profiles * static_cast<double>(family.size()) > 1e7) {
    throw UnsupportedInstance("bidder type space is too large to enumerate");
  }

  std::vector<BidderType> types;
  std::vector<std::size_t> digits(n, 0);
  for (;;) {
    double prob = 1.0;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      prob *= dists[i]->probs()[digits[i]];
      v[i] = dists[i]->values()[digits[i]];
    }
    if (prob > 0.0) {
      for (const auto& member : family) types.push_back({v, member.posterior, prob * member.prob});
    }
    std::size_t pos = n;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < dists[pos]->size()) {
        done = false;
        break;
      }
      digits[pos] = 0;
    }
    if (done) break;
  }
  return types;
}

std::vector<BidderType> merge_equivalent_types(std::span<const BidderType> types) {
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<BidderType> merged;
  for (const auto& t : types) {
    const std::size_t n = t.v.size();
    std::vector<double> key(t.posterior.values());
    for (std::size_t i = 0; i < n; ++i) key.push_back(t.posterior[i] > 0.0 ? t.v[i] : 0.0);
    const auto [it, fresh] = seen.emplace(std::move(key), merged.size());
    if (fresh) {
      merged.push_back(t);
    } else {
      merged[it->second].prob += t.prob;
    }
  }
  return merged;
}

LinearProgram build_revenue_lp(std::span<const BidderType> types, std::size_t n) {
  require(!types.empty(), "revenue LP needs at least one bidder type");
  const std::size_t T = types.size();
  for (const auto& t : types) {
    require(t.v.size() == n && t.posterior.size() == n, "bidder type dimension mismatch");
  }
  LinearProgram lp(2 * n * T);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      lp.set_bounds(alloc_var(t, i, n), 0.0, 1.0);
      lp.set_objective(price_var(t, i, n), types[t].prob * types[t].posterior[i]);
    }
  }

  // Utility of type t for option k, as coefficients over option k's variables.
  auto add_utility = [&](std::vector<double>& row, std::size_t t, std::size_t k, double sign) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = types[t].posterior[i];
      if (pi == 0.0) continue;
      row[alloc_var(k, i, n)] += sign * pi * types[t].v[i];
      row[price_var(k, i, n)] -= sign * pi;
    }
  };

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < T; ++k) {
      if (k == t) continue;
      std::vector<double> row(lp.num_vars(), 0.0);
      add_utility(row, t, t, 1.0);
      add_utility(row, t, k, -1.0);
      lp.add_constraint(std::move(row), Relation::kGreaterEq, 0.0);
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> row(lp.num_vars(), 0.0);
    add_utility(row, t, t, 1.0);
    lp.add_constraint(std::move(row), Relation::kGreaterEq, 0.0);
  }
  return lp;
}

std::vector<std::size_t> revenue_lp_ir_rows(std::size_t num_types) {
  std::vector<std::size_t> rows(num_types);
  const std::size_t first = num_types * (num_types - 1);
  for (std::size_t t = 0; t < num_types; ++t) rows[t] = first + t;
  return rows;
}

OptimalResult optimal_revenue(const MarketInstance& inst, const SignalingScheme& scheme,
                              const OptRevOptions& options) {
  OptimalResult result;
  result.types = merge_equivalent_types(enumerate_bidder_types(inst, scheme, options.dedup_tol));
  const std::size_t T = result.types.size();
  if (T > kMaxBidderTypes) {
    throw UnsupportedInstance("instance has " + std::to_string(T) +
                              " bidder types; the exact LP accepts at most " +
                              std::to_string(kMaxBidderTypes));
  }
  const std::size_t n = inst.num_types();
  const LinearProgram lp = build_revenue_lp(result.types, n);

  LpSolution sol;
  if (options.row_generation) {
    const auto ir = revenue_lp_ir_rows(T);
    sol = solve_with_row_generation(lp, ir, options.solver);
  } else {
    sol = solve(lp, options.solver);
  }
  result.status = sol.status;
  result.lp_iterations = sol.iterations;
  if (sol.status != LpStatus::kOptimal) {
    throw SolverFailure("revenue LP not solved: " + to_string(sol.status) +
                        (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }
  result.revenue = sol.objective;

  for (std::size_t t = 0; t < T; ++t) {
    MenuOption opt;
    opt.alloc.resize(n);
    opt.price.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      opt.alloc[i] = std::clamp(sol.x[alloc_var(t, i, n)], 0.0, 1.0);
      opt.price[i] = std::max(0.0, sol.x[price_var(t, i, n)]);
    }
    result.menu.options.push_back(std::move(opt));
  }
  return result;
}

}  // namespace infauct
