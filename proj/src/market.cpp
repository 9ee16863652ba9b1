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

#include "infauct/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infauct/error.hpp"

namespace infauct {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == m.cols(), "matrix rows must have equal length");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

void validate_probability_vector(std::span<const double> p, double tol, const char* what) {
  require(!p.empty(), std::string(what) + " must be non-empty");
  double total = 0.0;
  for (double x : p) {
    require(std::isfinite(x) && x >= 0.0, std::string(what) + " entries must be non-negative");
    total += x;
  }
  require(std::abs(total - 1.0) <= tol, std::string(what) + " must sum to 1");
}

namespace {

void validate_column_stochastic(const Matrix& m, const char* what) {
  require(m.rows() > 0 && m.cols() > 0, std::string(what) + " must be non-empty");
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double x = m(r, c);
      require(std::isfinite(x) && x >= 0.0 && x <= 1.0,
              std::string(what) + " entries must lie in [0, 1]");
      total += x;
    }
    require(std::abs(total - 1.0) <= 1e-12,
            std::string(what) + " column " + std::to_string(c) + " must sum to 1");
  }
}

}  // namespace

MarketInstance::MarketInstance(ProbVector prior, std::vector<ValuationDist> valuations)
    : prior_(std::move(prior)), valuations_(std::move(valuations)) {
  validate_probability_vector(prior_, 1e-12, "prior");
  require(valuations_.size() == prior_.size(),
          "market instance needs exactly one valuation distribution per item type");
}

bool MarketInstance::all_discrete() const {
  return std::all_of(valuations_.begin(), valuations_.end(),
                     [](const ValuationDist& d) { return is_discrete(d); });
}

SignalingScheme::SignalingScheme(Matrix likelihood) : likelihood_(std::move(likelihood)) {
  validate_column_stochastic(likelihood_, "signal likelihood");
}

SignalingScheme SignalingScheme::full_revelation(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return SignalingScheme(std::move(m));
}

SignalingScheme SignalingScheme::uninformative(std::size_t n) {
  return SignalingScheme(Matrix(1, n, 1.0));
}

Garbling::Garbling(Matrix matrix) : matrix_(std::move(matrix)) {
  validate_column_stochastic(matrix_, "garbling");
}

Garbling Garbling::identity(std::size_t k) {
  Matrix m(k, k);
  for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0;
  return Garbling(std::move(m));
}

Posterior::Posterior(ProbVector p) : p_(std::move(p)) {
  validate_probability_vector(p_, 1e-10, "posterior");
}

Posterior posterior_of(const SignalingScheme& scheme, std::span<const double> prior,
                       std::size_t s) {
  require(prior.size() == scheme.num_types(), "prior length must equal the number of item types");
  require(s < scheme.num_signals(), "signal index out of range");
  ProbVector p(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    p[i] = scheme(s, i) * prior[i];
    total += p[i];
  }
  require(total > 0.0, "signal " + std::to_string(s) + " has zero probability");
  for (double& x : p) x /= total;
  return Posterior(std::move(p));
}

ProbVector signal_marginals(const SignalingScheme& scheme, std::span<const double> prior) {
  require(prior.size() == scheme.num_types(), "prior length must equal the number of item types");
  ProbVector out(scheme.num_signals(), 0.0);
  for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
    for (std::size_t i = 0; i < prior.size(); ++i) out[s] += scheme(s, i) * prior[i];
  }
  return out;
}

SignalingScheme compose(const Garbling& g, const SignalingScheme& scheme) {
  require(g.num_inputs() == scheme.num_signals(),
          "garbling input dimension must equal the number of scheme signals");
  Matrix out(g.num_outputs(), scheme.num_types());
  for (std::size_t o = 0; o < g.num_outputs(); ++o) {
    for (std::size_t x = 0; x < g.num_inputs(); ++x) {
      const double gx = g(o, x);
      if (gx == 0.0) continue;
      for (std::size_t i = 0; i < scheme.num_types(); ++i) out(o, i) += gx * scheme(x, i);
    }
  }
  // Sums of products can land an ulp above 1.
  for (std::size_t o = 0; o < out.rows(); ++o) {
    for (std::size_t i = 0; i < out.cols(); ++i) out(o, i) = std::min(out(o, i), 1.0);
  }
  return SignalingScheme(std::move(out));
}

PosteriorFamily posterior_family(const SignalingScheme& scheme, std::span<const double> prior,
                                 double tol) {
  require(tol >= 0.0, "deduplication tolerance must be non-negative");
  const ProbVector marginals = signal_marginals(scheme, prior);
  PosteriorFamily family;
  for (std::size_t s = 0; s < scheme.num_signals(); ++s) {
    if (marginals[s] <= 0.0) continue;
    Posterior post = posterior_of(scheme, prior, s);
    auto same = std::find_if(family.begin(), family.end(), [&](const PosteriorFamilyMember& m) {
      for (std::size_t i = 0; i < post.size(); ++i) {
        if (std::abs(m.posterior[i] - post[i]) > tol) return false;
      }
      return true;
    });
    if (same != family.end()) {
      same->prob += marginals[s];
    } else {
      family.push_back({std::move(post), marginals[s], s});
    }
  }
  return family;
}

}  // namespace infauct
