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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <variant>

#include "infauct/market.hpp"
#include "infauct/mechanisms.hpp"
#include "infauct/optrev.hpp"
#include "infauct/parallel.hpp"
#include "json.hpp"

namespace infauct {

using Json = nlohmann::ordered_json;

// A discrete or continuous market plus the provider's signal, optionally
// post-processed by a garbling.
struct Scenario {
  MarketInstance instance;
  SignalingScheme signals;
  std::optional<Garbling> garbling;

  // signals, or garbling composed with signals.
  SignalingScheme effective_scheme() const;
};

// Malformed documents and model violations both raise DomainError.
Scenario parse_scenario(const Json& doc);
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
Json to_json(const Scenario& scenario);

using Mechanism = std::variant<ConditionalMenu, PartitionMechanism, TypePricing, Bundling>;

Mechanism parse_mechanism(const Json& doc);
Mechanism load_mechanism(const std::filesystem::path& path);
Json to_json(const Mechanism& mechanism);
Json to_json(const ConditionalMenu& menu);

// {revenue, status, menu}
Json to_json(const OptimalResult& result);

struct Evaluation {
  Estimate revenue;
  bool exact = false;
};

// Exact where a closed form or enumeration exists (pricing always; menus on
// discrete scenarios; bundling on small discrete ones), Monte Carlo otherwise.
Evaluation evaluate(const Scenario& scenario, const Mechanism& mechanism, std::uint64_t trials,
                    std::uint64_t seed);

}  // namespace infauct
