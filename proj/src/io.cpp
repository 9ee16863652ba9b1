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

#include "infauct/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "infauct/error.hpp"

namespace infauct {

namespace {

template <typename T>
T field(const Json& obj, const char* key) {
  require(obj.is_object(), std::string("expected an object holding '") + key + "'");
  const auto it = obj.find(key);
  require(it != obj.end(), std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw DomainError(std::string("field '") + key + "' has the wrong type");
  }
}

Matrix matrix_field(const Json& obj, const char* key) {
  const auto rows = field<std::vector<std::vector<double>>>(obj, key);
  require(!rows.empty(), std::string("'") + key + "' must have at least one row");
  for (const auto& r : rows) {
    require(r.size() == rows.front().size(), std::string("'") + key + "' rows differ in length");
  }
  return Matrix::from_rows(rows);
}

ValuationDist parse_valuation(const Json& doc) {
  const auto type = field<std::string>(doc, "type");
  if (type == "er") return EqualRevenueDist(field<double>(doc, "scale"));
  if (type == "discrete") {
    return DiscreteDist(field<std::vector<double>>(doc, "values"),
                        field<std::vector<double>>(doc, "probs"));
  }
  throw DomainError("unknown valuation type '" + type + "'");
}

Json valuation_json(const ValuationDist& d) {
  if (const auto* er = std::get_if<EqualRevenueDist>(&d)) {
    return {{"type", "er"}, {"scale", er->scale()}};
  }
  const auto& dd = std::get<DiscreteDist>(d);
  return {{"type", "discrete"}, {"values", dd.values()}, {"probs", dd.probs()}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw DomainError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

SignalingScheme Scenario::effective_scheme() const {
  return garbling ? compose(*garbling, signals) : signals;
}

Scenario parse_scenario(const Json& doc) {
  require(doc.is_object(), "scenario must be a JSON object");
  const auto n = field<std::size_t>(doc, "n");
  require(n >= 1, "scenario needs at least one item type");
  auto prior = field<ProbVector>(doc, "prior");
  require(prior.size() == n, "prior length differs from n");

  const auto vals = doc.find("valuations");
  require(vals != doc.end() && vals->is_array(), "'valuations' must be an array");
  require(vals->size() == n, "number of valuations differs from n");
  std::vector<ValuationDist> valuations;
  for (const auto& v : *vals) valuations.push_back(parse_valuation(v));

  const auto sig = doc.find("signals");
  require(sig != doc.end(), "missing field 'signals'");
  SignalingScheme scheme(matrix_field(*sig, "likelihood"));
  require(scheme.num_types() == n, "likelihood must have n columns");

  std::optional<Garbling> garbling;
  if (const auto g = doc.find("garbling"); g != doc.end() && !g->is_null()) {
    garbling.emplace(matrix_field(doc, "garbling"));
    require(garbling->num_inputs() == scheme.num_signals(),
            "garbling must have one column per signal");
  }
  return Scenario{MarketInstance(std::move(prior), std::move(valuations)), std::move(scheme),
                  std::move(garbling)};
}

Scenario parse_scenario(std::string_view text) {
  try {
    return parse_scenario(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("scenario is not valid JSON: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_json_file(path));
}

Json to_json(const Scenario& scenario) {
  const auto& inst = scenario.instance;
  Json vals = Json::array();
  for (const auto& d : inst.valuations()) vals.push_back(valuation_json(d));
  Json doc = {{"n", inst.num_types()},
              {"prior", inst.prior()},
              {"valuations", vals},
              {"signals", {{"likelihood", scenario.signals.likelihood().to_rows()}}}};
  if (scenario.garbling) doc["garbling"] = scenario.garbling->matrix().to_rows();
  return doc;
}

Mechanism parse_mechanism(const Json& doc) {
  const auto kind = field<std::string>(doc, "kind");
  if (kind == "menu") {
    const auto opts = doc.find("options");
    require(opts != doc.end() && opts->is_array(), "'options' must be an array");
    ConditionalMenu menu;
    for (const auto& o : *opts) {
      menu.options.push_back(
          {field<std::vector<double>>(o, "z"), field<std::vector<double>>(o, "c")});
    }
    return menu;
  }
  if (kind == "partition") {
    return PartitionMechanism{field<std::vector<std::vector<std::size_t>>>(doc, "groups"),
                              field<std::vector<double>>(doc, "prices")};
  }
  if (kind == "pricing") return TypePricing{field<std::vector<double>>(doc, "prices")};
  if (kind == "bundle") return Bundling{field<double>(doc, "price")};
  throw DomainError("unknown mechanism kind '" + kind + "'");
}

Mechanism load_mechanism(const std::filesystem::path& path) {
  return parse_mechanism(read_json_file(path));
}

Json to_json(const ConditionalMenu& menu) {
  Json opts = Json::array();
  for (const auto& o : menu.options) opts.push_back({{"z", o.alloc}, {"c", o.price}});
  return {{"kind", "menu"}, {"options", opts}};
}

Json to_json(const Mechanism& mechanism) {
  struct Visitor {
    Json operator()(const ConditionalMenu& m) const { return to_json(m); }
    Json operator()(const PartitionMechanism& m) const {
      return {{"kind", "partition"}, {"groups", m.groups}, {"prices", m.prices}};
    }
    Json operator()(const TypePricing& m) const {
      return {{"kind", "pricing"}, {"prices", m.prices}};
    }
    Json operator()(const Bundling& m) const { return {{"kind", "bundle"}, {"price", m.price}}; }
  };
  return std::visit(Visitor{}, mechanism);
}

Json to_json(const OptimalResult& result) {
  return {{"revenue", result.revenue},
          {"status", to_string(result.status)},
          {"menu", to_json(result.menu)}};
}

Evaluation evaluate(const Scenario& scenario, const Mechanism& mechanism, std::uint64_t trials,
                    std::uint64_t seed) {
  const auto& inst = scenario.instance;
  const SignalingScheme scheme = scenario.effective_scheme();
  const std::size_t n = inst.num_types();
  std::visit([n](const auto& m) {
    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Bundling>) {
      validate(m);
    } else {
      validate(m, n);
    }
  }, mechanism);

  if (const auto* menu = std::get_if<ConditionalMenu>(&mechanism)) {
    if (inst.all_discrete()) {
      const auto types = enumerate_bidder_types(inst, scheme);
      return {{menu_revenue_exact(*menu, types), 0.0}, true};
    }
    return {menu_revenue_mc(*menu, inst, scheme, trials, seed), false};
  }
  if (const auto* pricing = std::get_if<TypePricing>(&mechanism)) {
    return {{pricing_revenue(inst, *pricing), 0.0}, true};
  }
  if (const auto* bundle = std::get_if<Bundling>(&mechanism)) {
    const Estimate e = bundling_revenue(inst, scheme, *bundle, trials, seed);
    return {e, e.std_error == 0.0 && inst.all_discrete()};
  }
  return {partition_revenue(inst, scheme, std::get<PartitionMechanism>(mechanism), trials, seed),
          false};
}

}  // namespace infauct
