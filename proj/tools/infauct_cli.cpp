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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "infauct/error.hpp"
#include "infauct/experiments.hpp"
#include "infauct/io.hpp"
#include "infauct/optrev.hpp"

namespace {

using namespace infauct;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write '" + path + "'");
  write(out);
  require(static_cast<bool>(out), "failed writing '" + path + "'");
}

std::string format_general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auctions with a third-party data provider: mechanisms, optimal revenue, experiments"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string mechanism_path;
  std::string out_path;
  std::string eps_range;
  int example = 0;
  int m = 0;
  std::size_t n = 0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;

  auto* lp = app.add_subcommand("lp-opt", "Optimal revenue of a discrete scenario via the IC/IR LP");
  lp->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  lp->add_option("--out", out_path, "Write the result JSON here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "Run a separation experiment and emit CSV");
  sim->add_option("--example", example, "1 (group-revealing) or 2 (dyadic)")->required();
  sim->add_option("--m", m, "Size parameter")->required();
  sim->add_option("--trials", trials, "Monte Carlo trials")->required();
  sim->add_option("--seed", seed, "RNG seed")->required();
  sim->add_option("--out", out_path, "Write the CSV here instead of stdout");

  auto* sweep = app.add_subcommand("sweep-garble", "Optimal revenue along the eps-garbling family");
  sweep->add_option("--eps", eps_range, "start:stop:step")->required();
  sweep->add_option("--seed", seed, "RNG seed (the sweep is exact)")->required();
  sweep->add_option("--out", out_path, "Write the CSV here instead of stdout");

  auto* bp = app.add_subcommand("best-partition", "Exhaustive search over item-type partitions");
  bp->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  bp->add_option("--trials", trials, "Monte Carlo trials")->required();
  bp->add_option("--seed", seed, "RNG seed")->required();

  auto* er = app.add_subcommand("verify-er", "Empirical check of the ER average concentration bounds");
  er->add_option("--n", n, "Number of ER draws averaged")->required();
  er->add_option("--trials", trials, "Monte Carlo trials")->required();
  er->add_option("--seed", seed, "RNG seed")->required();

  auto* ev = app.add_subcommand("evaluate", "Revenue of a given mechanism on a scenario");
  ev->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  ev->add_option("--mechanism", mechanism_path, "Mechanism JSON")->required();
  ev->add_option("--trials", trials, "Monte Carlo trials");
  ev->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (lp->parsed()) {
      const Scenario sc = load_scenario(scenario_path);
      const OptimalResult result = optimal_revenue(sc.instance, sc.effective_scheme());
      emit(out_path, [&](std::ostream& os) { os << to_json(result).dump(2) << '\n'; });
    } else if (sim->parsed()) {
      require(example == 1 || example == 2, "--example must be 1 or 2");
      const RunReport report =
          example == 1 ? run_example1(m, trials, seed) : run_example2(m, trials, seed);
      emit(out_path, [&](std::ostream& os) { write_csv(os, report); });
      write_summary(out_path.empty() ? std::cerr : std::cout, report);
    } else if (sweep->parsed()) {
      const auto rows = garble_sweep(parse_eps_range(eps_range));
      emit(out_path, [&](std::ostream& os) {
        os << "eps,revenue\n";
        for (const auto& r : rows) os << format_general(r.eps) << ',' << format_fixed(r.revenue, 9) << '\n';
      });
    } else if (bp->parsed()) {
      const Scenario sc = load_scenario(scenario_path);
      const BestPartition best = best_partition(sc.instance, sc.effective_scheme(), trials, seed);
      const Json doc = {{"mechanism", to_json(Mechanism{best.mechanism})},
                        {"revenue", best.revenue.value},
                        {"std_error", best.revenue.std_error},
                        {"in_sample_revenue", best.in_sample_revenue},
                        {"partitions_searched", best.partitions_searched}};
      std::cout << doc.dump(2) << '\n';
    } else if (er->parsed()) {
      const ErReport report = er_verify(n, trials, seed);
      write_er_report(std::cout, report);
      return report.passed() ? kExitOk : kExitCheckFailed;
    } else if (ev->parsed()) {
      const Scenario sc = load_scenario(scenario_path);
      const Evaluation e = evaluate(sc, load_mechanism(mechanism_path), trials, seed);
      const Json doc = {{"revenue", e.revenue.value},
                        {"std_error", e.revenue.std_error},
                        {"exact", e.exact}};
      std::cout << doc.dump(2) << '\n';
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}
