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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <sys/wait.h>

#include "infauct/error.hpp"
#include "infauct/experiments.hpp"
#include "infauct/io.hpp"
#include "infauct/linprog.hpp"
#include "infauct/optrev.hpp"
#include "support/lp_oracle.hpp"

namespace fs = std::filesystem;
using namespace infauct;

namespace {

struct Paths {
  std::string cli;
  fs::path data;
  fs::path workdir;
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs a shell command and returns its exit status.
int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// --- 1: two-type instance through the CLI ---------------------------------
Outcome lp_reproduction(const Paths& paths) {
  Outcome o;
  double revenue[2] = {0.0, 0.0};
  const char* files[2] = {"example3_full.json", "example3_garbled.json"};
  const double targets[2] = {1.1062, 1.0991};
  for (int k = 0; k < 2; ++k) {
    const fs::path out = paths.workdir / ("acceptance_lp_" + std::to_string(k) + ".json");
    const auto start = std::chrono::steady_clock::now();
    const int code = run(quote(paths.cli) + " lp-opt --scenario " +
                         quote((paths.data / files[k]).string()) + " --out " + quote(out.string()));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.expect(code == 0, std::string(files[k]) + " exit " + std::to_string(code));
    if (code != 0) return o;
    const Json doc = Json::parse(slurp(out));
    revenue[k] = doc.at("revenue").get<double>();
    o.expect(doc.at("status") == "optimal", "status not optimal");
    o.expect(std::abs(revenue[k] - targets[k]) <= 5e-4,
             std::string(files[k]) + " revenue " + fmt(revenue[k]));
    o.expect(secs < 1.0, std::string(files[k]) + " took " + fmt(secs) + " s");
  }
  o.expect(revenue[1] < revenue[0], "garbled revenue not below full revenue");
  if (o.pass) o.detail = "full=" + fmt(revenue[0]) + " garbled=" + fmt(revenue[1]);
  return o;
}

// --- 2: garbling a fully informed provider never hurts --------------------
Outcome garbling_lemma() {
  Outcome o;
  std::mt19937_64 gen(20260901);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  auto pick = [&gen](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  auto simplex = [&](std::size_t k) {
    std::vector<double> p(k);
    double total = 0.0;
    for (auto& x : p) total += (x = u(gen));
    for (auto& x : p) x /= total;
    return p;
  };

  int cases = 0, ok = 0;
  double worst = 0.0;
  for (int inst_id = 0; inst_id < 50; ++inst_id) {
    const std::size_t n = static_cast<std::size_t>(pick(1, 3));
    std::vector<ValuationDist> vals;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t support = static_cast<std::size_t>(pick(1, 3));
      std::vector<double> values;
      double v = 0.0;
      for (std::size_t j = 0; j < support; ++j) values.push_back(v += 0.25 * pick(1, 8));
      vals.emplace_back(DiscreteDist(values, simplex(support)));
    }
    const MarketInstance inst(simplex(n), vals);
    const SignalingScheme full = SignalingScheme::full_revelation(n);
    const double base = optimal_revenue(inst, full).revenue;
    for (int g = 0; g < 5; ++g) {
      const std::size_t outputs = static_cast<std::size_t>(pick(1, 3));
      Matrix m(outputs, n);
      for (std::size_t x = 0; x < n; ++x) {
        const auto col = simplex(outputs);
        for (std::size_t s = 0; s < outputs; ++s) m(s, x) = col[s];
      }
      const double garbled = optimal_revenue(inst, compose(Garbling(m), full)).revenue;
      ++cases;
      if (garbled >= base - 1e-7) ++ok;
      worst = std::min(worst, garbled - base);
    }
  }
  o.expect(ok == cases, std::to_string(cases - ok) + " violations");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(ok) + "/" + std::to_string(cases) +
              " cases, worst margin " + fmt(worst);
  return o;
}

// --- 3: ER tail lemma via the CLI -----------------------------------------
Outcome er_lemma(const Paths& paths) {
  Outcome o;
  const fs::path out = paths.workdir / "acceptance_er.txt";
  const int code = run(quote(paths.cli) + " verify-er --n 100 --trials 100000 --seed 0 > " +
                       quote(out.string()));
  const std::string text = slurp(out);
  o.expect(code == 0, "verify-er exit " + std::to_string(code));
  o.expect(text.find("overall PASS") != std::string::npos, "report does not pass");
  const ErReport r = er_verify(100, 100000, 0);
  o.expect(r.half_pass && r.raw.p_half >= 0.5 - 3.0 * r.half_std_error, "p_half below bound");
  o.expect(!r.tail.empty() && r.tail[0].frequency <= 9.0 / (6.0 * std::log(100.0)) +
                                                         3.0 * binomial_std_error(
                                                                   r.tail[0].frequency, 100000),
           "tail at 6 ln 100 above bound");
  if (o.pass) {
    o.detail = "p_half=" + fmt(r.raw.p_half) + " tail=" + fmt(r.tail[0].frequency);
  }
  return o;
}

// --- 4: group-revealing separation trend ----------------------------------
Outcome group_revealing() {
  Outcome o;
  const std::uint64_t trials = 100000;
  const RunReport r4 = run_example1(4, trials, 1);
  o.expect(r4.row("item_type_pricing").revenue.value == 25.0 / 48.0, "m=4 pricing not 25/48");

  const RunReport r16 = run_example1(16, trials, 2);
  double bound = 0.0;
  for (int k = 1; k <= 16; ++k) bound += std::log(16.0) / (4.0 * k);
  bound /= 16.0;
  const Estimate part = r16.row("group_partition").revenue;
  o.expect(part.value >= bound - 3.0 * part.std_error,
           "m=16 partition " + fmt(part.value) + " below " + fmt(bound));

  const Estimate lo = run_example1(8, trials, 3).row("partition_over_best_simple").revenue;
  const Estimate hi = run_example1(32, trials, 4).row("partition_over_best_simple").revenue;
  o.expect(hi.value - lo.value > 3.0 * std::hypot(lo.std_error, hi.std_error),
           "ratio did not grow: " + fmt(lo.value) + " -> " + fmt(hi.value));
  if (o.pass) {
    o.detail = "partition16=" + fmt(part.value) + " ratio8=" + fmt(lo.value) +
               " ratio32=" + fmt(hi.value);
  }
  return o;
}

// --- 5: dyadic instance ---------------------------------------------------
Outcome dyadic() {
  Outcome o;
  const CrossCheck c = mechanism1_cross_check(6, 10000, 5);
  o.expect(c.trials == 10000 && c.agreements == c.trials,
           "fast path agreed in " + std::to_string(c.agreements) + "/" + std::to_string(c.trials));

  const Estimate r8 = mechanism1_revenue(8, 100000, 6);
  const Estimate r12 = mechanism1_revenue(12, 100000, 7);
  const RunReport r16 = run_example2(16, 20000, 8);
  const Estimate m16 = r16.row("mechanism1").revenue;
  o.expect(r12.value - r8.value > 3.0 * std::hypot(r8.std_error, r12.std_error),
           "no increase from m=8 to m=12");
  o.expect(m16.value - r12.value > 3.0 * std::hypot(r12.std_error, m16.std_error),
           "no increase from m=12 to m=16");

  double worst = 0.0;
  for (int kappa = 1; kappa <= 16; ++kappa) {
    const auto& row = r16.row("dyadic_partition_k" + std::to_string(kappa));
    worst = std::max(worst, row.revenue.value);
    o.expect(row.revenue.value <= kDyadicPartitionBound + 3.0 * row.revenue.std_error,
             "partition kappa=" + std::to_string(kappa) + " above bound");
  }
  if (o.pass) {
    o.detail = "menu " + fmt(r8.value) + " < " + fmt(r12.value) + " < " + fmt(m16.value) +
               ", best partition " + fmt(worst);
  }
  return o;
}

// --- 6: simplex against vertex enumeration --------------------------------
Outcome lp_oracle() {
  Outcome o;
  std::mt19937_64 gen(6);
  int ok = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const LinearProgram lp = testing::random_bounded_lp(gen, 8, 12);
    const auto oracle = testing::vertex_enumeration_optimum(lp);
    const LpSolution s = solve(lp);
    if (!oracle || s.status != LpStatus::kOptimal) continue;
    const double gap = std::abs(s.objective - *oracle) / std::max(1.0, std::abs(*oracle));
    worst = std::max(worst, gap);
    if (gap <= 1e-7) ++ok;
  }
  o.expect(ok == 200, std::to_string(200 - ok) + " mismatches");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(ok) + "/200 matched, worst gap " +
              fmt(worst);
  return o;
}

// --- 7: menu round trip and thread-count determinism ----------------------
Outcome round_trip(const Paths& paths) {
  Outcome o;
  int checked = 0;
  double worst = 0.0;
  for (const auto& entry : fs::directory_iterator(paths.data)) {
    if (entry.path().extension() != ".json") continue;
    Scenario s = [&]() -> Scenario {
      try {
        return load_scenario(entry.path());
      } catch (const DomainError&) {
        return Scenario{MarketInstance({1.0}, {EqualRevenueDist()}),
                        SignalingScheme::full_revelation(1), std::nullopt};
      }
    }();
    if (!s.instance.all_discrete()) continue;
    const SignalingScheme scheme = s.effective_scheme();
    const OptimalResult r = optimal_revenue(s.instance, scheme);
    const auto types = enumerate_bidder_types(s.instance, scheme);
    const double replay = menu_revenue_exact(r.menu, types);
    worst = std::max(worst, std::abs(replay - r.revenue));
    o.expect(std::abs(replay - r.revenue) <= 1e-6, entry.path().filename().string());
    ++checked;
  }
  o.expect(checked >= 3, "too few scenario files");

  std::string csv[2];
  const char* threads[2] = {"1", "4"};
  for (int k = 0; k < 2; ++k) {
    const fs::path out = paths.workdir / ("acceptance_sim_" + std::to_string(k) + ".csv");
    const int code = run(std::string("INFAUCT_THREADS=") + threads[k] + " " + quote(paths.cli) +
                         " simulate --example 1 --m 8 --trials 30000 --seed 42 --out " +
                         quote(out.string()) + " > /dev/null");
    o.expect(code == 0, "simulate exit " + std::to_string(code));
    csv[k] = slurp(out);
  }
  o.expect(!csv[0].empty() && csv[0] == csv[1], "CSV differs across INFAUCT_THREADS");
  if (o.pass) {
    o.detail = std::to_string(checked) + " scenarios, worst gap " + fmt(worst) +
               ", CSV identical";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  Paths paths;
  CLI::App app{"acceptance criteria"};
  app.add_option("--cli", paths.cli, "infauct executable")->required();
  app.add_option("--data", paths.data, "scenario directory")->required();
  app.add_option("--workdir", paths.workdir, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "two-type LP reproduction", 2.0, [&] { return lp_reproduction(paths); }},
      {2, "garbled full information", 30.0, garbling_lemma},
      {3, "ER tail lemma", 5.0, [&] { return er_lemma(paths); }},
      {4, "group-revealing separation trend", 60.0, group_revealing},
      {5, "dyadic instance properties", 120.0, dyadic},
      {6, "LP oracle equivalence", 10.0, lp_oracle},
      {7, "round trip and determinism", 60.0, [&] { return round_trip(paths); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.expect(secs < c.budget_seconds, "over time budget " + fmt(c.budget_seconds) + " s");
    if (!o.pass) ++failures;
    std::printf("criterion %d %-34s %s  %.2fs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
