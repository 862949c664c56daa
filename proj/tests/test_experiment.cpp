// Copyright 2026 The chainfactor authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chainfactor/divergences.hpp"
#include "chainfactor/errors.hpp"
#include "chainfactor/experiment.hpp"
#include "chainfactor/factorization.hpp"
#include "chainfactor/gibbs.hpp"
#include "chainfactor/recovery.hpp"

using namespace chainfactor;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    out.push_back(std::move(cells));
  }
  return out;
}

double num(const std::vector<std::vector<std::string>>& csv, size_t row,
           size_t col) {
  return std::stod(csv.at(row).at(col));
}

const AuditCheck& audit(const SweepResult& r, const std::string& name) {
  for (const AuditCheck& a : r.audits)
    if (a.name == name) return a;
  throw std::runtime_error("no audit named " + name);
}

std::string decay_config(const std::string& kind, const std::string& model,
                         int n, double beta, int b_min, int b_max) {
  std::ostringstream s;
  s << "{\"experiment\": \"" << kind << "\", \"model\": " << model
    << ", \"n\": " << n << ", \"beta\": " << beta
    << ", \"geometry\": {\"a\": 2, \"c\": 2, \"b_min\": " << b_min
    << ", \"b_max\": " << b_max << "}, \"seed\": 3}";
  return s.str();
}

const char* kTfim = "{\"name\": \"tfim\", \"coupling\": 1.0, \"field\": 0.8}";
const char* kProduct = "{\"name\": \"tfim\", \"coupling\": 0.0, \"field\": 1.0}";

}  // namespace

TEST_CASE("configs parse with defaults and reject unknown fields") {
  const ExperimentConfig c = parse_config(decay_config(
      "bscmi_decay", kTfim, 6, 1.0, 1, 2));
  CHECK(c.kind == ExperimentKind::bscmi_decay);
  CHECK(c.model.name == "tfim");
  CHECK(c.model.params.at("coupling") == 1.0);
  CHECK(c.n == 6);
  CHECK(c.beta == 1.0);
  CHECK(c.geometry.a == 2);
  CHECK(c.geometry.b_max == 2);
  CHECK(c.geometry.a_buf == -1);
  CHECK(c.seed == 3);
  CHECK(c.threads == 1);
  CHECK(c.output.empty());

  CHECK_THROWS_AS(parse_config("{\"experiment\": \"bscmi_decay\""),
                  ArgumentError);
  CHECK_THROWS_AS(parse_config("{}"), ArgumentError);  // model and n required
  CHECK_THROWS_AS(
      parse_config(decay_config("no_such_experiment", kTfim, 6, 1.0, 1, 2)),
      ArgumentError);
  CHECK_THROWS_AS(
      parse_config(decay_config(
          "bscmi_decay", "{\"name\": \"no_such_model\"}", 6, 1.0, 1, 2)),
      ArgumentError);
  // misspelled model parameter
  CHECK_THROWS_AS(
      parse_config(decay_config(
          "bscmi_decay", "{\"name\": \"tfim\", \"coupling\": 1, \"zield\": 1}",
          6, 1.0, 1, 2)),
      ArgumentError);
  // unknown top-level key
  CHECK_THROWS_AS(
      parse_config("{\"experiment\": \"bscmi_decay\", \"model\": " +
                   std::string(kTfim) + ", \"n\": 6, \"bogus\": 1}"),
      ArgumentError);
  // threads is a command-line concern, not a config field
  CHECK_THROWS_AS(
      parse_config("{\"experiment\": \"bscmi_decay\", \"model\": " +
                   std::string(kTfim) + ", \"n\": 6, \"threads\": 4}"),
      ArgumentError);
}

TEST_CASE("parse diagnostics carry the offending field or position") {
  try {
    parse_config("{\"experiment\": ");
    FAIL("expected a parse error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("parse") != std::string::npos);
  }
  try {
    parse_config(decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2) + " trail");
    FAIL("expected a parse error");
  } catch (const ArgumentError&) {
  }
  try {
    parse_config("{\"experiment\": \"bscmi_decay\", \"model\": " +
                 std::string(kTfim) + ", \"n\": 6, \"bogus\": 1}");
    FAIL("expected a field error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("oversized chains and impossible geometry are refused at parse") {
  CHECK_THROWS_AS(parse_config(decay_config("bscmi_decay", kTfim, 13, 1.0, 1, 2)),
                  ResourceError);
  // 4^6 = 4096 is exactly the budget; 4^7 is over it
  const char* qudit =
      "{\"name\": \"random_ti\", \"model_seed\": 1, \"range\": 2, "
      "\"local_dim\": 4}";
  CHECK_NOTHROW(parse_config(decay_config("bscmi_decay", qudit, 6, 1.0, 1, 2)));
  CHECK_THROWS_AS(parse_config(decay_config("bscmi_decay", qudit, 7, 1.0, 1, 2)),
                  ResourceError);
  // window wider than the chain
  CHECK_THROWS_AS(parse_config(decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 3)),
                  ArgumentError);
  CHECK_THROWS_AS(parse_config(decay_config("bscmi_decay", kTfim, 6, 1.0, 2, 1)),
                  ArgumentError);
  // pinned buffers must tile the chain for every swept b
  CHECK_NOTHROW(parse_config(
      "{\"experiment\": \"bscmi_decay\", \"model\": " + std::string(kTfim) +
      ", \"n\": 6, \"geometry\": {\"a\": 2, \"c\": 2, \"b_min\": 1, "
      "\"b_max\": 1, \"a_buf\": 1, \"c_buf\": 0}}"));
  CHECK_THROWS_AS(
      parse_config(
          "{\"experiment\": \"bscmi_decay\", \"model\": " + std::string(kTfim) +
          ", \"n\": 6, \"geometry\": {\"a\": 2, \"c\": 2, \"b_min\": 1, "
          "\"b_max\": 2, \"a_buf\": 1, \"c_buf\": 0}}"),
      ArgumentError);
  // report stems name files, not paths
  CHECK_THROWS_AS(
      parse_config("{\"experiment\": \"bscmi_decay\", \"model\": " +
                   std::string(kTfim) + ", \"n\": 6, \"output\": \"a/b\"}"),
      ArgumentError);
}

TEST_CASE("config hash is canonical over key order and sensitive to values") {
  const std::string a = decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2);
  const std::string b =
      "{\"seed\": 3, \"n\": 6, \"model\": " + std::string(kTfim) +
      ", \"geometry\": {\"b_max\": 2, \"b_min\": 1, \"c\": 2, \"a\": 2}, "
      "\"beta\": 1.0, \"experiment\": \"bscmi_decay\"}";
  const std::string c = decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) == config_hash(c));
  CHECK(config_hash(a) !=
        config_hash(decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 1)));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a).find_first_not_of("0123456789abcdef") ==
        std::string::npos);
}

TEST_CASE("bscmi decay rows equal the direct computation") {
  const ExperimentConfig c =
      parse_config(decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2));
  const SweepResult r = run_experiment(c);
  CHECK(r.experiment == "bscmi_decay");
  CHECK(r.hash == config_hash(decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2)));
  CHECK(r.version == std::string(kToolkitVersion));
  CHECK(r.columns ==
        std::vector<std::string>{"B_size", "cmi", "bs_cmi_os", "bs_cmi_ts",
                                 "bs_cmi_rev"});
  REQUIRE(r.rows.size() == 2);

  // same states, same partitions, called directly
  const GibbsInstance g = gibbs_state(tfim(1.0, 0.8), 6, 1.0);
  const ChainPartition p1 = ChainPartition::buffered(g.space, 1, 2, 1, 2, 0);
  const ChainPartition p2 = ChainPartition::tripartite(g.space, 2, 2, 2);
  CHECK(r.rows[0][0] == "1");
  CHECK(r.rows[0][1] == fmt17(cmi(g.state, p1).value));
  CHECK(r.rows[0][2] == fmt17(bs_cmi_os(g.state, p1).value));
  CHECK(r.rows[0][3] == fmt17(bs_cmi_ts(g.state, p1).value));
  CHECK(r.rows[0][4] == fmt17(bs_cmi_rev(g.state, p1).value));
  CHECK(r.rows[1][0] == "2");
  CHECK(r.rows[1][2] == fmt17(bs_cmi_os(g.state, p2).value));

  // decay visible already on two points
  CHECK(num(parse_csv(render_csv(r)), 1, 2) > num(parse_csv(render_csv(r)), 2, 2));
  CHECK(audit(r, "bs_cmi_nonnegative").pass);
  CHECK(audit(r, "values_finite").pass);
  CHECK(r.all_audits_pass());
  REQUIRE(r.fits.size() == 4);
  for (const auto& [name, fit] : r.fits) {
    CHECK(fit.points_used == 2);
    CHECK(fit.slope < 0.0);
  }

  // reruns are byte-identical
  const SweepResult again = run_experiment(c);
  CHECK(render_csv(r) == render_csv(again));
}

TEST_CASE("purity decay on a product model sits at ratio one") {
  const SweepResult r = run_experiment(
      parse_config(decay_config("purity_decay", kProduct, 6, 1.0, 1, 2)));
  CHECK(r.columns ==
        std::vector<std::string>{"B_size", "purity_ratio", "ratio_gap",
                                 "renyi2_cmi"});
  const auto csv = parse_csv(render_csv(r));
  REQUIRE(csv.size() == 3);
  for (size_t i = 1; i < csv.size(); ++i) {
    CHECK(std::abs(num(csv, i, 1) - 1.0) <= 1e-10);
    CHECK(std::abs(num(csv, i, 2)) <= 1e-10);
  }
  CHECK(audit(r, "ratio_finite_positive").pass);
  CHECK(r.all_audits_pass());
}

TEST_CASE("factorization decay vanishes on products and shrinks on tfim") {
  const SweepResult p = run_experiment(
      parse_config(decay_config("factorization_decay", kProduct, 6, 1.0, 1, 2)));
  CHECK(p.columns[0] == "B_size");
  CHECK(p.columns[1] == "factorization_norm");
  const auto pc = parse_csv(render_csv(p));
  for (size_t i = 1; i < pc.size(); ++i) CHECK(num(pc, i, 1) <= 1e-10);

  const SweepResult t = run_experiment(
      parse_config(decay_config("factorization_decay", kTfim, 6, 1.0, 1, 2)));
  const auto tc = parse_csv(render_csv(t));
  CHECK(num(tc, 1, 1) > num(tc, 2, 1));
  CHECK(audit(t, "norm_nonnegative").pass);
  const std::string summary = render_summary(t);
  CHECK(summary.find("factorization_decay") != std::string::npos);
  CHECK(summary.find("log_concave") != std::string::npos);
  CHECK(summary.find(t.hash) != std::string::npos);
  CHECK(summary.find(kToolkitVersion) != std::string::npos);
}

TEST_CASE("dpi audit sweeps report zero sandwich violations") {
  const std::string text =
      "{\"experiment\": \"dpi_audit\", \"model\": " + std::string(kTfim) +
      ", \"n\": 4, \"instances\": 40, \"channels\": 10, \"dims\": [2, 3], "
      "\"seed\": 11}";
  const SweepResult r = run_experiment(parse_config(text));
  CHECK(r.columns ==
        std::vector<std::string>{"index", "kind", "dim", "gap", "lower_bound",
                                 "upper_bound_1", "upper_bound_2",
                                 "violation"});
  REQUIRE(r.rows.size() == 50);
  int ce = 0, ch = 0;
  for (const auto& row : r.rows) {
    if (row[1] == "ce") ++ce;
    if (row[1] == "channel") ++ch;
    CHECK(row[7] == "0");
  }
  CHECK(ce == 40);
  CHECK(ch == 10);
  CHECK(audit(r, "sandwich_violations").pass);
  CHECK(audit(r, "sandwich_violations").worst == 0.0);
  CHECK(audit(r, "gaps_finite").pass);

  const SweepResult again = run_experiment(parse_config(text));
  CHECK(render_csv(r) == render_csv(again));
}

TEST_CASE("reconstruct sweep rebuilds classical chains and audits bounds") {
  const std::string text =
      "{\"experiment\": \"reconstruct_sweep\", \"model\": {\"name\": "
      "\"classical_ising\", \"coupling\": 0.9, \"field\": 0.3}, \"n\": 6, "
      "\"beta\": 0.8, \"block_sizes\": [1, 2, 3], \"seed\": 0}";
  const SweepResult r = run_experiment(parse_config(text));
  CHECK(r.columns ==
        std::vector<std::string>{"block_size", "trace_distance", "error_bound",
                                 "max_bond_dim", "mpo_path_gap", "trace_gap"});
  const auto csv = parse_csv(render_csv(r));
  REQUIRE(csv.size() == 4);
  for (size_t i = 1; i < csv.size(); ++i) {
    CHECK(num(csv, i, 1) <= 1e-8);   // block-level Markov
    CHECK(num(csv, i, 4) <= 1e-9);   // tensor path equals the dense path
    CHECK(num(csv, i, 5) <= 1e-8);   // reconstruction trace
  }
  CHECK(audit(r, "kernel_exactness").pass);
  CHECK(audit(r, "reconstruction_trace_one").pass);
  CHECK(audit(r, "error_within_bound").pass);
  CHECK(audit(r, "mpo_two_path").pass);
  CHECK(audit(r, "bond_dims_capped").pass);
  CHECK(r.all_audits_pass());

  // quantum chain: error shrinks with coarser blocks and stays under the bound
  const std::string qt =
      "{\"experiment\": \"reconstruct_sweep\", \"model\": " +
      std::string(kTfim) +
      ", \"n\": 6, \"beta\": 1.0, \"block_sizes\": [1, 2], \"seed\": 0}";
  const SweepResult q = run_experiment(parse_config(qt));
  const auto qc = parse_csv(render_csv(q));
  CHECK(num(qc, 2, 1) <= num(qc, 1, 1));
  CHECK(audit(q, "error_within_bound").pass);

  // empty sweep: header only
  const std::string empty =
      "{\"experiment\": \"reconstruct_sweep\", \"model\": " +
      std::string(kTfim) + ", \"n\": 6, \"block_sizes\": [], \"seed\": 0}";
  const SweepResult e = run_experiment(parse_config(empty));
  CHECK(e.rows.empty());
  CHECK(render_csv(e) ==
        "block_size,trace_distance,error_bound,max_bond_dim,mpo_path_gap,"
        "trace_gap\n");
}

TEST_CASE("learn sweep pins the exact row and orders the noisy ones") {
  const std::string text =
      "{\"experiment\": \"learn_sweep\", \"model\": {\"name\": "
      "\"classical_ising\", \"coupling\": 1.0, \"field\": 0.4}, \"n\": 6, "
      "\"beta\": 0.9, \"block_size\": 2, \"sweep_deltas\": [0.0, 0.001], "
      "\"tomography\": {\"scheme\": \"delta_ball\"}, \"seed\": 5}";
  const SweepResult r = run_experiment(parse_config(text));
  CHECK(r.columns ==
        std::vector<std::string>{"delta", "trace_distance", "samples_used",
                                 "max_base_mismatch", "max_bond_dim"});
  const auto csv = parse_csv(render_csv(r));
  REQUIRE(csv.size() == 3);
  CHECK(num(csv, 1, 1) <= 1e-8);
  CHECK(num(csv, 2, 1) > num(csv, 1, 1));
  CHECK(audit(r, "zero_noise_exact").pass);
  REQUIRE(r.fits.size() == 1);
  CHECK(r.fits[0].first == "log_log_error");

  // the swept axis must match the scheme, and only one axis may be given
  CHECK_THROWS_AS(
      run_experiment(parse_config(
          "{\"experiment\": \"learn_sweep\", \"model\": " + std::string(kTfim) +
          ", \"n\": 6, \"block_size\": 2, \"sweep_samples\": [1000], "
          "\"tomography\": {\"scheme\": \"delta_ball\"}}")),
      ArgumentError);
  CHECK_THROWS_AS(
      run_experiment(parse_config(
          "{\"experiment\": \"learn_sweep\", \"model\": " + std::string(kTfim) +
          ", \"n\": 6, \"block_size\": 2, \"sweep_deltas\": [0.001], "
          "\"sweep_samples\": [1000], "
          "\"tomography\": {\"scheme\": \"delta_ball\"}}")),
      ArgumentError);
}

TEST_CASE("learn sweep over sample budgets runs the sampling scheme") {
  const std::string text =
      "{\"experiment\": \"learn_sweep\", \"model\": " + std::string(kTfim) +
      ", \"n\": 4, \"beta\": 1.0, \"block_size\": 1, "
      "\"sweep_samples\": [2000, 20000], "
      "\"tomography\": {\"scheme\": \"pauli_sampling\"}, \"seed\": 9}";
  const SweepResult r = run_experiment(parse_config(text));
  CHECK(r.columns[0] == "samples");
  REQUIRE(r.rows.size() == 2);
  CHECK(num(parse_csv(render_csv(r)), 1, 2) > 0);  // samples_used recorded
  const SweepResult again = run_experiment(parse_config(text));
  CHECK(render_csv(r) == render_csv(again));
}

TEST_CASE("purity estimate hits an easy target on every repeat") {
  const std::string text =
      "{\"experiment\": \"purity_estimate\", \"model\": " + std::string(kTfim) +
      ", \"n\": 6, \"beta\": 1.0, \"epsilon\": 0.5, \"repeats\": 3, "
      "\"tomography\": {\"scheme\": \"delta_ball\", \"delta\": 0.001}, "
      "\"seed\": 13}";
  const SweepResult r = run_experiment(parse_config(text));
  CHECK(r.columns ==
        std::vector<std::string>{"repeat", "p2_estimate", "true_purity",
                                 "multiplicative_error", "samples_used",
                                 "hit"});
  const auto csv = parse_csv(render_csv(r));
  REQUIRE(csv.size() == 4);
  const GibbsInstance g = gibbs_state(tfim(1.0, 0.8), 6, 1.0);
  for (size_t i = 1; i < csv.size(); ++i) {
    CHECK(csv[i][2] == fmt17(exact_purity(g)));
    CHECK(num(csv, i, 3) <= 0.5);
    CHECK(csv[i][5] == "1");
  }
  CHECK(audit(r, "target_hit_fraction").pass);
  CHECK(audit(r, "target_hit_fraction").worst == 1.0);
  // the auto-selected block size follows the published rule
  const std::string summary = render_summary(r);
  CHECK(summary.find("block_size: " +
                     std::to_string(purity_block_size(6, 0.5))) !=
        std::string::npos);
}

TEST_CASE("reports land on disk and surface path errors") {
  const ExperimentConfig c =
      parse_config(decay_config("purity_decay", kProduct, 6, 1.0, 1, 1));
  const SweepResult r = run_experiment(c);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chainfactor_report_test";
  fs::remove_all(dir);
  const std::string csv_path =
      emit_report(r, ReportFormat::csv, dir.string(), "demo");
  const std::string sum_path =
      emit_report(r, ReportFormat::summary_text, dir.string(), "demo");
  CHECK(csv_path == (dir / "demo.csv").string());
  CHECK(sum_path == (dir / "demo.summary.txt").string());
  std::ifstream csv_in(csv_path);
  std::stringstream csv_got;
  csv_got << csv_in.rdbuf();
  CHECK(csv_got.str() == render_csv(r));
  std::ifstream sum_in(sum_path);
  std::stringstream sum_got;
  sum_got << sum_in.rdbuf();
  CHECK(sum_got.str() == render_summary(r));

  // a file where a directory is needed cannot be created
  const fs::path blocker = dir / "demo.csv";
  try {
    emit_report(r, ReportFormat::csv, (blocker / "sub").string(), "x");
    FAIL("expected a path error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("demo.csv") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("load_config reads files and prefixes diagnostics with the path") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chainfactor_config_test";
  fs::create_directories(dir);
  const fs::path good = dir / "good.json";
  std::ofstream(good) << decay_config("bscmi_decay", kTfim, 6, 1.0, 1, 2);
  CHECK(load_config(good.string()).n == 6);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"experiment\": ";
  try {
    load_config(bad.string());
    FAIL("expected a parse error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
  try {
    load_config((dir / "missing.json").string());
    FAIL("expected a missing-file error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  fs::remove_all(dir);
}
