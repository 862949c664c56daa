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

#ifndef CHAINFACTOR_EXPERIMENT_HPP
#define CHAINFACTOR_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chainfactor/decay_fit.hpp"
#include "chainfactor/tomography.hpp"

namespace chainfactor {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ExperimentKind {
  bscmi_decay,
  purity_decay,
  factorization_decay,
  dpi_audit,
  reconstruct_sweep,
  learn_sweep,
  purity_estimate,
};

const char* experiment_kind_name(ExperimentKind kind);

// Builtin interaction by name plus its named parameters; build() maps onto
// the interaction factories and rejects unknown names or parameters.
struct ModelSpec {
  std::string name = "tfim";
  std::map<std::string, double> params;

  Interaction build() const;
};

// Tripartite window geometry for the decay sweeps. Buffers -1 means the
// leftover n - a - b - c is split as ceil/floor between the two ends;
// pinned values must tile the chain exactly for every swept b.
struct GeometrySpec {
  int a = 2;
  int c = 2;
  int b_min = 1;
  int b_max = 5;
  int a_buf = -1;
  int c_buf = -1;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bscmi_decay;
  ModelSpec model;
  int n = 8;
  double beta = 1.0;
  GeometrySpec geometry;
  TomographyConfig tomography;

  std::vector<int> block_sizes = {1, 2};  // reconstruct_sweep
  int block_size = 0;                     // learn_sweep / purity_estimate; 0 = rule
  std::vector<double> sweep_deltas;       // learn_sweep, delta_ball scheme
  std::vector<long> sweep_samples;        // learn_sweep, pauli scheme
  int instances = 500;                    // dpi_audit conditional expectations
  int channels = 200;                     // dpi_audit channels
  std::vector<int> dims = {2, 3};         // dpi_audit local dimensions
  double epsilon = 0.2;                   // purity_estimate target
  int repeats = 10;                       // purity_estimate seeds

  std::uint64_t seed = 0;
  std::string output;  // report file stem; empty = experiment kind name
  int threads = 1;     // not part of the config file or its hash
  std::string hash;    // filled by parse_config from the canonical text
};

// Parse and validate a JSON config. Both throw ArgumentError carrying the
// offending field (or the parser's position for malformed JSON) and
// ResourceError when the requested chain exceeds the dimension budget;
// load_config prefixes diagnostics with the path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// 16 hex digits over the canonicalized (sorted-key) config text; threads and
// anything else not in the file do not contribute.
std::string config_hash(const std::string& json_text);

// One embedded invariant check; `worst` is the extremal value the check
// observed (its meaning is per-check and echoed in the summary).
struct AuditCheck {
  std::string name;
  bool pass = true;
  double worst = 0.0;
};

struct SweepResult {
  std::string experiment;
  std::string hash;
  std::string version = kToolkitVersion;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // cells preformatted, rectangular
  std::vector<std::pair<std::string, std::string>> metadata;  // summary lines
  std::vector<std::pair<std::string, DecayFitReport>> fits;
  std::vector<AuditCheck> audits;
  double runtime_seconds = 0.0;  // excluded from every deterministic artifact

  bool all_audits_pass() const;
};

SweepResult run_experiment(const ExperimentConfig& config);

enum class ReportFormat { csv, summary_text };

// Deterministic renderings: the CSV is byte-identical across reruns of the
// same (config, seed); the summary repeats the audits, fits, and metadata
// and ends with the (run-dependent) wall time.
std::string render_csv(const SweepResult& result);
std::string render_summary(const SweepResult& result);

// Writes <directory>/<stem>.csv or <stem>.summary.txt, creating the
// directory if needed; failures raise ResourceError naming the path.
// Returns the written path.
std::string emit_report(const SweepResult& result, ReportFormat format,
                        const std::string& directory, const std::string& stem);

}  // namespace chainfactor

#endif  // CHAINFACTOR_EXPERIMENT_HPP
