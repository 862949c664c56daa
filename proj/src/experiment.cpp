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

#include "chainfactor/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chainfactor/conditional_expectation.hpp"
#include "chainfactor/divergences.hpp"
#include "chainfactor/errors.hpp"
#include "chainfactor/factorization.hpp"
#include "chainfactor/recovery.hpp"
#include "chainfactor/rng.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

using nlohmann::json;

constexpr double kSandwichSlack = 1e-8;
constexpr std::uint64_t kCeLabel = 0x6365ULL;
constexpr std::uint64_t kChannelLabel = 0x6368616eULL;
constexpr std::uint64_t kLearnLabel = 0x6c65726eULL;
constexpr std::uint64_t kRepeatLabel = 0x72657065ULL;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// config schema
// ---------------------------------------------------------------------------

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names = {
      {"bscmi_decay", ExperimentKind::bscmi_decay},
      {"purity_decay", ExperimentKind::purity_decay},
      {"factorization_decay", ExperimentKind::factorization_decay},
      {"dpi_audit", ExperimentKind::dpi_audit},
      {"reconstruct_sweep", ExperimentKind::reconstruct_sweep},
      {"learn_sweep", ExperimentKind::learn_sweep},
      {"purity_estimate", ExperimentKind::purity_estimate},
  };
  return names;
}

void require_known_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ArgumentError("unknown config field \"" + item.key() + "\" in " +
                          where);
}

double get_number(const json& j, const std::string& field) {
  if (!j.at(field).is_number())
    throw ArgumentError("config field \"" + field + "\" must be a number");
  return j.at(field).get<double>();
}

long get_integer(const json& j, const std::string& field) {
  if (!j.at(field).is_number_integer())
    throw ArgumentError("config field \"" + field + "\" must be an integer");
  return j.at(field).get<long>();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Sorted keys and one spelling per numeric value, so 1 and 1.0 coincide.
// Integers outside double range keep their exact text.
void canonical_dump(const json& j, std::string& out) {
  if (j.is_object()) {
    out += '{';
    bool first = true;
    for (const auto& item : j.items()) {
      if (!first) out += ',';
      first = false;
      out += json(item.key()).dump();
      out += ':';
      canonical_dump(item.value(), out);
    }
    out += '}';
  } else if (j.is_array()) {
    out += '[';
    for (size_t i = 0; i < j.size(); ++i) {
      if (i) out += ',';
      canonical_dump(j.at(i), out);
    }
    out += ']';
  } else if (j.is_number() &&
             std::abs(j.get<double>()) <= 9007199254740992.0) {
    out += fmt17(j.get<double>());
  } else {
    out += j.dump();
  }
}

std::string hash_of(const json& j) {
  std::string text;
  canonical_dump(j, text);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config parse error: ") + e.what());
  }
}

int model_local_dim(const ModelSpec& model) {
  if (model.name == "random_ti" && model.params.count("local_dim"))
    return static_cast<int>(model.params.at("local_dim"));
  return 2;
}

void check_param_names(const ModelSpec& m, const std::set<std::string>& names) {
  for (const auto& [key, value] : m.params)
    if (!names.count(key))
      throw ArgumentError("model \"" + m.name +
                          "\" does not take a parameter \"" + key + "\"");
  for (const std::string& name : names)
    if (name != "truncation" && !m.params.count(name))
      throw ArgumentError("model \"" + m.name + "\" needs parameter \"" +
                          name + "\"");
}

void validate(const ExperimentConfig& c) {
  if (c.n < 2) throw ArgumentError("config field \"n\" must be at least 2");
  if (!(c.beta > 0.0))
    throw ArgumentError("config field \"beta\" must be positive");
  long dim = 1;
  const int local = model_local_dim(c.model);
  for (int i = 0; i < c.n; ++i) {
    dim *= local;
    if (dim > tol::max_total_dim)
      throw ResourceError("chain of " + std::to_string(c.n) +
                          " sites at local dimension " +
                          std::to_string(local) + " exceeds the dimension budget " +
                          std::to_string(tol::max_total_dim));
  }
  c.model.build();  // surfaces bad model names and parameters at parse time

  if (c.output.find('/') != std::string::npos ||
      c.output.find('\\') != std::string::npos)
    throw ArgumentError("config field \"output\" is a file stem, not a path");

  const bool decay = c.kind == ExperimentKind::bscmi_decay ||
                     c.kind == ExperimentKind::purity_decay ||
                     c.kind == ExperimentKind::factorization_decay;
  if (decay) {
    const GeometrySpec& g = c.geometry;
    if (g.a < 1 || g.c < 1)
      throw ArgumentError("geometry blocks a and c must be nonempty");
    if (g.b_min < 1 || g.b_max < g.b_min)
      throw ArgumentError("geometry needs 1 <= b_min <= b_max");
    if (g.a + g.b_max + g.c > c.n)
      throw ArgumentError("geometry window a + b_max + c exceeds the chain");
    if ((g.a_buf < 0) != (g.c_buf < 0))
      throw ArgumentError("pin both buffers or neither");
    if (g.a_buf >= 0)
      for (int b = g.b_min; b <= g.b_max; ++b)
        if (g.a_buf + g.a + b + g.c + g.c_buf != c.n)
          throw ArgumentError(
              "pinned buffers must tile the chain for every swept b");
  }

  if (c.kind == ExperimentKind::reconstruct_sweep)
    for (int l : c.block_sizes)
      if (l < 1 || 2 * l > c.n)
        throw ArgumentError("block sizes must give at least two blocks");
  if (c.kind == ExperimentKind::learn_sweep) {
    if (c.block_size < 1 || 2 * c.block_size > c.n)
      throw ArgumentError("learning needs a block size giving two blocks");
    if (!c.sweep_deltas.empty() && !c.sweep_samples.empty())
      throw ArgumentError("sweep one axis: deltas or sample budgets");
    const bool ball = c.tomography.scheme == TomographyScheme::delta_ball;
    if (ball && !c.sweep_samples.empty())
      throw ArgumentError("sample-budget sweeps need the sampling scheme");
    if (!ball && !c.sweep_deltas.empty())
      throw ArgumentError("delta sweeps need the delta-ball scheme");
    for (double d : c.sweep_deltas)
      if (d < 0.0) throw ArgumentError("swept deltas must be nonnegative");
    for (long s : c.sweep_samples)
      if (s < 1) throw ArgumentError("swept sample budgets must be positive");
  }
  if (c.kind == ExperimentKind::dpi_audit) {
    if (c.instances < 0 || c.channels < 0)
      throw ArgumentError("instance counts must be nonnegative");
    if (c.dims.empty()) throw ArgumentError("dpi audit needs local dimensions");
    for (int d : c.dims)
      if (d < 2 || d > 8)
        throw ArgumentError("dpi audit local dimensions must lie in 2..8");
  }
  if (c.kind == ExperimentKind::purity_estimate) {
    if (!(c.epsilon > 0.0))
      throw ArgumentError("config field \"epsilon\" must be positive");
    if (c.repeats < 1)
      throw ArgumentError("config field \"repeats\" must be positive");
    if (c.block_size < 0 || (c.block_size > 0 && 2 * c.block_size > c.n))
      throw ArgumentError("purity block size must be 0 (rule) or give blocks");
  }
  if (c.tomography.samples_per_marginal < 1)
    throw ArgumentError("tomography sample budget must be positive");
  if (c.tomography.delta < 0.0)
    throw ArgumentError("tomography delta must be nonnegative");
  if (!(c.tomography.confidence > 0.0) || !(c.tomography.confidence < 1.0))
    throw ArgumentError("tomography confidence must lie strictly in (0, 1)");
}

// ---------------------------------------------------------------------------
// sweep plumbing
// ---------------------------------------------------------------------------

// Evaluates fn(0..count-1) into caller-owned slots; with threads > 1 the
// points are claimed from a shared counter, so slots must be disjoint.
void run_grid(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ChainPartition decay_partition(const SiteSpace& space, const GeometrySpec& g,
                               int b) {
  if (g.a_buf >= 0)
    return ChainPartition::buffered(space, g.a_buf, g.a, b, g.c, g.c_buf);
  const int rest = space.sites() - g.a - b - g.c;
  if (rest == 0) return ChainPartition::tripartite(space, g.a, b, g.c);
  return ChainPartition::buffered(space, (rest + 1) / 2, g.a, b, g.c,
                                  rest / 2);
}

Matrix random_full_rank_state(std::uint64_t seed, long d) {
  Gaussian noise(seed);
  Matrix m(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) m(r, c) = Complex(noise(), noise());
  Matrix s = m * m.adjoint();
  s += (1e-3 * s.trace().real() / static_cast<double>(d)) *
       Matrix::Identity(d, d);
  s /= s.trace().real();
  return s;
}

int max_bond(const MpoState& mpo) {
  int out = 1;
  for (int b : mpo.bond_dims) out = std::max(out, b);
  return out;
}

void add_fit(SweepResult& out, const std::string& name,
             const std::vector<double>& x, const std::vector<double>& y) {
  out.fits.emplace_back(name, fit_exponential_decay(x, y));
}

// ---------------------------------------------------------------------------
// experiment bodies
// ---------------------------------------------------------------------------

void run_decay(const ExperimentConfig& c, SweepResult& out) {
  const GibbsInstance g = gibbs_state(c.model.build(), c.n, c.beta);
  const int count = c.geometry.b_max - c.geometry.b_min + 1;
  std::vector<std::vector<std::string>> rows(count);
  std::vector<std::array<double, 4>> values(count);
  std::vector<bool> finite(count, true);

  run_grid(count, c.threads, [&](int i) {
    const int b = c.geometry.b_min + i;
    const ChainPartition part = decay_partition(g.space, c.geometry, b);
    switch (c.kind) {
      case ExperimentKind::bscmi_decay: {
        const DivergenceValue v0 = cmi(g.state, part);
        const DivergenceValue v1 = bs_cmi_os(g.state, part);
        const DivergenceValue v2 = bs_cmi_ts(g.state, part);
        const DivergenceValue v3 = bs_cmi_rev(g.state, part);
        values[i] = {v0.value, v1.value, v2.value, v3.value};
        finite[i] = v0.finite && v1.finite && v2.finite && v3.finite;
        rows[i] = {std::to_string(b), fmt17(v0.value), fmt17(v1.value),
                   fmt17(v2.value), fmt17(v3.value)};
        break;
      }
      case ExperimentKind::purity_decay: {
        const double ratio = purity_ratio(g.state, part);
        const double gap = std::abs(ratio - 1.0);
        const double r2 = renyi2_cmi(g.state, part);
        values[i] = {ratio, gap, r2, 0.0};
        finite[i] = std::isfinite(ratio) && std::isfinite(r2);
        rows[i] = {std::to_string(b), fmt17(ratio), fmt17(gap), fmt17(r2)};
        break;
      }
      default: {  // factorization_decay
        const std::vector<std::string> window = {"A", "B", "C"};
        const DensityMatrix w = marginal(g.state, part, window);
        const ChainPartition pw = restrict_partition(part, window);
        const double norm = approx_factorization_norm(w, pw);
        const GibbsNormDiagnostics d = gibbs_norm_diagnostics(w, pw);
        values[i] = {norm, 0.0, 0.0, 0.0};
        finite[i] = std::isfinite(norm);
        rows[i] = {std::to_string(b),       fmt17(norm),
                   fmt17(d.a_b_over_ab),    fmt17(d.ab_over_a_b),
                   fmt17(d.abc_over_b),     fmt17(d.b_condition)};
        break;
      }
    }
  });

  out.rows = std::move(rows);
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i)
    xs[i] = static_cast<double>(c.geometry.b_min + i);
  auto column = [&](int k) {
    std::vector<double> ys(count);
    for (int i = 0; i < count; ++i) ys[i] = values[i][k];
    return ys;
  };
  bool all_finite = true;
  for (bool f : finite) all_finite = all_finite && f;

  if (c.kind == ExperimentKind::bscmi_decay) {
    out.columns = {"B_size", "cmi", "bs_cmi_os", "bs_cmi_ts", "bs_cmi_rev"};
    add_fit(out, "cmi", xs, column(0));
    add_fit(out, "bs_cmi_os", xs, column(1));
    add_fit(out, "bs_cmi_ts", xs, column(2));
    add_fit(out, "bs_cmi_rev", xs, column(3));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i)
      for (int k = 0; k < 4; ++k) worst = std::min(worst, values[i][k]);
    out.audits.push_back({"bs_cmi_nonnegative", worst >= -1e-9, worst});
    out.audits.push_back({"values_finite", all_finite,
                          all_finite ? 0.0 : 1.0});
  } else if (c.kind == ExperimentKind::purity_decay) {
    out.columns = {"B_size", "purity_ratio", "ratio_gap", "renyi2_cmi"};
    add_fit(out, "ratio_gap", xs, column(1));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) worst = std::min(worst, values[i][0]);
    out.audits.push_back(
        {"ratio_finite_positive", all_finite && worst > 0.0, worst});
  } else {
    out.columns = {"B_size", "factorization_norm", "a_b_over_ab",
                   "ab_over_a_b", "abc_over_b", "b_condition"};
    add_fit(out, "factorization_norm", xs, column(0));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) worst = std::min(worst, values[i][0]);
    out.audits.push_back({"norm_nonnegative", worst >= -1e-12, worst});
  }
}

void run_dpi(const ExperimentConfig& c, SweepResult& out) {
  const int count = c.instances + c.channels;
  std::vector<std::vector<std::string>> rows(count);
  std::vector<int> violations(count, 0);
  std::vector<bool> finite(count, true);

  run_grid(count, c.threads, [&](int i) {
    const int local = c.dims[i % c.dims.size()];
    const long d = static_cast<long>(local) * local;
    double gap = 0.0, lb = 0.0, ub1 = 0.0, ub2 = 0.0;
    const char* kind = "ce";
    if (i < c.instances) {
      const SiteSpace space({local, local});
      const auto e = ConditionalExpectation::trace_out_and_mix(space, {1});
      const Matrix x =
          random_full_rank_state(substream_seed(c.seed, kCeLabel, 2 * i), d);
      const Matrix y = random_full_rank_state(
          substream_seed(c.seed, kCeLabel, 2 * i + 1), d);
      const DpiAudit a = audit_dpi(x, y, e);
      gap = a.gap;
      lb = a.lower_bound;
      ub1 = a.upper_bound_1;
      ub2 = a.upper_bound_2;
      finite[i] = a.gap_finite;
    } else {
      kind = "channel";
      const int j = i - c.instances;
      const QuantumChannel t = QuantumChannel::random(
          static_cast<int>(d), 2 + (j % 2),
          substream_seed(c.seed, kChannelLabel, 3 * j));
      const Matrix x = random_full_rank_state(
          substream_seed(c.seed, kChannelLabel, 3 * j + 1), d);
      const Matrix y = random_full_rank_state(
          substream_seed(c.seed, kChannelLabel, 3 * j + 2), d);
      const DivergenceValue top = bs_entropy(x, y);
      const DivergenceValue bottom = bs_entropy(t.apply(x), t.apply(y));
      gap = top.value - bottom.value;
      ub1 = ub2 = dpi_upper_bound_channel(x, y, t);
      finite[i] = top.finite && bottom.finite;
    }
    const bool bad = lb > gap + kSandwichSlack ||
                     gap > ub1 + kSandwichSlack ||
                     gap > ub2 + kSandwichSlack || gap < -kSandwichSlack;
    violations[i] = bad ? 1 : 0;
    rows[i] = {std::to_string(i), kind,        std::to_string(d),
               fmt17(gap),        fmt17(lb),   fmt17(ub1),
               fmt17(ub2),        bad ? "1" : "0"};
  });

  out.columns = {"index", "kind",          "dim",           "gap",
                 "lower_bound", "upper_bound_1", "upper_bound_2", "violation"};
  out.rows = std::move(rows);
  int total = 0;
  for (int v : violations) total += v;
  bool all_finite = true;
  for (bool f : finite) all_finite = all_finite && f;
  out.audits.push_back(
      {"sandwich_violations", total == 0, static_cast<double>(total)});
  out.audits.push_back({"gaps_finite", all_finite, all_finite ? 0.0 : 1.0});
}

void run_reconstruct(const ExperimentConfig& c, SweepResult& out) {
  const GibbsInstance g = gibbs_state(c.model.build(), c.n, c.beta);
  const int count = static_cast<int>(c.block_sizes.size());
  std::vector<std::vector<std::string>> rows(count);
  std::vector<double> exactness(count, 0.0), trace_gaps(count, 0.0);
  std::vector<double> bound_excess(count, 0.0), two_path(count, 0.0);
  std::vector<bool> bonds_ok(count, true);

  run_grid(count, c.threads, [&](int i) {
    const int l = c.block_sizes[i];
    const ChainPartition blocks = ChainPartition::uniform_blocks(g.space, l);
    const std::vector<RecoveryKernel> kernels = kernel_chain(g.state, blocks);
    const DensityMatrix rho1 =
        marginal(g.state, blocks, {blocks.blocks().front().name});

    double worst_kernel = 0.0;
    for (const RecoveryKernel& k : kernels)
      worst_kernel =
          std::max(worst_kernel, max_abs(k.apply(k.base) - k.pair));
    exactness[i] = worst_kernel;

    const Matrix raw = sequential_apply(kernels, rho1.matrix());
    trace_gaps[i] = std::abs(raw.trace().real() - 1.0);
    const DensityMatrix rec = sequential_reconstruct(kernels, rho1);
    const double err = 0.5 * trace_norm(rec.matrix() - g.state.matrix());
    const ReconstructionBound bnd = reconstruction_error_bound(g.state, blocks);
    // a bound at float zero (exact products) says nothing; exactness itself
    // is then the check
    if (bnd.finite && bnd.bound > 1e-12)
      bound_excess[i] = err - bnd.bound;
    else
      bound_excess[i] = err - 1e-10;

    const MpoState mpo = mpo_export(kernels, rho1);
    two_path[i] = max_abs(mpo_contract(mpo).matrix() - rec.matrix());
    for (size_t cut = 0; cut < mpo.bond_dims.size(); ++cut) {
      const long cap = static_cast<long>(std::max(
          mpo.block_dims[cut], mpo.block_dims[cut + 1]));
      if (mpo.bond_dims[cut] > cap * cap * cap) bonds_ok[i] = false;
    }
    rows[i] = {std::to_string(l),          fmt17(err),
               fmt17(bnd.bound),           std::to_string(max_bond(mpo)),
               fmt17(two_path[i]),         fmt17(trace_gaps[i])};
  });

  out.columns = {"block_size", "trace_distance", "error_bound",
                 "max_bond_dim", "mpo_path_gap", "trace_gap"};
  out.rows = std::move(rows);
  auto worst_of = [](const std::vector<double>& v) {
    double w = 0.0;
    for (double x : v) w = std::max(w, x);
    return w;
  };
  out.audits.push_back({"kernel_exactness", worst_of(exactness) <= 1e-10,
                        worst_of(exactness)});
  out.audits.push_back({"reconstruction_trace_one",
                        worst_of(trace_gaps) <= 1e-8, worst_of(trace_gaps)});
  out.audits.push_back({"error_within_bound",
                        worst_of(bound_excess) <= 1e-9,
                        worst_of(bound_excess)});
  out.audits.push_back(
      {"mpo_two_path", worst_of(two_path) <= 1e-9, worst_of(two_path)});
  bool bonds = true;
  for (bool b : bonds_ok) bonds = bonds && b;
  out.audits.push_back({"bond_dims_capped", bonds, bonds ? 0.0 : 1.0});
}

void run_learn(const ExperimentConfig& c, SweepResult& out) {
  const GibbsInstance g = gibbs_state(c.model.build(), c.n, c.beta);
  const bool ball = c.tomography.scheme == TomographyScheme::delta_ball;
  const int count = static_cast<int>(ball ? c.sweep_deltas.size()
                                          : c.sweep_samples.size());
  std::vector<std::vector<std::string>> rows(count);
  std::vector<double> errors(count, 0.0);
  double zero_noise_gap = -1.0;

  run_grid(count, c.threads, [&](int i) {
    TomographyConfig t = c.tomography;
    t.seed = substream_seed(c.seed, kLearnLabel, i);
    std::string head;
    if (ball) {
      t.delta = c.sweep_deltas[i];
      head = fmt17(t.delta);
    } else {
      t.samples_per_marginal = c.sweep_samples[i];
      head = std::to_string(c.sweep_samples[i]);
    }
    const LearnedMpo learned = learn_mpo(g, c.block_size, t);
    errors[i] = learned.trace_distance_to_truth;
    rows[i] = {head, fmt17(learned.trace_distance_to_truth),
               std::to_string(learned.samples_used),
               fmt17(learned.max_base_mismatch),
               std::to_string(max_bond(learned.mpo))};
    if (ball && t.delta == 0.0) {
      const ChainPartition blocks =
          ChainPartition::uniform_blocks(g.space, c.block_size);
      const std::vector<RecoveryKernel> kernels =
          kernel_chain(g.state, blocks);
      const DensityMatrix exact = sequential_reconstruct(
          kernels,
          marginal(g.state, blocks, {blocks.blocks().front().name}));
      zero_noise_gap = 0.5 * trace_norm(learned.reconstructed.matrix() -
                                        exact.matrix());
    }
  });

  out.columns = {ball ? "delta" : "samples", "trace_distance", "samples_used",
                 "max_base_mismatch", "max_bond_dim"};
  out.rows = std::move(rows);
  std::vector<double> xs, ys;
  for (int i = 0; i < count; ++i) {
    const double v = ball ? c.sweep_deltas[i]
                          : static_cast<double>(c.sweep_samples[i]);
    if (v > 0.0) {
      xs.push_back(std::log(v));
      ys.push_back(errors[i]);
    }
  }
  add_fit(out, "log_log_error", xs, ys);
  if (zero_noise_gap >= 0.0)
    out.audits.push_back(
        {"zero_noise_exact", zero_noise_gap <= 1e-10, zero_noise_gap});
}

void run_purity(const ExperimentConfig& c, SweepResult& out) {
  const GibbsInstance g = gibbs_state(c.model.build(), c.n, c.beta);
  const int l = c.block_size > 0 ? c.block_size
                                 : purity_block_size(c.n, c.epsilon);
  out.metadata.emplace_back("block_size", std::to_string(l));
  std::vector<std::vector<std::string>> rows(c.repeats);
  std::vector<int> hits(c.repeats, 0);

  run_grid(c.repeats, c.threads, [&](int i) {
    TomographyConfig t = c.tomography;
    t.seed = substream_seed(c.seed, kRepeatLabel, i);
    const PurityReport rep = estimate_purity(g, l, t);
    hits[i] = rep.multiplicative_error <= c.epsilon ? 1 : 0;
    rows[i] = {std::to_string(i),
               fmt17(rep.p2_estimate),
               fmt17(rep.true_purity),
               fmt17(rep.multiplicative_error),
               std::to_string(rep.samples_used),
               hits[i] ? "1" : "0"};
  });

  out.columns = {"repeat", "p2_estimate", "true_purity",
                 "multiplicative_error", "samples_used", "hit"};
  out.rows = std::move(rows);
  int total = 0;
  for (int h : hits) total += h;
  const double fraction =
      static_cast<double>(total) / static_cast<double>(c.repeats);
  out.audits.push_back(
      {"target_hit_fraction", fraction >= 0.9 - 1e-12, fraction});
}

}  // namespace

// ---------------------------------------------------------------------------
// public surface
// ---------------------------------------------------------------------------

const char* experiment_kind_name(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name.c_str();
  throw ArgumentError("unknown experiment kind");
}

Interaction ModelSpec::build() const {
  auto p = [&](const std::string& key) { return params.at(key); };
  if (name == "tfim") {
    check_param_names(*this, {"coupling", "field"});
    return tfim(p("coupling"), p("field"));
  }
  if (name == "xxz") {
    check_param_names(*this, {"jxy", "jz", "field"});
    return xxz(p("jxy"), p("jz"), p("field"));
  }
  if (name == "classical_ising") {
    check_param_names(*this, {"coupling", "field"});
    return classical_ising(p("coupling"), p("field"));
  }
  if (name == "random_ti") {
    check_param_names(*this, {"model_seed", "range", "local_dim"});
    return random_ti(static_cast<std::uint64_t>(p("model_seed")),
                     static_cast<int>(p("range")),
                     static_cast<int>(p("local_dim")));
  }
  if (name == "exp_ising") {
    check_param_names(*this, {"lambda", "truncation"});
    if (params.count("truncation"))
      return exp_ising(p("lambda"), p("truncation"));
    return exp_ising(p("lambda"));
  }
  throw ArgumentError("unknown model name \"" + name + "\"");
}

std::string config_hash(const std::string& json_text) {
  return hash_of(parse_json(json_text));
}

ExperimentConfig parse_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  require_known_keys(
      j,
      {"experiment", "model", "n", "beta", "geometry", "tomography",
       "block_sizes", "block_size", "sweep_deltas", "sweep_samples",
       "instances", "channels", "dims", "epsilon", "repeats", "seed",
       "output"},
      "the top level");
  for (const char* field : {"experiment", "model", "n"})
    if (!j.contains(field))
      throw ArgumentError(std::string("config field \"") + field +
                          "\" is required");

  ExperimentConfig c;
  const std::string kind = j.at("experiment").get<std::string>();
  const auto it = kind_names().find(kind);
  if (it == kind_names().end())
    throw ArgumentError("unknown experiment \"" + kind + "\"");
  c.kind = it->second;

  const json& model = j.at("model");
  if (!model.is_object() || !model.contains("name"))
    throw ArgumentError("config field \"model\" needs a \"name\"");
  c.model.name = model.at("name").get<std::string>();
  for (const auto& item : model.items()) {
    if (item.key() == "name") continue;
    if (!item.value().is_number())
      throw ArgumentError("model parameter \"" + item.key() +
                          "\" must be a number");
    c.model.params[item.key()] = item.value().get<double>();
  }

  c.n = static_cast<int>(get_integer(j, "n"));
  if (j.contains("beta")) c.beta = get_number(j, "beta");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || get_integer(j, "seed") < 0)
      throw ArgumentError("config field \"seed\" must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output")) c.output = j.at("output").get<std::string>();

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    require_known_keys(g, {"a", "c", "b_min", "b_max", "a_buf", "c_buf"},
                       "geometry");
    if (g.contains("a")) c.geometry.a = static_cast<int>(get_integer(g, "a"));
    if (g.contains("c")) c.geometry.c = static_cast<int>(get_integer(g, "c"));
    if (g.contains("b_min"))
      c.geometry.b_min = static_cast<int>(get_integer(g, "b_min"));
    if (g.contains("b_max"))
      c.geometry.b_max = static_cast<int>(get_integer(g, "b_max"));
    if (g.contains("a_buf"))
      c.geometry.a_buf = static_cast<int>(get_integer(g, "a_buf"));
    if (g.contains("c_buf"))
      c.geometry.c_buf = static_cast<int>(get_integer(g, "c_buf"));
  }

  if (j.contains("tomography")) {
    const json& t = j.at("tomography");
    require_known_keys(
        t, {"scheme", "samples", "delta", "confidence", "share_marginals"},
        "tomography");
    if (t.contains("scheme")) {
      const std::string scheme = t.at("scheme").get<std::string>();
      if (scheme == "delta_ball")
        c.tomography.scheme = TomographyScheme::delta_ball;
      else if (scheme == "pauli_sampling")
        c.tomography.scheme = TomographyScheme::pauli_sampling;
      else
        throw ArgumentError("unknown tomography scheme \"" + scheme + "\"");
    }
    if (t.contains("samples"))
      c.tomography.samples_per_marginal = get_integer(t, "samples");
    if (t.contains("delta")) c.tomography.delta = get_number(t, "delta");
    if (t.contains("confidence"))
      c.tomography.confidence = get_number(t, "confidence");
    if (t.contains("share_marginals"))
      c.tomography.share_marginals = t.at("share_marginals").get<bool>();
  }

  auto int_list = [&](const char* field, std::vector<int>& into) {
    if (!j.contains(field)) return;
    into.clear();
    for (const json& v : j.at(field)) {
      if (!v.is_number_integer())
        throw ArgumentError(std::string("config field \"") + field +
                            "\" must hold integers");
      into.push_back(v.get<int>());
    }
  };
  int_list("block_sizes", c.block_sizes);
  int_list("dims", c.dims);
  if (j.contains("block_size"))
    c.block_size = static_cast<int>(get_integer(j, "block_size"));
  if (j.contains("sweep_deltas"))
    for (const json& v : j.at("sweep_deltas"))
      c.sweep_deltas.push_back(v.get<double>());
  if (j.contains("sweep_samples"))
    for (const json& v : j.at("sweep_samples")) {
      if (!v.is_number_integer())
        throw ArgumentError("config field \"sweep_samples\" must hold integers");
      c.sweep_samples.push_back(v.get<long>());
    }
  if (j.contains("instances"))
    c.instances = static_cast<int>(get_integer(j, "instances"));
  if (j.contains("channels"))
    c.channels = static_cast<int>(get_integer(j, "channels"));
  if (j.contains("epsilon")) c.epsilon = get_number(j, "epsilon");
  if (j.contains("repeats"))
    c.repeats = static_cast<int>(get_integer(j, "repeats"));

  c.hash = hash_of(j);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ArgumentError& e) {
    throw ArgumentError(path + ": " + e.what());
  } catch (const ResourceError& e) {
    throw ResourceError(path + ": " + e.what());
  }
}

bool SweepResult::all_audits_pass() const {
  for (const AuditCheck& a : audits)
    if (!a.pass) return false;
  return true;
}

SweepResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  SweepResult out;
  out.experiment = experiment_kind_name(config.kind);
  out.hash = config.hash;
  out.metadata.emplace_back("model", config.model.name);
  out.metadata.emplace_back("n", std::to_string(config.n));
  out.metadata.emplace_back("beta", fmt17(config.beta));
  out.metadata.emplace_back("seed", std::to_string(config.seed));

  switch (config.kind) {
    case ExperimentKind::bscmi_decay:
    case ExperimentKind::purity_decay:
    case ExperimentKind::factorization_decay:
      run_decay(config, out);
      break;
    case ExperimentKind::dpi_audit:
      run_dpi(config, out);
      break;
    case ExperimentKind::reconstruct_sweep:
      run_reconstruct(config, out);
      break;
    case ExperimentKind::learn_sweep:
      run_learn(config, out);
      break;
    case ExperimentKind::purity_estimate:
      run_purity(config, out);
      break;
  }

  for (const auto& row : out.rows)
    if (row.size() != out.columns.size())
      throw ContractViolation("sweep row width does not match the header");
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

std::string render_csv(const SweepResult& result) {
  std::ostringstream out;
  for (size_t i = 0; i < result.columns.size(); ++i) {
    if (i) out << ',';
    out << result.columns[i];
  }
  out << '\n';
  for (const auto& row : result.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

std::string render_summary(const SweepResult& result) {
  std::ostringstream out;
  out << "experiment: " << result.experiment << '\n';
  out << "version: " << result.version << '\n';
  out << "config_hash: " << (result.hash.empty() ? "-" : result.hash) << '\n';
  out << "rows: " << result.rows.size() << '\n';
  for (const auto& [key, value] : result.metadata)
    out << key << ": " << value << '\n';
  for (const auto& [name, fit] : result.fits) {
    out << "fit " << name << ": slope=" << fmt17(fit.slope)
        << " intercept=" << fmt17(fit.intercept)
        << " r_squared=" << fmt17(fit.r_squared)
        << " points=" << fit.points_used
        << " log_concave=" << (fit.log_concave ? "yes" : "no")
        << " strictly_decreasing=" << (fit.strictly_decreasing ? "yes" : "no")
        << '\n';
  }
  for (const AuditCheck& a : result.audits)
    out << "audit " << a.name << ": " << (a.pass ? "pass" : "FAIL")
        << " worst=" << fmt17(a.worst) << '\n';
  out << "audits: "
      << (result.all_audits_pass() ? "all passed" : "FAILURES PRESENT")
      << '\n';
  out << "runtime_seconds: " << fmt17(result.runtime_seconds) << '\n';
  return out.str();
}

std::string emit_report(const SweepResult& result, ReportFormat format,
                        const std::string& directory,
                        const std::string& stem) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec)
    throw ResourceError("cannot create report directory " + directory + ": " +
                        ec.message());
  const fs::path path =
      fs::path(directory) /
      (stem + (format == ReportFormat::csv ? ".csv" : ".summary.txt"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write report file " + path.string());
  out << (format == ReportFormat::csv ? render_csv(result)
                                      : render_summary(result));
  out.close();
  if (out.fail())
    throw ResourceError("cannot write report file " + path.string());
  return path.string();
}

}  // namespace chainfactor
