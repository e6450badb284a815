#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsn/core.hpp"
#include "gsn/greedy.hpp"
#include "gsn/io.hpp"
#include "gsn/metrics.hpp"
#include "gsn/ridgelet.hpp"
#include "gsn/rng.hpp"
#include "gsn/sampling.hpp"
#include "gsn/solve.hpp"
#include "gsn/targets.hpp"
#include "gsn/train.hpp"

namespace gsn {

using json = nlohmann::json;

/// Everything that determines an experiment's numbers. Thread count is not
/// part of it: results do not depend on it.
struct ExperimentConfig {
  std::string target = "ex1";
  std::size_t n_train = 50;
  std::size_t n_val = 15;
  std::size_t n_test = 1000;
  Layout train_layout = Layout::random_uniform;
  Layout val_layout = Layout::random_uniform;
  Layout test_layout = Layout::grid;

  std::size_t dict_size = 10000;
  SphereScheme scheme = SphereScheme::circle_uniform;
  double drop_tol = kDefaultDropTol;

  bool prune = true;
  double prune_threshold = kDefaultPruneThreshold;
  RadialQuadrature quadrature{};

  std::size_t max_iter = 40;
  /// Use this many nodes instead of validation-based selection.
  std::optional<std::size_t> fixed_nodes;
  /// Node counts for a sweep; empty means a single pipeline run.
  std::vector<std::size_t> sweep_nodes;

  std::size_t gsn_epochs = 10000;
  std::size_t gsn_batch = 50;
  std::size_t random_epochs = 10000;
  std::size_t random_batch = 1;
  double initial_lr = 1e-3;
  double decay_rate = 4.6e-4;
  std::size_t n_restarts = 10;
  double init_stddev = 0.05;
  bool init_zero_bias = true;
  bool baseline = true;

  std::uint64_t seed = 0;
  std::vector<std::string> notes;

  /// Per-example defaults.
  static ExperimentConfig for_example(const std::string& id) {
    const TargetFunction t = find_target(id);
    ExperimentConfig c;
    c.target = id;
    c.dict_size = static_cast<std::size_t>(10000 * t.dim);
    c.scheme = default_scheme(t.dim);
    c.prune = t.dim <= 2;
    if (id == "ex1") {
      c.n_train = 50, c.n_val = 15, c.n_test = 1000, c.gsn_batch = 50, c.random_batch = 1, c.max_iter = 40;
    } else if (id == "ex2") {
      c.n_train = 100, c.n_val = 20, c.n_test = 1000, c.gsn_batch = 100, c.random_batch = 1, c.max_iter = 60;
    } else if (id == "ex3") {
      c.n_train = 256, c.n_val = 50, c.n_test = 10000, c.gsn_batch = 256, c.random_batch = 3, c.max_iter = 100;
    } else if (id == "ex4") {
      c.n_train = 1024, c.n_val = 200, c.n_test = 10000, c.gsn_batch = 1024, c.random_batch = 11, c.max_iter = 150;
    } else if (id == "ex5") {
      c.n_train = 4000, c.n_val = 400, c.n_test = 10000, c.gsn_batch = 4000, c.random_batch = 11, c.max_iter = 200;
      c.notes.push_back("batch sizes for ex5 are not given by the source experiments; full batch (GSN) and 11 (random) are guesses");
    } else if (id == "ex6") {
      c.n_train = 10000, c.n_val = 1000, c.n_test = 10000, c.gsn_batch = 100, c.random_batch = 100;
      c.n_restarts = 5;
      c.sweep_nodes = {10, 25, 50, 100, 200};
      c.max_iter = 200;
    }
    c.test_layout = t.dim <= 2 ? Layout::grid : Layout::random_uniform;
    return c;
  }

  void validate() const {
    const TargetFunction t = find_target(target);
    if (n_train < 1 || n_val < 1 || n_test < 1) throw InvalidArgument("config: dataset sizes must be positive");
    if (dict_size < 1) throw InvalidArgument("config: dict_size must be positive");
    SamplerConfig{t.dim, dict_size, 0, scheme}.validate();
    if (!(prune_threshold >= 0.0 && prune_threshold < 1.0)) {
      throw InvalidArgument("config: prune_threshold must lie in [0, 1)");
    }
    quadrature.validate();
    if (gsn_batch < 1 || random_batch < 1) throw InvalidArgument("config: batch sizes must be at least 1");
    if (!(initial_lr > 0.0) || !(decay_rate >= 0.0)) throw InvalidArgument("config: invalid learning rate schedule");
    if (n_restarts < 1) throw InvalidArgument("config: n_restarts must be at least 1");
    if (!(init_stddev > 0.0)) throw InvalidArgument("config: init_stddev must be positive");
    if (fixed_nodes && *fixed_nodes < 1) throw InvalidArgument("config: nodes must be at least 1");
    for (auto n : sweep_nodes) {
      if (n < 1) throw InvalidArgument("config: sweep node counts must be positive");
    }
  }

  /// Largest node count the greedy stage has to reach.
  std::size_t greedy_iterations() const {
    std::size_t it = max_iter;
    if (fixed_nodes) it = std::max(it, *fixed_nodes);
    for (auto n : sweep_nodes) it = std::max(it, n);
    return it;
  }

  TrainConfig gsn_train_config() const {
    TrainConfig t;
    t.epochs = gsn_epochs;
    t.batch_size = gsn_batch;
    t.initial_lr = initial_lr;
    t.decay_rate = decay_rate;
    t.seed = seed;
    return t;
  }

  TrainConfig random_train_config() const {
    TrainConfig t = gsn_train_config();
    t.epochs = random_epochs;
    t.batch_size = random_batch;
    return t;
  }

  InitSpec init_spec() const {
    InitSpec s;
    s.stddev = init_stddev;
    s.zero_bias = init_zero_bias;
    return s;
  }
};

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["target"] = c.target;
  j["n_train"] = c.n_train;
  j["n_val"] = c.n_val;
  j["n_test"] = c.n_test;
  j["train_layout"] = to_string(c.train_layout);
  j["val_layout"] = to_string(c.val_layout);
  j["test_layout"] = to_string(c.test_layout);
  j["dict_size"] = c.dict_size;
  j["scheme"] = to_string(c.scheme);
  j["drop_tol"] = c.drop_tol;
  j["prune"] = c.prune;
  j["prune_threshold"] = c.prune_threshold;
  j["r_max"] = c.quadrature.r_max;
  j["radial_nodes"] = c.quadrature.n_nodes;
  j["max_iter"] = c.max_iter;
  j["nodes"] = c.fixed_nodes ? json(*c.fixed_nodes) : json(nullptr);
  j["sweep_nodes"] = c.sweep_nodes;
  j["gsn_epochs"] = c.gsn_epochs;
  j["gsn_batch"] = c.gsn_batch;
  j["random_epochs"] = c.random_epochs;
  j["random_batch"] = c.random_batch;
  j["initial_lr"] = c.initial_lr;
  j["decay_rate"] = c.decay_rate;
  j["n_restarts"] = c.n_restarts;
  j["init_stddev"] = c.init_stddev;
  j["init_zero_bias"] = c.init_zero_bias;
  j["baseline"] = c.baseline;
  j["seed"] = c.seed;
  j["notes"] = c.notes;
  return j;
}

/// Starts from the target's defaults and applies every field present in `j`.
/// Unknown fields and wrongly typed values are rejected by name.
inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  if (!j.contains("target")) throw InvalidArgument("config: missing field 'target'");
  std::string field;
  try {
    field = "target";
    ExperimentConfig c = ExperimentConfig::for_example(j.at("target").get<std::string>());
    for (const auto& [key, value] : j.items()) {
      field = key;
      if (key == "target") continue;
      else if (key == "n_train") c.n_train = value.get<std::size_t>();
      else if (key == "n_val") c.n_val = value.get<std::size_t>();
      else if (key == "n_test") c.n_test = value.get<std::size_t>();
      else if (key == "train_layout") c.train_layout = parse_layout(value.get<std::string>());
      else if (key == "val_layout") c.val_layout = parse_layout(value.get<std::string>());
      else if (key == "test_layout") c.test_layout = parse_layout(value.get<std::string>());
      else if (key == "dict_size") c.dict_size = value.get<std::size_t>();
      else if (key == "scheme") c.scheme = parse_scheme(value.get<std::string>());
      else if (key == "drop_tol") c.drop_tol = value.get<double>();
      else if (key == "prune") c.prune = value.get<bool>();
      else if (key == "prune_threshold") c.prune_threshold = value.get<double>();
      else if (key == "r_max") c.quadrature.r_max = value.get<double>();
      else if (key == "radial_nodes") c.quadrature.n_nodes = value.get<std::size_t>();
      else if (key == "max_iter") c.max_iter = value.get<std::size_t>();
      else if (key == "nodes") c.fixed_nodes = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
      else if (key == "sweep_nodes") c.sweep_nodes = value.get<std::vector<std::size_t>>();
      else if (key == "gsn_epochs") c.gsn_epochs = value.get<std::size_t>();
      else if (key == "gsn_batch") c.gsn_batch = value.get<std::size_t>();
      else if (key == "random_epochs") c.random_epochs = value.get<std::size_t>();
      else if (key == "random_batch") c.random_batch = value.get<std::size_t>();
      else if (key == "initial_lr") c.initial_lr = value.get<double>();
      else if (key == "decay_rate") c.decay_rate = value.get<double>();
      else if (key == "n_restarts") c.n_restarts = value.get<std::size_t>();
      else if (key == "init_stddev") c.init_stddev = value.get<double>();
      else if (key == "init_zero_bias") c.init_zero_bias = value.get<bool>();
      else if (key == "baseline") c.baseline = value.get<bool>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "notes") c.notes = value.get<std::vector<std::string>>();
      else throw InvalidArgument("config: unknown field '" + key + "'");
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument("config: bad value for field '" + field + "': " + e.what());
  }
}

/// FNV-1a over the canonical config JSON, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Datasets {
  Dataset train;
  Dataset validation;
  Dataset test;
};

inline Datasets make_datasets(const ExperimentConfig& c) {
  const TargetFunction t = find_target(c.target);
  return {generate_dataset(t, c.n_train, derive_seed(c.seed, Stream::train), c.train_layout),
          generate_dataset(t, c.n_val, derive_seed(c.seed, Stream::validation), c.val_layout),
          generate_dataset(t, c.n_test, derive_seed(c.seed, Stream::test), c.test_layout)};
}

inline std::vector<Direction> make_directions(const ExperimentConfig& c) {
  const TargetFunction t = find_target(c.target);
  return sample_directions({t.dim, c.dict_size, derive_seed(c.seed, Stream::directions), c.scheme});
}

struct DictionaryStats {
  std::size_t sampled = 0;
  std::size_t atoms = 0;
  std::size_t after_prune = 0;
  bool pruned = false;
  bool prune_degenerate = false;
  /// Sampled directions whose field value fell at or below the cut.
  std::size_t field_rejected = 0;

  /// Share of the sampled candidates rejected by the ridgelet criterion.
  double pruned_fraction() const {
    return pruned && sampled ? static_cast<double>(field_rejected) / static_cast<double>(sampled) : 0.0;
  }

  /// Share of the live atoms removed by pruning.
  double live_pruned_fraction() const {
    return atoms ? 1.0 - static_cast<double>(after_prune) / static_cast<double>(atoms) : 0.0;
  }
};

/// Node count chosen from the greedy path: fixed if configured (capped at the
/// path length), else the validation minimum.
inline std::size_t choose_nodes(const ExperimentConfig& c, const GreedyPath& path) {
  if (path.empty()) throw NumericalError("greedy stage selected no atoms");
  if (c.fixed_nodes) return std::min(*c.fixed_nodes, path.size());
  return select_model(path);
}

struct ExperimentReport {
  ExperimentConfig config;
  DictionaryStats dictionary;
  GreedyPath path;
  std::size_t node_count = 0;
  ErrorSet gsn_init;
  ErrorSet gsn_trained;
  std::optional<ErrorSet> random_trained;
  std::optional<ShallowNetwork> init_network;
  std::optional<ShallowNetwork> trained_network;
  std::optional<ShallowNetwork> random_network;
  TrainResult gsn_run{NetworkParams(0, 1), ShallowNetwork(1), {}, {}};
  std::optional<MultiRestartResult> restarts;
  std::optional<CollapsedField> field;
  std::map<std::string, double> timings;
};

struct SweepPoint {
  std::size_t nodes = 0;
  bool available = false;
  ErrorSet gsn_init;
  ErrorSet gsn_trained;
  std::optional<ErrorSet> random_trained;
};

struct SweepReport {
  ExperimentConfig config;
  DictionaryStats dictionary;
  GreedyPath path;
  std::vector<SweepPoint> points;
  std::map<std::string, double> timings;
};

namespace detail {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(&sink) {}

  template <typename Fn>
  decltype(auto) operator()(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      std::map<std::string, double>* sink;
      std::string stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        (*sink)[stage] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } rec{sink_, stage, t0};
    return with_stage(stage, std::forward<Fn>(fn));
  }

 private:
  std::map<std::string, double>* sink_;
};

}  // namespace detail

/// GSN steps 1-4: sample, build and (optionally) prune the dictionary, run
/// the greedy selection. Shared by the full pipeline and the sweep.
struct GreedyStageOutput {
  Dictionary dictionary;
  DictionaryStats stats;
  std::optional<CollapsedField> field;
  GreedyResult greedy;
};

inline GreedyStageOutput run_greedy_stages(const ExperimentConfig& c, const Datasets& data, std::size_t threads,
                                           std::map<std::string, double>& timings) {
  detail::StageTimer timed(timings);
  auto directions = timed("sample", [&] { return make_directions(c); });
  std::optional<CollapsedField> field;
  if (c.prune) {
    field = timed("ridgelet", [&] { return collapsed_field(data.train, directions, c.quadrature, threads); });
  }
  Dictionary dict = timed("dict", [&] { return build_dictionary(data.train, std::move(directions), c.drop_tol, threads); });
  DictionaryStats stats;
  stats.sampled = dict.source_directions().size();
  stats.atoms = dict.size();
  stats.after_prune = dict.size();
  if (c.prune) {
    PruneResult pr = timed("prune", [&] { return prune_dictionary(dict, *field, c.prune_threshold); });
    stats.pruned = true;
    stats.prune_degenerate = pr.degenerate;
    stats.field_rejected = pr.rejected;
    stats.after_prune = pr.dictionary.size();
    dict = std::move(pr.dictionary);
  }
  GreedyOptions opts;
  opts.max_iter = c.greedy_iterations();
  GreedyResult greedy = timed("greedy", [&] { return oga_run(dict, data.train, &data.validation, opts); });
  return {std::move(dict), stats, std::move(field), std::move(greedy)};
}

/// Random-init baseline at a fixed node count.
inline MultiRestartResult run_random_baseline(const ExperimentConfig& c, std::size_t nodes, const Datasets& data) {
  return multi_restart(static_cast<Eigen::Index>(nodes), data.train, &data.validation, data.test,
                       c.random_train_config(), c.init_spec(), c.n_restarts, c.seed);
}

/// Full pipeline for one configuration: GSN initialization, its fine-tuned
/// version and (if enabled) the equal-size random-init baseline.
inline ExperimentReport run_gsn_pipeline(const ExperimentConfig& c, std::size_t threads = 1) {
  c.validate();
  ExperimentReport rep;
  rep.config = c;
  detail::StageTimer timed(rep.timings);
  const Datasets data = timed("data", [&] { return make_datasets(c); });
  GreedyStageOutput g = run_greedy_stages(c, data, threads, rep.timings);
  rep.dictionary = g.stats;
  rep.field = std::move(g.field);
  rep.path = g.greedy.path;
  rep.node_count = timed("select", [&] { return choose_nodes(c, g.greedy.path); });

  rep.init_network = timed("fit", [&] { return fit_network(data.train, g.greedy.nodes(rep.node_count)); });
  rep.gsn_init = compute_errors(*rep.init_network, data.test);

  rep.gsn_run = timed("train", [&] { return train(*rep.init_network, data.train, &data.validation, c.gsn_train_config()); });
  rep.trained_network = rep.gsn_run.network;
  rep.gsn_trained = compute_errors(*rep.trained_network, data.test);

  if (c.baseline) {
    rep.restarts = timed("baseline", [&] { return run_random_baseline(c, rep.node_count, data); });
    rep.random_network = rep.restarts->best_run.network;
    rep.random_trained = rep.restarts->rows[rep.restarts->best].test_error;
  }
  return rep;
}

/// Truncates one greedy path at each requested size, refits, and trains both
/// branches. Sizes beyond the path are marked unavailable.
inline SweepReport node_sweep(const ExperimentConfig& c, std::size_t threads = 1) {
  c.validate();
  if (c.sweep_nodes.empty()) throw InvalidArgument("node_sweep: no node counts configured");
  SweepReport rep;
  rep.config = c;
  detail::StageTimer timed(rep.timings);
  const Datasets data = timed("data", [&] { return make_datasets(c); });
  GreedyStageOutput g = run_greedy_stages(c, data, threads, rep.timings);
  rep.dictionary = g.stats;
  rep.path = g.greedy.path;
  for (std::size_t n : c.sweep_nodes) {
    SweepPoint pt;
    pt.nodes = n;
    pt.available = n <= g.greedy.size();
    if (pt.available) {
      const ShallowNetwork init = timed("fit", [&] { return fit_network(data.train, g.greedy.nodes(n)); });
      pt.gsn_init = compute_errors(init, data.test);
      const TrainResult tr = timed("train", [&] { return train(init, data.train, &data.validation, c.gsn_train_config()); });
      pt.gsn_trained = compute_errors(tr.network, data.test);
      if (c.baseline) {
        const MultiRestartResult rr = timed("baseline", [&] { return run_random_baseline(c, n, data); });
        pt.random_trained = rr.rows[rr.best].test_error;
      }
    }
    rep.points.push_back(pt);
  }
  return rep;
}

inline json errors_to_json(const ErrorSet& e) {
  return {{"abs_l2", e.abs_l2}, {"rmse", e.rmse}, {"rel_l2", e.rel_defined() ? json(e.rel_l2) : json(nullptr)}};
}

inline json seeds_json(const ExperimentConfig& c) {
  std::vector<std::uint64_t> restarts;
  for (std::size_t k = 0; k < c.n_restarts; ++k) restarts.push_back(c.seed + k);
  return {{"master", c.seed},
          {"directions", derive_seed(c.seed, Stream::directions)},
          {"train", derive_seed(c.seed, Stream::train)},
          {"validation", derive_seed(c.seed, Stream::validation)},
          {"test", derive_seed(c.seed, Stream::test)},
          {"gsn_shuffle", derive_seed(c.seed, Stream::shuffle)},
          {"restarts", restarts}};
}

inline json dictionary_json(const DictionaryStats& s) {
  return {{"sampled", s.sampled},
          {"atoms", s.atoms},
          {"dead", s.sampled - s.atoms},
          {"pruned", s.pruned},
          {"after_prune", s.after_prune},
          {"field_rejected", s.field_rejected},
          {"pruned_fraction", s.pruned_fraction()},
          {"live_pruned_fraction", s.live_pruned_fraction()},
          {"prune_degenerate", s.prune_degenerate}};
}

inline json greedy_json(const GreedyPath& p) {
  return {{"path_length", p.size()},
          {"stop", to_string(p.stop)},
          {"final_residual", p.empty() ? json(nullptr) : json(p.records.back().residual_norm)},
          {"monotone", p.monotone},
          {"max_orthogonality_defect", p.max_orthogonality_defect}};
}

inline json header_json(const std::map<std::string, double>& timings) {
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"timestamp", stamp}, {"timings", timings}};
}

/// Manifest for a pipeline run. Everything outside "header" is reproducible
/// from "config".
inline json report_to_json(const ExperimentReport& r) {
  json j;
  j["header"] = header_json(r.timings);
  j["config"] = config_to_json(r.config);
  j["seeds"] = seeds_json(r.config);
  j["dictionary"] = dictionary_json(r.dictionary);
  j["greedy"] = greedy_json(r.path);
  j["node_count"] = r.node_count;
  j["errors"] = {{"gsn_init", errors_to_json(r.gsn_init)},
                 {"gsn_trained", errors_to_json(r.gsn_trained)},
                 {"random_trained", r.random_trained ? errors_to_json(*r.random_trained) : json(nullptr)}};
  if (r.restarts) {
    json rows = json::array();
    for (const auto& row : r.restarts->rows) {
      json e = errors_to_json(row.test_error);
      e["seed"] = row.seed;
      e["final_train_loss"] = row.final_train_loss;
      rows.push_back(e);
    }
    j["restarts"] = rows;
    j["best_restart"] = r.restarts->best;
  }
  j["final_train_loss"] = r.gsn_run.train_loss.empty() ? json(nullptr) : json(r.gsn_run.train_loss.back());
  return j;
}

inline json sweep_to_json(const SweepReport& r) {
  json j;
  j["header"] = header_json(r.timings);
  j["config"] = config_to_json(r.config);
  j["seeds"] = seeds_json(r.config);
  j["dictionary"] = dictionary_json(r.dictionary);
  j["greedy"] = greedy_json(r.path);
  json pts = json::array();
  for (const auto& p : r.points) {
    json e{{"nodes", p.nodes}, {"available", p.available}};
    if (p.available) {
      e["gsn_init"] = errors_to_json(p.gsn_init);
      e["gsn_trained"] = errors_to_json(p.gsn_trained);
      e["random_trained"] = p.random_trained ? errors_to_json(*p.random_trained) : json(nullptr);
    }
    pts.push_back(e);
  }
  j["sweep"] = pts;
  return j;
}

/// Manifest without the header, for reproducibility comparisons.
inline json reproducible_part(json manifest) {
  manifest.erase("header");
  return manifest;
}

/// Writes manifest.json plus curve CSVs and networks into `dir`.
inline void write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
  std::filesystem::create_directories(dir);
  io::write_json(dir / "manifest.json", report_to_json(r));
  io::write_path(dir / "path.csv", r.path);
  io::write_loss(dir / "loss_gsn.csv", r.gsn_run);
  if (r.field) io::write_field(dir / "field.csv", *r.field);
  if (r.init_network) io::write_json(dir / "network_init.json", io::network_to_json(*r.init_network));
  if (r.trained_network) io::write_json(dir / "network_trained.json", io::network_to_json(*r.trained_network));
  if (r.random_network) io::write_json(dir / "network_random.json", io::network_to_json(*r.random_network));
  if (r.restarts) {
    io::write_loss(dir / "loss_random.csv", r.restarts->best_run);
    std::vector<std::vector<double>> rows;
    for (const auto& row : r.restarts->rows) {
      rows.push_back({static_cast<double>(row.seed), row.test_error.abs_l2, row.test_error.rmse, row.test_error.rel_l2,
                      row.final_train_loss});
    }
    io::write_csv(dir / "restarts.csv", {"seed", "abs_l2", "rmse", "rel_l2", "final_train_loss"}, rows);
  }
}

inline void write_sweep(const std::filesystem::path& dir, const SweepReport& r) {
  std::filesystem::create_directories(dir);
  io::write_json(dir / "manifest.json", sweep_to_json(r));
  io::write_path(dir / "path.csv", r.path);
  std::vector<std::vector<double>> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : r.points) {
    rows.push_back({static_cast<double>(p.nodes), p.available ? p.gsn_init.rel_l2 : nan,
                    p.available ? p.gsn_trained.rel_l2 : nan,
                    p.available && p.random_trained ? p.random_trained->rel_l2 : nan});
  }
  io::write_csv(dir / "sweep.csv", {"nodes", "gsn_init_rel_l2", "gsn_trained_rel_l2", "random_trained_rel_l2"}, rows);
}

}  // namespace gsn
