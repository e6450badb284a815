#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsn/bench.hpp"
#include "gsn/io.hpp"
#include "gsn/parallel.hpp"

namespace gsn::cli {

namespace fs = std::filesystem;

/// Flag values; unset flags leave the config untouched.
struct Overrides {
  std::optional<std::uint64_t> seed;
  bool no_prune = false;
  std::optional<std::size_t> nodes;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> restarts;

  void apply(ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (no_prune) c.prune = false;
    if (nodes) {
      c.fixed_nodes = *nodes;
      c.sweep_nodes.clear();
    }
    if (epochs) c.gsn_epochs = c.random_epochs = *epochs;
    if (batch) c.gsn_batch = c.random_batch = *batch;
    if (restarts) c.n_restarts = *restarts;
  }
};

/// Example id, or a path to a JSON config file.
inline ExperimentConfig load_config(const std::string& spec, const std::string& config_path, const Overrides& ov) {
  ExperimentConfig c;
  if (!config_path.empty()) {
    c = config_from_json(io::read_json(config_path));
  } else if (spec.empty()) {
    throw InvalidArgument("expected an example id (ex1..ex6) or --config FILE");
  } else if (fs::is_regular_file(spec)) {
    c = config_from_json(io::read_json(spec));
  } else {
    try {
      c = ExperimentConfig::for_example(spec);
    } catch (const InvalidArgument&) {
      throw InvalidArgument("unknown example id '" + spec + "' (expected ex1..ex6 or a config file)");
    }
  }
  ov.apply(c);
  c.validate();
  return c;
}

/// Artifact layout of a stage working directory.
struct Workdir {
  fs::path root;

  fs::path config() const { return root / "config.json"; }
  fs::path train() const { return root / "train.csv"; }
  fs::path validation() const { return root / "validation.csv"; }
  fs::path test() const { return root / "test.csv"; }
  fs::path directions() const { return root / "directions.csv"; }
  fs::path dictionary() const { return root / "dictionary.csv"; }
  fs::path pruned() const { return root / "dictionary_pruned.csv"; }
  fs::path prune_info() const { return root / "prune.json"; }
  fs::path field() const { return root / "field.csv"; }
  fs::path path() const { return root / "path.csv"; }
  fs::path greedy() const { return root / "greedy.json"; }
  fs::path network_init() const { return root / "network_init.json"; }
  fs::path network_trained() const { return root / "network_trained.json"; }
  fs::path loss_gsn() const { return root / "loss_gsn.csv"; }
  fs::path manifest() const { return root / "manifest.json"; }

  ExperimentConfig read_config() const { return config_from_json(io::read_json(config())); }
  void write_config(const ExperimentConfig& c) const { io::write_json(config(), config_to_json(c)); }

  Datasets read_datasets(const ExperimentConfig& c) const {
    const auto bounds = find_target(c.target).bounds;
    return {io::read_dataset(train(), bounds), io::read_dataset(validation(), bounds), io::read_dataset(test(), bounds)};
  }

  std::vector<Direction> read_directions(const ExperimentConfig& c) const {
    return io::read_directions(directions(), find_target(c.target).dim);
  }

  /// The full dictionary, rebuilt from its directions and checked against
  /// the stored membership.
  Dictionary read_dictionary(const ExperimentConfig& c, const Dataset& train_set, std::size_t threads) const {
    Dictionary full = build_dictionary(train_set, read_directions(c), c.drop_tol, threads);
    if (io::read_dictionary_indices(dictionary()) != full.source_indices()) {
      throw InvalidArgument(dictionary().string() + ": atoms do not match the directions and training set");
    }
    return full;
  }
};

inline void cmd_sample(const ExperimentConfig& c, const Workdir& w) {
  fs::create_directories(w.root);
  w.write_config(c);
  const Datasets data = with_stage("sample", [&] { return make_datasets(c); });
  io::write_dataset(w.train(), data.train);
  io::write_dataset(w.validation(), data.validation);
  io::write_dataset(w.test(), data.test);
  io::write_directions(w.directions(), with_stage("sample", [&] { return make_directions(c); }));
}

inline void cmd_dict(const Workdir& w, std::size_t threads) {
  const ExperimentConfig c = w.read_config();
  const auto bounds = find_target(c.target).bounds;
  const Dataset train_set = io::read_dataset(w.train(), bounds);
  auto dirs = w.read_directions(c);
  const Dictionary dict =
      with_stage("dict", [&] { return build_dictionary(train_set, std::move(dirs), c.drop_tol, threads); });
  io::write_dictionary(w.dictionary(), dict);
}

inline void cmd_ridgelet(const Workdir& w, std::size_t threads) {
  const ExperimentConfig c = w.read_config();
  const Dataset train_set = io::read_dataset(w.train(), find_target(c.target).bounds);
  auto dirs = w.read_directions(c);
  const CollapsedField f =
      with_stage("ridgelet", [&] { return collapsed_field(train_set, std::move(dirs), c.quadrature, threads); });
  io::write_field(w.field(), f);
}

inline void cmd_prune(const Workdir& w, std::optional<double> threshold, std::size_t threads) {
  ExperimentConfig c = w.read_config();
  if (threshold) {
    c.prune_threshold = *threshold;
    c.prune = true;
    c.validate();
    w.write_config(c);
  }
  const auto dim = find_target(c.target).dim;
  const Dataset train_set = io::read_dataset(w.train(), find_target(c.target).bounds);
  const Dictionary full = w.read_dictionary(c, train_set, threads);
  const CollapsedField f = io::read_field(w.field(), dim, c.quadrature);
  const PruneResult pr = with_stage("prune", [&] { return prune_dictionary(full, f, c.prune_threshold); });
  io::write_dictionary(w.pruned(), pr.dictionary);
  io::write_json(w.prune_info(), {{"threshold", c.prune_threshold},
                                  {"atoms", full.size()},
                                  {"after_prune", pr.dictionary.size()},
                                  {"field_rejected", pr.rejected},
                                  {"degenerate", pr.degenerate}});
}

inline void cmd_greedy(const Workdir& w, std::size_t threads) {
  const ExperimentConfig c = w.read_config();
  const Datasets data = w.read_datasets(c);
  const Dictionary full = w.read_dictionary(c, data.train, threads);
  DictionaryStats stats;
  stats.sampled = full.source_directions().size();
  stats.atoms = full.size();
  stats.after_prune = full.size();
  Dictionary dict = full;
  if (c.prune) {
    dict = io::restrict_dictionary(full, io::read_dictionary_indices(w.pruned()));
    stats.pruned = true;
    stats.after_prune = dict.size();
    const json info = io::read_json(w.prune_info());
    try {
      stats.prune_degenerate = info.at("degenerate").get<bool>();
      stats.field_rejected = info.at("field_rejected").get<std::size_t>();
    } catch (const json::exception& e) {
      throw InvalidArgument(w.prune_info().string() + ": " + e.what());
    }
  }
  GreedyOptions opts;
  opts.max_iter = c.greedy_iterations();
  const GreedyResult g = with_stage("greedy", [&] { return oga_run(dict, data.train, &data.validation, opts); });
  const std::size_t selected = with_stage("select", [&] { return choose_nodes(c, g.path); });
  std::vector<std::size_t> sources;
  for (const auto& rec : g.path.records) sources.push_back(rec.source_index);
  io::write_path(w.path(), g.path);
  json j = greedy_json(g.path);
  j["node_count"] = selected;
  j["validation_selected"] = select_model(g.path);
  j["dictionary"] = dictionary_json(stats);
  j["selected_source_indices"] = sources;
  io::write_json(w.greedy(), j);
}

inline void cmd_fit(const Workdir& w, std::optional<std::size_t> nodes) {
  ExperimentConfig c = w.read_config();
  if (nodes) {
    c.fixed_nodes = *nodes;
    c.validate();
    w.write_config(c);
  }
  const Dataset train_set = io::read_dataset(w.train(), find_target(c.target).bounds);
  const json g = io::read_json(w.greedy());
  const auto sources = g.at("selected_source_indices").get<std::vector<std::size_t>>();
  const auto n = c.fixed_nodes ? std::min(*c.fixed_nodes, sources.size()) : g.at("validation_selected").get<std::size_t>();
  if (n == 0 || n > sources.size()) throw InvalidArgument(w.greedy().string() + ": invalid field 'node_count'");
  const auto dirs = w.read_directions(c);
  std::vector<Direction> chosen;
  for (std::size_t k = 0; k < n; ++k) {
    if (sources[k] >= dirs.size()) throw InvalidArgument(w.greedy().string() + ": invalid field 'selected_source_indices'");
    chosen.push_back(dirs[sources[k]]);
  }
  const ShallowNetwork net = with_stage("fit", [&] { return fit_network(train_set, chosen); });
  io::write_json(w.network_init(), io::network_to_json(net));
}

inline void cmd_train(const Workdir& w, std::optional<std::size_t> epochs, std::optional<std::size_t> batch) {
  ExperimentConfig c = w.read_config();
  Overrides ov;
  ov.epochs = epochs;
  ov.batch = batch;
  if (epochs || batch) {
    ov.apply(c);
    c.validate();
    w.write_config(c);
  }
  const Datasets data = w.read_datasets(c);
  const ShallowNetwork net0 = io::network_from_json(io::read_json(w.network_init()));
  const TrainResult tr =
      with_stage("train", [&] { return train(net0, data.train, &data.validation, c.gsn_train_config()); });
  io::write_json(w.network_trained(), io::network_to_json(tr.network));
  io::write_loss(w.loss_gsn(), tr);
}

/// Errors of the stage artifacts plus the random-init baseline; writes the
/// same manifest a bench run would.
inline void cmd_report(const Workdir& w, std::optional<std::size_t> restarts) {
  ExperimentConfig c = w.read_config();
  if (restarts) {
    c.n_restarts = *restarts;
    c.validate();
    w.write_config(c);
  }
  const Datasets data = w.read_datasets(c);
  const json g = io::read_json(w.greedy());
  ExperimentReport rep;
  rep.config = c;
  try {
    const json& ds = g.at("dictionary");
    rep.dictionary.sampled = ds.at("sampled").get<std::size_t>();
    rep.dictionary.atoms = ds.at("atoms").get<std::size_t>();
    rep.dictionary.after_prune = ds.at("after_prune").get<std::size_t>();
    rep.dictionary.pruned = ds.at("pruned").get<bool>();
    rep.dictionary.prune_degenerate = ds.at("prune_degenerate").get<bool>();
    rep.dictionary.field_rejected = ds.at("field_rejected").get<std::size_t>();
    rep.path.monotone = g.at("monotone").get<bool>();
    rep.path.max_orthogonality_defect = g.at("max_orthogonality_defect").get<double>();
    const auto stop = g.at("stop").get<std::string>();
    for (auto r : {StopReason::max_iter, StopReason::residual_tol, StopReason::span_exhausted}) {
      if (to_string(r) == stop) rep.path.stop = r;
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(w.greedy().string() + ": " + e.what());
  }
  rep.path.records = io::read_path(w.path());

  rep.init_network = io::network_from_json(io::read_json(w.network_init()));
  rep.trained_network = io::network_from_json(io::read_json(w.network_trained()));
  rep.node_count = rep.init_network->size();
  rep.gsn_init = compute_errors(*rep.init_network, data.test);
  rep.gsn_trained = compute_errors(*rep.trained_network, data.test);
  const io::CsvTable loss = io::read_csv(w.loss_gsn());
  const auto col = loss.column("train_loss", w.loss_gsn().string());
  for (const auto& row : loss.rows) rep.gsn_run.train_loss.push_back(row[col]);

  if (c.baseline) {
    rep.restarts = with_stage("baseline", [&] { return run_random_baseline(c, rep.node_count, data); });
    rep.random_network = rep.restarts->best_run.network;
    rep.random_trained = rep.restarts->rows[rep.restarts->best].test_error;
    io::write_json(w.root / "network_random.json", io::network_to_json(*rep.random_network));
    io::write_loss(w.root / "loss_random.csv", rep.restarts->best_run);
  }
  io::write_json(w.manifest(), report_to_json(rep));
}

/// Runs the whole pipeline (or the node sweep when configured) and writes
/// everything under out/<config hash>/. Returns that directory.
inline fs::path cmd_bench(const ExperimentConfig& c, const fs::path& out, std::size_t threads) {
  const fs::path dir = out / config_hash(c);
  fs::create_directories(dir);
  io::write_json(dir / "config.json", config_to_json(c));
  const Datasets data = make_datasets(c);
  io::write_dataset(dir / "train.csv", data.train);
  io::write_dataset(dir / "validation.csv", data.validation);
  io::write_dataset(dir / "test.csv", data.test);
  if (!c.sweep_nodes.empty()) {
    write_sweep(dir, node_sweep(c, threads));
  } else {
    write_report(dir, run_gsn_pipeline(c, threads));
  }
  return dir;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Greedy shallow ReLU networks: stages and benchmarks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string spec;
  std::string config_path;
  std::string out_dir = "runs";
  std::size_t threads = default_threads();
  Overrides ov;
  std::optional<double> threshold;

  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("example", spec, "example id (ex1..ex6) or config JSON file");
    sub->add_option("--config", config_path, "JSON config file; flags override its fields");
    sub->add_option("--seed", ov.seed, "master seed");
    sub->add_flag("--no-prune", ov.no_prune, "skip ridgelet pruning");
    sub->add_option("--nodes", ov.nodes, "fixed node count instead of validation selection")->check(CLI::PositiveNumber);
    sub->add_option("--epochs", ov.epochs, "training epochs for both branches");
    sub->add_option("--batch", ov.batch, "mini-batch size for both branches")->check(CLI::PositiveNumber);
    sub->add_option("--restarts", ov.restarts, "random-init restarts")->check(CLI::PositiveNumber);
  };
  auto add_out = [&](CLI::App* sub, const std::string& help) { sub->add_option("--out", out_dir, help); };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads (default: GSN_THREADS or hardware)")->check(CLI::PositiveNumber);
  };

  auto* bench = app.add_subcommand("bench", "run a full experiment and write a manifest");
  add_config_flags(bench);
  add_out(bench, "parent directory for runs/<hash>/");
  add_threads(bench);

  auto* sample = app.add_subcommand("sample", "write config, datasets and sampled directions");
  add_config_flags(sample);
  add_out(sample, "stage directory");

  auto* dict = app.add_subcommand("dict", "build the dictionary from sampled directions");
  add_out(dict, "stage directory");
  add_threads(dict);

  auto* ridgelet = app.add_subcommand("ridgelet", "collapsed ridgelet field over all sampled directions");
  add_out(ridgelet, "stage directory");
  add_threads(ridgelet);

  auto* prune = app.add_subcommand("prune", "drop atoms with a small collapsed ridgelet value");
  add_out(prune, "stage directory");
  add_threads(prune);
  prune->add_option("--threshold", threshold, "relative threshold in [0, 1)");

  auto* greedy = app.add_subcommand("greedy", "orthogonal greedy selection and validation-based model choice");
  add_out(greedy, "stage directory");
  add_threads(greedy);

  auto* fit = app.add_subcommand("fit", "least-squares outer weights for the selected nodes");
  add_out(fit, "stage directory");
  fit->add_option("--nodes", ov.nodes, "fixed node count")->check(CLI::PositiveNumber);

  auto* trn = app.add_subcommand("train", "fine-tune the fitted network with Adam");
  add_out(trn, "stage directory");
  trn->add_option("--epochs", ov.epochs, "training epochs");
  trn->add_option("--batch", ov.batch, "mini-batch size")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "test errors, random-init baseline and manifest");
  add_out(report, "stage directory");
  report->add_option("--restarts", ov.restarts, "random-init restarts")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Workdir w{out_dir};
    if (bench->parsed()) {
      ExperimentConfig c;
      try {
        c = load_config(spec, config_path, ov);
      } catch (const InvalidArgument&) {
        err << bench->help();
        throw;
      }
      const fs::path dir = cmd_bench(c, out_dir, threads);
      out << (dir / "manifest.json").string() << '\n';
    } else if (sample->parsed()) {
      cmd_sample(load_config(spec, config_path, ov), w);
    } else if (dict->parsed()) {
      cmd_dict(w, threads);
    } else if (ridgelet->parsed()) {
      cmd_ridgelet(w, threads);
    } else if (prune->parsed()) {
      cmd_prune(w, threshold, threads);
    } else if (greedy->parsed()) {
      cmd_greedy(w, threads);
    } else if (fit->parsed()) {
      cmd_fit(w, ov.nodes);
    } else if (trn->parsed()) {
      cmd_train(w, ov.epochs, ov.batch);
    } else if (report->parsed()) {
      cmd_report(w, ov.restarts);
      out << w.manifest().string() << '\n';
    }
    return 0;
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << '\n';
    return e.numerical() ? 3 : 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace gsn::cli
