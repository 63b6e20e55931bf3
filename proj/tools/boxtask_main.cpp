/*
 * Copyright 2025 The boxtask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Every subcommand is scriptable (no prompts),
// honors --seed wherever randomness exists, and echoes its effective
// configuration into the files it writes. Exit codes: 0 success, 1 usage
// error, 2 data error, 3 numeric failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "boxtask/baselines.hpp"
#include "boxtask/data.hpp"
#include "boxtask/errors.hpp"
#include "boxtask/evaluation.hpp"
#include "boxtask/textio.hpp"
#include "boxtask/trainer.hpp"
#include "boxtask/viz.hpp"

namespace {

using boxtask::DataError;
using boxtask::NumericError;
using nlohmann::json;

json default_run_config() {
  return json{{"learning_rate", 1e-3},
              {"max_epochs", 2000},
              {"batch_size", 256},
              {"patience", 50},
              {"seed", 0},
              {"box_dim", 2},
              {"hidden", 64},
              {"size_floor", 1e-6},
              {"tau_vol", 0.1},
              {"tau_int", 1e-4},
              {"overlap_weight", 1.0},
              {"lambda_d", 1.0},
              {"alpha", 1.0},
              {"beta", 0.01},
              {"gamma_a", 0.0},
              {"train_fraction", 0.8},
              {"val_fraction", 0.1},
              {"test_fraction", 0.1},
              {"novel_count", 0},
              {"novel_pool", "all"},
              {"deterministic", false},
              {"mode", "hierarchy"},
              {"rescale_k", 50.0},
              {"keep_train_fraction", 1.0}};
}

boxtask::TrainConfig train_config_from_json(const json& cfg) {
  boxtask::TrainConfig out;
  out.learning_rate = cfg.at("learning_rate").get<double>();
  out.max_epochs = cfg.at("max_epochs").get<int>();
  out.batch_size = cfg.at("batch_size").get<int>();
  out.patience = cfg.at("patience").get<int>();
  out.seed = cfg.at("seed").get<std::uint64_t>();
  out.box_dim = cfg.at("box_dim").get<int>();
  out.hidden = cfg.at("hidden").get<int>();
  out.size_floor = cfg.at("size_floor").get<double>();
  out.temps.tau_vol = cfg.at("tau_vol").get<double>();
  out.temps.tau_int = cfg.at("tau_int").get<double>();
  out.weights.overlap_weight = cfg.at("overlap_weight").get<double>();
  out.weights.lambda_d = cfg.at("lambda_d").get<double>();
  out.weights.alpha = cfg.at("alpha").get<double>();
  out.weights.beta = cfg.at("beta").get<double>();
  out.weights.gamma_a = cfg.at("gamma_a").get<double>();
  out.fractions.train = cfg.at("train_fraction").get<double>();
  out.fractions.val = cfg.at("val_fraction").get<double>();
  out.fractions.test = cfg.at("test_fraction").get<double>();
  out.novel_count = cfg.at("novel_count").get<int>();
  out.novel_leaves_only = cfg.at("novel_pool").get<std::string>() == "leaves";
  out.deterministic = cfg.at("deterministic").get<bool>();
  out.mode = boxtask::parse_relation_kind(cfg.at("mode").get<std::string>());
  out.rescale_k = cfg.at("rescale_k").get<double>();
  return out;
}

// Effective configuration = defaults <- config file <- explicitly set flags.
struct ConfigLayer {
  std::string config_path;
  json flags = json::object();

  json resolve() const {
    json effective = default_run_config();
    if (!config_path.empty()) {
      json file;
      try {
        file = json::parse(boxtask::read_text_file(config_path));
      } catch (const json::exception& e) {
        throw DataError(config_path + ": malformed config (" + std::string(e.what()) + ")");
      }
      for (const auto& [key, value] : file.items()) {
        if (!effective.contains(key)) {
          throw DataError(config_path + ": unknown config key \"" + key + "\"");
        }
        effective[key] = value;
      }
    }
    for (const auto& [key, value] : flags.items()) effective[key] = value;
    return effective;
  }
};

// Registers the shared training/split/loss flags on a subcommand and wires
// them into the flag layer (only explicitly passed flags land there).
void add_run_flags(CLI::App* cmd, std::shared_ptr<ConfigLayer> layer) {
  cmd->add_option("--config", layer->config_path, "JSON run-config file; flags win");
  auto opt = [cmd, layer](const std::string& flag, const std::string& key,
                          const std::string& help) {
    cmd->add_option_function<double>(
           flag, [layer, key](double v) { layer->flags[key] = v; }, help)
        ->expected(1);
  };
  auto iopt = [cmd, layer](const std::string& flag, const std::string& key,
                           const std::string& help) {
    cmd->add_option_function<long long>(
           flag, [layer, key](long long v) { layer->flags[key] = v; }, help)
        ->expected(1);
  };
  opt("--lr", "learning_rate", "Adam learning rate");
  iopt("--epochs", "max_epochs", "maximum training epochs");
  iopt("--batch", "batch_size", "minibatch size in pairs");
  iopt("--patience", "patience", "early-stopping patience in epochs");
  iopt("--seed", "seed", "seed for splits, init, and shuffling");
  iopt("--k", "box_dim", "box dimensionality");
  iopt("--hidden", "hidden", "trunk width");
  opt("--tau-vol", "tau_vol", "volume temperature");
  opt("--tau-int", "tau_int", "intersection temperature");
  opt("--overlap-weight", "overlap_weight", "weight of the overlap term");
  opt("--lambda-d", "lambda_d", "weight of the center-pull term");
  opt("--alpha", "alpha", "shape-spread regularizer weight");
  opt("--beta", "beta", "volume-collapse regularizer weight");
  opt("--gamma-a", "gamma_a", "volume-supervision weight (0 disables)");
  opt("--train-frac", "train_fraction", "training pair fraction");
  opt("--val-frac", "val_fraction", "validation pair fraction");
  opt("--test-frac", "test_fraction", "test pair fraction");
  iopt("--novel-count", "novel_count", "tasks held out entirely");
  opt("--rescale-k", "rescale_k", "tanh squash strength for affinity targets");
  opt("--keep-train-fraction", "keep_train_fraction",
      "random fraction of training pairs kept");
  cmd->add_option_function<std::string>(
         "--novel-pool",
         [layer](const std::string& v) {
           if (v != "all" && v != "leaves") {
             throw CLI::ValidationError("--novel-pool must be all|leaves");
           }
           layer->flags["novel_pool"] = v;
         },
         "novel holdout pool (all|leaves)")
      ->expected(1);
  cmd->add_option_function<std::string>(
         "--mode",
         [layer](const std::string& v) {
           boxtask::parse_relation_kind(v);  // validates
           layer->flags["mode"] = v;
         },
         "relation mode (hierarchy|affinity|soft)")
      ->expected(1);
  cmd->add_flag_function(
      "--deterministic",
      [layer](std::int64_t) { layer->flags["deterministic"] = true; },
      "byte-reproducible outputs for identical configs");
}

int run_gen_synthetic(const std::string& mode, int depth, int branching, int leaf_count,
                      int count, int dim, int k, double noise, std::uint64_t seed,
                      const std::string& tasks_out, const std::string& relations_out) {
  if (mode == "hierarchy") {
    boxtask::TaxonomyParams params;
    params.depth = depth;
    params.branching = branching;
    params.leaf_count = leaf_count;
    params.dim = dim;
    params.noise = noise;
    params.seed = seed;
    const boxtask::SyntheticTaxonomy fixture = boxtask::generate_synthetic_taxonomy(params);
    boxtask::write_tasks(tasks_out, fixture.tasks);
    boxtask::write_relations(relations_out, fixture.relations);
    std::cout << "wrote " << fixture.tasks.size() << " tasks and "
              << fixture.relations.triples.size() << " hierarchy pairs\n";
  } else if (mode == "affinity") {
    boxtask::AffinityParams params;
    params.task_count = count;
    params.dim = dim;
    params.box_dim = k;
    params.seed = seed;
    const boxtask::SyntheticAffinity fixture = boxtask::generate_synthetic_affinity(params);
    boxtask::write_tasks(tasks_out, fixture.tasks);
    boxtask::write_relations(relations_out, fixture.relations);
    std::cout << "wrote " << fixture.tasks.size() << " tasks and "
              << fixture.relations.triples.size() << " affinity pairs\n";
  } else {
    throw CLI::ValidationError("--mode must be hierarchy|affinity for gen-synthetic");
  }
  return 0;
}

std::vector<std::pair<std::string, std::vector<Eigen::VectorXd>>> load_sample_dir(
    const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError(dir + " is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError(dir + " contains no sample files");
  std::vector<std::pair<std::string, std::vector<Eigen::VectorXd>>> sets;
  for (const std::string& f : files) {
    sets.emplace_back(fs::path(f).stem().string(), boxtask::read_sample_vectors(f));
  }
  return sets;
}

int run_aggregate(const std::string& samples_dir, const std::string& tasks_out,
                  bool with_variance) {
  const auto sets = load_sample_dir(samples_dir);
  std::vector<boxtask::TaskRecord> records;
  for (const auto& [id, samples] : sets) {
    const auto [mean, var] = boxtask::aggregate_sample_embeddings(samples);
    boxtask::TaskRecord rec;
    rec.id = id;
    if (with_variance) {
      rec.vec.resize(mean.size() + var.size());
      rec.vec << mean, var;
    } else {
      rec.vec = mean;
    }
    rec.sample_count = static_cast<double>(samples.size());
    records.push_back(std::move(rec));
  }
  boxtask::write_tasks(tasks_out, boxtask::TaskCollection::from_records(std::move(records)));
  std::cout << "aggregated " << sets.size() << " sample sets into " << tasks_out << "\n";
  return 0;
}

int run_soft_labels(const std::string& samples_dir, const std::string& relations_out) {
  const auto sets = load_sample_dir(samples_dir);
  const boxtask::RelationSet rel = boxtask::soft_overlap_labels(sets);
  boxtask::write_relations(relations_out, rel);
  std::cout << "wrote " << rel.triples.size() << " soft overlap pairs\n";
  return 0;
}

int run_train(const ConfigLayer& layer, const std::string& tasks_path,
              const std::string& relations_path, const std::string& checkpoint_out,
              const std::string& log_out, const std::string& splits_out) {
  const json effective = layer.resolve();
  const boxtask::TrainConfig cfg = train_config_from_json(effective);
  const boxtask::TaskCollection tasks = boxtask::read_tasks(tasks_path);
  const boxtask::RelationSet relations = boxtask::read_relations(relations_path);

  boxtask::FitResult result;
  const double keep = effective.at("keep_train_fraction").get<double>();
  if (keep < 1.0) {
    // Reduced supervision: thin the training pairs, keep val/test intact.
    boxtask::SplitPlan plan =
        boxtask::make_splits(relations, tasks, cfg.fractions, cfg.novel_count, cfg.seed,
                             cfg.novel_leaves_only);
    boxtask::subsample_train(plan, keep, cfg.seed + 1);
    result = boxtask::fit_with_split(tasks, relations, cfg, plan);
  } else {
    result = boxtask::fit(tasks, relations, cfg);
  }

  boxtask::save_checkpoint(checkpoint_out, result.checkpoint);
  if (!log_out.empty()) boxtask::write_train_log(log_out, result.log);
  if (!splits_out.empty()) {
    json sp;
    sp["train"] = result.split.train;
    sp["val"] = result.split.val;
    sp["test"] = result.split.test;
    sp["novel"] = result.split.novel_ids;
    sp["config"] = effective;
    boxtask::write_text_file(splits_out, sp.dump(2) + "\n");
  }

  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& r : result.log) best_val = std::min(best_val, r.val_loss);
  std::cout << "trained " << result.log.size() << " epochs; best val loss "
            << (result.log.empty() ? std::string("n/a")
                                   : boxtask::format_double(best_val))
            << "; checkpoint " << checkpoint_out << "\n";
  return 0;
}

int run_eval(const std::string& tasks_path, const std::string& relations_path,
             const std::string& checkpoint_path, const std::string& out,
             const std::string& protocol) {
  const boxtask::TaskCollection tasks = boxtask::read_tasks(tasks_path);
  const boxtask::RelationSet relations = boxtask::read_relations(relations_path);
  const boxtask::Checkpoint cp = boxtask::load_checkpoint(checkpoint_path);

  // The split plan is a pure function of the checkpointed configuration.
  boxtask::RelationSet working = relations;
  if (cp.train.mode == boxtask::RelationKind::kAffinity && cp.train.rescale_k > 0.0 &&
      relations.kind == boxtask::RelationKind::kAffinity) {
    for (boxtask::RelationTriple& t : working.triples) {
      t.value = boxtask::rescale_affinity(t.value, cp.train.rescale_k);
    }
  }
  const boxtask::SplitPlan split =
      boxtask::make_splits(working, tasks, cp.train.fractions, cp.train.novel_count,
                           cp.train.seed, cp.train.novel_leaves_only);

  boxtask::EvalReport report;
  if (protocol == "existing") {
    report = boxtask::evaluate_existing(cp, tasks, relations, split);
  } else if (protocol == "novel") {
    report = boxtask::evaluate_novel(cp, tasks, relations, split);
  } else {
    throw CLI::ValidationError("--protocol must be existing|novel");
  }

  json echo;
  echo["checkpoint"] = checkpoint_path;
  echo["tasks"] = tasks_path;
  echo["relations"] = relations_path;
  echo["protocol"] = protocol;
  echo["train"] = json::parse(boxtask::read_text_file(checkpoint_path))["train"];
  boxtask::write_report(out, report, echo.dump());
  std::cout << report.metric << " = " << boxtask::format_double(report.value);
  if (report.metric == "F1") {
    std::cout << " (precision " << boxtask::format_double(report.precision)
              << ", recall " << boxtask::format_double(report.recall) << ", threshold "
              << boxtask::format_double(report.threshold) << ")";
  }
  std::cout << " on " << report.pairs.size() << " " << report.split << " pairs\n";
  return 0;
}

int run_embed(const std::string& tasks_path, const std::string& checkpoint_path,
              const std::string& out) {
  const boxtask::TaskCollection tasks = boxtask::read_tasks(tasks_path);
  const boxtask::Checkpoint cp = boxtask::load_checkpoint(checkpoint_path);
  std::vector<boxtask::EmbeddedBox> boxes;
  for (const boxtask::TaskRecord& t : tasks.tasks()) {
    boxtask::EmbeddedBox b;
    b.id = t.id;
    b.box = cp.embed(t.vec);
    b.group = t.group;
    boxes.push_back(std::move(b));
  }
  boxtask::write_boxes(out, boxes);
  std::cout << "embedded " << boxes.size() << " tasks into " << out << "\n";
  return 0;
}

int run_baseline_cmd(const ConfigLayer& layer, const std::string& tasks_path,
                     const std::string& relations_path, const std::string& method,
                     const std::string& kl_mode, const std::string& out,
                     const std::string& protocol) {
  const json effective = layer.resolve();
  boxtask::BaselineConfig cfg;
  cfg.method = boxtask::parse_baseline_method(method);
  cfg.opt = train_config_from_json(effective);
  if (kl_mode == "clip") {
    cfg.kl_mode = boxtask::KlMode::kClipMeanVar;
  } else if (kl_mode == "fim") {
    cfg.kl_mode = boxtask::KlMode::kFimPrecision;
  } else {
    throw CLI::ValidationError("--kl-mode must be clip|fim");
  }

  const boxtask::TaskCollection tasks = boxtask::read_tasks(tasks_path);
  const boxtask::RelationSet relations = boxtask::read_relations(relations_path);
  if ((cfg.opt.mode == boxtask::RelationKind::kAffinity) !=
      (relations.kind == boxtask::RelationKind::kAffinity)) {
    throw DataError("relation file kind does not match --mode");
  }
  boxtask::RelationSet working = relations;
  if (cfg.opt.mode == boxtask::RelationKind::kAffinity && cfg.opt.rescale_k > 0.0) {
    for (boxtask::RelationTriple& t : working.triples) {
      t.value = boxtask::rescale_affinity(t.value, cfg.opt.rescale_k);
    }
  }
  const boxtask::SplitPlan split =
      boxtask::make_splits(working, tasks, cfg.opt.fractions, cfg.opt.novel_count,
                           cfg.opt.seed, cfg.opt.novel_leaves_only);
  const bool novel = protocol == "novel";
  if (!novel && protocol != "existing") {
    throw CLI::ValidationError("--protocol must be existing|novel");
  }
  const boxtask::EvalReport report = boxtask::run_baseline(cfg, tasks, relations, split, novel);

  json echo = effective;
  echo["method"] = method;
  echo["kl_mode"] = kl_mode;
  boxtask::write_report(out, report, echo.dump());
  std::cout << report.method << ": " << report.metric << " = "
            << boxtask::format_double(report.value) << " on " << report.pairs.size()
            << " " << report.split << " pairs\n";
  return 0;
}

int run_render(const std::string& boxes_path, const std::string& out,
               const std::string& dims_flag, const std::string& highlight,
               bool no_labels, double opacity, double canvas) {
  const std::vector<boxtask::EmbeddedBox> boxes = boxtask::read_boxes(boxes_path);
  boxtask::RenderSpec spec;
  spec.labels = !no_labels;
  spec.opacity = opacity;
  spec.canvas = canvas;
  std::optional<std::pair<int, int>> dims;
  if (!dims_flag.empty()) {
    const auto parts = boxtask::split(dims_flag, ',');
    if (parts.size() != 2) throw CLI::ValidationError("--dims expects \"a,b\"");
    dims = std::make_pair(static_cast<int>(boxtask::parse_double(parts[0], "--dims")),
                          static_cast<int>(boxtask::parse_double(parts[1], "--dims")));
  }
  const std::string svg =
      highlight.empty() ? boxtask::render_svg(boxes, spec, dims)
                        : boxtask::render_affinity_highlight(boxes, highlight, spec, dims);
  boxtask::write_text_file(out, svg);
  std::cout << "rendered " << boxes.size() << " boxes to " << out << "\n";
  return 0;
}

int run_analyze_distance(const std::string& tasks_path, const std::string& checkpoint_path,
                         int max_m, const std::string& out) {
  const boxtask::TaskCollection tasks = boxtask::read_tasks(tasks_path);
  const boxtask::Checkpoint cp = boxtask::load_checkpoint(checkpoint_path);
  std::vector<boxtask::Box> boxes;
  for (const boxtask::TaskRecord& t : tasks.tasks()) boxes.push_back(cp.embed(t.vec));
  const auto rows = boxtask::distance_vs_graph_distance(boxes, tasks, max_m);
  boxtask::write_neighborhood_table(out, rows);
  std::cout << "m,mean_center_distance,mean_graph_distance\n";
  for (const auto& r : rows) {
    std::cout << r.m << ',' << boxtask::format_double(r.mean_center_distance) << ','
              << boxtask::format_double(r.mean_graph_distance) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box embeddings of tasks: training, evaluation, and rendering"};
  app.require_subcommand(1);

  // gen-synthetic
  std::string gen_mode = "hierarchy", gen_tasks_out, gen_relations_out;
  int gen_depth = 3, gen_branching = 3, gen_leaf_count = 3, gen_count = 20, gen_dim = 16,
      gen_k = 2;
  double gen_noise = 0.05;
  std::uint64_t gen_seed = 0;
  CLI::App* gen = app.add_subcommand("gen-synthetic", "generate a synthetic benchmark");
  gen->add_option("--mode", gen_mode, "hierarchy|affinity");
  gen->add_option("--depth", gen_depth, "levels below the root (hierarchy)");
  gen->add_option("--branching", gen_branching, "children per internal node");
  gen->add_option("--leaf-count", gen_leaf_count, "leaves per bottom-level parent");
  gen->add_option("--count", gen_count, "task count (affinity)");
  gen->add_option("--dim", gen_dim, "base representation dimension");
  gen->add_option("--k", gen_k, "planted box dimension (affinity)");
  gen->add_option("--noise", gen_noise, "leaf vector noise (hierarchy)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--tasks-out", gen_tasks_out, "output tasks file")->required();
  gen->add_option("--relations-out", gen_relations_out, "output relations file")->required();

  // aggregate
  std::string agg_dir, agg_out;
  bool agg_with_variance = false;
  CLI::App* agg = app.add_subcommand(
      "aggregate", "mean/variance base representations from per-sample vectors");
  agg->add_option("--samples-dir", agg_dir, "directory of per-task sample files")->required();
  agg->add_option("--tasks-out", agg_out, "output tasks file")->required();
  agg->add_flag("--with-variance", agg_with_variance,
                "concatenate the variance to the mean");

  // soft-labels
  std::string soft_dir, soft_out;
  CLI::App* soft = app.add_subcommand("soft-labels",
                                      "soft overlap labels from per-sample vectors");
  soft->add_option("--samples-dir", soft_dir, "directory of per-task sample files")->required();
  soft->add_option("--relations-out", soft_out, "output relations file")->required();

  // train
  auto train_layer = std::make_shared<ConfigLayer>();
  std::string train_tasks, train_relations, train_checkpoint, train_log, train_splits;
  CLI::App* train = app.add_subcommand("train", "fit the box mapper");
  train->add_option("--tasks", train_tasks, "tasks file")->required();
  train->add_option("--relations", train_relations, "relations file")->required();
  train->add_option("--checkpoint", train_checkpoint, "checkpoint output")->required();
  train->add_option("--log", train_log, "per-epoch loss log (csv)");
  train->add_option("--splits-out", train_splits, "split plan output (json)");
  add_run_flags(train, train_layer);

  // eval
  std::string eval_tasks, eval_relations, eval_checkpoint, eval_out,
      eval_protocol = "existing";
  CLI::App* eval = app.add_subcommand("eval", "score held-out relations");
  eval->add_option("--tasks", eval_tasks, "tasks file")->required();
  eval->add_option("--relations", eval_relations, "relations file")->required();
  eval->add_option("--checkpoint", eval_checkpoint, "trained checkpoint")->required();
  eval->add_option("--out", eval_out, "report output (json + pairs csv)")->required();
  eval->add_option("--protocol", eval_protocol, "existing|novel");

  // embed
  std::string embed_tasks, embed_checkpoint, embed_out;
  CLI::App* embed = app.add_subcommand("embed", "map tasks to boxes with a checkpoint");
  embed->add_option("--tasks", embed_tasks, "tasks file")->required();
  embed->add_option("--checkpoint", embed_checkpoint, "trained checkpoint")->required();
  embed->add_option("--out", embed_out, "boxes output")->required();

  // baseline
  auto baseline_layer = std::make_shared<ConfigLayer>();
  std::string bl_tasks, bl_relations, bl_method, bl_out, bl_kl_mode = "clip",
              bl_protocol = "existing";
  CLI::App* baseline = app.add_subcommand("baseline", "run a comparison method");
  baseline->add_option("--tasks", bl_tasks, "tasks file")->required();
  baseline->add_option("--relations", bl_relations, "relations file")->required();
  baseline->add_option("--method", bl_method,
                       "linear|mlp|kl|asym-cos|asym-euc|random")->required();
  baseline->add_option("--out", bl_out, "report output")->required();
  baseline->add_option("--kl-mode", bl_kl_mode, "clip|fim");
  baseline->add_option("--protocol", bl_protocol, "existing|novel");
  add_run_flags(baseline, baseline_layer);

  // render
  std::string render_boxes, render_out, render_dims, render_highlight;
  bool render_no_labels = false;
  double render_opacity = 0.35, render_canvas = 800.0;
  CLI::App* render = app.add_subcommand("render", "draw boxes as an SVG");
  render->add_option("--boxes", render_boxes, "boxes file (from embed)")->required();
  render->add_option("--out", render_out, "SVG output path")->required();
  render->add_option("--dims", render_dims, "projection axes \"a,b\" for k > 2");
  render->add_option("--highlight", render_highlight, "target task id to highlight");
  render->add_flag("--no-labels", render_no_labels, "omit text labels");
  render->add_option("--opacity", render_opacity, "fill opacity in (0,1]");
  render->add_option("--canvas", render_canvas, "canvas size in px");

  // analyze-distance
  std::string ad_tasks, ad_checkpoint, ad_out;
  int ad_max_m = 10;
  CLI::App* analyze = app.add_subcommand(
      "analyze-distance", "embedding distance vs taxonomy distance by neighborhood");
  analyze->add_option("--tasks", ad_tasks, "tasks file with parent links")->required();
  analyze->add_option("--checkpoint", ad_checkpoint, "trained checkpoint")->required();
  analyze->add_option("--max-neighbors", ad_max_m, "largest neighborhood size");
  analyze->add_option("--out", ad_out, "output table (csv)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return run_gen_synthetic(gen_mode, gen_depth, gen_branching, gen_leaf_count,
                               gen_count, gen_dim, gen_k, gen_noise, gen_seed,
                               gen_tasks_out, gen_relations_out);
    }
    if (agg->parsed()) return run_aggregate(agg_dir, agg_out, agg_with_variance);
    if (soft->parsed()) return run_soft_labels(soft_dir, soft_out);
    if (train->parsed()) {
      return run_train(*train_layer, train_tasks, train_relations, train_checkpoint,
                       train_log, train_splits);
    }
    if (eval->parsed()) {
      return run_eval(eval_tasks, eval_relations, eval_checkpoint, eval_out, eval_protocol);
    }
    if (embed->parsed()) return run_embed(embed_tasks, embed_checkpoint, embed_out);
    if (baseline->parsed()) {
      return run_baseline_cmd(*baseline_layer, bl_tasks, bl_relations, bl_method,
                              bl_kl_mode, bl_out, bl_protocol);
    }
    if (render->parsed()) {
      return run_render(render_boxes, render_out, render_dims, render_highlight,
                        render_no_labels, render_opacity, render_canvas);
    }
    if (analyze->parsed()) {
      return run_analyze_distance(ad_tasks, ad_checkpoint, ad_max_m, ad_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
