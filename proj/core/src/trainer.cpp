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

#include "boxtask/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "boxtask/errors.hpp"
#include "boxtask/rng.hpp"
#include "boxtask/textio.hpp"

namespace boxtask {
namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const std::string& context) {
  if (!arr.is_array()) throw DataError(context + ": expected an array");
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& e : arr) {
    if (!e.is_number()) throw DataError(context + ": non-numeric entry");
    v[i++] = e.get<double>();
  }
  return v;
}

// Distinct RNG streams derived from one user seed.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void SplitFractions::validate() const {
  if (!(train > 0.0) || val < 0.0 || test < 0.0 ||
      std::fabs(train + val + test - 1.0) > 1e-9) {
    throw std::invalid_argument("SplitFractions: fractions must be >= 0 and sum to 1");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (max_epochs < 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (box_dim < 1 || hidden < 1) throw std::invalid_argument("TrainConfig: dimensions must be >= 1");
  if (rescale_k < 0.0) throw std::invalid_argument("TrainConfig: rescale_k must be >= 0");
  temps.validate();
  weights.validate();
  fractions.validate();
}

SplitPlan make_splits(const RelationSet& relations, const TaskCollection& tasks,
                      const SplitFractions& fractions, int novel_count,
                      std::uint64_t seed, bool novel_leaves_only) {
  fractions.validate();
  if (novel_count < 0) throw std::invalid_argument("make_splits: novel_count must be >= 0");
  resolve_relations(relations, tasks);  // id/value validation

  Rng rng(seed);
  SplitPlan plan;

  if (novel_count > 0) {
    std::vector<std::string> pool =
        novel_leaves_only ? tasks.leaf_ids() : [&] {
          std::vector<std::string> all;
          for (const TaskRecord& t : tasks.tasks()) all.push_back(t.id);
          return all;
        }();
    if (novel_count >= tasks.size() || novel_count > static_cast<int>(pool.size())) {
      throw DataError("make_splits: not enough tasks for " + std::to_string(novel_count) +
                      " novel holdouts");
    }
    rng.shuffle(pool);
    plan.novel_ids.assign(pool.begin(), pool.begin() + novel_count);
    std::sort(plan.novel_ids.begin(), plan.novel_ids.end());
  }

  std::unordered_set<std::string> novel(plan.novel_ids.begin(), plan.novel_ids.end());
  std::vector<int> eligible;
  for (int t = 0; t < static_cast<int>(relations.triples.size()); ++t) {
    const RelationTriple& r = relations.triples[static_cast<std::size_t>(t)];
    if (novel.count(r.src) || novel.count(r.dst)) continue;
    eligible.push_back(t);
  }

  rng.shuffle(eligible);
  const std::size_t n = eligible.size();
  const std::size_t n_train = static_cast<std::size_t>(fractions.train * static_cast<double>(n));
  const std::size_t n_val = static_cast<std::size_t>(fractions.val * static_cast<double>(n));
  if (n_train == 0) {
    throw DataError("make_splits: too few pairs for the requested fractions");
  }
  plan.train.assign(eligible.begin(), eligible.begin() + static_cast<long>(n_train));
  plan.val.assign(eligible.begin() + static_cast<long>(n_train),
                  eligible.begin() + static_cast<long>(n_train + n_val));
  plan.test.assign(eligible.begin() + static_cast<long>(n_train + n_val), eligible.end());
  return plan;
}

SplitPlan make_splits(const RelationSet& relations, const TaskCollection& tasks,
                      const SplitFractions& fractions, double novel_fraction,
                      std::uint64_t seed) {
  if (novel_fraction < 0.0 || novel_fraction >= 1.0) {
    throw std::invalid_argument("make_splits: novel_fraction must be in [0,1)");
  }
  const int count = static_cast<int>(std::llround(novel_fraction * tasks.size()));
  return make_splits(relations, tasks, fractions, count, seed, false);
}

void subsample_train(SplitPlan& plan, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw std::invalid_argument("subsample_train: keep_fraction must be in (0,1]");
  }
  Rng rng(seed);
  rng.shuffle(plan.train);
  const std::size_t keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(keep_fraction * static_cast<double>(plan.train.size())));
  plan.train.resize(keep);
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: gradient/parameter shape mismatch");
  }
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.t = 0;
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: state/parameter shape mismatch");
  }
  state.t += 1;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseAbs2();
  const double m_corr = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double v_corr = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  Eigen::VectorXd denom = (state.v / v_corr).cwiseSqrt();
  denom.array() += eps;
  params -= lr * (state.m / m_corr).cwiseQuotient(denom);
}

Box Checkpoint::embed(const Eigen::VectorXd& raw) const {
  return forward(params, stand.apply(raw));
}

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  json doc;
  doc["version"] = cp.version;
  doc["kind"] = "boxtask.checkpoint";
  const MapperConfig& m = cp.params.config();
  doc["mapper"] = {{"input_dim", m.input_dim},
                   {"hidden", m.hidden},
                   {"box_dim", m.box_dim},
                   {"size_floor", m.size_floor}};
  doc["standardize"] = {{"mean", vector_to_json(cp.stand.mean)},
                        {"stddev", vector_to_json(cp.stand.stddev)}};
  const TrainConfig& t = cp.train;
  doc["train"] = {{"learning_rate", t.learning_rate},
                  {"max_epochs", t.max_epochs},
                  {"batch_size", t.batch_size},
                  {"patience", t.patience},
                  {"seed", t.seed},
                  {"fractions", {t.fractions.train, t.fractions.val, t.fractions.test}},
                  {"novel_count", t.novel_count},
                  {"novel_leaves_only", t.novel_leaves_only},
                  {"deterministic", t.deterministic},
                  {"mode", relation_kind_name(t.mode)},
                  {"rescale_k", t.rescale_k}};
  doc["temperatures"] = {{"tau_vol", t.temps.tau_vol}, {"tau_int", t.temps.tau_int}};
  doc["weights"] = {{"overlap", t.weights.overlap_weight},
                    {"lambda_d", t.weights.lambda_d},
                    {"alpha", t.weights.alpha},
                    {"beta", t.weights.beta},
                    {"gamma_a", t.weights.gamma_a}};
  doc["theta"] = vector_to_json(cp.params.theta());
  write_text_file(path, doc.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed checkpoint (" + std::string(e.what()) + ")");
  }
  try {
    if (!doc.contains("version") || doc["version"].get<int>() != 1 ||
        doc.value("kind", "") != std::string("boxtask.checkpoint")) {
      throw DataError(path + ": not a version-1 checkpoint");
    }
    Checkpoint cp;
    cp.version = 1;
    const json& m = doc.at("mapper");
    MapperConfig cfg;
    cfg.input_dim = m.at("input_dim").get<int>();
    cfg.hidden = m.at("hidden").get<int>();
    cfg.box_dim = m.at("box_dim").get<int>();
    cfg.size_floor = m.at("size_floor").get<double>();
    cp.params = MapperParams(cfg);
    Eigen::VectorXd theta = vector_from_json(doc.at("theta"), path);
    if (theta.size() != cp.params.theta().size()) {
      throw DataError(path + ": parameter count does not match the declared shape");
    }
    cp.params.theta() = std::move(theta);

    cp.stand.mean = vector_from_json(doc.at("standardize").at("mean"), path);
    cp.stand.stddev = vector_from_json(doc.at("standardize").at("stddev"), path);
    if (cp.stand.mean.size() != cfg.input_dim || cp.stand.stddev.size() != cfg.input_dim) {
      throw DataError(path + ": standardization statistics have the wrong dimension");
    }

    const json& t = doc.at("train");
    cp.train.learning_rate = t.at("learning_rate").get<double>();
    cp.train.max_epochs = t.at("max_epochs").get<int>();
    cp.train.batch_size = t.at("batch_size").get<int>();
    cp.train.patience = t.at("patience").get<int>();
    cp.train.seed = t.at("seed").get<std::uint64_t>();
    cp.train.fractions.train = t.at("fractions").at(0).get<double>();
    cp.train.fractions.val = t.at("fractions").at(1).get<double>();
    cp.train.fractions.test = t.at("fractions").at(2).get<double>();
    cp.train.novel_count = t.at("novel_count").get<int>();
    cp.train.novel_leaves_only = t.at("novel_leaves_only").get<bool>();
    cp.train.deterministic = t.at("deterministic").get<bool>();
    cp.train.mode = parse_relation_kind(t.at("mode").get<std::string>());
    cp.train.rescale_k = t.at("rescale_k").get<double>();
    cp.train.box_dim = cfg.box_dim;
    cp.train.hidden = cfg.hidden;
    cp.train.size_floor = cfg.size_floor;
    cp.train.temps.tau_vol = doc.at("temperatures").at("tau_vol").get<double>();
    cp.train.temps.tau_int = doc.at("temperatures").at("tau_int").get<double>();
    cp.train.weights.overlap_weight = doc.at("weights").at("overlap").get<double>();
    cp.train.weights.lambda_d = doc.at("weights").at("lambda_d").get<double>();
    cp.train.weights.alpha = doc.at("weights").at("alpha").get<double>();
    cp.train.weights.beta = doc.at("weights").at("beta").get<double>();
    cp.train.weights.gamma_a = doc.at("weights").at("gamma_a").get<double>();
    return cp;
  } catch (const json::exception& e) {
    throw DataError(path + ": incomplete checkpoint (" + std::string(e.what()) + ")");
  }
}

void write_train_log(const std::string& path, const std::vector<EpochRecord>& log) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss\n";
  for (const EpochRecord& r : log) {
    out << r.epoch << ',' << format_double(r.train_loss) << ','
        << format_double(r.val_loss) << '\n';
  }
  write_text_file(path, out.str());
}

namespace {

// Names the first non-finite contribution so the abort is actionable.
[[noreturn]] void diagnose_non_finite(const TaskCollection& tasks,
                                      const std::vector<Eigen::VectorXd>& inputs,
                                      const std::vector<PairExample>& batch,
                                      const MapperParams& params,
                                      const LossWeights& weights,
                                      const Temperatures& temps) {
  for (const PairExample& p : batch) {
    const Box zi = forward(params, inputs[static_cast<std::size_t>(p.i)]);
    const Box zj = forward(params, inputs[static_cast<std::size_t>(p.j)]);
    const double le = overlap_loss(smooth_overlap_fraction(zi, zj, temps), p.target);
    const double ld = center_pull_loss(zi, zj, p.target);
    const double lr = shape_regularizer(zi, weights.alpha, weights.beta);
    if (!std::isfinite(le) || !std::isfinite(ld) || !std::isfinite(lr)) {
      throw NumericError("non-finite loss for pair (" + tasks.at(p.i).id + "," +
                         tasks.at(p.j).id + ")");
    }
  }
  throw NumericError("non-finite loss in batch (cause not attributable to a single pair)");
}

}  // namespace

FitResult fit(const TaskCollection& tasks, const RelationSet& relations,
              const TrainConfig& config) {
  config.validate();
  const SplitPlan split =
      make_splits(relations, tasks, config.fractions, config.novel_count, config.seed,
                  config.novel_leaves_only);
  return fit_with_split(tasks, relations, config, split);
}

FitResult fit_with_split(const TaskCollection& tasks, const RelationSet& relations,
                         const TrainConfig& config, const SplitPlan& split) {
  config.validate();
  if (tasks.size() < 2) throw DataError("fit: need at least 2 tasks");

  RelationSet working = relations;
  if (config.mode == RelationKind::kAffinity && config.rescale_k > 0.0 &&
      relations.kind == RelationKind::kAffinity) {
    for (RelationTriple& t : working.triples) {
      t.value = rescale_affinity(t.value, config.rescale_k);
    }
  }

  const std::vector<PairExample> all_pairs = resolve_relations(working, tasks);
  for (const auto* list : {&split.train, &split.val, &split.test}) {
    for (int t : *list) {
      if (t < 0 || t >= static_cast<int>(all_pairs.size())) {
        throw DataError("fit: split references a pair index outside the relations");
      }
    }
  }
  if (split.train.empty()) throw DataError("fit: no training pairs");

  // Standardization statistics come from the tasks that occur in training
  // pairs; the transform is applied to every task.
  std::unordered_set<int> train_task_set;
  for (int t : split.train) {
    train_task_set.insert(all_pairs[static_cast<std::size_t>(t)].i);
    train_task_set.insert(all_pairs[static_cast<std::size_t>(t)].j);
  }
  std::vector<int> train_tasks(train_task_set.begin(), train_task_set.end());
  std::sort(train_tasks.begin(), train_tasks.end());
  std::vector<Eigen::VectorXd> train_vecs;
  train_vecs.reserve(train_tasks.size());
  for (int t : train_tasks) train_vecs.push_back(tasks.at(t).vec);
  const Standardizer stand = fit_standardizer(train_vecs);

  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(static_cast<std::size_t>(tasks.size()));
  for (const TaskRecord& t : tasks.tasks()) inputs.push_back(stand.apply(t.vec));

  // Volume supervision targets: sample counts normalized by the maximum.
  std::vector<double> normalized_sizes;
  if (config.weights.gamma_a > 0.0) {
    double max_size = 0.0;
    for (const TaskRecord& t : tasks.tasks()) {
      if (!t.sample_count) {
        throw DataError("fit: volume supervision requires a size for task \"" + t.id + "\"");
      }
      max_size = std::max(max_size, *t.sample_count);
    }
    for (const TaskRecord& t : tasks.tasks()) {
      normalized_sizes.push_back(*t.sample_count / max_size);
    }
  }
  const std::vector<double>* sizes_ptr =
      config.weights.gamma_a > 0.0 ? &normalized_sizes : nullptr;

  MapperConfig mcfg;
  mcfg.input_dim = tasks.dim();
  mcfg.hidden = config.hidden;
  mcfg.box_dim = config.box_dim;
  mcfg.size_floor = config.size_floor;
  MapperParams params = init_params(mcfg, config.seed);

  FitResult result;
  result.split = split;

  std::vector<PairExample> val_pairs;
  for (int t : split.val) val_pairs.push_back(all_pairs[static_cast<std::size_t>(t)]);

  Rng shuffle_rng(config.seed ^ kShuffleStream);
  AdamState adam;
  std::vector<int> order = split.train;

  double best_val = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = params.theta();
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_pairs = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<PairExample> batch;
      batch.reserve(end - start);
      for (std::size_t u = start; u < end; ++u) {
        batch.push_back(all_pairs[static_cast<std::size_t>(order[u])]);
      }
      BatchLoss loss;
      try {
        loss = total_loss(params, inputs, batch, config.weights, config.temps, sizes_ptr);
      } catch (const std::invalid_argument&) {
        // Diverged parameters surface as Box invariant violations inside the
        // forward pass; report them as the numeric failure they are.
        throw NumericError("non-finite network output at epoch " + std::to_string(epoch) +
                           "; parameters diverged");
      }
      if (!std::isfinite(loss.value)) {
        diagnose_non_finite(tasks, inputs, batch, params, config.weights, config.temps);
      }
      adam_step(params.theta(), loss.grad, adam, config.learning_rate);
      if (!params.theta().allFinite()) {
        throw NumericError("non-finite parameters after the update at epoch " +
                           std::to_string(epoch) + "; last batch started with pair (" +
                           tasks.at(batch.front().i).id + "," +
                           tasks.at(batch.front().j).id + ")");
      }
      epoch_loss += loss.value * static_cast<double>(batch.size());
      epoch_pairs += batch.size();
    }
    const double train_loss = epoch_loss / static_cast<double>(epoch_pairs);

    double val_loss = train_loss;
    if (!val_pairs.empty()) {
      val_loss = total_loss(params, inputs, val_pairs, config.weights, config.temps,
                            sizes_ptr, /*with_grad=*/false)
                     .value;
    }
    if (!std::isfinite(val_loss)) {
      diagnose_non_finite(tasks, inputs, val_pairs, params, config.weights, config.temps);
    }
    result.log.push_back(EpochRecord{epoch, train_loss, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best_theta = params.theta();
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= config.patience) break;
    }
  }

  params.theta() = best_theta;
  result.checkpoint.version = 1;
  result.checkpoint.params = std::move(params);
  result.checkpoint.stand = stand;
  result.checkpoint.train = config;
  return result;
}

std::vector<Box> embed_novel(const Checkpoint& cp,
                             const std::vector<Eigen::VectorXd>& vectors) {
  std::vector<Box> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(cp.embed(v));
  return out;
}

}  // namespace boxtask
