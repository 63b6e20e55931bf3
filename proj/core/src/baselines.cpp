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

#include "boxtask/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <unordered_set>

#include "boxtask/errors.hpp"
#include "boxtask/rng.hpp"

namespace boxtask {
namespace {

inline double silu(double x) { return x * sigmoid(x); }
inline double silu_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

std::size_t classifier_param_count(const std::vector<Eigen::Index>& sizes) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    total += static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]) +
             static_cast<std::size_t>(sizes[l + 1]);
  }
  return total;
}

struct LayerView {
  Eigen::Map<const RowMajorMatrix> w;
  Eigen::Map<const Eigen::VectorXd> b;
};

LayerView layer_view(const std::vector<Eigen::Index>& sizes, const double* base,
                     std::size_t layer) {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]) +
           static_cast<std::size_t>(sizes[l + 1]);
  }
  const Eigen::Index rows = sizes[layer + 1];
  const Eigen::Index cols = sizes[layer];
  return LayerView{{base + off, rows, cols},
                   {base + off + static_cast<std::size_t>(rows * cols), rows}};
}

// Forward pass returning the pre-sigmoid logit; fills per-layer inputs and
// pre-activations when caches are provided.
double classifier_logit(const PairClassifier& c, const Eigen::VectorXd& x,
                        std::vector<Eigen::VectorXd>* inputs = nullptr,
                        std::vector<Eigen::VectorXd>* preacts = nullptr) {
  if (x.size() != c.layer_sizes.front()) {
    throw std::invalid_argument("pair classifier: input dimension mismatch");
  }
  Eigen::VectorXd h = x;
  const std::size_t layers = c.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerView v = layer_view(c.layer_sizes, c.theta.data(), l);
    if (inputs) inputs->push_back(h);
    Eigen::VectorXd a = v.w * h + v.b;
    if (preacts) preacts->push_back(a);
    if (l + 1 < layers) {
      h = a.unaryExpr(&silu);
    } else {
      h = a;
    }
  }
  return h[0];
}

void classifier_backward(const PairClassifier& c,
                         const std::vector<Eigen::VectorXd>& inputs,
                         const std::vector<Eigen::VectorXd>& preacts, double dlogit,
                         Eigen::VectorXd& grad) {
  const std::size_t layers = c.layer_sizes.size() - 1;
  Eigen::VectorXd da = Eigen::VectorXd::Constant(1, dlogit);
  for (std::size_t l = layers; l-- > 0;) {
    std::size_t off = 0;
    for (std::size_t u = 0; u < l; ++u) {
      off += static_cast<std::size_t>(c.layer_sizes[u + 1]) *
                 static_cast<std::size_t>(c.layer_sizes[u]) +
             static_cast<std::size_t>(c.layer_sizes[u + 1]);
    }
    const Eigen::Index rows = c.layer_sizes[l + 1];
    const Eigen::Index cols = c.layer_sizes[l];
    Eigen::Map<RowMajorMatrix> dw(grad.data() + off, rows, cols);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + off + static_cast<std::size_t>(rows * cols),
                                   rows);
    dw += da * inputs[l].transpose();
    db += da;
    if (l > 0) {
      const LayerView v = layer_view(c.layer_sizes, c.theta.data(), l);
      Eigen::VectorXd dh = v.w.transpose() * da;
      da = dh.cwiseProduct(preacts[l - 1].unaryExpr(&silu_grad));
    }
  }
}

}  // namespace

std::string baseline_method_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kLinear: return "linear";
    case BaselineMethod::kMlp: return "mlp";
    case BaselineMethod::kKl: return "kl";
    case BaselineMethod::kAsymCos: return "asym-cos";
    case BaselineMethod::kAsymEuc: return "asym-euc";
    case BaselineMethod::kRandom: return "random";
  }
  return "linear";
}

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "linear") return BaselineMethod::kLinear;
  if (name == "mlp") return BaselineMethod::kMlp;
  if (name == "kl") return BaselineMethod::kKl;
  if (name == "asym-cos") return BaselineMethod::kAsymCos;
  if (name == "asym-euc") return BaselineMethod::kAsymEuc;
  if (name == "random") return BaselineMethod::kRandom;
  throw std::invalid_argument("unknown baseline method \"" + name + "\"");
}

double PairClassifier::predict(const Eigen::VectorXd& x) const {
  return sigmoid(classifier_logit(*this, x));
}

PairClassifier init_pair_classifier(int input_dim, bool mlp, int hidden,
                                    std::uint64_t seed) {
  if (input_dim < 1 || hidden < 1) {
    throw std::invalid_argument("pair classifier: dimensions must be >= 1");
  }
  PairClassifier c;
  if (mlp) {
    c.layer_sizes = {input_dim, hidden, hidden, hidden, 1};
  } else {
    c.layer_sizes = {input_dim, 1};
  }
  c.theta = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(classifier_param_count(c.layer_sizes)));
  Rng rng(seed);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < c.layer_sizes.size(); ++l) {
    const Eigen::Index rows = c.layer_sizes[l + 1];
    const Eigen::Index cols = c.layer_sizes[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      c.theta[static_cast<Eigen::Index>(off) + i] = rng.uniform(-bound, bound);
    }
    off += static_cast<std::size_t>(rows * cols) + static_cast<std::size_t>(rows);
  }
  return c;
}

double pair_classifier_loss(const PairClassifier& c,
                            const std::vector<std::pair<Eigen::VectorXd, double>>& batch,
                            PairLoss kind, Eigen::VectorXd* grad) {
  if (batch.empty()) return 0.0;
  if (grad != nullptr && grad->size() != c.theta.size()) {
    throw std::invalid_argument("pair_classifier_loss: gradient buffer size mismatch");
  }
  const double norm = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& [x, target] : batch) {
    std::vector<Eigen::VectorXd> inputs, preacts;
    const double logit =
        classifier_logit(c, x, grad ? &inputs : nullptr, grad ? &preacts : nullptr);
    const double s = sigmoid(logit);
    double dlogit = 0.0;
    if (kind == PairLoss::kBinaryCrossEntropy) {
      // -t log s - (1-t) log(1-s), stable via softplus identities.
      loss += softplus(logit) - target * logit;
      dlogit = s - target;
    } else {
      const double diff = s - target;
      loss += diff * diff;
      dlogit = 2.0 * diff * s * (1.0 - s);
    }
    if (grad != nullptr) classifier_backward(c, inputs, preacts, dlogit * norm, *grad);
  }
  return loss * norm;
}

double kl_divergence_gaussian(const Eigen::VectorXd& stats_i,
                              const Eigen::VectorXd& stats_j, KlMode mode,
                              double variance_floor) {
  if (stats_i.size() != stats_j.size()) {
    throw std::invalid_argument("kl_divergence_gaussian: dimension mismatch");
  }
  double kl = 0.0;
  if (mode == KlMode::kClipMeanVar) {
    if (stats_i.size() % 2 != 0) {
      throw std::invalid_argument(
          "kl_divergence_gaussian: mean/variance vectors must have even dimension");
    }
    const Eigen::Index d = stats_i.size() / 2;
    for (Eigen::Index a = 0; a < d; ++a) {
      const double raw_vi = stats_i[d + a];
      const double raw_vj = stats_j[d + a];
      if (raw_vi < 0.0 || raw_vj < 0.0) {
        throw std::invalid_argument("kl_divergence_gaussian: negative variance");
      }
      const double vi = raw_vi + variance_floor;
      const double vj = raw_vj + variance_floor;
      const double dmu = stats_j[a] - stats_i[a];
      kl += 0.5 * (vi / vj + dmu * dmu / vj - 1.0 + std::log(vj / vi));
    }
  } else {
    for (Eigen::Index a = 0; a < stats_i.size(); ++a) {
      // Entries are precisions of zero-mean Gaussians: var = 1/(entry+floor).
      const double vi = 1.0 / (stats_i[a] + variance_floor);
      const double vj = 1.0 / (stats_j[a] + variance_floor);
      kl += 0.5 * (vi / vj - 1.0 + std::log(vj / vi));
    }
  }
  return kl;
}

double asym_similarity(const Eigen::VectorXd& e_i, const Eigen::VectorXd& e_j,
                       const Eigen::VectorXd& e_o, double alpha, bool cosine) {
  if (e_i.size() != e_j.size() || e_i.size() != e_o.size()) {
    throw std::invalid_argument("asym_similarity: dimension mismatch");
  }
  if (cosine) {
    const double ni = e_i.norm(), nj = e_j.norm(), no = e_o.norm();
    if (ni == 0.0 || nj == 0.0 || no == 0.0) {
      throw std::invalid_argument("asym_similarity: zero-norm vector in cosine mode");
    }
    return e_i.dot(e_j) / (ni * nj) - alpha * e_i.dot(e_o) / (ni * no);
  }
  return (e_i - e_j).norm() - alpha * (e_i - e_o).norm();
}

Eigen::VectorXd trivial_embedding(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("trivial_embedding: no vectors");
  const Eigen::Index d = vectors.front().size();
  Eigen::VectorXd out(d);
  std::vector<double> column(vectors.size());
  for (Eigen::Index a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (vectors[i].size() != d) {
        throw std::invalid_argument("trivial_embedding: ragged vectors");
      }
      column[i] = vectors[i][a];
    }
    std::sort(column.begin(), column.end());
    const std::size_t n = column.size();
    out[a] = (n % 2 == 1) ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

ThresholdDecision decide_threshold(const std::vector<double>& scores,
                                   const std::vector<int>& labels, Direction direction) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("decide_threshold: length mismatch");
  }
  long pos = 0, neg = 0;
  for (int l : labels) (l != 0 ? pos : neg)++;
  if (pos == 0 || neg == 0) {
    throw DataError("decide_threshold: need at least one positive and one negative pair");
  }
  const double lo = *std::min_element(scores.begin(), scores.end());
  const double hi = *std::max_element(scores.begin(), scores.end());
  if (lo == hi) {
    std::cerr << "decide_threshold: constant scores; returning the grid extreme\n";
  }

  auto decide = [&](double s, double t) {
    return direction == Direction::kGreaterOrEqual ? (s >= t ? 1 : 0) : (s < t ? 1 : 0);
  };

  ThresholdDecision best{lo, direction, -1.0};
  for (double f : threshold_grid()) {
    const double t = lo + f * (hi - lo);
    std::vector<int> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = decide(scores[i], t);
    const F1Result r = f1_score(labels, preds);
    if (r.f1 > best.train_f1) {
      best.threshold = t;
      best.train_f1 = r.f1;
    }
  }
  return best;
}

std::vector<double> random_scores(std::size_t n, bool binary, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = binary ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.uniform();
  }
  return out;
}

namespace {

struct ResolvedPairs {
  std::vector<PairExample> pairs;
  std::vector<std::string> src, dst;
};

ResolvedPairs gather(const RelationSet& relations, const TaskCollection& tasks,
                     const std::vector<int>& indices) {
  ResolvedPairs out;
  for (int t : indices) {
    const RelationTriple& r = relations.triples.at(static_cast<std::size_t>(t));
    const int i = tasks.index_of(r.src);
    const int j = tasks.index_of(r.dst);
    if (i < 0 || j < 0) throw DataError("baseline: relation id missing from tasks");
    out.pairs.push_back(PairExample{i, j, r.value});
    out.src.push_back(r.src);
    out.dst.push_back(r.dst);
  }
  return out;
}

std::vector<int> novel_pair_indices(const RelationSet& relations, const SplitPlan& split) {
  std::unordered_set<std::string> novel(split.novel_ids.begin(), split.novel_ids.end());
  std::vector<int> indices;
  for (int t = 0; t < static_cast<int>(relations.triples.size()); ++t) {
    const RelationTriple& r = relations.triples[static_cast<std::size_t>(t)];
    if (novel.count(r.src) + novel.count(r.dst) == 1) indices.push_back(t);
  }
  if (indices.empty()) throw DataError("baseline: no pairs touch a novel task");
  return indices;
}

PairClassifier train_classifier(const BaselineConfig& cfg, const TaskCollection& tasks,
                                const std::vector<PairExample>& all_pairs,
                                const SplitPlan& split, const Standardizer& stand,
                                const std::vector<Eigen::VectorXd>& inputs) {
  const bool mlp = cfg.method == BaselineMethod::kMlp;
  const PairLoss loss_kind = cfg.opt.mode == RelationKind::kAffinity
                                 ? PairLoss::kSquaredError
                                 : PairLoss::kBinaryCrossEntropy;
  PairClassifier c = init_pair_classifier(2 * tasks.dim(), mlp, cfg.opt.hidden,
                                          cfg.opt.seed);
  (void)stand;

  auto make_example = [&](const PairExample& p) {
    Eigen::VectorXd x(2 * tasks.dim());
    x << inputs[static_cast<std::size_t>(p.i)], inputs[static_cast<std::size_t>(p.j)];
    return std::make_pair(std::move(x), p.target);
  };

  std::vector<std::pair<Eigen::VectorXd, double>> val_batch;
  for (int t : split.val) val_batch.push_back(make_example(all_pairs[static_cast<std::size_t>(t)]));

  Rng shuffle_rng(cfg.opt.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamState adam;
  std::vector<int> order = split.train;
  double best_val = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = c.theta;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.opt.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.opt.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.opt.batch_size));
      std::vector<std::pair<Eigen::VectorXd, double>> batch;
      for (std::size_t u = start; u < end; ++u) {
        batch.push_back(make_example(all_pairs[static_cast<std::size_t>(order[u])]));
      }
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(c.theta.size());
      const double loss = pair_classifier_loss(c, batch, loss_kind, &grad);
      if (!std::isfinite(loss)) throw NumericError("baseline: non-finite training loss");
      adam_step(c.theta, grad, adam, cfg.opt.learning_rate);
    }
    double val = 0.0;
    if (!val_batch.empty()) {
      val = pair_classifier_loss(c, val_batch, loss_kind);
    } else {
      std::vector<std::pair<Eigen::VectorXd, double>> train_batch;
      for (int t : split.train) {
        train_batch.push_back(make_example(all_pairs[static_cast<std::size_t>(t)]));
      }
      val = pair_classifier_loss(c, train_batch, loss_kind);
    }
    if (val < best_val) {
      best_val = val;
      best_theta = c.theta;
      since_best = 0;
    } else if (++since_best >= cfg.opt.patience) {
      break;
    }
  }
  c.theta = best_theta;
  return c;
}

}  // namespace

EvalReport run_baseline(const BaselineConfig& config, const TaskCollection& tasks,
                        const RelationSet& relations, const SplitPlan& split,
                        bool novel_protocol) {
  const bool affinity = config.opt.mode == RelationKind::kAffinity;
  if (affinity && (config.method == BaselineMethod::kKl ||
                   config.method == BaselineMethod::kAsymCos ||
                   config.method == BaselineMethod::kAsymEuc)) {
    throw std::invalid_argument("baseline " + baseline_method_name(config.method) +
                                " supports hierarchy mode only");
  }

  // Targets: affinity values are squashed for training exactly like the main
  // model; hierarchy/soft values binarize at 0.5.
  RelationSet working = relations;
  if (affinity && config.opt.rescale_k > 0.0) {
    for (RelationTriple& t : working.triples) {
      t.value = rescale_affinity(t.value, config.opt.rescale_k);
    }
  }
  const std::vector<PairExample> all_pairs = resolve_relations(working, tasks);

  const std::vector<int>& eval_indices_ref = split.test;
  std::vector<int> novel_indices;
  if (novel_protocol) novel_indices = novel_pair_indices(relations, split);
  const std::vector<int>& eval_indices = novel_protocol ? novel_indices : eval_indices_ref;
  const std::string split_name = novel_protocol ? "novel" : "test";

  // Standardization mirrors the main model: statistics from training tasks.
  std::unordered_set<int> train_task_set;
  for (int t : split.train) {
    train_task_set.insert(all_pairs[static_cast<std::size_t>(t)].i);
    train_task_set.insert(all_pairs[static_cast<std::size_t>(t)].j);
  }
  std::vector<int> train_tasks(train_task_set.begin(), train_task_set.end());
  std::sort(train_tasks.begin(), train_tasks.end());
  std::vector<Eigen::VectorXd> train_vecs;
  for (int t : train_tasks) train_vecs.push_back(tasks.at(t).vec);

  EvalReport report;
  report.method = baseline_method_name(config.method);
  report.metric = affinity ? "Spearman" : "F1";
  report.split = split_name;

  const ResolvedPairs train = gather(working, tasks, split.train);
  const ResolvedPairs eval = gather(relations, tasks, eval_indices);

  auto finish_hierarchy = [&](const std::vector<double>& train_scores,
                              const std::vector<double>& eval_scores,
                              Direction direction) {
    std::vector<int> train_labels;
    for (const PairExample& p : train.pairs) train_labels.push_back(p.target > 0.5 ? 1 : 0);
    const ThresholdDecision dec = decide_threshold(train_scores, train_labels, direction);
    std::vector<int> truth, preds;
    for (const PairExample& p : eval.pairs) truth.push_back(p.target > 0.5 ? 1 : 0);
    for (double s : eval_scores) {
      preds.push_back(direction == Direction::kGreaterOrEqual ? (s >= dec.threshold ? 1 : 0)
                                                              : (s < dec.threshold ? 1 : 0));
    }
    const F1Result f1 = f1_score(truth, preds);
    report.value = f1.f1;
    report.precision = f1.precision;
    report.recall = f1.recall;
    report.threshold = dec.threshold;
    report.direction = direction == Direction::kGreaterOrEqual ? "ge" : "lt";
    for (std::size_t p = 0; p < eval.pairs.size(); ++p) {
      report.pairs.push_back(PairOutcome{eval.src[p], eval.dst[p], eval.pairs[p].target,
                                         eval_scores[p], static_cast<double>(preds[p])});
    }
  };

  auto finish_affinity = [&](const std::vector<double>& eval_preds) {
    std::vector<double> truth;
    for (const PairExample& p : eval.pairs) truth.push_back(p.target);
    report.value = spearman_rho(truth, eval_preds);
    report.direction = "ge";
    for (std::size_t p = 0; p < eval.pairs.size(); ++p) {
      report.pairs.push_back(PairOutcome{eval.src[p], eval.dst[p], truth[p],
                                         eval_preds[p], eval_preds[p]});
    }
  };

  switch (config.method) {
    case BaselineMethod::kLinear:
    case BaselineMethod::kMlp: {
      const Standardizer stand = fit_standardizer(train_vecs);
      std::vector<Eigen::VectorXd> inputs;
      for (const TaskRecord& t : tasks.tasks()) inputs.push_back(stand.apply(t.vec));
      const PairClassifier c =
          train_classifier(config, tasks, all_pairs, split, stand, inputs);
      auto score_pairs = [&](const std::vector<PairExample>& pairs) {
        std::vector<double> scores;
        scores.reserve(pairs.size());
        for (const PairExample& p : pairs) {
          Eigen::VectorXd x(2 * tasks.dim());
          x << inputs[static_cast<std::size_t>(p.i)], inputs[static_cast<std::size_t>(p.j)];
          scores.push_back(c.predict(x));
        }
        return scores;
      };
      if (affinity) {
        std::vector<double> preds = score_pairs(eval.pairs);
        if (config.opt.rescale_k > 0.0) {
          for (double& p : preds) p = inverse_rescale_affinity(p, config.opt.rescale_k);
        }
        finish_affinity(preds);
      } else {
        finish_hierarchy(score_pairs(train.pairs), score_pairs(eval.pairs),
                         Direction::kGreaterOrEqual);
      }
      break;
    }
    case BaselineMethod::kKl: {
      auto score_pairs = [&](const std::vector<PairExample>& pairs) {
        std::vector<double> scores;
        for (const PairExample& p : pairs) {
          scores.push_back(kl_divergence_gaussian(tasks.at(p.i).vec, tasks.at(p.j).vec,
                                                  config.kl_mode, config.variance_floor));
        }
        return scores;
      };
      finish_hierarchy(score_pairs(train.pairs), score_pairs(eval.pairs), Direction::kLess);
      report.notes = config.kl_mode == KlMode::kClipMeanVar
                         ? "Gaussians from [mean||variance] halves"
                         : "Gaussians from precision entries";
      break;
    }
    case BaselineMethod::kAsymCos:
    case BaselineMethod::kAsymEuc: {
      const bool cosine = config.method == BaselineMethod::kAsymCos;
      // Similarity scores predict positives above the threshold; distance
      // scores predict positives below it.
      const Direction direction =
          cosine ? Direction::kGreaterOrEqual : Direction::kLess;
      const Eigen::VectorXd e_o = trivial_embedding(train_vecs);
      auto score_pairs = [&](const std::vector<PairExample>& pairs, double alpha) {
        std::vector<double> scores;
        for (const PairExample& p : pairs) {
          scores.push_back(
              asym_similarity(tasks.at(p.i).vec, tasks.at(p.j).vec, e_o, alpha, cosine));
        }
        return scores;
      };
      std::vector<int> train_labels;
      for (const PairExample& p : train.pairs) train_labels.push_back(p.target > 0.5 ? 1 : 0);
      double best_alpha = config.alpha_grid.front();
      double best_f1 = -1.0;
      for (double alpha : config.alpha_grid) {
        const ThresholdDecision dec =
            decide_threshold(score_pairs(train.pairs, alpha), train_labels, direction);
        if (dec.train_f1 > best_f1) {
          best_f1 = dec.train_f1;
          best_alpha = alpha;
        }
      }
      finish_hierarchy(score_pairs(train.pairs, best_alpha),
                       score_pairs(eval.pairs, best_alpha), direction);
      report.notes = "alpha=" + std::to_string(best_alpha) +
                     " (tuned on train); reference embedding = componentwise median of "
                     "training tasks";
      break;
    }
    case BaselineMethod::kRandom: {
      const std::vector<double> scores =
          random_scores(eval.pairs.size(), !affinity, config.opt.seed);
      if (affinity) {
        finish_affinity(scores);
      } else {
        std::vector<int> truth, preds;
        for (const PairExample& p : eval.pairs) truth.push_back(p.target > 0.5 ? 1 : 0);
        for (double s : scores) preds.push_back(s > 0.5 ? 1 : 0);
        const F1Result f1 = f1_score(truth, preds);
        report.value = f1.f1;
        report.precision = f1.precision;
        report.recall = f1.recall;
        report.threshold = 0.5;
        report.direction = "ge";
        for (std::size_t p = 0; p < eval.pairs.size(); ++p) {
          report.pairs.push_back(PairOutcome{eval.src[p], eval.dst[p],
                                             eval.pairs[p].target, scores[p],
                                             static_cast<double>(preds[p])});
        }
      }
      break;
    }
  }
  return report;
}

}  // namespace boxtask
