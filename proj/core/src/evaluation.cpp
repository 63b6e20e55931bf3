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

#include "boxtask/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "boxtask/errors.hpp"
#include "boxtask/parallel.hpp"
#include "boxtask/textio.hpp"

namespace boxtask {
namespace {

using nlohmann::json;

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mean rank
    for (std::size_t u = i; u <= j; ++u) ranks[idx[u]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) {
    throw std::invalid_argument("spearman_rho: zero variance in ranks");
  }
  return cov / std::sqrt(va * vb);
}

// Clamp into the open interval needed by the inverse squash.
double clamp_below_one(double v) {
  const double top = std::nextafter(1.0, 0.0);
  return v > top ? top : (v < -top ? -top : v);
}

}  // namespace

F1Result f1_score(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("f1_score: label/prediction length mismatch");
  }
  long tp = 0, fp = 0, fn = 0, pos = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] != 0;
    const bool p = predicted[i] != 0;
    if (t) ++pos;
    if (t && p) ++tp;
    if (!t && p) ++fp;
    if (t && !p) ++fn;
  }
  if (pos == 0) throw std::invalid_argument("f1_score: no positive true labels");
  F1Result r{};
  r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("spearman_rho: need at least 3 points");
  return pearson(average_ranks(x), average_ranks(y));
}

std::vector<double> containment_scores(const std::vector<Box>& boxes,
                                       const std::vector<PairExample>& pairs) {
  const int n = static_cast<int>(boxes.size());
  for (const PairExample& pr : pairs) {
    if (pr.i < 0 || pr.i >= n || pr.j < 0 || pr.j >= n) {
      throw std::invalid_argument("containment_scores: pair index out of range");
    }
  }
  std::vector<double> scores(pairs.size(), 0.0);
  Temperatures temps;  // unused by the hard mode
  parallel_chunks(pairs.size(), 256, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const PairExample& pr = pairs[p];
      scores[p] = overlap_fraction(boxes[static_cast<std::size_t>(pr.i)],
                                   boxes[static_cast<std::size_t>(pr.j)], temps,
                                   OverlapMode::kHard);
    }
  });
  return scores;
}

std::vector<int> predict_containment(const std::vector<double>& scores, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("predict_containment: threshold must be in (0,1)");
  }
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

std::vector<double> threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

double calibrate_threshold(const std::vector<double>& scores,
                           const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("calibrate_threshold: length mismatch");
  }
  long pos = 0, neg = 0;
  for (int l : labels) (l != 0 ? pos : neg)++;
  if (pos == 0 || neg == 0) {
    throw DataError("calibrate_threshold: need at least one positive and one negative pair");
  }
  const bool degenerate =
      std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores[0]; });
  if (degenerate) {
    std::cerr << "calibrate_threshold: all scores identical; returning grid minimum\n";
  }
  double best_t = 0.0;
  double best_f1 = -1.0;
  for (double t : threshold_grid()) {
    const F1Result r = f1_score(labels, predict_containment(scores, t));
    if (r.f1 > best_f1) {
      best_f1 = r.f1;
      best_t = t;
    }
  }
  return best_t;
}

namespace {

struct ScoredPairs {
  std::vector<PairExample> pairs;   // indices into the task collection
  std::vector<std::string> src, dst;
};

ScoredPairs gather(const RelationSet& relations, const TaskCollection& tasks,
                   const std::vector<int>& triple_indices) {
  ScoredPairs out;
  for (int t : triple_indices) {
    const RelationTriple& r = relations.triples.at(static_cast<std::size_t>(t));
    const int i = tasks.index_of(r.src);
    const int j = tasks.index_of(r.dst);
    if (i < 0 || j < 0) throw DataError("evaluation: relation id missing from tasks");
    out.pairs.push_back(PairExample{i, j, r.value});
    out.src.push_back(r.src);
    out.dst.push_back(r.dst);
  }
  return out;
}

std::vector<Box> embed_all(const Checkpoint& cp, const TaskCollection& tasks) {
  if (tasks.dim() != cp.params.config().input_dim) {
    throw DataError("evaluation: task vectors have dimension " +
                    std::to_string(tasks.dim()) + " but the checkpoint expects " +
                    std::to_string(cp.params.config().input_dim));
  }
  std::vector<Box> boxes(static_cast<std::size_t>(tasks.size()));
  parallel_chunks(boxes.size(), 16, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      boxes[i] = cp.embed(tasks.at(static_cast<int>(i)).vec);
    }
  });
  return boxes;
}

double calibrated_threshold_on_train(const Checkpoint& cp, const std::vector<Box>& boxes,
                                     const RelationSet& relations,
                                     const TaskCollection& tasks, const SplitPlan& split) {
  const ScoredPairs train = gather(relations, tasks, split.train);
  const std::vector<double> scores = containment_scores(boxes, train.pairs);
  std::vector<int> labels;
  labels.reserve(train.pairs.size());
  for (const PairExample& p : train.pairs) labels.push_back(p.target > 0.5 ? 1 : 0);
  (void)cp;
  return calibrate_threshold(scores, labels);
}

EvalReport containment_report(const Checkpoint& cp, const TaskCollection& tasks,
                              const RelationSet& relations, const SplitPlan& split,
                              const std::vector<int>& eval_indices,
                              const std::string& split_name) {
  const std::vector<Box> boxes = embed_all(cp, tasks);
  const double threshold =
      calibrated_threshold_on_train(cp, boxes, relations, tasks, split);

  const ScoredPairs eval = gather(relations, tasks, eval_indices);
  const std::vector<double> scores = containment_scores(boxes, eval.pairs);
  const std::vector<int> preds = predict_containment(scores, threshold);
  std::vector<int> truth;
  truth.reserve(eval.pairs.size());
  for (const PairExample& p : eval.pairs) truth.push_back(p.target > 0.5 ? 1 : 0);
  const F1Result f1 = f1_score(truth, preds);

  EvalReport report;
  report.method = "task2box";
  report.metric = "F1";
  report.split = split_name;
  report.value = f1.f1;
  report.precision = f1.precision;
  report.recall = f1.recall;
  report.threshold = threshold;
  report.direction = "ge";
  if (relations.kind == RelationKind::kSoft) {
    report.notes = "soft labels binarized at 0.5 for containment decisions";
  }
  for (std::size_t p = 0; p < eval.pairs.size(); ++p) {
    report.pairs.push_back(PairOutcome{eval.src[p], eval.dst[p], eval.pairs[p].target,
                                       scores[p], static_cast<double>(preds[p])});
  }
  return report;
}

EvalReport affinity_report(const Checkpoint& cp, const TaskCollection& tasks,
                           const RelationSet& relations, const SplitPlan& split,
                           const std::vector<int>& eval_indices,
                           const std::string& split_name) {
  const std::vector<Box> boxes = embed_all(cp, tasks);
  const ScoredPairs eval = gather(relations, tasks, eval_indices);
  const std::vector<double> scores = containment_scores(boxes, eval.pairs);

  // Undo the training-time squash so the report lives on the original
  // affinity scale. The inverse is strictly increasing, so ranks (and
  // therefore the correlation) are identical either way.
  const double k = cp.train.rescale_k;
  std::vector<double> preds;
  std::vector<double> truth;
  preds.reserve(scores.size());
  truth.reserve(scores.size());
  for (std::size_t p = 0; p < scores.size(); ++p) {
    const double pred =
        k > 0.0 ? inverse_rescale_affinity(clamp_below_one(scores[p]), k) : scores[p];
    preds.push_back(pred);
    truth.push_back(eval.pairs[p].target);
  }
  const double rho = spearman_rho(truth, preds);

  EvalReport report;
  report.method = "task2box";
  report.metric = "Spearman";
  report.split = split_name;
  report.value = rho;
  report.direction = "ge";
  for (std::size_t p = 0; p < eval.pairs.size(); ++p) {
    report.pairs.push_back(PairOutcome{eval.src[p], eval.dst[p], truth[p], scores[p],
                                       preds[p]});
  }
  return report;
}

}  // namespace

EvalReport evaluate_existing(const Checkpoint& cp, const TaskCollection& tasks,
                             const RelationSet& relations, const SplitPlan& split) {
  if (split.test.empty()) throw DataError("evaluate_existing: empty test split");
  if (relations.kind == RelationKind::kAffinity) {
    return affinity_report(cp, tasks, relations, split, split.test, "test");
  }
  return containment_report(cp, tasks, relations, split, split.test, "test");
}

EvalReport evaluate_novel(const Checkpoint& cp, const TaskCollection& tasks,
                          const RelationSet& relations, const SplitPlan& split) {
  if (split.novel_ids.empty()) throw DataError("evaluate_novel: nothing to evaluate");
  std::unordered_set<std::string> novel(split.novel_ids.begin(), split.novel_ids.end());
  for (const std::string& id : split.novel_ids) {
    if (tasks.index_of(id) < 0) throw DataError("evaluate_novel: unknown novel id " + id);
  }
  // Both directions: any observed pair with exactly one novel endpoint.
  std::vector<int> indices;
  for (int t = 0; t < static_cast<int>(relations.triples.size()); ++t) {
    const RelationTriple& r = relations.triples[static_cast<std::size_t>(t)];
    if (novel.count(r.src) + novel.count(r.dst) == 1) indices.push_back(t);
  }
  if (indices.empty()) throw DataError("evaluate_novel: no pairs touch a novel task");

  EvalReport report =
      relations.kind == RelationKind::kAffinity
          ? affinity_report(cp, tasks, relations, split, indices, "novel")
          : containment_report(cp, tasks, relations, split, indices, "novel");
  return report;
}

std::vector<NeighborhoodRow> distance_vs_graph_distance(
    const std::vector<Box>& boxes, const TaskCollection& tasks, int max_m) {
  const int n = tasks.size();
  if (static_cast<int>(boxes.size()) != n) {
    throw std::invalid_argument("distance_vs_graph_distance: boxes/tasks size mismatch");
  }
  if (max_m < 1 || max_m >= n) {
    throw std::invalid_argument(
        "distance_vs_graph_distance: need 1 <= max_m < task count");
  }

  // Undirected taxonomy adjacency. Parentless tasks are joined through a
  // virtual root (index n) so distances stay finite across subtrees.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    const TaskRecord& t = tasks.at(i);
    const int p = t.parent ? tasks.index_of(*t.parent) : n;
    adj[static_cast<std::size_t>(i)].push_back(p);
    adj[static_cast<std::size_t>(p)].push_back(i);
  }

  auto bfs = [&](int start) {
    std::vector<int> dist(static_cast<std::size_t>(n) + 1, -1);
    std::deque<int> queue{start};
    dist[static_cast<std::size_t>(start)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist;
  };

  std::vector<NeighborhoodRow> rows;
  std::vector<double> center_sum(static_cast<std::size_t>(max_m), 0.0);
  std::vector<double> graph_sum(static_cast<std::size_t>(max_m), 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> tree_dist = bfs(i);
    std::vector<std::pair<double, int>> neighbors;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      neighbors.emplace_back(
          center_distance(boxes[static_cast<std::size_t>(i)],
                          boxes[static_cast<std::size_t>(j)]),
          j);
    }
    std::sort(neighbors.begin(), neighbors.end());
    double c = 0.0, g = 0.0;
    for (int m = 1; m <= max_m; ++m) {
      const auto& [cd, j] = neighbors[static_cast<std::size_t>(m - 1)];
      c += cd;
      g += static_cast<double>(tree_dist[static_cast<std::size_t>(j)]);
      center_sum[static_cast<std::size_t>(m - 1)] += c / m;
      graph_sum[static_cast<std::size_t>(m - 1)] += g / m;
    }
  }
  for (int m = 1; m <= max_m; ++m) {
    rows.push_back(NeighborhoodRow{m, center_sum[static_cast<std::size_t>(m - 1)] / n,
                                   graph_sum[static_cast<std::size_t>(m - 1)] / n});
  }
  return rows;
}

void write_neighborhood_table(const std::string& path,
                              const std::vector<NeighborhoodRow>& rows) {
  std::ostringstream out;
  out << "m,mean_center_distance,mean_graph_distance\n";
  for (const NeighborhoodRow& r : rows) {
    out << r.m << ',' << format_double(r.mean_center_distance) << ','
        << format_double(r.mean_graph_distance) << '\n';
  }
  write_text_file(path, out.str());
}

void write_report(const std::string& path, const EvalReport& report,
                  const std::string& config_echo) {
  json doc;
  doc["version"] = 1;
  doc["kind"] = "boxtask.report";
  doc["method"] = report.method;
  doc["metric"] = report.metric;
  doc["split"] = report.split;
  doc["value"] = report.value;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["threshold"] = report.threshold;
  doc["direction"] = report.direction;
  doc["pair_count"] = report.pairs.size();
  if (!report.notes.empty()) doc["notes"] = report.notes;
  if (!config_echo.empty()) {
    try {
      doc["config"] = json::parse(config_echo);
    } catch (const json::exception&) {
      doc["config"] = config_echo;
    }
  }
  write_text_file(path, doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "src,dst,true,pred,score\n";
  for (const PairOutcome& p : report.pairs) {
    csv << p.src << ',' << p.dst << ',' << format_double(p.truth) << ','
        << format_double(p.predicted) << ',' << format_double(p.score) << '\n';
  }
  write_text_file(path + ".pairs.csv", csv.str());
}

}  // namespace boxtask
