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

#pragma once

#include <string>
#include <vector>

#include "boxtask/data.hpp"
#include "boxtask/trainer.hpp"

namespace boxtask {

struct F1Result {
  double precision;
  double recall;
  double f1;
};

/// Standard precision/recall/F1 over binary labels. Conventions for empty
/// denominators: precision is 0 with no positive predictions, and F1 is 0
/// when precision + recall is 0. Requires at least one positive true label.
F1Result f1_score(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Spearman rank correlation with average ranks for ties. Requires length
/// >= 3 and nonconstant ranks on both sides.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

/// Hard directed-overlap scores for a list of index pairs over fixed boxes.
std::vector<double> containment_scores(const std::vector<Box>& boxes,
                                       const std::vector<PairExample>& pairs);

/// Binarize scores at a threshold in (0,1): predict 1 when score >= threshold.
std::vector<int> predict_containment(const std::vector<double>& scores, double threshold);

/// Fixed calibration grid (0.05, 0.10, ..., 0.95).
std::vector<double> threshold_grid();

/// Picks the grid threshold maximizing F1 on the given labeled scores; ties
/// resolve to the smallest threshold. Requires at least one positive and one
/// negative label. Emits a diagnostic on degenerate (all-identical) scores.
double calibrate_threshold(const std::vector<double>& scores,
                           const std::vector<int>& labels);

struct PairOutcome {
  std::string src;
  std::string dst;
  double truth;
  double score;
  double predicted;  // binarized decision for hierarchy, value for affinity
};

/// Evaluation outcome for one method on one split.
struct EvalReport {
  std::string method;
  std::string metric;  // "F1" or "Spearman"
  std::string split;
  double value = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;
  std::string direction = "ge";  // score comparison that predicts a positive
  std::vector<PairOutcome> pairs;
  std::string notes;
};

/// Writes the report as a JSON document at `path` plus a flat per-pair CSV
/// (src,dst,true,pred,score) at `path` + ".pairs.csv". `config_echo` is an
/// arbitrary JSON string recorded verbatim for provenance.
void write_report(const std::string& path, const EvalReport& report,
                  const std::string& config_echo);

/// Scores the held-out pairs of a trained model. Hierarchy and soft modes
/// calibrate a containment threshold on the training pairs and report F1;
/// affinity mode reports Spearman rank correlation on the original target
/// scale (predictions are un-squashed through the stored rescale to get
/// there; ranks are unaffected either way).
EvalReport evaluate_existing(const Checkpoint& cp, const TaskCollection& tasks,
                             const RelationSet& relations, const SplitPlan& split);

/// Both-direction novel protocol: embeds the held-out tasks with the frozen
/// checkpoint and scores every (existing, novel) and (novel, existing) pair
/// found in the relations, using the threshold calibrated on training pairs.
EvalReport evaluate_novel(const Checkpoint& cp, const TaskCollection& tasks,
                          const RelationSet& relations, const SplitPlan& split);

struct NeighborhoodRow {
  int m;
  double mean_center_distance;
  double mean_graph_distance;
};

/// For each neighborhood size m in [1, max_m]: the average over tasks of the
/// mean center distance to the m nearest boxes and the mean symmetric tree
/// distance to those same m tasks. Parent links in the collection define the
/// tree. Requires max_m < task count.
std::vector<NeighborhoodRow> distance_vs_graph_distance(
    const std::vector<Box>& boxes, const TaskCollection& tasks, int max_m);

void write_neighborhood_table(const std::string& path,
                              const std::vector<NeighborhoodRow>& rows);

}  // namespace boxtask
