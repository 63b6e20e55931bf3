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

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boxtask/box.hpp"

namespace boxtask {

/// A named task: its base-representation vector plus optional taxonomy and
/// size metadata.
struct TaskRecord {
  std::string id;
  Eigen::VectorXd vec;
  std::optional<std::string> parent;
  std::optional<std::string> group;
  std::optional<double> sample_count;
};

/// Validated set of tasks: unique ids, one shared vector dimension, acyclic
/// parent links.
class TaskCollection {
 public:
  TaskCollection() = default;
  static TaskCollection from_records(std::vector<TaskRecord> records);

  const std::vector<TaskRecord>& tasks() const { return tasks_; }
  int size() const { return static_cast<int>(tasks_.size()); }
  int dim() const { return tasks_.empty() ? 0 : static_cast<int>(tasks_.front().vec.size()); }

  /// Index of an id, or -1.
  int index_of(const std::string& id) const;
  const TaskRecord& at(int index) const { return tasks_.at(static_cast<std::size_t>(index)); }

  /// Ids that are nobody's parent.
  std::vector<std::string> leaf_ids() const;

 private:
  std::vector<TaskRecord> tasks_;
  std::unordered_map<std::string, int> index_;
};

enum class RelationKind { kHierarchy, kAffinity, kSoft };

std::string relation_kind_name(RelationKind kind);
RelationKind parse_relation_kind(const std::string& name);

struct RelationTriple {
  std::string src;
  std::string dst;
  double value;  // in [0, 1]
};

/// Directed labeled pairs. The triples listed here are exactly the observed
/// pairs; anything absent is unobserved.
struct RelationSet {
  RelationKind kind = RelationKind::kHierarchy;
  std::vector<RelationTriple> triples;
};

/// A relation triple resolved to task indices.
struct PairExample {
  int i;
  int j;
  double target;
};

/// Validates values, self-pair rules, and id resolution; returns index pairs.
std::vector<PairExample> resolve_relations(const RelationSet& relations,
                                           const TaskCollection& tasks);

// ---------------------------------------------------------------------------
// File formats. All files are plain text, newline-delimited, UTF-8.
//
// Tasks: one JSON object per line:
//   {"id":"a","vec":[0.5,1],"parent":"b","group":"g","size":120}
//   (parent/group/size optional)
// Relations: CSV with a mandatory kind header:
//   kind,hierarchy
//   src,dst,0
// Boxes: one JSON object per line:
//   {"id":"a","min":[0,0],"size":[1,1],"group":"g"}
// Sample sets: one comma-separated vector per line.
//
// Floats are written with the shortest decimal representation that
// round-trips, so write-then-read is lossless.
// ---------------------------------------------------------------------------

TaskCollection read_tasks(const std::string& path);
void write_tasks(const std::string& path, const TaskCollection& tasks);

RelationSet read_relations(const std::string& path);
void write_relations(const std::string& path, const RelationSet& relations);

struct EmbeddedBox {
  std::string id;
  Box box;
  std::optional<std::string> group;
};

std::vector<EmbeddedBox> read_boxes(const std::string& path);
void write_boxes(const std::string& path, const std::vector<EmbeddedBox>& boxes);

std::vector<Eigen::VectorXd> read_sample_vectors(const std::string& path);

// ---------------------------------------------------------------------------
// Base-representation construction.
// ---------------------------------------------------------------------------

/// Componentwise mean and population (1/N) variance of per-sample vectors.
std::pair<Eigen::VectorXd, Eigen::VectorXd> aggregate_sample_embeddings(
    const std::vector<Eigen::VectorXd>& samples);

/// Attribute table: header "attributes,<t>", then "Name,b0,...,b_{t-1}" rows
/// of strictly 0/1 entries. Returns tasks with t-dimensional binary vectors.
TaskCollection load_attribute_table(const std::string& path);

/// Squashing rescale x' = tanh(k*x) used to spread out right-skewed affinity
/// values before training. Output is clamped strictly below 1 so the inverse
/// always exists.
double rescale_affinity(double x, double k = 50.0);
/// Inverse atanh(x')/k. Throws for |x'| >= 1.
double inverse_rescale_affinity(double xp, double k = 50.0);

/// Soft directed overlap labels between sample sets: the fraction of one
/// set's vectors whose nearest neighbor in the other set is closer than the
/// other set's mean pairwise distance. Includes self-pairs. Rejects sets
/// with fewer than two samples or zero mean pairwise distance, where the
/// threshold is meaningless.
RelationSet soft_overlap_labels(
    const std::vector<std::pair<std::string, std::vector<Eigen::VectorXd>>>& sample_sets);

// ---------------------------------------------------------------------------
// Synthetic fixtures.
// ---------------------------------------------------------------------------

struct TaxonomyParams {
  int depth = 3;          // levels below the (virtual, non-task) root
  int branching = 3;      // children per internal node
  int leaf_count = 3;     // leaves per bottom-level parent
  int dim = 16;
  double noise = 0.05;    // stddev added to leaf vectors
  std::uint64_t seed = 0;
};

struct SyntheticTaxonomy {
  TaskCollection tasks;     // parent links encode the tree
  RelationSet relations;    // every ordered non-self pair, 1 iff descendant->ancestor
};

/// Hierarchical Gaussian construction: each node's prototype is its parent's
/// prototype plus an offset whose scale halves per level. Internal nodes are
/// tasks too and use their prototype verbatim; leaves add noise.
SyntheticTaxonomy generate_synthetic_taxonomy(const TaxonomyParams& params);

struct AffinityParams {
  int task_count = 20;
  int dim = 8;
  int box_dim = 2;        // in {2, 3, 5}
  std::uint64_t seed = 0;
};

struct SyntheticAffinity {
  TaskCollection tasks;     // vectors are noisy encodings of the planted boxes
  RelationSet relations;    // affinity(i,j) = directed overlap of planted boxes
  std::vector<Box> planted;
};

SyntheticAffinity generate_synthetic_affinity(const AffinityParams& params);

}  // namespace boxtask
