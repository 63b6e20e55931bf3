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

#include "boxtask/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "boxtask/errors.hpp"
#include "boxtask/parallel.hpp"
#include "boxtask/rng.hpp"
#include "boxtask/textio.hpp"

namespace boxtask {
namespace {

using nlohmann::json;

void validate_id(const std::string& id, const std::string& context) {
  if (id.empty()) throw DataError(context + ": empty task id");
  if (id.find_first_of(",\n\r") != std::string::npos) {
    throw DataError(context + ": task id \"" + id + "\" contains a comma or newline");
  }
}

Eigen::VectorXd json_to_vector(const json& arr, const std::string& context) {
  if (!arr.is_array() || arr.empty()) {
    throw DataError(context + ": expected a non-empty numeric array");
  }
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& e : arr) {
    if (!e.is_number()) throw DataError(context + ": non-numeric vector entry");
    v[i++] = e.get<double>();
  }
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// Iterates non-empty lines with 1-based line numbers.
template <typename Fn>
void for_each_line(const std::string& text, Fn fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line_no, line);
    if (end == text.size()) break;
    start = end + 1;
  }
}

}  // namespace

TaskCollection TaskCollection::from_records(std::vector<TaskRecord> records) {
  TaskCollection c;
  c.tasks_ = std::move(records);
  const int n = static_cast<int>(c.tasks_.size());
  Eigen::Index dim = n > 0 ? c.tasks_.front().vec.size() : 0;
  for (int i = 0; i < n; ++i) {
    const TaskRecord& t = c.tasks_[static_cast<std::size_t>(i)];
    validate_id(t.id, "task collection");
    if (!c.index_.emplace(t.id, i).second) {
      throw DataError("duplicate task id \"" + t.id + "\"");
    }
    if (t.vec.size() != dim) {
      throw DataError("task \"" + t.id + "\" has vector dimension " +
                      std::to_string(t.vec.size()) + ", expected " + std::to_string(dim));
    }
    for (Eigen::Index d = 0; d < t.vec.size(); ++d) {
      if (!std::isfinite(t.vec[d])) {
        throw DataError("task \"" + t.id + "\" has a non-finite vector entry");
      }
    }
  }
  // Parent links must resolve and be acyclic.
  for (const TaskRecord& t : c.tasks_) {
    if (!t.parent) continue;
    int steps = 0;
    const TaskRecord* cur = &t;
    while (cur->parent) {
      const int pi = c.index_of(*cur->parent);
      if (pi < 0) {
        throw DataError("task \"" + t.id + "\" references unknown parent \"" +
                        *cur->parent + "\"");
      }
      cur = &c.tasks_[static_cast<std::size_t>(pi)];
      if (++steps > n) {
        throw DataError("cyclic parent links involving task \"" + t.id + "\"");
      }
    }
  }
  return c;
}

int TaskCollection::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> TaskCollection::leaf_ids() const {
  std::unordered_set<std::string> parents;
  for (const TaskRecord& t : tasks_) {
    if (t.parent) parents.insert(*t.parent);
  }
  std::vector<std::string> leaves;
  for (const TaskRecord& t : tasks_) {
    if (parents.find(t.id) == parents.end()) leaves.push_back(t.id);
  }
  return leaves;
}

std::string relation_kind_name(RelationKind kind) {
  switch (kind) {
    case RelationKind::kHierarchy: return "hierarchy";
    case RelationKind::kAffinity: return "affinity";
    case RelationKind::kSoft: return "soft";
  }
  return "hierarchy";
}

RelationKind parse_relation_kind(const std::string& name) {
  if (name == "hierarchy") return RelationKind::kHierarchy;
  if (name == "affinity") return RelationKind::kAffinity;
  if (name == "soft") return RelationKind::kSoft;
  throw DataError("unknown relation kind \"" + name + "\"");
}

std::vector<PairExample> resolve_relations(const RelationSet& relations,
                                           const TaskCollection& tasks) {
  std::vector<PairExample> out;
  out.reserve(relations.triples.size());
  for (const RelationTriple& t : relations.triples) {
    const int i = tasks.index_of(t.src);
    if (i < 0) throw DataError("relation references unknown task id \"" + t.src + "\"");
    const int j = tasks.index_of(t.dst);
    if (j < 0) throw DataError("relation references unknown task id \"" + t.dst + "\"");
    if (!(t.value >= 0.0 && t.value <= 1.0)) {
      throw DataError("relation (" + t.src + "," + t.dst + ") has value outside [0,1]");
    }
    if (relations.kind == RelationKind::kHierarchy && i == j) {
      throw DataError("hierarchy relation contains self-pair for \"" + t.src + "\"");
    }
    out.push_back(PairExample{i, j, t.value});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

TaskCollection read_tasks(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<TaskRecord> records;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string ctx = path + " line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(ctx + ": malformed JSON record (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(ctx + ": expected a JSON object");
    TaskRecord rec;
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw DataError(ctx + ": missing string field \"id\"");
    }
    rec.id = obj["id"].get<std::string>();
    if (!obj.contains("vec")) throw DataError(ctx + ": missing field \"vec\"");
    rec.vec = json_to_vector(obj["vec"], ctx);
    if (obj.contains("parent")) {
      if (!obj["parent"].is_string()) throw DataError(ctx + ": \"parent\" must be a string");
      rec.parent = obj["parent"].get<std::string>();
    }
    if (obj.contains("group")) {
      if (!obj["group"].is_string()) throw DataError(ctx + ": \"group\" must be a string");
      rec.group = obj["group"].get<std::string>();
    }
    if (obj.contains("size")) {
      if (!obj["size"].is_number()) throw DataError(ctx + ": \"size\" must be a number");
      rec.sample_count = obj["size"].get<double>();
      if (!(*rec.sample_count > 0.0)) throw DataError(ctx + ": \"size\" must be > 0");
    }
    records.push_back(std::move(rec));
  });
  return TaskCollection::from_records(std::move(records));
}

void write_tasks(const std::string& path, const TaskCollection& tasks) {
  std::ostringstream out;
  for (const TaskRecord& t : tasks.tasks()) {
    json obj;
    obj["id"] = t.id;
    obj["vec"] = vector_to_json(t.vec);
    if (t.parent) obj["parent"] = *t.parent;
    if (t.group) obj["group"] = *t.group;
    if (t.sample_count) obj["size"] = *t.sample_count;
    out << obj.dump() << '\n';
  }
  write_text_file(path, out.str());
}

RelationSet read_relations(const std::string& path) {
  const std::string text = read_text_file(path);
  RelationSet set;
  bool have_header = false;
  std::unordered_set<std::string> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string ctx = path + " line " + std::to_string(line_no);
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "kind") {
        throw DataError(ctx + ": expected header \"kind,<hierarchy|affinity|soft>\"");
      }
      set.kind = parse_relation_kind(std::string(fields[1]));
      have_header = true;
      return;
    }
    if (fields.size() != 3) {
      throw DataError(ctx + ": expected \"src,dst,value\" with exactly 3 fields");
    }
    RelationTriple t;
    t.src = std::string(fields[0]);
    t.dst = std::string(fields[1]);
    validate_id(t.src, ctx);
    validate_id(t.dst, ctx);
    t.value = parse_double(fields[2], ctx);
    if (!(t.value >= 0.0 && t.value <= 1.0)) {
      throw DataError(ctx + ": relation value " + std::string(fields[2]) +
                      " outside [0,1]");
    }
    if (set.kind == RelationKind::kHierarchy && t.src == t.dst) {
      throw DataError(ctx + ": hierarchy relations cannot contain self-pairs");
    }
    if (!seen.insert(t.src + '\x1f' + t.dst).second) {
      throw DataError(ctx + ": duplicate pair (" + t.src + "," + t.dst + ")");
    }
    set.triples.push_back(std::move(t));
  });
  if (!have_header) throw DataError(path + ": missing kind header");
  return set;
}

void write_relations(const std::string& path, const RelationSet& relations) {
  std::ostringstream out;
  out << "kind," << relation_kind_name(relations.kind) << '\n';
  for (const RelationTriple& t : relations.triples) {
    out << t.src << ',' << t.dst << ',' << format_double(t.value) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<EmbeddedBox> read_boxes(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<EmbeddedBox> boxes;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string ctx = path + " line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(ctx + ": malformed JSON record (" + e.what() + ")");
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("min") ||
        !obj.contains("size")) {
      throw DataError(ctx + ": expected fields id/min/size");
    }
    EmbeddedBox b;
    b.id = obj["id"].get<std::string>();
    try {
      b.box = Box(json_to_vector(obj["min"], ctx), json_to_vector(obj["size"], ctx));
    } catch (const std::invalid_argument& e) {
      throw DataError(ctx + ": " + e.what());
    }
    if (obj.contains("group")) b.group = obj["group"].get<std::string>();
    boxes.push_back(std::move(b));
  });
  return boxes;
}

void write_boxes(const std::string& path, const std::vector<EmbeddedBox>& boxes) {
  std::ostringstream out;
  for (const EmbeddedBox& b : boxes) {
    json obj;
    obj["id"] = b.id;
    obj["min"] = vector_to_json(b.box.min);
    obj["size"] = vector_to_json(b.box.size);
    if (b.group) obj["group"] = *b.group;
    out << obj.dump() << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<Eigen::VectorXd> read_sample_vectors(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<Eigen::VectorXd> samples;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string ctx = path + " line " + std::to_string(line_no);
    const auto fields = split(line, ',');
    Eigen::VectorXd v(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = parse_double(fields[i], ctx);
    }
    if (!samples.empty() && v.size() != samples.front().size()) {
      throw DataError(ctx + ": sample dimension " + std::to_string(v.size()) +
                      " differs from " + std::to_string(samples.front().size()));
    }
    samples.push_back(std::move(v));
  });
  if (samples.empty()) throw DataError(path + ": no samples");
  return samples;
}

// ---------------------------------------------------------------------------
// Base representations and labels.
// ---------------------------------------------------------------------------

std::pair<Eigen::VectorXd, Eigen::VectorXd> aggregate_sample_embeddings(
    const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw DataError("aggregate: empty sample set");
  const Eigen::Index d = samples.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw DataError("aggregate: ragged sample dimensions");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& s : samples) var += (s - mean).cwiseAbs2();
  var /= static_cast<double>(samples.size());
  return {std::move(mean), std::move(var)};
}

TaskCollection load_attribute_table(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<TaskRecord> records;
  int attr_count = -1;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::string ctx = path + " line " + std::to_string(line_no);
    const auto fields = split(line, ',');
    if (attr_count < 0) {
      if (fields.size() != 2 || fields[0] != "attributes") {
        throw DataError(ctx + ": expected header \"attributes,<count>\"");
      }
      attr_count = static_cast<int>(parse_double(fields[1], ctx));
      if (attr_count < 1) throw DataError(ctx + ": attribute count must be >= 1");
      return;
    }
    if (static_cast<int>(fields.size()) != attr_count + 1) {
      throw DataError(ctx + ": expected name plus " + std::to_string(attr_count) +
                      " attributes, got " + std::to_string(fields.size() - 1));
    }
    TaskRecord rec;
    rec.id = std::string(fields[0]);
    validate_id(rec.id, ctx);
    rec.vec.resize(attr_count);
    for (int a = 0; a < attr_count; ++a) {
      const auto f = fields[static_cast<std::size_t>(a + 1)];
      if (f == "0") {
        rec.vec[a] = 0.0;
      } else if (f == "1") {
        rec.vec[a] = 1.0;
      } else {
        throw DataError(ctx + ": row \"" + rec.id + "\" column " + std::to_string(a) +
                        ": attribute must be 0 or 1, got \"" + std::string(f) + "\"");
      }
    }
    records.push_back(std::move(rec));
  });
  if (attr_count < 0) throw DataError(path + ": missing attributes header");
  if (records.empty()) throw DataError(path + ": no attribute rows");
  return TaskCollection::from_records(std::move(records));
}

double rescale_affinity(double x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("rescale_affinity: k must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("rescale_affinity: x must be in [0,1]");
  }
  const double y = std::tanh(k * x);
  // Keep the output strictly below 1 so the inverse always exists.
  const double top = std::nextafter(1.0, 0.0);
  return y < top ? y : top;
}

double inverse_rescale_affinity(double xp, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("inverse_rescale_affinity: k must be > 0");
  if (!(std::fabs(xp) < 1.0)) {
    throw std::invalid_argument("inverse_rescale_affinity: |x'| must be < 1");
  }
  return std::atanh(xp) / k;
}

RelationSet soft_overlap_labels(
    const std::vector<std::pair<std::string, std::vector<Eigen::VectorXd>>>& sample_sets) {
  const int n = static_cast<int>(sample_sets.size());
  if (n == 0) throw DataError("soft overlap: no sample sets");
  const Eigen::Index d = sample_sets.front().second.empty()
                             ? 0
                             : sample_sets.front().second.front().size();
  for (const auto& [id, samples] : sample_sets) {
    validate_id(id, "soft overlap");
    if (samples.size() < 2) {
      throw DataError("soft overlap: dataset \"" + id +
                      "\" has fewer than 2 samples; its distance threshold is undefined");
    }
    for (const auto& s : samples) {
      if (s.size() != d) {
        throw DataError("soft overlap: dataset \"" + id + "\" has mismatched dimensions");
      }
    }
  }

  // Per-set threshold: mean pairwise distance over unordered sample pairs.
  std::vector<double> thresholds(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const auto& samples = sample_sets[static_cast<std::size_t>(j)].second;
    const std::size_t m = samples.size();
    double sum = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t v = u + 1; v < m; ++v) {
        sum += (samples[u] - samples[v]).norm();
      }
    }
    const double t = 2.0 * sum / (static_cast<double>(m) * static_cast<double>(m - 1));
    if (!(t > 0.0)) {
      throw DataError("soft overlap: dataset \"" + sample_sets[static_cast<std::size_t>(j)].first +
                      "\" has zero mean pairwise distance (all samples identical)");
    }
    thresholds[static_cast<std::size_t>(j)] = t;
  }

  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::vector<double> values(total, 0.0);
  parallel_chunks(total, 16, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const int i = static_cast<int>(p / static_cast<std::size_t>(n));
      const int j = static_cast<int>(p % static_cast<std::size_t>(n));
      const auto& ei = sample_sets[static_cast<std::size_t>(i)].second;
      const auto& ej = sample_sets[static_cast<std::size_t>(j)].second;
      const double tj = thresholds[static_cast<std::size_t>(j)];
      std::size_t overlapping = 0;
      for (const auto& e : ei) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& f : ej) {
          const double dist = (e - f).norm();
          if (dist < dmin) dmin = dist;
        }
        if (dmin < tj) ++overlapping;
      }
      values[p] = static_cast<double>(overlapping) / static_cast<double>(ei.size());
    }
  });

  RelationSet out;
  out.kind = RelationKind::kSoft;
  out.triples.reserve(total);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.triples.push_back(RelationTriple{
          sample_sets[static_cast<std::size_t>(i)].first,
          sample_sets[static_cast<std::size_t>(j)].first,
          values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)]});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures.
// ---------------------------------------------------------------------------

SyntheticTaxonomy generate_synthetic_taxonomy(const TaxonomyParams& params) {
  if (params.depth < 2) throw std::invalid_argument("taxonomy: depth must be >= 2");
  if (params.dim < 4 || params.dim < 2 * params.depth) {
    throw std::invalid_argument("taxonomy: dim must be >= max(4, 2*depth)");
  }
  if (params.branching < 1 || params.leaf_count < 1) {
    throw std::invalid_argument("taxonomy: branching and leaf_count must be >= 1");
  }
  if (params.noise < 0.0) throw std::invalid_argument("taxonomy: noise must be >= 0");

  Rng rng(params.seed);

  struct Node {
    std::string id;
    int parent;  // index into nodes, -1 for top level
    int level;   // 1-based
    Eigen::VectorXd prototype;
  };
  std::vector<Node> nodes;

  // Level by level. Offsets live in the dimensions past the level markers
  // and their scale decays geometrically, so each level's clusters are tight
  // relative to the separation of the level above: a held-out leaf falls
  // inside the span of its training siblings instead of extrapolating.
  std::vector<int> prev_level;
  for (int level = 1; level <= params.depth; ++level) {
    const int fanout = (level == params.depth) ? params.leaf_count : params.branching;
    const double scale = std::pow(0.4, level - 1);
    std::vector<int> this_level;
    const int parents = (level == 1) ? 1 : static_cast<int>(prev_level.size());
    for (int pi = 0; pi < parents; ++pi) {
      const int parent = (level == 1) ? -1 : prev_level[static_cast<std::size_t>(pi)];
      const int children = (level == 1) ? params.branching : fanout;
      for (int ci = 0; ci < children; ++ci) {
        Node node;
        node.parent = parent;
        node.level = level;
        node.id = (parent < 0) ? "n" + std::to_string(ci)
                               : nodes[static_cast<std::size_t>(parent)].id + "." +
                                     std::to_string(ci);
        Eigen::VectorXd offset = Eigen::VectorXd::Zero(params.dim);
        for (int d = params.depth; d < params.dim; ++d) offset[d] = scale * rng.normal();
        node.prototype = (parent < 0)
                             ? offset
                             : Eigen::VectorXd(nodes[static_cast<std::size_t>(parent)].prototype + offset);
        this_level.push_back(static_cast<int>(nodes.size()));
        nodes.push_back(std::move(node));
      }
    }
    prev_level = std::move(this_level);
  }

  std::vector<TaskRecord> records;
  records.reserve(nodes.size());
  for (const Node& node : nodes) {
    TaskRecord rec;
    rec.id = node.id;
    if (node.parent >= 0) rec.parent = nodes[static_cast<std::size_t>(node.parent)].id;
    // Group by top-level ancestor for rendering.
    const Node* top = &node;
    while (top->parent >= 0) top = &nodes[static_cast<std::size_t>(top->parent)];
    rec.group = top->id;
    rec.vec = node.prototype;
    // Granularity cue: real base representations separate coarse from fine
    // datasets (a whole class aggregates very differently from one species),
    // so tasks carry their taxonomy level in a reserved marker dimension.
    rec.vec[node.level - 1] += 2.0;
    if (node.level == params.depth && params.noise > 0.0) {
      for (int d = 0; d < params.dim; ++d) rec.vec[d] += params.noise * rng.normal();
    }
    records.push_back(std::move(rec));
  }

  SyntheticTaxonomy out;
  out.tasks = TaskCollection::from_records(std::move(records));

  // Every ordered non-self pair; positive iff dst is a strict ancestor of src.
  out.relations.kind = RelationKind::kHierarchy;
  const int n = static_cast<int>(nodes.size());
  auto is_ancestor = [&](int anc, int node) {
    int cur = nodes[static_cast<std::size_t>(node)].parent;
    while (cur >= 0) {
      if (cur == anc) return true;
      cur = nodes[static_cast<std::size_t>(cur)].parent;
    }
    return false;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      out.relations.triples.push_back(RelationTriple{
          nodes[static_cast<std::size_t>(a)].id, nodes[static_cast<std::size_t>(b)].id,
          is_ancestor(b, a) ? 1.0 : 0.0});
    }
  }
  return out;
}

SyntheticAffinity generate_synthetic_affinity(const AffinityParams& params) {
  if (params.box_dim != 2 && params.box_dim != 3 && params.box_dim != 5) {
    throw std::invalid_argument("affinity fixture: box_dim must be one of {2,3,5}");
  }
  if (params.task_count < 2) throw std::invalid_argument("affinity fixture: need >= 2 tasks");
  if (params.dim < 2 * params.box_dim) {
    throw std::invalid_argument("affinity fixture: dim must be >= 2*box_dim");
  }

  Rng rng(params.seed);
  const int k = params.box_dim;

  SyntheticAffinity out;
  std::vector<TaskRecord> records;
  for (int i = 0; i < params.task_count; ++i) {
    Eigen::VectorXd mn(k), sz(k);
    for (int d = 0; d < k; ++d) {
      mn[d] = rng.uniform(0.0, 1.0);
      sz[d] = rng.uniform(0.2, 0.6);
    }
    out.planted.emplace_back(mn, sz);

    TaskRecord rec;
    rec.id = "task" + std::to_string(i);
    rec.vec.resize(params.dim);
    for (int d = 0; d < k; ++d) {
      rec.vec[d] = mn[d] + 0.02 * rng.normal();
      rec.vec[k + d] = sz[d] + 0.02 * rng.normal();
    }
    for (int d = 2 * k; d < params.dim; ++d) rec.vec[d] = 0.1 * rng.normal();
    records.push_back(std::move(rec));
  }
  out.tasks = TaskCollection::from_records(std::move(records));

  out.relations.kind = RelationKind::kAffinity;
  Temperatures temps;  // unused by the hard mode
  for (int i = 0; i < params.task_count; ++i) {
    for (int j = 0; j < params.task_count; ++j) {
      const double value = overlap_fraction(out.planted[static_cast<std::size_t>(i)],
                                            out.planted[static_cast<std::size_t>(j)],
                                            temps, OverlapMode::kHard);
      out.relations.triples.push_back(RelationTriple{
          out.tasks.at(i).id, out.tasks.at(j).id, value});
    }
  }
  return out;
}

}  // namespace boxtask
