#pragma once

#include "taxotag/encoders.hpp"
#include "taxotag/errors.hpp"
#include "taxotag/taxonomy.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace taxotag {

struct ScoredLabel {
  TaxonomyPath label;
  double score = 0.0;
  int pos = -1;  // stable index position, used for tie-breaking
};

struct Neighborhood {
  std::vector<TaxonomyPath> labels;  // ascending distance
  Mat vectors;                       // k x d_lab, rows follow `labels`
  std::vector<double> distances;
};

inline double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw DimensionMismatchError("cosine: dimension mismatch " + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()));
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

// Exact-search index over label embeddings. Entries are L2-normalized at
// build time (the training loop mixes cosine and euclidean lookups; a common
// scale keeps them consistent). Positions are stable across queries;
// immutable after construction except through add_labels, which returns a
// new index.
class LabelIndex {
 public:
  static LabelIndex build(std::vector<TaxonomyPath> labels, const SentenceEncoder& encoder,
                          bool normalize = true) {
    if (labels.empty()) throw EmptyIndexError("cannot build a label index from an empty label set");
    std::set<TaxonomyPath> dedup(labels.begin(), labels.end());
    std::vector<LabelEmbedding> entries;
    entries.reserve(dedup.size());
    for (const TaxonomyPath& p : dedup) entries.push_back(encode_label(encoder, p));
    return from_entries(std::move(entries), encoder.identifier(), normalize);
  }

  static LabelIndex from_entries(std::vector<LabelEmbedding> entries, std::string encoder_id,
                                 bool normalize) {
    if (entries.empty()) throw EmptyIndexError("label index needs at least one entry");
    LabelIndex idx;
    idx.dim_ = static_cast<int>(entries.front().vector.size());
    idx.encoder_id_ = std::move(encoder_id);
    idx.normalized_ = normalize;
    for (auto& e : entries) {
      if (static_cast<int>(e.vector.size()) != idx.dim_)
        throw DimensionMismatchError("label index entries disagree on dimension");
      const std::string seq = e.label.sequence();
      if (idx.pos_.count(seq)) continue;  // silently dedupe
      if (normalize) {
        const double norm = e.vector.norm();
        if (norm == 0.0) throw EncoderFailure("zero-norm label embedding for \"" + seq + "\"");
        e.vector /= norm;
      }
      idx.pos_.emplace(seq, static_cast<int>(idx.entries_.size()));
      idx.entries_.push_back(std::move(e));
    }
    return idx;
  }

  int size() const { return static_cast<int>(entries_.size()); }
  int dim() const { return dim_; }
  bool normalized() const { return normalized_; }
  const std::string& encoder_id() const { return encoder_id_; }
  const std::vector<LabelEmbedding>& entries() const { return entries_; }
  const LabelEmbedding& entry(int pos) const { return entries_.at(static_cast<std::size_t>(pos)); }

  bool contains(const TaxonomyPath& p) const { return pos_.count(p.sequence()) > 0; }

  int position(const TaxonomyPath& p) const {
    auto it = pos_.find(p.sequence());
    return it == pos_.end() ? -1 : it->second;
  }

  const Vec& vector_of(const TaxonomyPath& p) const {
    const int pos = position(p);
    if (pos < 0) throw EmptyIndexError("label \"" + p.sequence() + "\" is not in the index");
    return entries_[static_cast<std::size_t>(pos)].vector;
  }

  // Exact top-k by cosine similarity, descending; ties broken by index
  // position. Labels whose sequence is in `exclude` are skipped.
  std::vector<ScoredLabel> top_k_cosine(const Vec& query, int k,
                                        const std::unordered_set<std::string>& exclude = {}) const {
    if (k < 1) throw ConfigError("top_k_cosine: k must be >= 1");
    check_dim(query);
    std::vector<ScoredLabel> scored;
    scored.reserve(entries_.size());
    for (int i = 0; i < size(); ++i) {
      const auto& e = entries_[static_cast<std::size_t>(i)];
      if (!exclude.empty() && exclude.count(e.label.sequence())) continue;
      scored.push_back({e.label, cosine(query, e.vector), i});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredLabel& a, const ScoredLabel& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.pos < b.pos;
    });
    if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<std::size_t>(k));
    return scored;
  }

  // The k entries closest to `anchor` in euclidean distance, ascending; ties
  // broken by index position. The anchor's own label is eligible and comes
  // first (distance 0) when the anchor is an index entry.
  Neighborhood top_k_euclidean(const Vec& anchor, int k) const {
    if (k < 1) throw ConfigError("top_k_euclidean: k must be >= 1");
    if (k > size())
      throw KTooLargeError("top_k_euclidean: k=" + std::to_string(k) + " exceeds index size " +
                           std::to_string(size()));
    check_dim(anchor);
    std::vector<std::pair<double, int>> dist;
    dist.reserve(entries_.size());
    for (int i = 0; i < size(); ++i)
      dist.emplace_back((entries_[static_cast<std::size_t>(i)].vector - anchor).norm(), i);
    std::sort(dist.begin(), dist.end());
    Neighborhood out;
    out.vectors.resize(k, dim_);
    for (int r = 0; r < k; ++r) {
      const auto& [d, i] = dist[static_cast<std::size_t>(r)];
      out.labels.push_back(entries_[static_cast<std::size_t>(i)].label);
      out.vectors.row(r) = entries_[static_cast<std::size_t>(i)].vector.transpose();
      out.distances.push_back(d);
    }
    return out;
  }

  // Returns a new index containing the old entries (bitwise unchanged, stable
  // positions) plus embeddings for the genuinely new paths, appended in
  // canonical-sequence order. No model weights are involved: newly indexed
  // labels become retrievable immediately.
  LabelIndex with_labels(const std::vector<TaxonomyPath>& new_paths,
                         const SentenceEncoder& encoder) const {
    if (encoder.dim() != dim_)
      throw DimensionMismatchError("add_labels: encoder dim does not match index dim");
    std::vector<LabelEmbedding> entries = entries_;
    std::set<TaxonomyPath> fresh;
    for (const TaxonomyPath& p : new_paths)
      if (!contains(p)) fresh.insert(p);
    for (const TaxonomyPath& p : fresh) {
      LabelEmbedding e = encode_label(encoder, p);
      if (normalized_) {
        const double norm = e.vector.norm();
        if (norm == 0.0)
          throw EncoderFailure("zero-norm label embedding for \"" + p.sequence() + "\"");
        e.vector /= norm;
      }
      entries.push_back(std::move(e));
    }
    LabelIndex out = from_entries(std::move(entries), encoder_id_, false);
    out.normalized_ = normalized_;
    return out;
  }

  void save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["encoder"] = encoder_id_;
    j["dim"] = dim_;
    j["normalized"] = normalized_;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : entries_) {
      nlohmann::json rec;
      rec["label"] = e.label.levels();
      rec["sequence"] = e.label.sequence();
      rec["vector"] = std::vector<double>(e.vector.data(), e.vector.data() + e.vector.size());
      entries.push_back(std::move(rec));
    }
    j["entries"] = std::move(entries);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write index file " + path.string());
    out << j.dump() << "\n";
  }

  static LabelIndex load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open index file " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("index file " + path.string() + ": " + e.what());
    }
    for (const char* field : {"encoder", "dim", "normalized", "entries"})
      if (!j.contains(field))
        throw SchemaError("index file missing field \"" + std::string(field) + "\"");
    const int dim = j["dim"].get<int>();
    std::vector<LabelEmbedding> entries;
    for (const auto& rec : j["entries"]) {
      LabelEmbedding e;
      e.label = TaxonomyPath::from_levels(rec["label"].get<std::vector<std::string>>());
      const auto vals = rec["vector"].get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != dim)
        throw SchemaError("index entry dimension mismatch for \"" + e.label.sequence() + "\"");
      e.vector = Eigen::Map<const Vec>(vals.data(), dim);
      entries.push_back(std::move(e));
    }
    // Entries were normalized (or not) at build time; do not renormalize.
    LabelIndex idx = from_entries(std::move(entries), j["encoder"].get<std::string>(), false);
    idx.normalized_ = j["normalized"].get<bool>();
    return idx;
  }

 private:
  void check_dim(const Vec& v) const {
    if (static_cast<int>(v.size()) != dim_)
      throw DimensionMismatchError("query dimension " + std::to_string(v.size()) +
                                   " does not match index dimension " + std::to_string(dim_));
  }

  std::vector<LabelEmbedding> entries_;
  std::unordered_map<std::string, int> pos_;
  int dim_ = 0;
  std::string encoder_id_;
  bool normalized_ = true;
};

inline LabelIndex add_labels(const LabelIndex& index, const std::vector<TaxonomyPath>& new_paths,
                             const SentenceEncoder& encoder) {
  return index.with_labels(new_paths, encoder);
}

}  // namespace taxotag
