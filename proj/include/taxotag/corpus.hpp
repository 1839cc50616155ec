#pragma once

#include "taxotag/errors.hpp"
#include "taxotag/taxonomy.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace taxotag {

enum class Split { Train, Val, Test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw SchemaError("unknown split tag \"" + std::string(s) + "\" (expected train|val|test)");
}

struct Document {
  std::string id;
  std::string question;
  std::optional<std::string> answer;  // empty-after-trim treated as absent
  TaxonomyPath gold;
  Split split = Split::Train;
};

// Question concatenated with the answer (single separator space) when an
// answer is present; the question alone otherwise. Truncation to the encoder
// context limit happens downstream in the encoder, not here.
inline std::string model_input_text(const Document& doc) {
  if (doc.answer && !canonical_text(*doc.answer).empty()) {
    return doc.question + " " + *doc.answer;
  }
  return doc.question;
}

// A validated document collection: unique ids, per-document split tags, and
// the distinct set of gold paths (which is exactly the corpus label set).
class Corpus {
 public:
  static Corpus from_documents(std::vector<Document> docs) {
    Corpus c;
    c.docs_ = std::move(docs);
    std::set<TaxonomyPath> label_set;
    int depth = -1;
    for (std::size_t i = 0; i < c.docs_.size(); ++i) {
      const Document& d = c.docs_[i];
      if (d.id.empty()) throw SchemaError("document " + std::to_string(i) + " has an empty id");
      if (canonical_text(d.question).empty())
        throw SchemaError("document \"" + d.id + "\" has an empty question");
      if (depth < 0) depth = d.gold.depth();
      if (d.gold.depth() != depth)
        throw MalformedPathError("document \"" + d.id + "\" has path depth " +
                                 std::to_string(d.gold.depth()) + ", corpus uses " +
                                 std::to_string(depth));
      if (!c.id_pos_.emplace(d.id, static_cast<int>(i)).second)
        throw DuplicateIdError("duplicate document id \"" + d.id + "\"");
      label_set.insert(d.gold);
      c.split_idx_[static_cast<int>(d.split)].push_back(static_cast<int>(i));
    }
    c.labels_.assign(label_set.begin(), label_set.end());
    return c;
  }

  const std::vector<Document>& docs() const { return docs_; }
  // Distinct gold paths, sorted by canonical sequence.
  const std::vector<TaxonomyPath>& labels() const { return labels_; }

  const std::vector<int>& split_indices(Split s) const { return split_idx_[static_cast<int>(s)]; }

  std::size_t size() const { return docs_.size(); }

  const Document* find(const std::string& id) const {
    auto it = id_pos_.find(id);
    return it == id_pos_.end() ? nullptr : &docs_[static_cast<std::size_t>(it->second)];
  }

  std::vector<TaxonomyPath> split_labels(Split s) const {
    std::set<TaxonomyPath> out;
    for (int i : split_indices(s)) out.insert(docs_[static_cast<std::size_t>(i)].gold);
    return {out.begin(), out.end()};
  }

 private:
  std::vector<Document> docs_;
  std::vector<TaxonomyPath> labels_;
  std::unordered_map<std::string, int> id_pos_;
  std::vector<int> split_idx_[3];
};

namespace detail {

inline TaxonomyPath path_from_json(const nlohmann::json& v, std::string_view delimiter,
                                   int depth, const std::string& where) {
  if (v.is_array()) {
    std::vector<std::string> levels;
    for (const auto& item : v) {
      if (!item.is_string()) throw SchemaError(where + ": label array entries must be strings");
      levels.push_back(item.get<std::string>());
    }
    if (static_cast<int>(levels.size()) != depth)
      throw MalformedPathError(where + ": expected " + std::to_string(depth) +
                               " label levels, got " + std::to_string(levels.size()));
    return TaxonomyPath::from_levels(std::move(levels));
  }
  if (v.is_string()) return parse_taxonomy_path(v.get<std::string>(), delimiter, depth);
  throw SchemaError(where + ": label must be an array of strings or a delimited string");
}

}  // namespace detail

// Record-per-line ingestion. Each line is a JSON object with fields:
//   id (string), question (string), answer (string or null, optional),
//   label (array of `depth` strings, or a delimited string), split
//   ("train"|"val"|"test"). UTF-8 throughout.
inline Corpus load_corpus(std::istream& in, std::string_view delimiter = " - ",
                          int depth = kDefaultPathDepth) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (canonical_text(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + ": invalid JSON: " + e.what());
    }
    if (!rec.is_object()) throw SchemaError(where + ": record must be a JSON object");
    for (const char* field : {"id", "question", "label", "split"}) {
      if (!rec.contains(field))
        throw SchemaError(where + ": missing field \"" + std::string(field) + "\"");
    }
    Document d;
    if (!rec["id"].is_string()) throw SchemaError(where + ": id must be a string");
    d.id = rec["id"].get<std::string>();
    if (!rec["question"].is_string()) throw SchemaError(where + ": question must be a string");
    d.question = rec["question"].get<std::string>();
    if (canonical_text(d.question).empty()) throw SchemaError(where + ": question is empty");
    if (rec.contains("answer") && !rec["answer"].is_null()) {
      if (!rec["answer"].is_string())
        throw SchemaError(where + ": answer must be a string or null");
      d.answer = rec["answer"].get<std::string>();
    }
    try {
      d.gold = detail::path_from_json(rec["label"], delimiter, depth, where);
    } catch (const MalformedPathError& e) {
      const std::string msg = e.what();
      throw MalformedPathError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
    if (!rec["split"].is_string()) throw SchemaError(where + ": split must be a string");
    try {
      d.split = parse_split(rec["split"].get<std::string>());
    } catch (const SchemaError& e) {
      throw SchemaError(where + ": " + e.what());
    }
    docs.push_back(std::move(d));
  }
  return Corpus::from_documents(std::move(docs));
}

inline Corpus load_corpus_file(const std::filesystem::path& path,
                               std::string_view delimiter = " - ",
                               int depth = kDefaultPathDepth) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return load_corpus(in, delimiter, depth);
}

inline void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Document& d : corpus.docs()) {
    nlohmann::json rec;
    rec["id"] = d.id;
    rec["question"] = d.question;
    rec["answer"] = d.answer ? nlohmann::json(*d.answer) : nlohmann::json(nullptr);
    rec["label"] = d.gold.levels();
    rec["split"] = split_name(d.split);
    out << rec.dump() << "\n";
  }
}

inline void save_corpus_file(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  save_corpus(corpus, out);
}

// Labels-only file: one JSON array of `depth` strings per line. Used to index
// label spaces larger than the train-set label set.
inline std::vector<TaxonomyPath> load_label_file(std::istream& in,
                                                 std::string_view delimiter = " - ",
                                                 int depth = kDefaultPathDepth) {
  std::vector<TaxonomyPath> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (canonical_text(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + ": invalid JSON: " + e.what());
    }
    out.push_back(detail::path_from_json(rec, delimiter, depth, where));
  }
  return out;
}

inline std::vector<TaxonomyPath> load_label_file_path(const std::filesystem::path& path,
                                                      std::string_view delimiter = " - ",
                                                      int depth = kDefaultPathDepth) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file " + path.string());
  return load_label_file(in, delimiter, depth);
}

}  // namespace taxotag
