#pragma once

#include "taxotag/common.hpp"
#include "taxotag/errors.hpp"

#include <compare>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace taxotag {

inline constexpr int kDefaultPathDepth = 3;

// A hierarchical label, e.g. subject > chapter > topic. Levels are stored in
// canonical form (lowercase, single-spaced, trimmed). Depth is 3 for the
// default corpora but configurable at parse time; it must be uniform within
// one corpus.
class TaxonomyPath {
 public:
  TaxonomyPath() = default;

  static TaxonomyPath from_levels(std::vector<std::string> levels) {
    if (levels.empty()) throw MalformedPathError("taxonomy path has no levels");
    for (auto& level : levels) {
      level = canonical_text(level);
      if (level.empty()) throw MalformedPathError("taxonomy path has an empty level");
    }
    TaxonomyPath p;
    p.levels_ = std::move(levels);
    return p;
  }

  static TaxonomyPath make(std::string subject, std::string chapter, std::string topic) {
    return from_levels({std::move(subject), std::move(chapter), std::move(topic)});
  }

  const std::vector<std::string>& levels() const { return levels_; }
  int depth() const { return static_cast<int>(levels_.size()); }

  const std::string& subject() const { return levels_.front(); }
  const std::string& chapter() const { return levels_.at(1); }
  const std::string& topic() const { return levels_.back(); }

  // Canonical single-space-joined text sequence, e.g.
  // "science physics electricity". Equal paths yield identical sequences.
  std::string sequence() const {
    std::string out;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (i) out.push_back(' ');
      out += levels_[i];
    }
    return out;
  }

  bool operator==(const TaxonomyPath&) const = default;
  auto operator<=>(const TaxonomyPath&) const = default;

 private:
  std::vector<std::string> levels_;
};

struct TaxonomyPathHash {
  std::size_t operator()(const TaxonomyPath& p) const {
    return static_cast<std::size_t>(fnv1a64(p.sequence()));
  }
};

// Splits `raw` on `delimiter`, canonicalizes each segment, and validates the
// configured depth. Throws MalformedPathError when the split does not yield
// exactly `depth` non-empty segments.
inline TaxonomyPath parse_taxonomy_path(std::string_view raw, std::string_view delimiter,
                                        int depth = kDefaultPathDepth) {
  if (delimiter.empty()) throw ConfigError("path delimiter must be non-empty");
  if (raw.empty()) throw MalformedPathError("taxonomy path text is empty");
  if (depth < 1) throw ConfigError("path depth must be >= 1");

  std::vector<std::string> segments;
  std::size_t start = 0;
  while (true) {
    const std::size_t hit = raw.find(delimiter, start);
    if (hit == std::string_view::npos) {
      segments.emplace_back(raw.substr(start));
      break;
    }
    segments.emplace_back(raw.substr(start, hit - start));
    start = hit + delimiter.size();
  }

  std::vector<std::string> levels;
  levels.reserve(segments.size());
  for (auto& seg : segments) {
    std::string canon = canonical_text(seg);
    if (!canon.empty()) levels.push_back(std::move(canon));
  }
  if (static_cast<int>(levels.size()) != depth) {
    throw MalformedPathError("expected " + std::to_string(depth) + " path levels, got " +
                             std::to_string(levels.size()) + " in \"" + std::string(raw) + "\"");
  }
  return TaxonomyPath::from_levels(std::move(levels));
}

inline std::string taxonomy_to_sequence(const TaxonomyPath& path) { return path.sequence(); }

inline std::string to_delimited(const TaxonomyPath& path, std::string_view delimiter) {
  std::string out;
  for (std::size_t i = 0; i < path.levels().size(); ++i) {
    if (i) out += delimiter;
    out += path.levels()[i];
  }
  return out;
}

}  // namespace taxotag
