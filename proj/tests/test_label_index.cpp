#include "taxotag/label_index.hpp"
#include "taxotag/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>

using namespace taxotag;

namespace {

TaxonomyPath numbered_path(int i) {
  return TaxonomyPath::make("subject" + std::to_string(i % 13), "chapter" + std::to_string(i % 29),
                            "topic" + std::to_string(i));
}

std::vector<TaxonomyPath> numbered_paths(int n) {
  std::vector<TaxonomyPath> out;
  for (int i = 0; i < n; ++i) out.push_back(numbered_path(i));
  return out;
}

Vec random_vec(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
  return v;
}

// Independent oracle: plain-loop cosine against every entry, stable sort.
std::vector<int> brute_force_cosine_order(const LabelIndex& index, const Vec& query) {
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < index.size(); ++i) {
    const Vec& e = index.entry(i).vector;
    double dot = 0, nq = 0, ne = 0;
    for (int d = 0; d < index.dim(); ++d) {
      dot += query(d) * e(d);
      nq += query(d) * query(d);
      ne += e(d) * e(d);
    }
    const double cos = (nq == 0 || ne == 0) ? 0.0 : dot / (std::sqrt(nq) * std::sqrt(ne));
    scored.emplace_back(cos, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> order;
  for (const auto& [s, i] : scored) order.push_back(i);
  return order;
}

std::vector<int> brute_force_euclid_order(const LabelIndex& index, const Vec& anchor) {
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < index.size(); ++i) {
    double acc = 0;
    for (int d = 0; d < index.dim(); ++d) {
      const double diff = index.entry(i).vector(d) - anchor(d);
      acc += diff * diff;
    }
    scored.emplace_back(std::sqrt(acc), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> order;
  for (const auto& [s, i] : scored) order.push_back(i);
  return order;
}

}  // namespace

TEST_CASE("build dedupes, sorts deterministically, and normalizes") {
  const HashSentenceEncoder enc;
  auto labels = numbered_paths(6);
  labels.push_back(numbered_path(3));  // duplicate
  const LabelIndex idx = LabelIndex::build(labels, enc);
  CHECK(idx.size() == 6);
  for (int i = 1; i < idx.size(); ++i)
    CHECK(idx.entry(i - 1).label.sequence() < idx.entry(i).label.sequence());
  for (int i = 0; i < idx.size(); ++i)
    CHECK_THAT(idx.entry(i).vector.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(LabelIndex::build({}, enc), EmptyIndexError);
}

TEST_CASE("index holds one entry per distinct label at scale") {
  const HashSentenceEncoder enc;
  const LabelIndex idx = LabelIndex::build(numbered_paths(406), enc);
  CHECK(idx.size() == 406);
}

TEST_CASE("self-similarity and orthogonality behave") {
  const HashSentenceEncoder enc;
  const LabelIndex idx = LabelIndex::build(numbered_paths(8), enc);
  const Vec q = idx.entry(3).vector;
  const auto top = idx.top_k_cosine(q, 2);
  CHECK(top[0].label == idx.entry(3).label);
  CHECK_THAT(top[0].score, Catch::Matchers::WithinAbs(1.0, 1e-6));

  // hand-built entries: orthogonal query scores 0
  std::vector<LabelEmbedding> entries;
  entries.push_back({TaxonomyPath::make("a", "b", "c"), Vec::Unit(3, 0)});
  entries.push_back({TaxonomyPath::make("a", "b", "d"), Vec::Unit(3, 1)});
  const LabelIndex tiny = LabelIndex::from_entries(entries, "test", false);
  const auto ranked = tiny.top_k_cosine(Vec::Unit(3, 0), 2);
  CHECK_THAT(ranked[1].score, Catch::Matchers::WithinAbs(0.0, 1e-6));
}

TEST_CASE("exclusion removes labels from the ranking") {
  const HashSentenceEncoder enc;
  const LabelIndex idx = LabelIndex::build(numbered_paths(5), enc);
  const Vec q = idx.entry(2).vector;
  const auto ranked = idx.top_k_cosine(q, idx.size(), {idx.entry(2).label.sequence()});
  CHECK(static_cast<int>(ranked.size()) == idx.size() - 1);
  for (const auto& s : ranked) CHECK_FALSE(s.label == idx.entry(2).label);
}

TEST_CASE("top-k cosine matches the brute-force oracle on random fixtures") {
  const HashSentenceEncoder enc;
  Rng rng(31);
  for (int fixture = 0; fixture < 30; ++fixture) {
    const int n = 2 + static_cast<int>(rng.below(60));
    const LabelIndex idx = LabelIndex::build(numbered_paths(n), enc);
    const Vec q = random_vec(idx.dim(), rng);
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto got = idx.top_k_cosine(q, k);
    const auto want = brute_force_cosine_order(idx, q);
    REQUIRE(got.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) CHECK(got[static_cast<std::size_t>(i)].pos == want[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("top-k euclidean matches the brute-force oracle and handles ties") {
  const HashSentenceEncoder enc;
  Rng rng(32);
  for (int fixture = 0; fixture < 30; ++fixture) {
    const int n = 2 + static_cast<int>(rng.below(60));
    const LabelIndex idx = LabelIndex::build(numbered_paths(n), enc);
    const Vec anchor = idx.entry(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))).vector;
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto got = idx.top_k_euclidean(anchor, k);
    const auto want = brute_force_euclid_order(idx, anchor);
    CHECK(got.distances.front() == 0.0);
    for (int i = 0; i < k; ++i)
      CHECK(got.labels[static_cast<std::size_t>(i)] ==
            idx.entry(want[static_cast<std::size_t>(i)]).label);
    for (std::size_t i = 1; i < got.distances.size(); ++i)
      CHECK(got.distances[i - 1] <= got.distances[i]);
  }

  // exact ties break by index position
  std::vector<LabelEmbedding> entries;
  entries.push_back({TaxonomyPath::make("a", "a", "a"), Vec::Unit(2, 0)});
  entries.push_back({TaxonomyPath::make("a", "a", "b"), Vec::Unit(2, 1)});
  entries.push_back({TaxonomyPath::make("a", "a", "c"), Vec::Unit(2, 1)});  // duplicate vector
  const LabelIndex tie = LabelIndex::from_entries(entries, "test", false);
  const auto got = tie.top_k_euclidean(Vec::Unit(2, 1), 3);
  CHECK(got.labels[0].topic() == "b");
  CHECK(got.labels[1].topic() == "c");

  CHECK_THROWS_AS(tie.top_k_euclidean(Vec::Unit(2, 1), 4), KTooLargeError);
  CHECK_THROWS_AS(tie.top_k_cosine(Vec::Unit(3, 1), 1), DimensionMismatchError);
}

TEST_CASE("cosine and euclidean rankings agree on unit vectors") {
  const HashSentenceEncoder enc;
  Rng rng(33);
  for (int fixture = 0; fixture < 10; ++fixture) {
    const int n = 3 + static_cast<int>(rng.below(40));
    const LabelIndex idx = LabelIndex::build(numbered_paths(n), enc);
    Vec q = random_vec(idx.dim(), rng);
    q /= q.norm();
    const auto by_cos = idx.top_k_cosine(q, n);
    const auto by_euc = idx.top_k_euclidean(q, n);
    for (int i = 0; i < n; ++i)
      CHECK(by_cos[static_cast<std::size_t>(i)].label == by_euc.labels[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("persistence reproduces scores") {
  const HashSentenceEncoder enc;
  const LabelIndex idx = LabelIndex::build(numbered_paths(12), enc);
  const auto path = std::filesystem::temp_directory_path() / "taxotag_index_test.json";
  idx.save(path);
  const LabelIndex back = LabelIndex::load(path);
  REQUIRE(back.size() == idx.size());
  CHECK(back.dim() == idx.dim());
  CHECK(back.normalized() == idx.normalized());
  CHECK(back.encoder_id() == idx.encoder_id());
  Rng rng(3);
  const Vec q = random_vec(idx.dim(), rng);
  const auto a = idx.top_k_cosine(q, idx.size());
  const auto b = back.top_k_cosine(q, back.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == b[i].label);
    CHECK_THAT(a[i].score, Catch::Matchers::WithinAbs(b[i].score, 1e-6));
  }
  std::filesystem::remove(path);
}

TEST_CASE("add_labels extends without touching existing entries") {
  const HashSentenceEncoder enc;
  const LabelIndex idx = LabelIndex::build(numbered_paths(10), enc);
  const TaxonomyPath fresh = TaxonomyPath::make("new", "unseen", "path");
  const LabelIndex grown = add_labels(idx, {fresh}, enc);
  CHECK(grown.size() == idx.size() + 1);
  for (int i = 0; i < idx.size(); ++i) {
    CHECK(grown.entry(i).label == idx.entry(i).label);  // stable positions
    CHECK(grown.entry(i).vector == idx.entry(i).vector);  // bitwise
  }
  CHECK(grown.contains(fresh));

  const LabelIndex same = add_labels(idx, {idx.entry(0).label}, enc);
  CHECK(same.size() == idx.size());

  const HashSentenceEncoder other(HashEncoderConfig{.dim = 7, .seed = 1});
  CHECK_THROWS_AS(add_labels(idx, {fresh}, other), DimensionMismatchError);
}
