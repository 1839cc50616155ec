#include "taxotag/loss.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace taxotag;

namespace {

// Unit vector with a prescribed cosine against another unit vector.
Vec with_cosine(const Vec& base, double target_cos, Rng& rng) {
  Vec ortho(base.size());
  for (int i = 0; i < ortho.size(); ++i) ortho(i) = rng.gaussian();
  ortho -= ortho.dot(base) * base;
  ortho /= ortho.norm();
  return target_cos * base + std::sqrt(1.0 - target_cos * target_cos) * ortho;
}

}  // namespace

TEST_CASE("analytic hinge cases") {
  Rng rng(51);
  Vec content = Vec::Zero(8);
  for (int i = 0; i < 8; ++i) content(i) = rng.gaussian();
  content /= content.norm();

  const Vec pos_sat = with_cosine(content, 0.9, rng);
  const Vec neg_low = with_cosine(content, 0.2, rng);
  CHECK_THAT(hinge_rank_loss(content, pos_sat, {neg_low}, 0.1),
             Catch::Matchers::WithinAbs(0.0, 1e-12));

  const Vec pos_low = with_cosine(content, 0.3, rng);
  const Vec neg_a = with_cosine(content, 0.4, rng);
  const Vec neg_b = with_cosine(content, 0.1, rng);
  CHECK_THAT(hinge_rank_loss(content, pos_low, {neg_a, neg_b}, 0.1),
             Catch::Matchers::WithinAbs(0.1, 1e-12));
}

TEST_CASE("hinge errors") {
  const Vec v = Vec::Ones(4);
  CHECK_THROWS_AS(hinge_rank_loss(v, v, {}, 0.1), EmptyNegativesError);
  CHECK_THROWS_AS(hinge_rank_loss(v, Vec::Ones(3), {v}, 0.1), DimensionMismatchError);
  CHECK_THROWS_AS(hinge_rank_loss(v, v, {Vec::Ones(5)}, 0.1), DimensionMismatchError);
}

TEST_CASE("hinge is non-negative and zero exactly when every margin is met") {
  Rng rng(52);
  for (int iter = 0; iter < 2000; ++iter) {
    const int dim = 2 + static_cast<int>(rng.below(6));
    Vec content(dim), positive(dim);
    for (int i = 0; i < dim; ++i) {
      content(i) = rng.gaussian();
      positive(i) = rng.gaussian();
    }
    const int m = 1 + static_cast<int>(rng.below(4));
    std::vector<Vec> negatives;
    for (int j = 0; j < m; ++j) {
      Vec n(dim);
      for (int i = 0; i < dim; ++i) n(i) = rng.gaussian();
      negatives.push_back(std::move(n));
    }
    const double margin = 0.05 + 0.9 * rng.uniform();
    const double loss = hinge_rank_loss(content, positive, negatives, margin);
    CHECK(loss >= 0.0);
    bool all_met = true;
    for (const Vec& n : negatives)
      all_met &= (cosine(content, positive) - cosine(content, n) >= margin);
    if (all_met)
      CHECK(loss == 0.0);
    else
      CHECK(loss > 0.0);
  }
}

TEST_CASE("hinge gradient matches central finite differences away from kinks") {
  Rng rng(53);
  const double h = 1e-6;
  int done = 0;
  while (done < 30) {
    const int dim = 3 + static_cast<int>(rng.below(5));
    Vec content(dim), positive(dim);
    for (int i = 0; i < dim; ++i) {
      content(i) = rng.gaussian();
      positive(i) = rng.gaussian();
    }
    const int m = 1 + static_cast<int>(rng.below(3));
    std::vector<Vec> negatives;
    for (int j = 0; j < m; ++j) {
      Vec n(dim);
      for (int i = 0; i < dim; ++i) n(i) = rng.gaussian();
      negatives.push_back(std::move(n));
    }
    const double margin = 0.1;
    // keep away from hinge kinks so the derivative exists
    const double cp = cosine(content, positive);
    bool near_kink = false;
    for (const Vec& n : negatives)
      near_kink |= std::abs(margin - cp + cosine(content, n)) < 1e-3;
    if (near_kink) continue;
    ++done;

    const HingeLossResult res = hinge_rank_loss_with_grad(content, positive, negatives, margin);
    Vec fd(dim);
    for (int i = 0; i < dim; ++i) {
      Vec plus = content, minus = content;
      plus(i) += h;
      minus(i) -= h;
      fd(i) = (hinge_rank_loss(plus, positive, negatives, margin) -
               hinge_rank_loss(minus, positive, negatives, margin)) /
              (2 * h);
    }
    const double denom = std::max(1e-12, res.d_content.norm() + fd.norm());
    CHECK((res.d_content - fd).norm() / denom < 1e-4);
  }
}
