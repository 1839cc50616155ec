// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. Exit code 0 only when all criteria pass. CPU-only,
// seconds to run, no pretrained downloads (tiny trainable encoder fixture).

#include "taxotag/taxotag.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace taxotag;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_err(const Mat& a, const Mat& b) {
  const double denom = std::max(1e-12, a.norm() + b.norm());
  return (a - b).norm() / denom;
}

// Central differences carry ~1e-10 of absolute roundoff (machine epsilon
// over 2h), so relative error at 1e-4 is only resolvable for gradient norms
// above ~1e-5. Near-degenerate instances (e.g. value rows spanning a single
// ray, where the cosine loss is locally constant) produce genuinely tiny
// gradients; those are held to absolute agreement at the noise floor.
double grad_rel_err(const Mat& analytic, const Mat& fd) {
  const double scale = analytic.norm() + fd.norm();
  if (scale < 1e-5) return (analytic - fd).norm() < 1e-8 ? 0.0 : 1.0;
  return (analytic - fd).norm() / scale;
}

Mat random_mat(int r, int c, Rng& rng) { return gaussian_matrix(r, c, 1.0, rng); }

struct Instance {
  Mat neigh, tokens;
  FusionWeights w;
};

Instance random_instance(Rng& rng, int max_dim = 8) {
  const auto dim = [&](int lo) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dim))); };
  Instance inst;
  const int l = dim(1), n = dim(1), d_lab = dim(1), d_in = dim(1), d = dim(1);
  inst.neigh = random_mat(l, d_lab, rng);
  inst.tokens = random_mat(n, d_in, rng);
  inst.w.w_q = random_mat(d_lab, d, rng);
  inst.w.w_k = random_mat(d_in, d, rng);
  inst.w.w_v = random_mat(d_in, d, rng);
  return inst;
}

// Independent step-by-step recomputation at extended precision.
Mat reference_per_label(const Instance& inst) {
  using LD = long double;
  const int l = static_cast<int>(inst.neigh.rows());
  const int n = static_cast<int>(inst.tokens.rows());
  const int d = static_cast<int>(inst.w.w_q.cols());
  auto matmul = [](const Mat& a, const Mat& b) {
    std::vector<std::vector<LD>> out(static_cast<std::size_t>(a.rows()),
                                     std::vector<LD>(static_cast<std::size_t>(b.cols()), 0.0L));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
          out[std::size_t(i)][std::size_t(j)] += LD(a(i, k)) * LD(b(k, j));
    return out;
  };
  const auto q = matmul(inst.neigh, inst.w.w_q);
  const auto k = matmul(inst.tokens, inst.w.w_k);
  const auto v = matmul(inst.tokens, inst.w.w_v);
  const LD scale = std::sqrt(LD(d));
  Mat per_label(l, d);
  for (int i = 0; i < l; ++i) {
    std::vector<LD> scores(std::size_t(n), 0.0L);
    for (int j = 0; j < n; ++j) {
      LD acc = 0.0L;
      for (int c = 0; c < d; ++c) acc += q[std::size_t(i)][std::size_t(c)] * k[std::size_t(j)][std::size_t(c)];
      scores[std::size_t(j)] = acc / scale;
    }
    LD mx = scores[0];
    for (LD s : scores) mx = std::max(mx, s);
    std::vector<LD> alpha(static_cast<std::size_t>(n), 0.0L);
    LD sum = 0.0L;
    for (int j = 0; j < n; ++j) {
      alpha[std::size_t(j)] = std::exp(scores[std::size_t(j)] - mx);
      sum += alpha[std::size_t(j)];
    }
    for (int c = 0; c < d; ++c) {
      LD acc = 0.0L;
      for (int j = 0; j < n; ++j) acc += (alpha[std::size_t(j)] / sum) * v[std::size_t(j)][std::size_t(c)];
      per_label(i, c) = double(acc);
    }
  }
  return per_label;
}

Outcome criterion_attention_recompute() {
  Rng rng(1001);
  double worst_rel = 0.0, worst_row = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const Instance inst = random_instance(rng);
    const FusedRepresentation fr = cross_attend(inst.neigh, inst.tokens, inst.w);
    worst_rel = std::max(worst_rel, rel_err(fr.per_label, reference_per_label(inst)));
    for (Eigen::Index r = 0; r < fr.alpha.rows(); ++r)
      worst_row = std::max(worst_row, std::abs(fr.alpha.row(r).sum() - 1.0));
  }
  std::ostringstream os;
  os << "200 instances, max rel err " << worst_rel << " (tol 1e-10), max |row sum - 1| "
     << worst_row << " (tol 1e-6)";
  return {worst_rel < 1e-10 && worst_row < 1e-6, os.str()};
}

struct LossInstance {
  Instance inst;
  Vec positive;
  std::vector<Vec> negatives;
};

// Requires at least one active hinge term and keeps all terms away from the
// kink so central differences are valid.
LossInstance loss_instance(Rng& rng) {
  while (true) {
    LossInstance li;
    li.inst = random_instance(rng, 6);
    const int d = li.inst.w.d();
    if (d < 2) continue;
    li.positive = random_mat(d, 1, rng);
    li.positive /= li.positive.norm();
    const int m = 1 + static_cast<int>(rng.below(3));
    for (int j = 0; j < m; ++j) {
      Vec n = random_mat(d, 1, rng);
      li.negatives.push_back(n / n.norm());
    }
    const Vec content = cross_attend(li.inst.neigh, li.inst.tokens, li.inst.w).pooled;
    if (content.norm() < 1e-2) continue;
    const double cp = cosine(content, li.positive);
    bool ok = true, any_active = false;
    for (const Vec& n : li.negatives) {
      const double term = 0.1 - cp + cosine(content, n);
      ok &= std::abs(term) > 1e-3;
      any_active |= term > 0;
    }
    if (ok && any_active) return li;
  }
}

Outcome criterion_gradient_checks() {
  Rng rng(1002);
  const double h = 1e-6;
  double worst = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const LossInstance li = loss_instance(rng);
    const auto loss_of = [&](const Instance& x) {
      return hinge_rank_loss(cross_attend(x.neigh, x.tokens, x.w).pooled, li.positive,
                             li.negatives, 0.1);
    };
    auto [fr, st] = cross_attend_forward(li.inst.neigh, li.inst.tokens, li.inst.w);
    const HingeLossResult hl = hinge_rank_loss_with_grad(fr.pooled, li.positive, li.negatives, 0.1);
    const Mat d_per_label = lift_pooled_grad(fr.per_label.rows(), hl.d_content);
    const CrossAttendGrads g =
        cross_attend_backward(li.inst.neigh, li.inst.tokens, li.inst.w, st, d_per_label);

    const auto fd_of = [&](std::function<Mat&(Instance&)> pick, const Mat& analytic) {
      Mat fd(analytic.rows(), analytic.cols());
      for (Eigen::Index i = 0; i < analytic.rows(); ++i)
        for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
          Instance plus = li.inst, minus = li.inst;
          pick(plus)(i, j) += h;
          pick(minus)(i, j) -= h;
          fd(i, j) = (loss_of(plus) - loss_of(minus)) / (2 * h);
        }
      return grad_rel_err(analytic, fd);
    };
    worst = std::max(worst, fd_of([](Instance& x) -> Mat& { return x.w.w_q; }, g.d_w_q));
    worst = std::max(worst, fd_of([](Instance& x) -> Mat& { return x.w.w_k; }, g.d_w_k));
    worst = std::max(worst, fd_of([](Instance& x) -> Mat& { return x.w.w_v; }, g.d_w_v));

    // pooled projection: the content representation when attention is off
    const int d_in = static_cast<int>(li.inst.tokens.cols());
    const int d_lab = static_cast<int>(li.inst.neigh.cols());
    Mat proj = random_mat(d_in, d_lab, rng);
    Vec pos_lab = random_mat(d_lab, 1, rng);
    pos_lab /= pos_lab.norm();
    std::vector<Vec> neg_lab;
    for (int j = 0; j < 2; ++j) {
      Vec n = random_mat(d_lab, 1, rng);
      neg_lab.push_back(n / n.norm());
    }
    const Vec pooled = li.inst.tokens.colwise().mean().transpose();
    const auto proj_loss = [&](const Mat& p) {
      return hinge_rank_loss(p.transpose() * pooled, pos_lab, neg_lab, 0.1);
    };
    const Vec content = proj.transpose() * pooled;
    const double cp = cosine(content, pos_lab);
    bool usable = content.norm() > 1e-2, any = false;
    for (const Vec& n : neg_lab) {
      const double term = 0.1 - cp + cosine(content, n);
      usable &= std::abs(term) > 1e-3;
      any |= term > 0;
    }
    if (usable && any) {
      const HingeLossResult hp = hinge_rank_loss_with_grad(content, pos_lab, neg_lab, 0.1);
      const Mat analytic = pooled * hp.d_content.transpose();
      Mat fd(analytic.rows(), analytic.cols());
      for (Eigen::Index i = 0; i < analytic.rows(); ++i)
        for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
          Mat plus = proj, minus = proj;
          plus(i, j) += h;
          minus(i, j) -= h;
          fd(i, j) = (proj_loss(plus) - proj_loss(minus)) / (2 * h);
        }
      worst = std::max(worst, grad_rel_err(analytic, fd));
    }
  }
  std::ostringstream os;
  os << "50 instances, max rel err " << worst << " (tol 1e-4)";
  return {worst < 1e-4, os.str()};
}

Outcome criterion_lipschitz_bound() {
  Rng rng(1003);
  int violations = 0;
  double worst_margin = 1e300;
  for (int iter = 0; iter < 1000; ++iter) {
    const Instance inst = random_instance(rng);
    const int d_lab = static_cast<int>(inst.w.w_q.rows());
    Vec li(d_lab), lj(d_lab);
    for (int i = 0; i < d_lab; ++i) {
      li(i) = rng.gaussian();
      lj(i) = rng.gaussian();
    }
    const BoundGap gap = attention_bound_gap(li, lj, inst.tokens, inst.w);
    if (gap.lhs > gap.rhs) ++violations;
    worst_margin = std::min(worst_margin, gap.rhs - gap.lhs);
  }
  std::ostringstream os;
  os << "1000 draws, " << violations << " violations, min (rhs - lhs) = " << worst_margin;
  return {violations == 0, os.str()};
}

Outcome criterion_oracle_equivalence() {
  Rng rng(1004);
  int fixtures = 0;
  bool ok = true;

  // top_k_cosine and top_k_euclidean against plain-loop oracles
  for (int iter = 0; iter < 100 && ok; ++iter) {
    const int n = 2 + static_cast<int>(rng.below(999));
    const int dim = 4 + static_cast<int>(rng.below(16));
    std::vector<LabelEmbedding> entries;
    for (int i = 0; i < n; ++i) {
      Vec v(dim);
      for (int d = 0; d < dim; ++d) v(d) = rng.gaussian();
      entries.push_back({TaxonomyPath::make("s", "c", "t" + std::to_string(i)), v});
    }
    const LabelIndex idx = LabelIndex::from_entries(entries, "fixture", true);
    Vec q(dim);
    for (int d = 0; d < dim; ++d) q(d) = rng.gaussian();
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));

    std::vector<std::pair<double, int>> cos_oracle, euc_oracle;
    for (int i = 0; i < idx.size(); ++i) {
      const Vec& e = idx.entry(i).vector;
      double dot = 0, nq = 0, acc = 0;
      for (int d = 0; d < dim; ++d) {
        dot += q(d) * e(d);
        nq += q(d) * q(d);
        const double diff = e(d) - q(d);
        acc += diff * diff;
      }
      cos_oracle.emplace_back(dot / std::sqrt(nq), i);  // entries are unit norm
      euc_oracle.emplace_back(std::sqrt(acc), i);
    }
    std::stable_sort(cos_oracle.begin(), cos_oracle.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::stable_sort(euc_oracle.begin(), euc_oracle.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const auto got_cos = idx.top_k_cosine(q, k);
    const auto got_euc = idx.top_k_euclidean(q, k);
    for (int i = 0; i < k; ++i) {
      ok &= got_cos[std::size_t(i)].pos == cos_oracle[std::size_t(i)].second;
      ok &= got_euc.labels[std::size_t(i)] == idx.entry(euc_oracle[std::size_t(i)].second).label;
    }
    ++fixtures;
  }

  // sample_hard_negatives against an exhaustive oracle
  for (int iter = 0; iter < 100 && ok; ++iter) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const int dim = 4;
    std::vector<LabelEmbedding> pool;
    for (int i = 0; i < n; ++i) {
      Vec v(dim);
      for (int d = 0; d < dim; ++d) v(d) = rng.gaussian();
      pool.push_back({TaxonomyPath::make("s", "c", "t" + std::to_string(i)), v});
    }
    Vec content(dim);
    for (int d = 0; d < dim; ++d) content(d) = rng.gaussian();
    const TaxonomyPath gold = pool[rng.below(pool.size())].label;
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto got = sample_hard_negatives(content, pool, gold, k);
    std::vector<std::pair<double, int>> oracle;
    for (int i = 0; i < n; ++i) {
      if (pool[std::size_t(i)].label == gold) continue;
      oracle.emplace_back(cosine(content, pool[std::size_t(i)].vector), i);
    }
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    ok &= got.size() == std::min<std::size_t>(std::size_t(k), oracle.size());
    for (std::size_t i = 0; ok && i < got.size(); ++i)
      ok &= got[i].label == pool[std::size_t(oracle[i].second)].label;
    ++fixtures;
  }

  // recall_at_k against a membership-count oracle
  for (int iter = 0; iter < 100 && ok; ++iter) {
    const int docs = 1 + static_cast<int>(rng.below(50));
    const int list_len = 1 + static_cast<int>(rng.below(10));
    const int k = 1 + static_cast<int>(rng.below(10));
    std::vector<RankedPrediction> preds;
    std::vector<TaxonomyPath> golds;
    int oracle_hits = 0;
    for (int d = 0; d < docs; ++d) {
      const TaxonomyPath gold = TaxonomyPath::make("g", "g", "g" + std::to_string(d));
      const int gold_rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(list_len + 3)));
      RankedPrediction p;
      for (int r = 1; r <= list_len; ++r) {
        ScoredLabel s;
        s.label = (r == gold_rank) ? gold : TaxonomyPath::make("f", "f", "f" + std::to_string(1000 * d + r));
        s.score = 1.0 - 0.01 * r;
        p.ranked.push_back(std::move(s));
      }
      if (gold_rank <= std::min(k, list_len)) ++oracle_hits;
      preds.push_back(std::move(p));
      golds.push_back(gold);
    }
    ok &= recall_at_k(preds, golds, k) == double(oracle_hits) / double(docs);
    ++fixtures;
  }

  std::ostringstream os;
  os << fixtures << " fixtures across 4 operations, all " << (ok ? "matched" : "NOT matched");
  return {ok, os.str()};
}

Outcome criterion_hinge_loss() {
  Rng rng(1005);
  // analytic cases at margin 0.1
  Vec content(6);
  for (int i = 0; i < 6; ++i) content(i) = rng.gaussian();
  content /= content.norm();
  auto with_cos = [&](double c) {
    Vec o(6);
    for (int i = 0; i < 6; ++i) o(i) = rng.gaussian();
    o -= o.dot(content) * content;
    o /= o.norm();
    return Vec(c * content + std::sqrt(1 - c * c) * o);
  };
  const double case1 = hinge_rank_loss(content, with_cos(0.9), {with_cos(0.2)}, 0.1);
  const double case2 = hinge_rank_loss(content, with_cos(0.3), {with_cos(0.4), with_cos(0.1)}, 0.1);
  const bool analytic_ok = std::abs(case1 - 0.0) < 1e-12 && std::abs(case2 - 0.1) < 1e-12;

  int negative_hits = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const int dim = 2 + static_cast<int>(rng.below(6));
    Vec c(dim), p(dim);
    for (int i = 0; i < dim; ++i) {
      c(i) = rng.gaussian();
      p(i) = rng.gaussian();
    }
    std::vector<Vec> negs;
    const int m = 1 + static_cast<int>(rng.below(4));
    for (int j = 0; j < m; ++j) {
      Vec n(dim);
      for (int i = 0; i < dim; ++i) n(i) = rng.gaussian();
      negs.push_back(std::move(n));
    }
    if (hinge_rank_loss(c, p, negs, 0.05 + 0.9 * rng.uniform()) < 0.0) ++negative_hits;
  }
  std::ostringstream os;
  os << "cases (0.9,{0.2})->" << case1 << ", (0.3,{0.4,0.1})->" << case2 << "; " << negative_hits
     << "/10000 negativity violations";
  return {analytic_ok && negative_hits == 0, os.str()};
}

struct SyntheticRuns {
  Corpus corpus;
  TrainConfig base;
  TrainResult hard;
  double hard_seconds = 0.0;
};

SyntheticRuns& synthetic_runs() {
  static SyntheticRuns runs = [] {
    SynthConfig sc;  // 40 labels, 400 train / 100 held out
    SyntheticRuns r{make_synthetic_corpus(sc), TrainConfig{}, TrainResult{Model{}, LabelIndex{}, {}, {}, 0}, 0.0};
    r.base.epochs = 10;
    const auto t0 = std::chrono::steady_clock::now();
    r.hard = train(r.corpus, r.base, TinyEncoderConfig{}, HashEncoderConfig{});
    r.hard_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return runs;
}

Outcome criterion_synthetic_end_to_end() {
  SyntheticRuns& r = synthetic_runs();
  const EvalReport rep = evaluate(r.corpus, Split::Val, r.hard.model, r.hard.index,
                                  {1, 3, 5}, r.base.inference_options());
  const auto& m = r.hard.metrics;
  const bool loss_monotone =
      m.size() >= 3 && m[0].mean_loss >= m[1].mean_loss && m[1].mean_loss >= m[2].mean_loss;
  const bool fast_enough = r.hard_seconds < 300.0;
  std::ostringstream os;
  os << "held-out R@1 = " << rep.recall.at(1) << " (need >= 0.9), first-3 losses "
     << m[0].mean_loss << " >= " << m[1].mean_loss << " >= " << m[2].mean_loss << ", train time "
     << r.hard_seconds << "s (limit 300s)";
  return {rep.recall.at(1) >= 0.9 && loss_monotone && fast_enough, os.str()};
}

Outcome criterion_hard_vs_random() {
  SyntheticRuns& r = synthetic_runs();
  TrainConfig rand_cfg = r.base;
  rand_cfg.negative_mode = NegativeMode::Random;
  const TrainResult rnd = train(r.corpus, rand_cfg, TinyEncoderConfig{}, HashEncoderConfig{});
  bool dominated = true, strict = false;
  std::ostringstream os;
  os << "per-epoch R@1 hard vs random:";
  for (std::size_t e = 0; e < r.hard.metrics.size(); ++e) {
    const double h = r.hard.metrics[e].recall.at(1);
    const double x = rnd.metrics[e].recall.at(1);
    dominated &= h >= x;
    strict |= h > x;
    os << " " << h << "/" << x;
  }
  return {dominated && strict, os.str()};
}

Outcome criterion_unseen_label() {
  SyntheticRuns& r = synthetic_runs();
  const HashSentenceEncoder enc{HashEncoderConfig{}};
  const TaxonomyPath fresh = synthetic_unseen_labels(SynthConfig{})[0];

  const Mat embed_before = r.hard.model.encoder.embed();
  const Mat proj_before = r.hard.model.pooled_proj;
  const LabelIndex grown = add_labels(r.hard.index, {fresh}, enc);
  const bool weights_untouched = r.hard.model.encoder.embed() == embed_before &&
                                 r.hard.model.pooled_proj == proj_before;

  bool entries_untouched = grown.size() == r.hard.index.size() + 1;
  for (int i = 0; i < r.hard.index.size(); ++i)
    entries_untouched &= grown.entry(i).vector == r.hard.index.entry(i).vector;

  const std::string probe =
      model_input_text(r.corpus.docs()[std::size_t(r.corpus.split_indices(Split::Val)[0])]);
  const auto before = tag_document(r.hard.model, r.hard.index, probe, r.hard.index.size(),
                                   r.base.inference_options());
  const auto after =
      tag_document(r.hard.model, grown, probe, grown.size(), r.base.inference_options());
  double max_delta = 0.0;
  for (const auto& a : before.ranked)
    for (const auto& b : after.ranked)
      if (a.label == b.label) max_delta = std::max(max_delta, std::abs(a.score - b.score));

  Rng rng(4242);
  const std::string doc = synthetic_question(fresh, 2, 1, rng);
  const auto pred = tag_document(r.hard.model, grown, doc, 3, r.base.inference_options());
  int rank = -1;
  for (std::size_t i = 0; i < pred.ranked.size(); ++i)
    if (pred.ranked[i].label == fresh) rank = int(i) + 1;

  std::ostringstream os;
  os << "weights untouched: " << (weights_untouched ? "yes" : "NO")
     << ", old entries bitwise: " << (entries_untouched ? "yes" : "NO")
     << ", max old-score delta " << max_delta << " (tol 1e-6), \"" << fresh.sequence()
     << "\" rank " << rank << " (need <= 3)";
  return {weights_untouched && entries_untouched && max_delta <= 1e-6 && rank >= 1 && rank <= 3,
          os.str()};
}

Outcome criterion_ablation_ordering() {
  SyntheticRuns& r = synthetic_runs();
  TrainConfig no_att = r.base;
  no_att.attention_enabled = false;
  no_att.inference_mode = InferenceMode::Pooled;
  const TrainResult ablated = train(r.corpus, no_att, TinyEncoderConfig{}, HashEncoderConfig{});

  TrainConfig untrained_cfg = r.base;
  untrained_cfg.epochs = 0;
  const TrainResult untrained = train(r.corpus, untrained_cfg, TinyEncoderConfig{}, HashEncoderConfig{});

  const double full = evaluate(r.corpus, Split::Val, r.hard.model, r.hard.index, {1},
                               r.base.inference_options())
                          .recall.at(1);
  const double no_att_r1 = evaluate(r.corpus, Split::Val, ablated.model, ablated.index, {1},
                                    no_att.inference_options())
                               .recall.at(1);
  const double baseline = evaluate(r.corpus, Split::Val, untrained.model, untrained.index, {1},
                                   untrained_cfg.inference_options())
                              .recall.at(1);
  std::ostringstream os;
  os << "full " << full << " >= no-attention " << no_att_r1 << " >= untrained " << baseline;
  return {full >= no_att_r1 && no_att_r1 >= baseline, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"attention matches extended-precision recomputation", criterion_attention_recompute},
      {"gradients match central finite differences", criterion_gradient_checks},
      {"attention-difference bound holds on random draws", criterion_lipschitz_bound},
      {"top-k / negatives / recall match brute-force oracles", criterion_oracle_equivalence},
      {"hinge loss analytic cases and non-negativity", criterion_hinge_loss},
      {"synthetic end-to-end training reaches R@1 >= 0.9", criterion_synthetic_end_to_end},
      {"hard negatives dominate random negatives per epoch", criterion_hard_vs_random},
      {"unseen labels become retrievable without retraining", criterion_unseen_label},
      {"ablation ordering: full >= no-attention >= untrained", criterion_ablation_ordering},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
              << criteria[i].first << " -- " << out.detail << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
