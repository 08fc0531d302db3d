// Copyright 2026 The EDDA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "edda/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "edda/error.hpp"
#include "oracles.hpp"

namespace edda {
namespace {

ModelSpec small_spec(EncoderKind encoder = EncoderKind::kGRec) {
  ModelSpec spec;
  spec.inter_dim = 3;
  spec.intra_dim = 3;
  spec.align_dim = 2;
  spec.encoder = encoder;
  spec.grec = {2, 0.1};
  return spec;
}

struct Instance {
  MultiDomainDataset dataset;
  std::vector<Triplet> triplets;
  std::vector<AlignPair> pairs;
};

// Three overlapping domains, <= 30 nodes and <= 60 edges in total.
Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto ds = ingest(testing::random_records(rng, 3, 6, 5, 12));
  std::vector<Triplet> triplets;
  for (DomainId d = 0; d < 3; ++d) {
    auto t = sample_triplets(ds, d, 6, rng);
    triplets.insert(triplets.end(), t.begin(), t.end());
  }
  const auto sets = mine_all_pairs(ds, 1, WalkConfig{4, 50, seed});
  auto pairs = resolve_pairs(ds, sets);
  return {std::move(ds), std::move(triplets), std::move(pairs)};
}

// Central differences of total_loss w.r.t. every `stride`-th scalar.
void check_gradients(const EDModel& model, const Instance& inst, const TrainConfig& cfg,
                     std::size_t stride, std::size_t* checked) {
  const auto analytic = gradients(model, inst.dataset, inst.triplets, inst.pairs, cfg);
  EDModel probe = model;
  std::vector<Matrix*> blocks;
  std::vector<const Matrix*> grads;
  probe.params().for_each([&](Matrix& m) { blocks.push_back(&m); });
  analytic.grad.for_each([&](const Matrix& m) { grads.push_back(&m); });
  ASSERT_EQ(blocks.size(), grads.size());
  const double h = 1e-5;
  std::size_t index = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (Eigen::Index e = 0; e < blocks[b]->size(); ++e, ++index) {
      if (index % stride != 0) continue;
      double& x = blocks[b]->data()[e];
      const double saved = x;
      x = saved + h;
      const double up = total_loss(probe, inst.dataset, inst.triplets, inst.pairs, cfg).total;
      x = saved - h;
      const double down = total_loss(probe, inst.dataset, inst.triplets, inst.pairs, cfg).total;
      x = saved;
      const double numeric = (up - down) / (2 * h);
      const double a = grads[b]->data()[e];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      EXPECT_LT(rel, 1e-4) << "block " << b << " element " << e << " analytic " << a
                           << " numeric " << numeric;
      ++*checked;
    }
  }
}

TEST(LossTest, KnownValues) {
  const std::vector<double> pos = {1.0};
  const std::vector<double> neg = {0.0};
  EXPECT_NEAR(bpr_loss(pos, neg), 0.31326168751822286, 1e-12);
  EXPECT_NEAR(bpr_loss(neg, neg), std::log(2.0), 1e-15);
  EXPECT_THROW(bpr_loss(pos, std::vector<double>{}), InvalidArgument);
}

TEST(LossTest, LogSigmoidIsStable) {
  EXPECT_NEAR(log_sigmoid(-1000.0), -1000.0, 1e-9);
  EXPECT_EQ(log_sigmoid(1000.0), 0.0);
  EXPECT_TRUE(std::isfinite(log_sigmoid(-1e308)));
  for (const double x : {-5.0, -0.5, 0.0, 0.5, 5.0}) {
    EXPECT_NEAR(log_sigmoid(x), std::log(1.0 / (1.0 + std::exp(-x))), 1e-14);
  }
}

TEST(GradientTest, MatchesFiniteDifferencesGRec) {
  TrainConfig cfg;
  cfg.beta = 0.03;
  cfg.lambda = 1e-4;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = random_instance(seed);
    ASSERT_FALSE(inst.pairs.empty());
    const auto model = init_model(small_spec(), inst.dataset, seed);
    check_gradients(model, inst, cfg, 3, &checked);
  }
  EXPECT_GE(checked, 100u);
}

TEST(GradientTest, MatchesFiniteDifferencesMf) {
  TrainConfig cfg;
  cfg.beta = 0.5;
  cfg.lambda = 1e-3;
  std::size_t checked = 0;
  const auto inst = random_instance(7);
  const auto model = init_model(small_spec(EncoderKind::kMF), inst.dataset, 7);
  check_gradients(model, inst, cfg, 2, &checked);
  EXPECT_GT(checked, 0u);
}

TEST(GradientTest, DomainTripletsNeverReachOtherIntraTables) {
  const auto inst = random_instance(4);
  const auto model = init_model(small_spec(), inst.dataset, 4);
  std::vector<Triplet> only0;
  for (const auto& t : inst.triplets) {
    if (t.domain == 0) only0.push_back(t);
  }
  ASSERT_FALSE(only0.empty());
  TrainConfig cfg;
  cfg.beta = 0.0;
  cfg.lambda = 0.0;
  const auto res = gradients(model, inst.dataset, only0, inst.pairs, cfg);
  for (DomainId d = 1; d < 3; ++d) {
    EXPECT_TRUE((res.grad.intra[d].array() == 0.0).all());
    EXPECT_TRUE((res.grad.proj[d].array() == 0.0).all());
  }
  // The inter rows of every touched node move.
  const auto globals = inst.dataset.global_of(0);
  for (const auto& t : only0) {
    EXPECT_GT(res.grad.inter.row(globals[t.user]).norm(), 0.0);
  }

  // With L2 on, the only gradient on other domains is the decay term.
  cfg.lambda = 1e-4;
  const auto reg = gradients(model, inst.dataset, only0, {}, cfg);
  for (DomainId d = 1; d < 3; ++d) {
    EXPECT_TRUE(reg.grad.intra[d] == 2.0 * cfg.lambda * model.params().intra[d]);
  }
}

TEST(GradientTest, BetaZeroIgnoresPairs) {
  const auto inst = random_instance(5);
  const auto model = init_model(small_spec(), inst.dataset, 5);
  TrainConfig cfg;
  cfg.beta = 0.0;
  const auto with = gradients(model, inst.dataset, inst.triplets, inst.pairs, cfg);
  const auto without = gradients(model, inst.dataset, inst.triplets, {}, cfg);
  EXPECT_EQ(with.loss.total, without.loss.total);
  EXPECT_TRUE(with.grad.intra[0] == without.grad.intra[0]);
  EXPECT_GT(with.loss.align, 0.0);
}

TEST(GradientTest, LossTermsCompose) {
  const auto inst = random_instance(6);
  const auto model = init_model(small_spec(), inst.dataset, 6);
  TrainConfig cfg;
  const auto loss = total_loss(model, inst.dataset, inst.triplets, inst.pairs, cfg, nullptr, 2.0);
  EXPECT_NEAR(loss.total, loss.bpr + cfg.beta * 2.0 * loss.align + cfg.lambda * loss.reg,
              1e-12 * std::abs(loss.total));
  EXPECT_NEAR(loss.reg, model.params().squared_norm(), 1e-12);
  EXPECT_NEAR(loss.align, alignment_loss(model, inst.pairs), 1e-12);
}

TEST(AdamTest, FirstStepHasClosedForm) {
  const auto inst = random_instance(8);
  auto model = init_model(small_spec(), inst.dataset, 8);
  const Params before = model.params();
  Params grad = before.zeros_like();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  grad.for_each([&](Matrix& m) {
    for (Eigen::Index e = 0; e < m.size(); ++e) m.data()[e] = normal(rng);
  });
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  AdamState state = AdamState::zeros_like(before);
  adam_step(model.params(), grad, state, cfg);
  EXPECT_EQ(state.step, 1);
  const double lr = cfg.learning_rate;
  const double eps = cfg.adam_eps;
  const Matrix expected =
      (before.inter.array() - lr * grad.inter.array() / (grad.inter.array().abs() + eps))
          .matrix();
  EXPECT_TRUE(model.params().inter.isApprox(expected, 1e-12));
  // A zero gradient leaves the parameter where it is.
  Params zero = before.zeros_like();
  AdamState fresh = AdamState::zeros_like(before);
  auto copy = before;
  adam_step(copy, zero, fresh, cfg);
  EXPECT_TRUE(copy.inter == before.inter);
}

TEST(SamplingTest, TripletsAreValid) {
  std::mt19937_64 rng(9);
  const auto ds = ingest(testing::random_records(rng, 2, 10, 8, 25));
  for (DomainId d = 0; d < 2; ++d) {
    const auto& g = ds.domain(d);
    for (const auto& t : sample_triplets(ds, d, 200, rng)) {
      EXPECT_EQ(t.domain, d);
      EXPECT_TRUE(g.has_edge(t.user, t.pos_item));
      EXPECT_FALSE(g.has_edge(t.user, t.neg_item));
      EXPECT_FALSE(g.is_user(t.neg_item));
    }
    const auto epoch = epoch_triplets(ds, d, rng);
    ASSERT_EQ(epoch.size(), g.num_edges());
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& t : epoch) seen.emplace(t.user, t.pos_item);
    EXPECT_EQ(seen.size(), g.num_edges());
  }
}

TEST(SamplingTest, SaturatedUsersAreSkipped) {
  // User 0 has every item; user 1 does not.
  const std::vector<Interaction> records = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}};
  const auto ds = ingest(records);
  std::mt19937_64 rng(1);
  for (const auto& t : sample_triplets(ds, 0, 20, rng)) EXPECT_EQ(t.user, 1u);
  EXPECT_EQ(epoch_triplets(ds, 0, rng).size(), 1u);
}

TEST(DropoutTest, RatioBounds) {
  std::mt19937_64 rng(10);
  const auto ds = ingest(testing::random_records(rng, 1, 30, 30, 400));
  const auto& g = ds.domain(0);
  EXPECT_EQ(edge_dropout(g, 0.0, rng), EdgeMask(g.num_edges(), 1));
  const auto mask = edge_dropout(g, 0.3, rng);
  double kept = 0;
  for (const auto m : mask) kept += m;
  EXPECT_NEAR(kept / static_cast<double>(mask.size()), 0.7, 0.08);
  EXPECT_THROW(edge_dropout(g, 1.0, rng), InvalidArgument);
}

TEST(TrainTest, ZeroEpochsKeepsInitialization) {
  const auto inst = random_instance(11);
  auto model = init_model(small_spec(), inst.dataset, 11);
  const Params before = model.params();
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto result = train(model, inst.dataset, {}, cfg);
  EXPECT_TRUE(result.log.empty());
  EXPECT_TRUE(model.params().inter == before.inter);
}

TEST(TrainTest, LossDecreasesAndRunsAreReproducible) {
  std::mt19937_64 rng(12);
  const auto ds = ingest(testing::random_records(rng, 2, 30, 20, 150));
  const auto pairs = mine_all_pairs(ds, 1, WalkConfig{4, 50, 1});
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.learning_rate = 0.02;
  cfg.batch_size = 64;
  cfg.seed = 3;
  ModelSpec spec = small_spec();
  spec.inter_dim = spec.intra_dim = spec.align_dim = 8;
  auto a = init_model(spec, ds, 1);
  auto b = init_model(spec, ds, 1);
  const auto ra = train(a, ds, pairs, cfg);
  const auto rb = train(b, ds, pairs, cfg);
  ASSERT_EQ(ra.log.size(), 30u);
  EXPECT_LT(ra.log.back().bpr, ra.log.front().bpr);
  EXPECT_TRUE(a.params().inter == b.params().inter);
  EXPECT_TRUE(a.params().intra[1] == b.params().intra[1]);
}

TEST(TrainTest, EarlyStoppingRestoresBestEpoch) {
  std::mt19937_64 rng(13);
  const auto ds = ingest(testing::random_records(rng, 1, 20, 15, 80));
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.patience = 2;
  cfg.batch_size = 32;
  // Scripted validation curve: best at epoch 3.
  const std::vector<double> curve = {0.5, 0.6, 0.9, 0.8, 0.7, 0.95};
  int calls = 0;
  Params at_best;
  TrainCallbacks callbacks;
  callbacks.validate = [&](const EDModel&) {
    return ValidationMetrics{curve[static_cast<std::size_t>(calls++)], 0.0};
  };
  callbacks.on_epoch = [&](const EpochLog& log, const EDModel& m) {
    if (log.epoch == 3) at_best = m.params();
  };
  auto model = init_model(small_spec(), ds, 2);
  const auto result = train(model, ds, {}, cfg, callbacks);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.best_epoch, 3);
  EXPECT_EQ(result.log.size(), 5u);
  EXPECT_TRUE(model.params().inter == at_best.inter);
}

TEST(TrainTest, NonFiniteLossThrowsAndDumps) {
  std::mt19937_64 rng(14);
  const auto ds = ingest(testing::random_records(rng, 1, 10, 10, 30));
  auto model = init_model(small_spec(), ds, 3);
  model.params().inter(0, 0) = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.epochs = 1;
  const auto dir = std::filesystem::temp_directory_path() / "edda_nan_dump";
  std::filesystem::remove_all(dir);
  cfg.dump_dir = dir.string();
  EXPECT_THROW(train(model, ds, {}, cfg), NumericError);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.txt"));
  std::filesystem::remove_all(dir);
}

TEST(TrainTest, ConfigValidation) {
  TrainConfig cfg;
  cfg.edge_dropout = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(TrainTest, EpochLogFormat) {
  EpochLog log{3, 1.5, 0.25, 1.75, 0.5, std::nullopt, 12.4};
  std::ostringstream with;
  write_epoch_log(with, log, true);
  EXPECT_EQ(with.str(), "3\t1.5\t0.25\t1.75\t0.5\tnan\t12\n");
  std::ostringstream without;
  write_epoch_log(without, log, false);
  EXPECT_EQ(without.str(), "3\t1.5\t0.25\t1.75\t0.5\tnan\t0\n");
}

}  // namespace
}  // namespace edda
