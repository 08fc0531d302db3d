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

// Training objective and optimizer.
//
//   L = sum_d sum_(u,i+,i-) -ln sigmoid(f(u,i+|d) - f(u,i-|d))
//     + beta   * sum_(d,d') sum_(u,v) || e^d_u W_d - e^d'_v W_d' ||^2
//     + lambda * ||Theta||^2
//
// Gradients are exact. Both encoders are linear and self-adjoint, so the
// gradient w.r.t. an input table is the encoder applied to the gradient
// w.r.t. its output. A triplet of domain d never reaches intra[d'] for
// d' != d; the inter table receives gradient from every domain.

#ifndef EDDA_TRAINER_HPP_
#define EDDA_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "edda/edmodel.hpp"
#include "edda/encoders.hpp"
#include "edda/mdgraph.hpp"
#include "edda/walker.hpp"

namespace edda {

struct TrainConfig {
  double beta = 0.03;
  double lambda = 1e-4;
  double learning_rate = 1e-3;
  std::size_t batch_size = 8092;
  double edge_dropout = 0.3;
  int epochs = 200;
  std::size_t k = 1;  // similar nodes kept per node when mining pairs
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  // Early stopping on validation AUC; 0 disables. Needs a validate callback.
  int patience = 20;
  // Alignment pairs are subsampled per batch above this many batch sizes.
  std::size_t align_full_factor = 10;
  int threads = 1;
  // Written to before a NumericError is thrown, when set.
  std::string dump_dir;

  void validate() const;
};

// A BPR sample. Node fields are local indices of `domain`'s graph.
struct Triplet {
  DomainId domain = 0;
  std::uint32_t user = 0;
  std::uint32_t pos_item = 0;
  std::uint32_t neg_item = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// `count` triplets with uniformly random observed (u, i+) and a uniformly
// random unobserved i- (rejection sampling). Users that interacted with every
// item of the domain are skipped with a warning. Needs >= 2 items.
std::vector<Triplet> sample_triplets(const MultiDomainDataset& dataset, DomainId d,
                                     std::size_t count, std::mt19937_64& rng);

// One triplet per observed interaction of domain d, shuffled.
std::vector<Triplet> epoch_triplets(const MultiDomainDataset& dataset, DomainId d,
                                    std::mt19937_64& rng);

// ln sigmoid(x), stable for large |x|.
double log_sigmoid(double x);

// sum -ln sigmoid(pos - neg). Throws InvalidArgument on a length mismatch.
double bpr_loss(std::span<const double> pos, std::span<const double> neg);

// A mined pair resolved to local node indices.
struct AlignPair {
  DomainId d = 0;
  std::uint32_t u = 0;
  DomainId d2 = 0;
  std::uint32_t v = 0;
};

// Throws DataError if a node is missing from its domain.
std::vector<AlignPair> resolve_pairs(const MultiDomainDataset& dataset,
                                     std::span<const SimilarPairSet> sets);

// sum over pairs of || e^d_u W_d - e^d'_v W_d' ||^2 on the input intra tables.
double alignment_loss(const EDModel& model, std::span<const AlignPair> pairs);

struct LossTerms {
  double bpr = 0.0;
  double align = 0.0;  // unweighted alignment sum
  double reg = 0.0;    // ||Theta||^2
  double total = 0.0;  // bpr + beta * align_scale * align + lambda * reg
};

// `align_scale` reweights the alignment sum, used when it is estimated from a
// subsample.
LossTerms total_loss(const EDModel& model, const MultiDomainDataset& dataset,
                     std::span<const Triplet> triplets, std::span<const AlignPair> pairs,
                     const TrainConfig& cfg, const std::vector<EdgeMask>* masks = nullptr,
                     double align_scale = 1.0);

struct GradientResult {
  LossTerms loss;
  Params grad;
};

GradientResult gradients(const EDModel& model, const MultiDomainDataset& dataset,
                         std::span<const Triplet> triplets,
                         std::span<const AlignPair> pairs, const TrainConfig& cfg,
                         const std::vector<EdgeMask>* masks = nullptr,
                         double align_scale = 1.0);

struct AdamState {
  Params m;
  Params v;
  std::int64_t step = 0;

  static AdamState zeros_like(const Params& params);
};

// Bias-corrected Adam update of every parameter.
void adam_step(Params& params, const Params& grads, AdamState& state,
               const TrainConfig& cfg);

// Keeps each edge independently with probability 1 - ratio.
EdgeMask edge_dropout(const DomainGraph& graph, double ratio, std::mt19937_64& rng);

struct EpochLog {
  int epoch = 0;
  double bpr = 0.0;
  double align = 0.0;
  double total = 0.0;
  std::optional<double> val_auc;
  std::optional<double> val_recall;
  double wall_ms = 0.0;
};

struct ValidationMetrics {
  double auc = 0.0;
  double recall_at_1 = 0.0;
};

struct TrainCallbacks {
  std::function<ValidationMetrics(const EDModel&)> validate;
  std::function<void(const EpochLog&, const EDModel&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochLog> log;
  int best_epoch = 0;  // epoch whose parameters the model ends with
  bool stopped_early = false;
};

// Runs cfg.epochs epochs. Every epoch uses each training interaction once as
// a positive, in per-domain batches interleaved across domains in proportion
// to their size. With a validate callback and patience > 0 the model ends at
// the best validation AUC. Throws NumericError on a non-finite loss.
TrainResult train(EDModel& model, const MultiDomainDataset& dataset,
                  std::span<const SimilarPairSet> pairs, const TrainConfig& cfg,
                  const TrainCallbacks& callbacks = {});

// Tab-separated epoch, L_BPR, L_align, L_total, val_AUC, val_Recall@1,
// wall_ms. `with_time = false` writes 0 for wall_ms.
void write_epoch_log(std::ostream& out, const EpochLog& log, bool with_time);

}  // namespace edda

#endif  // EDDA_TRAINER_HPP_
