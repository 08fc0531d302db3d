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

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "edda/error.hpp"

namespace edda {

void TrainConfig::validate() const {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  if (!(edge_dropout >= 0.0 && edge_dropout < 1.0)) {
    throw InvalidArgument("edge_dropout must be in [0, 1)");
  }
  if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidArgument("Adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw InvalidArgument("adam_eps must be > 0");
  if (patience < 0) throw InvalidArgument("patience must be >= 0");
  if (align_full_factor == 0) throw InvalidArgument("align_full_factor must be >= 1");
}

namespace {

// Draws an item of domain `g` not adjacent to `user`.
std::uint32_t sample_negative(const DomainGraph& g, std::uint32_t user,
                              std::mt19937_64& rng) {
  const auto nu = static_cast<std::uint32_t>(g.num_users());
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(g.num_items()) - 1);
  for (;;) {
    const std::uint32_t item = nu + pick(rng);
    if (!g.has_edge(user, item)) return item;
  }
}

bool saturated(const DomainGraph& g, std::uint32_t user) {
  return g.degree(user) >= g.num_items();
}

void check_sampling_domain(const MultiDomainDataset& dataset, DomainId d) {
  if (d >= dataset.num_domains()) throw InvalidArgument("domain id out of range");
  if (dataset.domain(d).num_items() < 2) {
    throw InvalidArgument("negative sampling needs at least 2 items in domain " +
                          std::to_string(d));
  }
}

}  // namespace

std::vector<Triplet> sample_triplets(const MultiDomainDataset& dataset, DomainId d,
                                     std::size_t count, std::mt19937_64& rng) {
  check_sampling_domain(dataset, d);
  const auto& g = dataset.domain(d);
  std::vector<Triplet> out;
  if (count == 0) return out;
  std::size_t saturated_edges = 0;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    if (saturated(g, g.edge_user(e))) ++saturated_edges;
  }
  if (saturated_edges == g.num_edges()) {
    spdlog::warn("domain {}: every user interacted with every item; no triplets", d);
    return out;
  }
  if (saturated_edges > 0) {
    spdlog::warn("domain {}: skipping users that interacted with every item", d);
  }
  out.reserve(count);
  std::uniform_int_distribution<std::uint32_t> pick_edge(
      0, static_cast<std::uint32_t>(g.num_edges()) - 1);
  while (out.size() < count) {
    const std::uint32_t e = pick_edge(rng);
    const std::uint32_t u = g.edge_user(e);
    if (saturated(g, u)) continue;
    out.push_back({d, u, g.edge_item(e), sample_negative(g, u, rng)});
  }
  return out;
}

std::vector<Triplet> epoch_triplets(const MultiDomainDataset& dataset, DomainId d,
                                    std::mt19937_64& rng) {
  check_sampling_domain(dataset, d);
  const auto& g = dataset.domain(d);
  std::vector<std::uint32_t> order(g.num_edges());
  for (std::uint32_t e = 0; e < order.size(); ++e) order[e] = e;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Triplet> out;
  out.reserve(order.size());
  bool warned = false;
  for (const std::uint32_t e : order) {
    const std::uint32_t u = g.edge_user(e);
    if (saturated(g, u)) {
      if (!warned) spdlog::warn("domain {}: skipping users that interacted with every item", d);
      warned = true;
      continue;
    }
    out.push_back({d, u, g.edge_item(e), sample_negative(g, u, rng)});
  }
  return out;
}

double log_sigmoid(double x) {
  // ln sigmoid(x) = -softplus(-x) = min(x, 0) - ln(1 + e^-|x|)
  return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x)));
}

double bpr_loss(std::span<const double> pos, std::span<const double> neg) {
  if (pos.size() != neg.size()) throw InvalidArgument("bpr_loss: length mismatch");
  double loss = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) loss -= log_sigmoid(pos[k] - neg[k]);
  return loss;
}

std::vector<AlignPair> resolve_pairs(const MultiDomainDataset& dataset,
                                     std::span<const SimilarPairSet> sets) {
  std::vector<AlignPair> out;
  for (const auto& set : sets) {
    const auto [d, d2] = set.domain_pair;
    if (d >= dataset.num_domains() || d2 >= dataset.num_domains() || d == d2) {
      throw DataError("pair set has an invalid domain pair");
    }
    for (const auto& p : set.pairs) {
      const auto u = dataset.domain(d).local_index(p.u);
      const auto v = dataset.domain(d2).local_index(p.v);
      if (!u || !v) {
        throw DataError("pair (" + to_string(p.u) + ", " + to_string(p.v) +
                        ") references a node missing from domain " +
                        std::to_string(u ? d2 : d));
      }
      out.push_back({d, *u, d2, *v});
    }
  }
  return out;
}

double alignment_loss(const EDModel& model, std::span<const AlignPair> pairs) {
  if (pairs.empty()) return 0.0;
  if (!model.spec().use_intra) throw InvalidArgument("alignment needs intra tables");
  const auto& p = model.params();
  double loss = 0.0;
  for (const auto& pair : pairs) {
    const Eigen::RowVectorXd diff =
        p.intra.at(pair.d).row(pair.u) * p.proj[pair.d] -
        p.intra.at(pair.d2).row(pair.v) * p.proj[pair.d2];
    loss += diff.squaredNorm();
  }
  return loss;
}

namespace {

std::vector<DomainId> domains_of(std::span<const Triplet> triplets) {
  std::vector<DomainId> ds;
  for (const auto& t : triplets) ds.push_back(t.domain);
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  return ds;
}

void check_triplets(const MultiDomainDataset& dataset, std::span<const Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.domain >= dataset.num_domains()) throw InvalidArgument("triplet domain out of range");
    const auto& g = dataset.domain(t.domain);
    if (!g.is_user(t.user) || g.is_user(t.pos_item) || g.is_user(t.neg_item) ||
        t.pos_item >= g.num_nodes() || t.neg_item >= g.num_nodes()) {
      throw InvalidArgument("triplet node indices are not (user, item, item)");
    }
  }
}

// Shared forward/backward pass. Gradients are produced only if `grad` is set.
LossTerms evaluate_objective(const EDModel& model, const MultiDomainDataset& dataset,
                             std::span<const Triplet> triplets,
                             std::span<const AlignPair> pairs, const TrainConfig& cfg,
                             const std::vector<EdgeMask>* masks, double align_scale,
                             Params* grad) {
  model.check_compatible(dataset);
  check_triplets(dataset, triplets);
  const auto& spec = model.spec();
  const auto& p = model.params();
  const int threads = cfg.threads;
  LossTerms loss;

  const auto active = domains_of(triplets);
  if (!triplets.empty()) {
    const Representations reps = encode(model, dataset, masks, threads, active);
    Matrix g_inter = Matrix::Zero(reps.inter.rows(), reps.inter.cols());
    std::vector<Matrix> g_intra(dataset.num_domains());
    for (const DomainId d : active) {
      g_intra[d] = Matrix::Zero(reps.intra[d].rows(), reps.intra[d].cols());
    }

    const bool has_inter = reps.inter.cols() > 0;
    for (const auto& t : triplets) {
      const auto map = dataset.global_of(t.domain);
      const double x = score_local(reps, dataset, t.domain, t.user, t.pos_item) -
                       score_local(reps, dataset, t.domain, t.user, t.neg_item);
      loss.bpr -= log_sigmoid(x);
      if (grad == nullptr) continue;
      // d/dx of -ln sigmoid(x) is -sigmoid(-x).
      const double gx = -std::exp(log_sigmoid(-x));
      if (has_inter) {
        const std::uint32_t u = map[t.user], i = map[t.pos_item], j = map[t.neg_item];
        g_inter.row(u) += gx * (reps.inter.row(i) - reps.inter.row(j));
        g_inter.row(i) += gx * reps.inter.row(u);
        g_inter.row(j) -= gx * reps.inter.row(u);
      }
      Matrix& gi = g_intra[t.domain];
      if (gi.cols() > 0) {
        const Matrix& r = reps.intra[t.domain];
        gi.row(t.user) += gx * (r.row(t.pos_item) - r.row(t.neg_item));
        gi.row(t.pos_item) += gx * r.row(t.user);
        gi.row(t.neg_item) -= gx * r.row(t.user);
      }
    }

    if (grad != nullptr) {
      if (spec.use_inter) {
        grad->inter = spec.encoder == EncoderKind::kMF
                          ? g_inter
                          : inter_propagate(dataset, g_inter, spec.grec, masks, threads);
      }
      if (spec.use_intra) {
        for (const DomainId d : active) {
          grad->intra[d] = spec.encoder == EncoderKind::kMF
                               ? g_intra[d]
                               : propagate(dataset.domain(d), g_intra[d], spec.grec,
                                           masks != nullptr ? &(*masks)[d] : nullptr, threads);
        }
      }
    }
  }

  if (!pairs.empty() && cfg.beta > 0.0 && !spec.use_intra) {
    throw InvalidArgument("alignment needs intra tables");
  }
  if (!pairs.empty() && spec.use_intra) {
    const double c = 2.0 * cfg.beta * align_scale;
    for (const auto& pair : pairs) {
      const auto eu = p.intra.at(pair.d).row(pair.u);
      const auto ev = p.intra.at(pair.d2).row(pair.v);
      const Eigen::RowVectorXd diff = eu * p.proj[pair.d] - ev * p.proj[pair.d2];
      loss.align += diff.squaredNorm();
      if (grad == nullptr || cfg.beta == 0.0) continue;
      grad->intra[pair.d].row(pair.u).noalias() += c * diff * p.proj[pair.d].transpose();
      grad->intra[pair.d2].row(pair.v).noalias() -= c * diff * p.proj[pair.d2].transpose();
      grad->proj[pair.d].noalias() += c * eu.transpose() * diff;
      grad->proj[pair.d2].noalias() -= c * ev.transpose() * diff;
    }
  }

  loss.reg = p.squared_norm();
  if (grad != nullptr && cfg.lambda > 0.0) {
    const double c = 2.0 * cfg.lambda;
    std::vector<const Matrix*> src;
    p.for_each([&](const Matrix& m) { src.push_back(&m); });
    std::size_t k = 0;
    grad->for_each([&](Matrix& g) { g.noalias() += c * *src[k++]; });
  }
  loss.total = loss.bpr + cfg.beta * align_scale * loss.align + cfg.lambda * loss.reg;
  return loss;
}

}  // namespace

LossTerms total_loss(const EDModel& model, const MultiDomainDataset& dataset,
                     std::span<const Triplet> triplets, std::span<const AlignPair> pairs,
                     const TrainConfig& cfg, const std::vector<EdgeMask>* masks,
                     double align_scale) {
  return evaluate_objective(model, dataset, triplets, pairs, cfg, masks, align_scale,
                            nullptr);
}

GradientResult gradients(const EDModel& model, const MultiDomainDataset& dataset,
                         std::span<const Triplet> triplets,
                         std::span<const AlignPair> pairs, const TrainConfig& cfg,
                         const std::vector<EdgeMask>* masks, double align_scale) {
  GradientResult out;
  out.grad = model.params().zeros_like();
  out.loss = evaluate_objective(model, dataset, triplets, pairs, cfg, masks, align_scale,
                                &out.grad);
  return out;
}

AdamState AdamState::zeros_like(const Params& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(Params& params, const Params& grads, AdamState& state,
               const TrainConfig& cfg) {
  std::vector<Matrix*> theta, m, v;
  std::vector<const Matrix*> g;
  params.for_each([&](Matrix& x) { theta.push_back(&x); });
  state.m.for_each([&](Matrix& x) { m.push_back(&x); });
  state.v.for_each([&](Matrix& x) { v.push_back(&x); });
  grads.for_each([&](const Matrix& x) { g.push_back(&x); });
  if (theta.size() != g.size() || theta.size() != m.size() || theta.size() != v.size()) {
    throw InvalidArgument("adam_step: parameter/gradient/state blocks differ");
  }

  ++state.step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta[k]->rows() != g[k]->rows() || theta[k]->cols() != g[k]->cols() ||
        theta[k]->size() != m[k]->size() || theta[k]->size() != v[k]->size()) {
      throw InvalidArgument("adam_step: shape mismatch");
    }
    double* x = theta[k]->data();
    double* mk = m[k]->data();
    double* vk = v[k]->data();
    const double* gk = g[k]->data();
    for (Eigen::Index e = 0; e < theta[k]->size(); ++e) {
      mk[e] = b1 * mk[e] + (1.0 - b1) * gk[e];
      vk[e] = b2 * vk[e] + (1.0 - b2) * gk[e] * gk[e];
      x[e] -= cfg.learning_rate * (mk[e] / c1) / (std::sqrt(vk[e] / c2) + cfg.adam_eps);
    }
  }
}

EdgeMask edge_dropout(const DomainGraph& graph, double ratio, std::mt19937_64& rng) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw InvalidArgument("dropout ratio must be in [0, 1)");
  EdgeMask mask(graph.num_edges(), 1);
  if (ratio == 0.0) return mask;
  std::bernoulli_distribution drop(ratio);
  for (auto& keep : mask) keep = drop(rng) ? 0 : 1;
  return mask;
}

namespace {

struct Batch {
  DomainId domain;
  std::size_t begin;
  std::size_t end;
  double position;  // fraction of the domain's epoch completed at this batch
};

std::string describe(const EpochLog& log, std::size_t batch, const LossTerms& loss) {
  std::ostringstream os;
  os << "non-finite loss at epoch " << log.epoch << ", batch " << batch
     << " (bpr=" << loss.bpr << ", align=" << loss.align << ", reg=" << loss.reg
     << ", total=" << loss.total << ")";
  return os.str();
}

}  // namespace

TrainResult train(EDModel& model, const MultiDomainDataset& dataset,
                  std::span<const SimilarPairSet> pairs, const TrainConfig& cfg,
                  const TrainCallbacks& callbacks) {
  cfg.validate();
  model.check_compatible(dataset);
  const auto& spec = model.spec();
  const bool align = cfg.beta > 0.0 && spec.use_intra;
  const std::vector<AlignPair> all_pairs =
      align ? resolve_pairs(dataset, pairs) : std::vector<AlignPair>{};
  const bool dropout = cfg.edge_dropout > 0.0 && spec.encoder == EncoderKind::kGRec;
  const std::size_t full_limit = cfg.align_full_factor * cfg.batch_size;

  std::mt19937_64 rng(cfg.seed);
  AdamState state = AdamState::zeros_like(model.params());
  TrainResult result;
  const bool early_stop = callbacks.validate && cfg.patience > 0;
  double best_auc = -1.0;
  Params best_params;
  int since_best = 0;

  std::vector<std::vector<Triplet>> triplets(dataset.num_domains());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;

    std::vector<Batch> batches;
    for (DomainId d = 0; d < dataset.num_domains(); ++d) {
      triplets[d] = epoch_triplets(dataset, d, rng);
      const std::size_t n = triplets[d].size();
      const std::size_t nb = (n + cfg.batch_size - 1) / cfg.batch_size;
      for (std::size_t b = 0; b < nb; ++b) {
        batches.push_back({d, b * cfg.batch_size, std::min(n, (b + 1) * cfg.batch_size),
                           (static_cast<double>(b) + 0.5) / static_cast<double>(nb)});
      }
    }
    // Round-robin across domains, proportional to domain size.
    std::stable_sort(batches.begin(), batches.end(), [](const Batch& a, const Batch& b) {
      return a.position != b.position ? a.position < b.position : a.domain < b.domain;
    });

    std::vector<EdgeMask> masks;
    std::vector<AlignPair> sampled;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      const std::span<const Triplet> part(triplets[batch.domain].data() + batch.begin,
                                          batch.end - batch.begin);
      masks.clear();
      if (dropout) {
        for (const auto& g : dataset.domains()) {
          masks.push_back(edge_dropout(g, cfg.edge_dropout, rng));
        }
      }
      std::span<const AlignPair> batch_pairs = all_pairs;
      double scale = 1.0;
      if (all_pairs.size() > full_limit) {
        sampled.resize(full_limit);
        std::uniform_int_distribution<std::size_t> pick(0, all_pairs.size() - 1);
        for (auto& s : sampled) s = all_pairs[pick(rng)];
        batch_pairs = sampled;
        scale = static_cast<double>(all_pairs.size()) / static_cast<double>(full_limit);
      }

      GradientResult res = gradients(model, dataset, part, batch_pairs, cfg,
                                     dropout ? &masks : nullptr, scale);
      if (!std::isfinite(res.loss.total)) {
        const std::string what = describe(log, b, res.loss);
        if (!cfg.dump_dir.empty()) {
          KeyValueFile info;
          info.set("error", what);
          save_checkpoint(model, cfg.dump_dir, info);
        }
        throw NumericError(what);
      }
      adam_step(model.params(), res.grad, state, cfg);
      log.bpr += res.loss.bpr;
      log.align += scale * res.loss.align;
      log.total += res.loss.total;
    }

    if (callbacks.validate) {
      const ValidationMetrics m = callbacks.validate(model);
      log.val_auc = m.auc;
      log.val_recall = m.recall_at_1;
    }
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.log.push_back(log);
    if (callbacks.on_epoch) callbacks.on_epoch(log, model);

    if (early_stop) {
      if (*log.val_auc > best_auc) {
        best_auc = *log.val_auc;
        best_params = model.params();
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        result.stopped_early = true;
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }
  if (early_stop && result.best_epoch > 0) model.params() = std::move(best_params);
  return result;
}

void write_epoch_log(std::ostream& out, const EpochLog& log, bool with_time) {
  const auto num = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  out << log.epoch << '\t' << num(log.bpr) << '\t' << num(log.align) << '\t'
      << num(log.total) << '\t' << (log.val_auc ? num(*log.val_auc) : "nan") << '\t'
      << (log.val_recall ? num(*log.val_recall) : "nan") << '\t'
      << (with_time ? num(std::round(log.wall_ms)) : "0") << '\n';
}

}  // namespace edda
