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

// The embedding-disentangled model: one inter-domain table shared by all
// domains, one intra-domain table per domain, and one alignment projection
// matrix per domain. A node's representation in domain d is
//
//   Z = F(inter) || F_d(intra_d)
//
// and the score of (u, i) in d is the inner product of their representations.

#ifndef EDDA_EDMODEL_HPP_
#define EDDA_EDMODEL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edda/encoders.hpp"
#include "edda/keyvalue.hpp"
#include "edda/mdgraph.hpp"

namespace edda {

enum class EncoderKind { kGRec, kMF };

const char* to_string(EncoderKind kind);
EncoderKind parse_encoder(const std::string& name);

struct ModelSpec {
  bool use_inter = true;
  bool use_intra = true;
  std::size_t inter_dim = 64;
  std::size_t intra_dim = 64;
  std::size_t align_dim = 64;
  EncoderKind encoder = EncoderKind::kGRec;
  GRecConfig grec;
  // Uniform init half-width is init_scale / sqrt(dim). Zero gives an all-zero
  // model.
  double init_scale = 1.0;

  void validate() const;
};

// The trainable parameter set. The same shape is reused for gradients and
// optimizer moments. Disabled parts are 0x0 / empty.
struct Params {
  Matrix inter;               // global node rows x inter_dim
  std::vector<Matrix> intra;  // per domain: local node rows x intra_dim
  std::vector<Matrix> proj;   // per domain: intra_dim x align_dim

  Params zeros_like() const;
  std::size_t count() const;
  double squared_norm() const;

  void for_each(const std::function<void(Matrix&)>& fn);
  void for_each(const std::function<void(const Matrix&)>& fn) const;
};

class EDModel {
 public:
  // Throws InvalidArgument if `params` does not match `spec` and `dataset`.
  EDModel(ModelSpec spec, const MultiDomainDataset& dataset, Params params);

  const ModelSpec& spec() const { return spec_; }
  const Params& params() const { return params_; }
  Params& params() { return params_; }

  std::size_t num_domains() const { return domain_nodes_.size(); }
  std::size_t num_parameters() const { return params_.count(); }
  std::size_t representation_dim() const;

  // Throws MismatchError if `dataset` has a different node layout.
  void check_compatible(const MultiDomainDataset& dataset) const;

  EmbeddingTable inter_table() const;
  EmbeddingTable intra_table(DomainId d) const;

 private:
  ModelSpec spec_;
  Params params_;
  std::vector<NodeId> global_nodes_;
  std::vector<std::vector<NodeId>> domain_nodes_;
};

EDModel init_model(const ModelSpec& spec, const MultiDomainDataset& dataset,
                   std::uint64_t seed);

// Encoder outputs for every node. `inter` is indexed by global node and
// `intra[d]` by local node of domain d; either may have zero columns.
struct Representations {
  Matrix inter;
  std::vector<Matrix> intra;
};

// Runs the encoders. When `intra_domains` is non-empty only those intra
// tables are propagated (the others are left empty).
Representations encode(const EDModel& model, const MultiDomainDataset& dataset,
                       const std::vector<EdgeMask>* masks = nullptr, int threads = 1,
                       const std::vector<DomainId>& intra_domains = {});

// Inner product of the representations of local nodes `u` and `i` of domain d.
double score_local(const Representations& reps, const MultiDomainDataset& dataset,
                   DomainId d, std::uint32_t u, std::uint32_t i);

// Concatenated representation (inter part first).
Eigen::VectorXd represent(const EDModel& model, const MultiDomainDataset& dataset,
                          const NodeId& node, DomainId d,
                          const std::vector<EdgeMask>* masks = nullptr);

// Representations of all nodes of domain d, one row per local node.
Matrix represent_domain(const EDModel& model, const MultiDomainDataset& dataset,
                        DomainId d, const std::vector<EdgeMask>* masks = nullptr);

double score(const EDModel& model, const MultiDomainDataset& dataset, std::uint64_t user,
             std::uint64_t item, DomainId d);

struct ScoredItem {
  std::uint64_t item = 0;
  double score = 0.0;
};

// Highest-scoring items of domain d for `user`, ties broken by ascending item
// id. `exclude` must be sorted.
std::vector<ScoredItem> recommend_topn(const EDModel& model,
                                       const MultiDomainDataset& dataset,
                                       std::uint64_t user, DomainId d, std::size_t n,
                                       const std::vector<std::uint64_t>& exclude = {});

// Checkpoint directory layout: manifest.txt plus inter.emb, intra_<d>.emb and
// proj_<d>.mat. `extra` entries are merged into the manifest.
void save_checkpoint(const EDModel& model, const std::string& dir,
                     const KeyValueFile& extra = {});
std::pair<EDModel, KeyValueFile> load_checkpoint(const std::string& dir,
                                                 const MultiDomainDataset& dataset);

}  // namespace edda

#endif  // EDDA_EDMODEL_HPP_
