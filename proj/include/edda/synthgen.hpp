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

// Seeded synthetic multi-domain data with a known preference structure.
//
// Every user and item carries a shared latent vector, reused in every domain
// it belongs to, plus an independent latent per domain. Within domain d the
// interaction probability of (u, i) is
//
//   sigmoid(signal_scale * (w * <s_u, s_i> / sqrt(shared_dim)
//                           + (1 - w) * <t_u, t_i> / sqrt(specific_dim)) + b_d)
//
// with b_d calibrated so the probabilities sum to the interaction budget.

#ifndef EDDA_SYNTHGEN_HPP_
#define EDDA_SYNTHGEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edda/mdgraph.hpp"

namespace edda {

struct SynthSpec {
  std::size_t num_domains = 3;
  // Per domain.
  std::vector<std::size_t> users = {200, 200, 200};
  std::vector<std::size_t> items = {100, 100, 100};
  std::vector<std::size_t> interactions = {2000, 2000, 2000};
  // Per unordered domain pair in (0,1), (0,2), ..., (1,2), ... order: the
  // target Jaccard overlap |shared| / |union| of the pair's users, and
  // separately of its items. Shared entities belong to exactly one pair.
  std::vector<double> overlap = {0.1, 0.1, 0.1};
  std::size_t shared_dim = 8;
  std::size_t specific_dim = 8;
  double shared_weight = 0.5;
  double signal_scale = 4.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when out of range or infeasible.
  void validate() const;
};

// Position of pair {d, d'} in SynthSpec::overlap.
std::size_t pair_index(std::size_t num_domains, DomainId d, DomainId d_prime);

// Number of users (items) shared by domains d and d' for a spec.
std::size_t shared_users(const SynthSpec& spec, DomainId d, DomainId d_prime);
std::size_t shared_items(const SynthSpec& spec, DomainId d, DomainId d_prime);

struct LatentRow {
  NodeId node;
  int domain = -1;  // -1 for the shared latent
  std::vector<double> values;
};

struct SynthData {
  std::vector<Interaction> interactions;  // sorted
  std::vector<LatentRow> latents;         // shared rows first, then per domain
  std::vector<double> intercepts;         // b_d
};

SynthData generate(const SynthSpec& spec);

// Rows as `kind<TAB>id<TAB>scope<TAB>v1<TAB>...`, scope being "shared" or a
// domain id.
void write_latents(std::ostream& out, const std::vector<LatentRow>& rows);

}  // namespace edda

#endif  // EDDA_SYNTHGEN_HPP_
