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

// Train/validation/test splitting, sampled-negative ranking metrics (AUC and
// Recall@1 among 1 positive + 10 negatives) and per-domain data statistics.

#ifndef EDDA_EVALKIT_HPP_
#define EDDA_EVALKIT_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "edda/edmodel.hpp"
#include "edda/mdgraph.hpp"

namespace edda {

inline constexpr std::size_t kNumNegatives = 10;

struct SplitDataset {
  // Per domain, sorted by (user, item).
  std::vector<std::vector<Interaction>> train;
  std::vector<std::vector<Interaction>> validation;
  std::vector<std::vector<Interaction>> test;

  std::size_t num_domains() const { return train.size(); }
  // Graphs of the training interactions only.
  MultiDomainDataset train_dataset() const;
};

// Splits each user's interactions within each domain by `ratios`
// (train:validation:test). Every user keeps at least one training interaction.
SplitDataset split(const MultiDomainDataset& dataset, std::span<const int> ratios,
                   std::uint64_t seed);

struct EvalCase {
  DomainId domain = 0;
  std::uint64_t user = 0;
  std::uint64_t positive = 0;
  std::array<std::uint64_t, kNumNegatives> negatives{};
};

enum class EvalSet { kValidation, kTest };

struct EvalCases {
  std::vector<EvalCase> cases;
  // Positives dropped because the item is absent from the training graph or
  // the user has fewer than 10 eligible negatives.
  std::size_t excluded = 0;
};

// One case per held-out (user, item) of domain d. Negatives are distinct
// training-graph items the user never interacted with in d (in any split).
// Each case draws from its own stream keyed by (seed, d, user, item), so the
// negatives do not depend on the model being evaluated.
EvalCases build_eval_cases(const SplitDataset& split, const MultiDomainDataset& train,
                           DomainId d, EvalSet which, std::uint64_t seed);

// Score-level metrics.

struct UserScores {
  std::vector<double> positives;
  std::vector<double> negatives;
};

// Mean over users of P(score(pos) > score(neg)), ties counting 1/2. Users
// without positives or negatives are skipped. Returns 0.5 if none remain.
double mean_user_auc(std::span<const UserScores> users);

struct Candidate {
  std::uint64_t item = 0;
  double score = 0.0;
};

struct CaseScores {
  Candidate positive;
  std::vector<Candidate> negatives;
};

// Whether the positive ranks first under (score desc, item id asc).
bool ranks_first(const CaseScores& c);
// Fraction of cases whose positive ranks first.
double recall_at_1(std::span<const CaseScores> cases);

struct DomainMetrics {
  double auc = 0.5;
  double recall_at_1 = 0.0;
  std::size_t num_cases = 0;
  std::size_t num_users = 0;
};

// Scores every case with full-graph representations of `model`.
DomainMetrics evaluate_cases(const EDModel& model, const MultiDomainDataset& train,
                             std::span<const EvalCase> cases, int threads = 1);

std::vector<DomainMetrics> evaluate_all(const EDModel& model,
                                        const MultiDomainDataset& train,
                                        std::span<const EvalCases> per_domain,
                                        int threads = 1);

// |R^d| / sum_d' |R^d'| on the given (training) interactions.
double domain_size(const MultiDomainDataset& dataset, DomainId d);
// Interactions made in other domains by users of d, divided by |R^d|.
double out_of_domain_interaction(const MultiDomainDataset& dataset, DomainId d);

struct ReportRow {
  std::string domain;  // domain id or "AVG"
  double auc = 0.0;
  double recall_at_1 = 0.0;
  std::size_t num_cases = 0;
  double domain_size = 0.0;
  double out_of_domain_interaction = 0.0;
};

// One row per domain plus an AVG row (unweighted mean over domains, summed
// case count).
std::vector<ReportRow> build_report(const MultiDomainDataset& train,
                                    std::span<const DomainMetrics> metrics);
void write_report(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace edda

#endif  // EDDA_EVALKIT_HPP_
