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

#include "edda/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <random>

#include <spdlog/spdlog.h>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {

MultiDomainDataset SplitDataset::train_dataset() const {
  std::vector<Interaction> all;
  for (const auto& part : train) all.insert(all.end(), part.begin(), part.end());
  return ingest(all);
}

SplitDataset split(const MultiDomainDataset& dataset, std::span<const int> ratios,
                   std::uint64_t seed) {
  if (ratios.size() != 3 || ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0) {
    throw InvalidArgument("split ratios must be three positive integers");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(ratios[0] + ratios[1] + ratios[2]);
  // Round-half-up of n * r / total.
  const auto share = [total](std::uint64_t n, int r) {
    return (2 * n * static_cast<std::uint64_t>(r) + total) / (2 * total);
  };

  SplitDataset out;
  const std::size_t w = dataset.num_domains();
  out.train.resize(w);
  out.validation.resize(w);
  out.test.resize(w);
  for (DomainId d = 0; d < w; ++d) {
    const auto& g = dataset.domain(d);
    for (std::uint32_t u = 0; u < g.num_users(); ++u) {
      const std::uint64_t user = g.users()[u];
      std::vector<std::uint64_t> items;
      for (const std::uint32_t i : g.neighbors(u)) items.push_back(g.node(i).id);
      std::mt19937_64 rng(derive_seed(seed, d, user));
      std::shuffle(items.begin(), items.end(), rng);

      const std::uint64_t n = items.size();
      std::uint64_t n_test = share(n, ratios[2]);
      std::uint64_t n_val = share(n, ratios[1]);
      while (n_test + n_val >= n && n_test > 0) --n_test;
      while (n_test + n_val >= n && n_val > 0) --n_val;
      const std::uint64_t n_train = n - n_val - n_test;

      for (std::uint64_t k = 0; k < n; ++k) {
        auto& dst = k < n_train ? out.train[d]
                    : k < n_train + n_val ? out.validation[d]
                                          : out.test[d];
        dst.push_back({d, user, items[k]});
      }
    }
    for (auto* part : {&out.train[d], &out.validation[d], &out.test[d]}) {
      std::sort(part->begin(), part->end());
    }
  }
  return out;
}

EvalCases build_eval_cases(const SplitDataset& split, const MultiDomainDataset& train,
                           DomainId d, EvalSet which, std::uint64_t seed) {
  if (d >= split.num_domains() || d >= train.num_domains()) {
    throw InvalidArgument("domain id out of range");
  }
  const auto& g = train.domain(d);
  const auto& held_out = which == EvalSet::kTest ? split.test[d] : split.validation[d];

  // Every positive of each user in d, across all three splits.
  std::map<std::uint64_t, std::vector<std::uint64_t>> positives;
  for (const auto* part : {&split.train[d], &split.validation[d], &split.test[d]}) {
    for (const auto& r : *part) positives[r.user].push_back(r.item);
  }
  for (auto& [u, items] : positives) std::sort(items.begin(), items.end());

  EvalCases out;
  const auto items = g.items();
  for (const auto& r : held_out) {
    const auto& pos = positives[r.user];
    if (!g.contains(item_node(r.item)) || !g.contains(user_node(r.user))) {
      ++out.excluded;
      continue;
    }
    std::size_t blocked = 0;
    for (const auto item : pos) {
      if (std::binary_search(items.begin(), items.end(), item)) ++blocked;
    }
    if (items.size() - blocked < kNumNegatives) {
      ++out.excluded;
      continue;
    }
    EvalCase c{d, r.user, r.item, {}};
    std::mt19937_64 rng(derive_seed(seed, d, r.user, r.item));
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    std::size_t filled = 0;
    while (filled < kNumNegatives) {
      const std::uint64_t cand = items[pick(rng)];
      if (std::binary_search(pos.begin(), pos.end(), cand)) continue;
      if (std::find(c.negatives.begin(), c.negatives.begin() + filled, cand) !=
          c.negatives.begin() + filled) {
        continue;
      }
      c.negatives[filled++] = cand;
    }
    out.cases.push_back(c);
  }
  if (out.excluded > 0) {
    spdlog::warn("domain {}: {} held-out interactions excluded from evaluation", d,
                 out.excluded);
  }
  return out;
}

double mean_user_auc(std::span<const UserScores> users) {
  double sum = 0.0;
  std::size_t counted = 0;
  std::vector<double> neg;
  for (const auto& u : users) {
    if (u.positives.empty() || u.negatives.empty()) continue;
    neg.assign(u.negatives.begin(), u.negatives.end());
    std::sort(neg.begin(), neg.end());
    // Twice the Mann-Whitney U statistic, kept integral.
    std::uint64_t twice_u = 0;
    for (const double p : u.positives) {
      const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
      const auto hi = std::upper_bound(lo, neg.end(), p);
      twice_u += 2 * static_cast<std::uint64_t>(lo - neg.begin()) +
                 static_cast<std::uint64_t>(hi - lo);
    }
    sum += static_cast<double>(twice_u) /
           (2.0 * static_cast<double>(u.positives.size()) *
            static_cast<double>(u.negatives.size()));
    ++counted;
  }
  return counted == 0 ? 0.5 : sum / static_cast<double>(counted);
}

bool ranks_first(const CaseScores& c) {
  const auto before = [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.item < b.item;
  };
  return std::none_of(c.negatives.begin(), c.negatives.end(),
                      [&](const Candidate& n) { return before(n, c.positive); });
}

double recall_at_1(std::span<const CaseScores> cases) {
  if (cases.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& c : cases) hits += ranks_first(c) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

namespace {

DomainMetrics metrics_from(const Representations& reps, const MultiDomainDataset& train,
                           std::span<const EvalCase> cases) {
  DomainMetrics out;
  if (cases.empty()) return out;
  std::vector<CaseScores> scored;
  scored.reserve(cases.size());
  // Per user: scores of held-out positives and of the union of their negatives.
  std::map<std::uint64_t, std::pair<UserScores, std::vector<std::uint64_t>>> per_user;
  for (const auto& c : cases) {
    const auto& g = train.domain(c.domain);
    const std::uint32_t u = *g.local_index(user_node(c.user));
    const auto item_score = [&](std::uint64_t item) {
      return score_local(reps, train, c.domain, u, *g.local_index(item_node(item)));
    };
    CaseScores cs{{c.positive, item_score(c.positive)}, {}};
    auto& [user_scores, seen] = per_user[c.user];
    user_scores.positives.push_back(cs.positive.score);
    for (const auto n : c.negatives) {
      cs.negatives.push_back({n, item_score(n)});
      if (std::find(seen.begin(), seen.end(), n) == seen.end()) {
        seen.push_back(n);
        user_scores.negatives.push_back(cs.negatives.back().score);
      }
    }
    scored.push_back(std::move(cs));
  }
  std::vector<UserScores> users;
  users.reserve(per_user.size());
  for (auto& [u, entry] : per_user) users.push_back(std::move(entry.first));
  out.auc = mean_user_auc(users);
  out.recall_at_1 = recall_at_1(scored);
  out.num_cases = cases.size();
  out.num_users = users.size();
  return out;
}

}  // namespace

DomainMetrics evaluate_cases(const EDModel& model, const MultiDomainDataset& train,
                             std::span<const EvalCase> cases, int threads) {
  model.check_compatible(train);
  std::vector<DomainId> domains;
  for (const auto& c : cases) domains.push_back(c.domain);
  std::sort(domains.begin(), domains.end());
  domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
  if (domains.empty()) return {};
  const auto reps = encode(model, train, nullptr, threads, domains);
  return metrics_from(reps, train, cases);
}

std::vector<DomainMetrics> evaluate_all(const EDModel& model,
                                        const MultiDomainDataset& train,
                                        std::span<const EvalCases> per_domain,
                                        int threads) {
  model.check_compatible(train);
  const auto reps = encode(model, train, nullptr, threads);
  std::vector<DomainMetrics> out;
  for (const auto& cases : per_domain) out.push_back(metrics_from(reps, train, cases.cases));
  return out;
}

double domain_size(const MultiDomainDataset& dataset, DomainId d) {
  return static_cast<double>(dataset.domain(d).num_edges()) /
         static_cast<double>(dataset.num_interactions());
}

double out_of_domain_interaction(const MultiDomainDataset& dataset, DomainId d) {
  const auto& g = dataset.domain(d);
  std::uint64_t outside = 0;
  for (DomainId other = 0; other < dataset.num_domains(); ++other) {
    if (other == d) continue;
    const auto& h = dataset.domain(other);
    for (const auto user : g.users()) {
      if (const auto local = h.local_index(user_node(user))) outside += h.degree(*local);
    }
  }
  return static_cast<double>(outside) / static_cast<double>(g.num_edges());
}

std::vector<ReportRow> build_report(const MultiDomainDataset& train,
                                    std::span<const DomainMetrics> metrics) {
  if (metrics.size() != train.num_domains()) {
    throw InvalidArgument("build_report: one metrics entry per domain expected");
  }
  std::vector<ReportRow> rows;
  ReportRow avg{"AVG", 0.0, 0.0, 0, 0.0, 0.0};
  for (DomainId d = 0; d < metrics.size(); ++d) {
    ReportRow r{std::to_string(d), metrics[d].auc, metrics[d].recall_at_1,
                metrics[d].num_cases, domain_size(train, d),
                out_of_domain_interaction(train, d)};
    avg.auc += r.auc;
    avg.recall_at_1 += r.recall_at_1;
    avg.num_cases += r.num_cases;
    avg.domain_size += r.domain_size;
    avg.out_of_domain_interaction += r.out_of_domain_interaction;
    rows.push_back(std::move(r));
  }
  const double w = static_cast<double>(metrics.size());
  avg.auc /= w;
  avg.recall_at_1 /= w;
  avg.domain_size /= w;
  avg.out_of_domain_interaction /= w;
  rows.push_back(avg);
  return rows;
}

void write_report(std::ostream& out, std::span<const ReportRow> rows) {
  const auto num = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
    return std::string(buf, res.ptr);
  };
  out << "#domain\tAUC\tRecall@1\tnum_cases\tdomain_size\tout_of_domain_interaction\n";
  for (const auto& r : rows) {
    out << r.domain << '\t' << num(r.auc) << '\t' << num(r.recall_at_1) << '\t'
        << r.num_cases << '\t' << num(r.domain_size) << '\t'
        << num(r.out_of_domain_interaction) << '\n';
  }
}

}  // namespace edda
