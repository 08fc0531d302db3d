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

#include "edda/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {
namespace {

// Count s with s / (a + b - s) closest to `fraction`.
std::size_t shared_count(double fraction, std::size_t a, std::size_t b) {
  const double s = fraction * static_cast<double>(a + b) / (1.0 + fraction);
  return std::min(static_cast<std::size_t>(std::llround(s)), std::min(a, b));
}

void check_feasible(const SynthSpec& spec, const std::vector<std::size_t>& sizes,
                    const char* what,
                    std::size_t (*count)(const SynthSpec&, DomainId, DomainId)) {
  for (DomainId d = 0; d < spec.num_domains; ++d) {
    std::size_t shared = 0;
    for (DomainId e = 0; e < spec.num_domains; ++e) {
      if (e != d) shared += count(spec, d, e);
    }
    if (shared > sizes[d]) {
      throw InvalidArgument("infeasible synth spec: domain " + std::to_string(d) +
                            " shares " + std::to_string(shared) + " " + what +
                            " but has only " + std::to_string(sizes[d]));
    }
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Intercept b with sum sigmoid(logits + b) == target.
double calibrate(const std::vector<double>& logits, double target) {
  const auto mass = [&](double b) {
    double s = 0.0;
    for (const double x : logits) s += sigmoid(x + b);
    return s;
  };
  double lo = -60.0;
  double hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::size_t weighted_pick(std::span<const double> weights, std::mt19937_64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (r < acc) return k;
  }
  return weights.size() - 1;
}

std::vector<double> normal_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Entity ids per domain for one kind. Pair-shared blocks come first in pair
// order, then each domain's private block.
std::vector<std::vector<std::uint64_t>> assign_ids(
    const SynthSpec& spec, const std::vector<std::size_t>& sizes,
    std::size_t (*count)(const SynthSpec&, DomainId, DomainId), std::uint64_t& next) {
  std::vector<std::vector<std::uint64_t>> ids(spec.num_domains);
  for (DomainId d = 0; d < spec.num_domains; ++d) {
    for (DomainId e = d + 1; e < spec.num_domains; ++e) {
      for (std::size_t k = count(spec, d, e); k > 0; --k) {
        ids[d].push_back(next);
        ids[e].push_back(next);
        ++next;
      }
    }
  }
  for (DomainId d = 0; d < spec.num_domains; ++d) {
    while (ids[d].size() < sizes[d]) ids[d].push_back(next++);
    std::sort(ids[d].begin(), ids[d].end());
  }
  return ids;
}

}  // namespace

std::size_t pair_index(std::size_t num_domains, DomainId d, DomainId d_prime) {
  if (d == d_prime || d >= num_domains || d_prime >= num_domains) {
    throw InvalidArgument("pair_index: need two distinct domains in range");
  }
  const std::size_t a = std::min(d, d_prime);
  const std::size_t b = std::max(d, d_prime);
  return a * num_domains - a * (a + 1) / 2 + (b - a - 1);
}

std::size_t shared_users(const SynthSpec& spec, DomainId d, DomainId d_prime) {
  return shared_count(spec.overlap.at(pair_index(spec.num_domains, d, d_prime)),
                      spec.users.at(d), spec.users.at(d_prime));
}

std::size_t shared_items(const SynthSpec& spec, DomainId d, DomainId d_prime) {
  return shared_count(spec.overlap.at(pair_index(spec.num_domains, d, d_prime)),
                      spec.items.at(d), spec.items.at(d_prime));
}

void SynthSpec::validate() const {
  const std::size_t w = num_domains;
  if (w == 0) throw InvalidArgument("synth spec: num_domains must be positive");
  if (users.size() != w || items.size() != w || interactions.size() != w) {
    throw InvalidArgument("synth spec: users/items/interactions need one entry per domain");
  }
  if (overlap.size() != w * (w - 1) / 2) {
    throw InvalidArgument("synth spec: overlap needs one entry per domain pair");
  }
  for (const double f : overlap) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("synth spec: overlap outside [0,1]");
  }
  if (!(shared_weight >= 0.0 && shared_weight <= 1.0)) {
    throw InvalidArgument("synth spec: shared_weight outside [0,1]");
  }
  if (shared_dim == 0 || specific_dim == 0) {
    throw InvalidArgument("synth spec: latent dimensions must be positive");
  }
  if (!std::isfinite(signal_scale) || signal_scale < 0.0) {
    throw InvalidArgument("synth spec: signal_scale must be finite and >= 0");
  }
  for (std::size_t d = 0; d < w; ++d) {
    if (users[d] == 0 || items[d] == 0) {
      throw InvalidArgument("synth spec: every domain needs users and items");
    }
    if (interactions[d] < users[d] + items[d] || interactions[d] >= users[d] * items[d]) {
      throw InvalidArgument(
          "synth spec: domain " + std::to_string(d) +
          " needs users + items <= interactions < users * items");
    }
  }
  check_feasible(*this, users, "users", &shared_users);
  check_feasible(*this, items, "items", &shared_items);
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t w = spec.num_domains;
  std::uint64_t num_users = 0;
  std::uint64_t num_items = 0;
  const auto user_ids = assign_ids(spec, spec.users, &shared_users, num_users);
  const auto item_ids = assign_ids(spec, spec.items, &shared_items, num_items);

  SynthData out;
  std::mt19937_64 shared_rng(derive_seed(spec.seed, "shared"));
  std::vector<std::vector<double>> shared_user(num_users);
  std::vector<std::vector<double>> shared_item(num_items);
  for (std::uint64_t u = 0; u < num_users; ++u) {
    shared_user[u] = normal_vector(spec.shared_dim, shared_rng);
    out.latents.push_back({user_node(u), -1, shared_user[u]});
  }
  for (std::uint64_t i = 0; i < num_items; ++i) {
    shared_item[i] = normal_vector(spec.shared_dim, shared_rng);
    out.latents.push_back({item_node(i), -1, shared_item[i]});
  }

  const double ws = spec.shared_weight / std::sqrt(static_cast<double>(spec.shared_dim));
  const double wt =
      (1.0 - spec.shared_weight) / std::sqrt(static_cast<double>(spec.specific_dim));

  for (DomainId d = 0; d < w; ++d) {
    const auto& users = user_ids[d];
    const auto& items = item_ids[d];
    const std::size_t nu = users.size();
    const std::size_t ni = items.size();

    std::mt19937_64 specific_rng(derive_seed(derive_seed(spec.seed, "specific"), d));
    std::vector<std::vector<double>> t_user(nu);
    std::vector<std::vector<double>> t_item(ni);
    for (std::size_t a = 0; a < nu; ++a) {
      t_user[a] = normal_vector(spec.specific_dim, specific_rng);
      out.latents.push_back({user_node(users[a]), static_cast<int>(d), t_user[a]});
    }
    for (std::size_t b = 0; b < ni; ++b) {
      t_item[b] = normal_vector(spec.specific_dim, specific_rng);
      out.latents.push_back({item_node(items[b]), static_cast<int>(d), t_item[b]});
    }

    std::vector<double> logits(nu * ni);
    for (std::size_t a = 0; a < nu; ++a) {
      for (std::size_t b = 0; b < ni; ++b) {
        const double affinity = ws * dot(shared_user[users[a]], shared_item[items[b]]) +
                                wt * dot(t_user[a], t_item[b]);
        logits[a * ni + b] = spec.signal_scale * affinity;
      }
    }
    const double budget = static_cast<double>(spec.interactions[d]);
    const double intercept = calibrate(logits, budget);
    out.intercepts.push_back(intercept);
    std::vector<double> prob(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) prob[k] = sigmoid(logits[k] + intercept);

    // Every entity gets one interaction first, so none is lost to sampling.
    std::mt19937_64 rng(derive_seed(derive_seed(spec.seed, "sample"), d));
    std::vector<std::uint8_t> taken(nu * ni, 0);
    std::vector<std::uint8_t> item_covered(ni, 0);
    std::size_t count = 0;
    for (std::size_t a = 0; a < nu; ++a) {
      const std::size_t b = weighted_pick({prob.data() + a * ni, ni}, rng);
      taken[a * ni + b] = 1;
      item_covered[b] = 1;
      ++count;
    }
    std::vector<double> column(nu);
    for (std::size_t b = 0; b < ni; ++b) {
      if (item_covered[b]) continue;
      for (std::size_t a = 0; a < nu; ++a) column[a] = prob[a * ni + b];
      const std::size_t a = weighted_pick(column, rng);
      taken[a * ni + b] = 1;
      ++count;
    }

    // Weighted sampling without replacement for the rest (Efraimidis-Spirakis
    // keys ln(U) / p, largest first).
    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(nu * ni - count);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < prob.size(); ++k) {
      if (taken[k]) continue;
      double r = unit(rng);
      while (r <= 0.0) r = unit(rng);
      keys.emplace_back(std::log(r) / std::max(prob[k], 1e-300), k);
    }
    const std::size_t rest = spec.interactions[d] - count;
    std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(rest),
                     keys.end(), std::greater<>());
    for (std::size_t k = 0; k < rest; ++k) taken[keys[k].second] = 1;

    for (std::size_t a = 0; a < nu; ++a) {
      for (std::size_t b = 0; b < ni; ++b) {
        if (taken[a * ni + b]) out.interactions.push_back({d, users[a], items[b]});
      }
    }
  }
  std::sort(out.interactions.begin(), out.interactions.end());
  return out;
}

void write_latents(std::ostream& out, const std::vector<LatentRow>& rows) {
  char buf[64];
  for (const auto& row : rows) {
    out << to_string(row.node.kind) << '\t' << row.node.id << '\t';
    if (row.domain < 0) {
      out << "shared";
    } else {
      out << row.domain;
    }
    for (const double v : row.values) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace edda
