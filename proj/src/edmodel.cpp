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

#include "edda/edmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {

const char* to_string(EncoderKind kind) {
  return kind == EncoderKind::kGRec ? "grec" : "mf";
}

EncoderKind parse_encoder(const std::string& name) {
  if (name == "grec") return EncoderKind::kGRec;
  if (name == "mf") return EncoderKind::kMF;
  throw InvalidArgument("unknown encoder '" + name + "' (expected grec or mf)");
}

void ModelSpec::validate() const {
  if (!use_inter && !use_intra) throw InvalidArgument("model needs inter or intra part");
  if (use_inter && inter_dim == 0) throw InvalidArgument("inter_dim must be positive");
  if (use_intra && (intra_dim == 0 || align_dim == 0)) {
    throw InvalidArgument("intra_dim and align_dim must be positive");
  }
  if (!(init_scale >= 0.0)) throw InvalidArgument("init_scale must be >= 0");
  grec.validate();
}

Params Params::zeros_like() const {
  Params z;
  z.inter = Matrix::Zero(inter.rows(), inter.cols());
  for (const auto& m : intra) z.intra.push_back(Matrix::Zero(m.rows(), m.cols()));
  for (const auto& m : proj) z.proj.push_back(Matrix::Zero(m.rows(), m.cols()));
  return z;
}

std::size_t Params::count() const {
  std::size_t n = 0;
  for_each([&](const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

double Params::squared_norm() const {
  double s = 0.0;
  for_each([&](const Matrix& m) { s += m.squaredNorm(); });
  return s;
}

void Params::for_each(const std::function<void(Matrix&)>& fn) {
  fn(inter);
  for (auto& m : intra) fn(m);
  for (auto& m : proj) fn(m);
}

void Params::for_each(const std::function<void(const Matrix&)>& fn) const {
  fn(inter);
  for (const auto& m : intra) fn(m);
  for (const auto& m : proj) fn(m);
}

namespace {

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) != cols) {
    throw InvalidArgument(std::string("model parameter '") + what + "' has shape " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
}

}  // namespace

EDModel::EDModel(ModelSpec spec, const MultiDomainDataset& dataset, Params params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  global_nodes_.assign(dataset.nodes().begin(), dataset.nodes().end());
  for (const auto& g : dataset.domains()) {
    auto& nodes = domain_nodes_.emplace_back();
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) nodes.push_back(g.node(v));
  }
  const std::size_t w = dataset.num_domains();
  check_shape(params_.inter, spec_.use_inter ? global_nodes_.size() : 0,
              spec_.use_inter ? spec_.inter_dim : 0, "inter");
  if (params_.intra.size() != (spec_.use_intra ? w : 0) ||
      params_.proj.size() != (spec_.use_intra ? w : 0)) {
    throw InvalidArgument("model needs one intra table and projection per domain");
  }
  for (std::size_t d = 0; d < params_.intra.size(); ++d) {
    check_shape(params_.intra[d], domain_nodes_[d].size(), spec_.intra_dim, "intra");
    check_shape(params_.proj[d], spec_.intra_dim, spec_.align_dim, "proj");
  }
}

std::size_t EDModel::representation_dim() const {
  return (spec_.use_inter ? spec_.inter_dim : 0) + (spec_.use_intra ? spec_.intra_dim : 0);
}

void EDModel::check_compatible(const MultiDomainDataset& dataset) const {
  bool same = dataset.num_domains() == domain_nodes_.size() &&
              std::equal(global_nodes_.begin(), global_nodes_.end(),
                         dataset.nodes().begin(), dataset.nodes().end());
  for (std::size_t d = 0; same && d < domain_nodes_.size(); ++d) {
    const auto& g = dataset.domain(static_cast<DomainId>(d));
    same = g.num_nodes() == domain_nodes_[d].size();
    for (std::uint32_t v = 0; same && v < g.num_nodes(); ++v) {
      same = g.node(v) == domain_nodes_[d][v];
    }
  }
  if (!same) throw MismatchError("model was built for a different dataset layout");
}

EmbeddingTable EDModel::inter_table() const {
  return EmbeddingTable(global_nodes_, params_.inter);
}

EmbeddingTable EDModel::intra_table(DomainId d) const {
  if (!spec_.use_intra) throw InvalidArgument("model has no intra tables");
  return EmbeddingTable(domain_nodes_.at(d), params_.intra.at(d));
}

namespace {

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double half_width,
                      std::uint64_t seed) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (half_width == 0.0) return m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

}  // namespace

EDModel init_model(const ModelSpec& spec, const MultiDomainDataset& dataset,
                   std::uint64_t seed) {
  spec.validate();
  Params p;
  if (spec.use_inter) {
    p.inter = uniform_matrix(dataset.num_nodes(), spec.inter_dim,
                             spec.init_scale / std::sqrt(double(spec.inter_dim)),
                             derive_seed(seed, "inter"));
  }
  if (spec.use_intra) {
    const double s = spec.init_scale / std::sqrt(double(spec.intra_dim));
    for (DomainId d = 0; d < dataset.num_domains(); ++d) {
      p.intra.push_back(uniform_matrix(dataset.domain(d).num_nodes(), spec.intra_dim, s,
                                       derive_seed(derive_seed(seed, "intra"), d)));
      p.proj.push_back(uniform_matrix(spec.intra_dim, spec.align_dim, s,
                                      derive_seed(derive_seed(seed, "proj"), d)));
    }
  }
  return EDModel(spec, dataset, std::move(p));
}

Representations encode(const EDModel& model, const MultiDomainDataset& dataset,
                       const std::vector<EdgeMask>* masks, int threads,
                       const std::vector<DomainId>& intra_domains) {
  const auto& spec = model.spec();
  const auto& p = model.params();
  Representations reps;
  if (!spec.use_inter) {
    reps.inter = Matrix(static_cast<Eigen::Index>(dataset.num_nodes()), 0);
  } else if (spec.encoder == EncoderKind::kMF) {
    reps.inter = p.inter;
  } else {
    reps.inter = inter_propagate(dataset, p.inter, spec.grec, masks, threads);
  }

  reps.intra.resize(dataset.num_domains());
  for (DomainId d = 0; d < dataset.num_domains(); ++d) {
    const auto& g = dataset.domain(d);
    const bool wanted =
        intra_domains.empty() ||
        std::find(intra_domains.begin(), intra_domains.end(), d) != intra_domains.end();
    if (!spec.use_intra || !wanted) {
      reps.intra[d] = Matrix(static_cast<Eigen::Index>(g.num_nodes()), 0);
    } else if (spec.encoder == EncoderKind::kMF) {
      reps.intra[d] = p.intra[d];
    } else {
      reps.intra[d] = propagate(g, p.intra[d], spec.grec,
                                masks != nullptr ? &(*masks)[d] : nullptr, threads);
    }
  }
  return reps;
}

double score_local(const Representations& reps, const MultiDomainDataset& dataset,
                   DomainId d, std::uint32_t u, std::uint32_t i) {
  const auto map = dataset.global_of(d);
  double s = 0.0;
  if (reps.inter.cols() > 0) s += reps.inter.row(map[u]).dot(reps.inter.row(map[i]));
  if (reps.intra[d].cols() > 0) s += reps.intra[d].row(u).dot(reps.intra[d].row(i));
  return s;
}

Matrix represent_domain(const EDModel& model, const MultiDomainDataset& dataset,
                        DomainId d, const std::vector<EdgeMask>* masks) {
  model.check_compatible(dataset);
  const auto reps = encode(model, dataset, masks, 1, {d});
  const auto& g = dataset.domain(d);
  const auto map = dataset.global_of(d);
  const Eigen::Index a = reps.inter.cols();
  const Eigen::Index b = reps.intra[d].cols();
  Matrix out(static_cast<Eigen::Index>(g.num_nodes()), a + b);
  for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
    if (a > 0) out.row(v).head(a) = reps.inter.row(map[v]);
    if (b > 0) out.row(v).tail(b) = reps.intra[d].row(v);
  }
  return out;
}

Eigen::VectorXd represent(const EDModel& model, const MultiDomainDataset& dataset,
                          const NodeId& node, DomainId d,
                          const std::vector<EdgeMask>* masks) {
  if (d >= dataset.num_domains()) throw InvalidArgument("domain id out of range");
  const auto local = dataset.domain(d).local_index(node);
  if (!local) {
    throw DataError("node " + to_string(node) + " is not in domain " + std::to_string(d));
  }
  return represent_domain(model, dataset, d, masks).row(*local).transpose();
}

double score(const EDModel& model, const MultiDomainDataset& dataset, std::uint64_t user,
             std::uint64_t item, DomainId d) {
  return represent(model, dataset, user_node(user), d)
      .dot(represent(model, dataset, item_node(item), d));
}

std::vector<ScoredItem> recommend_topn(const EDModel& model,
                                       const MultiDomainDataset& dataset,
                                       std::uint64_t user, DomainId d, std::size_t n,
                                       const std::vector<std::uint64_t>& exclude) {
  if (n == 0) throw InvalidArgument("recommend_topn: n must be >= 1");
  const auto& g = dataset.domain(d);
  const auto u = g.local_index(user_node(user));
  if (!u) throw DataError("user " + std::to_string(user) + " not in domain " + std::to_string(d));
  model.check_compatible(dataset);
  const auto reps = encode(model, dataset, nullptr, 1, {d});

  std::vector<ScoredItem> ranked;
  for (std::size_t k = 0; k < g.num_items(); ++k) {
    const std::uint64_t item = g.items()[k];
    if (std::binary_search(exclude.begin(), exclude.end(), item)) continue;
    const auto i = static_cast<std::uint32_t>(g.num_users() + k);
    ranked.push_back({item, score_local(reps, dataset, d, *u, i)});
  }
  const auto better = [](const ScoredItem& a, const ScoredItem& b) {
    return a.score != b.score ? a.score > b.score : a.item < b.item;
  };
  const std::size_t keep = std::min(n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), better);
  ranked.resize(keep);
  return ranked;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string require(const KeyValueFile& kv, const std::string& key) {
  auto v = kv.get(key);
  if (!v) throw DataError("checkpoint manifest is missing '" + key + "'");
  return *v;
}

std::size_t to_size(const std::string& s, const std::string& key) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("checkpoint manifest: bad value for '" + key + "'");
  }
  return v;
}

}  // namespace

void save_checkpoint(const EDModel& model, const std::string& dir,
                     const KeyValueFile& extra) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory '" + dir + "'");

  const auto& spec = model.spec();
  KeyValueFile manifest = extra;
  manifest.set("format", "edda-checkpoint");
  manifest.set("format_version", "1");
  manifest.set("encoder", to_string(spec.encoder));
  manifest.set("use_inter", spec.use_inter ? "1" : "0");
  manifest.set("use_intra", spec.use_intra ? "1" : "0");
  manifest.set("inter_dim", std::to_string(spec.inter_dim));
  manifest.set("intra_dim", std::to_string(spec.intra_dim));
  manifest.set("align_dim", std::to_string(spec.align_dim));
  manifest.set("layers", std::to_string(spec.grec.num_layers));
  manifest.set("alpha", format_double(spec.grec.alpha));
  manifest.set("init_scale", format_double(spec.init_scale));
  manifest.set("num_domains", std::to_string(model.num_domains()));

  const fs::path root(dir);
  if (spec.use_inter) {
    manifest.set("inter_file", "inter.emb");
    write_table_file((root / "inter.emb").string(), model.inter_table());
  }
  if (spec.use_intra) {
    for (DomainId d = 0; d < model.num_domains(); ++d) {
      const std::string intra = "intra_" + std::to_string(d) + ".emb";
      const std::string proj = "proj_" + std::to_string(d) + ".mat";
      manifest.set("intra_file." + std::to_string(d), intra);
      manifest.set("proj_file." + std::to_string(d), proj);
      write_table_file((root / intra).string(), model.intra_table(d));
      write_matrix_file((root / proj).string(), model.params().proj[d]);
    }
  }
  manifest.write((root / "manifest.txt").string());
}

std::pair<EDModel, KeyValueFile> load_checkpoint(const std::string& dir,
                                                 const MultiDomainDataset& dataset) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  KeyValueFile manifest = KeyValueFile::read((root / "manifest.txt").string());
  if (require(manifest, "format") != "edda-checkpoint") {
    throw DataError("'" + dir + "' is not a checkpoint directory");
  }
  ModelSpec spec;
  spec.encoder = parse_encoder(require(manifest, "encoder"));
  spec.use_inter = require(manifest, "use_inter") == "1";
  spec.use_intra = require(manifest, "use_intra") == "1";
  spec.inter_dim = to_size(require(manifest, "inter_dim"), "inter_dim");
  spec.intra_dim = to_size(require(manifest, "intra_dim"), "intra_dim");
  spec.align_dim = to_size(require(manifest, "align_dim"), "align_dim");
  spec.grec.num_layers = static_cast<int>(to_size(require(manifest, "layers"), "layers"));
  spec.grec.alpha = std::stod(require(manifest, "alpha"));
  spec.init_scale = std::stod(require(manifest, "init_scale"));
  const std::size_t w = to_size(require(manifest, "num_domains"), "num_domains");
  if (w != dataset.num_domains()) {
    throw MismatchError("checkpoint has " + std::to_string(w) + " domains, dataset has " +
                        std::to_string(dataset.num_domains()));
  }

  Params p;
  const auto expect_nodes = [](const EmbeddingTable& t, auto&& nodes, const char* what) {
    if (!std::equal(t.nodes().begin(), t.nodes().end(), nodes.begin(), nodes.end())) {
      throw MismatchError(std::string("checkpoint ") + what +
                          " table does not match the dataset's nodes");
    }
  };
  if (spec.use_inter) {
    auto t = read_table_file((root / require(manifest, "inter_file")).string());
    expect_nodes(t, dataset.nodes(), "inter");
    p.inter = std::move(t.values());
  }
  if (spec.use_intra) {
    for (DomainId d = 0; d < w; ++d) {
      auto t = read_table_file(
          (root / require(manifest, "intra_file." + std::to_string(d))).string());
      std::vector<NodeId> nodes;
      const auto& g = dataset.domain(d);
      for (std::uint32_t v = 0; v < g.num_nodes(); ++v) nodes.push_back(g.node(v));
      expect_nodes(t, nodes, "intra");
      p.intra.push_back(std::move(t.values()));
      p.proj.push_back(read_matrix_file(
          (root / require(manifest, "proj_file." + std::to_string(d))).string()));
    }
  }
  return {EDModel(spec, dataset, std::move(p)), std::move(manifest)};
}

}  // namespace edda
