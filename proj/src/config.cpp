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


#include "edda/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "edda/error.hpp"
#include "edda/parallel.hpp"

namespace edda {
namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidArgument("bad value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InvalidArgument("bad value for " + key + ": '" + value + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value, char sep) {
  std::vector<T> out;
  std::stringstream in(value);
  std::string part;
  while (std::getline(in, part, sep)) {
    const auto first = part.find_first_not_of(' ');
    const auto last = part.find_last_not_of(' ');
    if (first == std::string::npos) throw InvalidArgument("empty entry in " + key);
    out.push_back(parse_number<T>(key, part.substr(first, last - first + 1)));
  }
  if (out.empty()) throw InvalidArgument("empty list for " + key);
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& values, char sep) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += sep;
    if constexpr (std::is_floating_point_v<T>) {
      out += num(values[k]);
    } else {
      out += std::to_string(values[k]);
    }
  }
  return out;
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "edda") return Variant::kEdda;
  if (name == "wo-da") return Variant::kWithoutAlignment;
  if (name == "inter") return Variant::kInter;
  if (name == "intra") return Variant::kIntra;
  if (name == "ed-mf") return Variant::kEdMf;
  throw InvalidArgument("unknown variant '" + name +
                        "' (expected edda, wo-da, inter, intra or ed-mf)");
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kEdda:
      return "edda";
    case Variant::kWithoutAlignment:
      return "wo-da";
    case Variant::kInter:
      return "inter";
    case Variant::kIntra:
      return "intra";
    case Variant::kEdMf:
      return "ed-mf";
  }
  return "?";
}

std::uint64_t RunConfig::split_seed() const { return derive_seed(seed, "split"); }
std::uint64_t RunConfig::eval_seed() const { return derive_seed(seed, "eval"); }
std::uint64_t RunConfig::init_seed() const { return derive_seed(seed, "init"); }
std::uint64_t RunConfig::walk_seed() const { return derive_seed(seed, "walk"); }
std::uint64_t RunConfig::train_seed() const { return derive_seed(seed, "train"); }

ModelSpec RunConfig::model_spec() const {
  ModelSpec spec;
  spec.grec = grec;
  spec.init_scale = init_scale;
  spec.inter_dim = dim;
  spec.intra_dim = dim;
  spec.align_dim = dim;
  spec.encoder = variant == Variant::kEdMf ? EncoderKind::kMF : EncoderKind::kGRec;
  if (encoder) spec.encoder = *encoder;
  if (variant == Variant::kInter) {
    spec.use_intra = false;
    spec.inter_dim = 2 * dim;
  } else if (variant == Variant::kIntra) {
    spec.use_inter = false;
    spec.intra_dim = 2 * dim;
    spec.align_dim = 2 * dim;
  }
  return spec;
}

bool RunConfig::uses_alignment() const { return variant == Variant::kEdda; }

WalkConfig RunConfig::walk_config() const {
  WalkConfig out = walk;
  out.rng_seed = walk_seed();
  return out;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig out = train;
  out.seed = train_seed();
  out.threads = threads;
  if (!uses_alignment()) out.beta = 0.0;
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    threads = parse_number<int>(key, value);
  } else if (key == "variant") {
    variant = parse_variant(value);
  } else if (key == "encoder") {
    if (value == "auto") {
      encoder.reset();
    } else {
      encoder = parse_encoder(value);
    }
  } else if (key == "dim") {
    dim = parse_number<std::size_t>(key, value);
  } else if (key == "init_scale") {
    init_scale = parse_number<double>(key, value);
  } else if (key == "num_layers") {
    grec.num_layers = parse_number<int>(key, value);
  } else if (key == "alpha") {
    grec.alpha = parse_number<double>(key, value);
  } else if (key == "walk_length") {
    walk.walk_length = parse_number<int>(key, value);
  } else if (key == "num_walks") {
    walk.num_walks = parse_number<int>(key, value);
  } else if (key == "beta") {
    train.beta = parse_number<double>(key, value);
  } else if (key == "lambda") {
    train.lambda = parse_number<double>(key, value);
  } else if (key == "learning_rate") {
    train.learning_rate = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    train.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "edge_dropout") {
    train.edge_dropout = parse_number<double>(key, value);
  } else if (key == "epochs") {
    train.epochs = parse_number<int>(key, value);
  } else if (key == "k") {
    train.k = parse_number<std::size_t>(key, value);
  } else if (key == "adam_beta1") {
    train.adam_beta1 = parse_number<double>(key, value);
  } else if (key == "adam_beta2") {
    train.adam_beta2 = parse_number<double>(key, value);
  } else if (key == "adam_eps") {
    train.adam_eps = parse_number<double>(key, value);
  } else if (key == "patience") {
    train.patience = parse_number<int>(key, value);
  } else if (key == "align_full_factor") {
    train.align_full_factor = parse_number<std::size_t>(key, value);
  } else if (key == "split") {
    split_ratios = parse_list<int>(key, value, ':');
  } else if (key == "determinism") {
    determinism = parse_bool(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void RunConfig::apply(const KeyValueFile& file) {
  for (const auto& [key, value] : file.entries()) set(key, value);
}

KeyValueFile RunConfig::to_key_values() const {
  KeyValueFile kv;
  kv.set("seed", std::to_string(seed));
  kv.set("threads", std::to_string(threads));
  kv.set("variant", to_string(variant));
  kv.set("encoder", encoder ? to_string(*encoder) : "auto");
  kv.set("dim", std::to_string(dim));
  kv.set("init_scale", num(init_scale));
  kv.set("num_layers", std::to_string(grec.num_layers));
  kv.set("alpha", num(grec.alpha));
  kv.set("walk_length", std::to_string(walk.walk_length));
  kv.set("num_walks", std::to_string(walk.num_walks));
  kv.set("beta", num(train.beta));
  kv.set("lambda", num(train.lambda));
  kv.set("learning_rate", num(train.learning_rate));
  kv.set("batch_size", std::to_string(train.batch_size));
  kv.set("edge_dropout", num(train.edge_dropout));
  kv.set("epochs", std::to_string(train.epochs));
  kv.set("k", std::to_string(train.k));
  kv.set("adam_beta1", num(train.adam_beta1));
  kv.set("adam_beta2", num(train.adam_beta2));
  kv.set("adam_eps", num(train.adam_eps));
  kv.set("patience", std::to_string(train.patience));
  kv.set("align_full_factor", std::to_string(train.align_full_factor));
  kv.set("split", join(split_ratios, ':'));
  kv.set("determinism", determinism ? "true" : "false");
  return kv;
}

void RunConfig::validate() const {
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
  if (dim == 0) throw InvalidArgument("dim must be positive");
  if (split_ratios.size() != 3) throw InvalidArgument("split needs three ratios");
  for (const int r : split_ratios) {
    if (r <= 0) throw InvalidArgument("split ratios must be positive");
  }
  model_spec().validate();
  walk_config().validate();
  train_config().validate();
}

SynthSpec synth_spec_from(const KeyValueFile& file) {
  SynthSpec spec;
  std::optional<std::vector<double>> overlap;
  for (const auto& [key, value] : file.entries()) {
    if (key == "num_domains") {
      spec.num_domains = parse_number<std::size_t>(key, value);
    } else if (key == "users") {
      spec.users = parse_list<std::size_t>(key, value, ',');
    } else if (key == "items") {
      spec.items = parse_list<std::size_t>(key, value, ',');
    } else if (key == "interactions") {
      spec.interactions = parse_list<std::size_t>(key, value, ',');
    } else if (key == "overlap") {
      overlap = parse_list<double>(key, value, ',');
    } else if (key == "shared_dim") {
      spec.shared_dim = parse_number<std::size_t>(key, value);
    } else if (key == "specific_dim") {
      spec.specific_dim = parse_number<std::size_t>(key, value);
    } else if (key == "shared_weight") {
      spec.shared_weight = parse_number<double>(key, value);
    } else if (key == "signal_scale") {
      spec.signal_scale = parse_number<double>(key, value);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw InvalidArgument("unknown synth key '" + key + "'");
    }
  }
  const std::size_t w = spec.num_domains;
  // A single value applies to every domain (pair).
  for (auto* list : {&spec.users, &spec.items, &spec.interactions}) {
    if (list->size() == 1 && w > 1) list->assign(w, list->front());
  }
  if (overlap) spec.overlap = *overlap;
  const std::size_t pairs = w * (w - 1) / 2;
  if (spec.overlap.size() == 1 && pairs != 1) {
    spec.overlap.assign(pairs, spec.overlap.front());
  } else if (!overlap && spec.overlap.size() != pairs) {
    spec.overlap.assign(pairs, spec.overlap.empty() ? 0.0 : spec.overlap.front());
  }
  spec.validate();
  return spec;
}

KeyValueFile to_key_values(const SynthSpec& spec) {
  KeyValueFile kv;
  kv.set("num_domains", std::to_string(spec.num_domains));
  kv.set("users", join(spec.users, ','));
  kv.set("items", join(spec.items, ','));
  kv.set("interactions", join(spec.interactions, ','));
  kv.set("overlap", spec.overlap.empty() ? "0" : join(spec.overlap, ','));
  kv.set("shared_dim", std::to_string(spec.shared_dim));
  kv.set("specific_dim", std::to_string(spec.specific_dim));
  kv.set("shared_weight", num(spec.shared_weight));
  kv.set("signal_scale", num(spec.signal_scale));
  kv.set("seed", std::to_string(spec.seed));
  return kv;
}

}  // namespace edda
