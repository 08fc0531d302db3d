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

#ifndef EDDA_CONFIG_HPP_
#define EDDA_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edda/edmodel.hpp"
#include "edda/encoders.hpp"
#include "edda/keyvalue.hpp"
#include "edda/synthgen.hpp"
#include "edda/trainer.hpp"
#include "edda/walker.hpp"

namespace edda {

// Named ablation variants.
enum class Variant { kEdda, kWithoutAlignment, kInter, kIntra, kEdMf };

Variant parse_variant(const std::string& name);
const char* to_string(Variant v);

// Every knob of a run. Defaults follow the published settings where one
// exists: dim 64, 2 layers, alpha 0.1, beta 0.03, lambda 1e-4, lr 1e-3,
// batch size 8092, edge dropout 0.3, walk length 4, 500 walks, k = 1.
struct RunConfig {
  std::uint64_t seed = 42;
  int threads = 1;
  Variant variant = Variant::kEdda;
  std::optional<EncoderKind> encoder;  // overrides the variant's encoder
  std::size_t dim = 64;
  double init_scale = 1.0;
  GRecConfig grec;
  WalkConfig walk;
  TrainConfig train;
  std::vector<int> split_ratios = {7, 1, 2};
  bool determinism = true;

  // Each component draws from its own stream derived from `seed`.
  std::uint64_t split_seed() const;
  std::uint64_t eval_seed() const;
  std::uint64_t init_seed() const;
  std::uint64_t walk_seed() const;
  std::uint64_t train_seed() const;

  // Model shape for the configured variant. Single-kind variants get twice
  // the embedding size so parameter counts match.
  ModelSpec model_spec() const;
  // True when the variant trains with the alignment term.
  bool uses_alignment() const;
  // Component configs with their derived seeds and the thread count filled
  // in. Variants without alignment train with beta = 0.
  WalkConfig walk_config() const;
  TrainConfig train_config() const;

  // Throws InvalidArgument for an unknown key or unparsable value.
  void set(const std::string& key, const std::string& value);
  void apply(const KeyValueFile& file);
  KeyValueFile to_key_values() const;
  void validate() const;
};

SynthSpec synth_spec_from(const KeyValueFile& file);
KeyValueFile to_key_values(const SynthSpec& spec);

}  // namespace edda

#endif  // EDDA_CONFIG_HPP_
