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

#include <sstream>

#include <gtest/gtest.h>

#include "edda/error.hpp"
#include "edda/keyvalue.hpp"

namespace edda {
namespace {

TEST(KeyValueTest, ParsesCommentsAndWhitespace) {
  std::istringstream in("# comment\n\n  dim = 16 \nvariant=intra\r\n");
  const auto kv = KeyValueFile::parse(in);
  EXPECT_EQ(kv.get("dim").value_or(""), "16");
  EXPECT_EQ(kv.get("variant").value_or(""), "intra");
  EXPECT_FALSE(kv.get("beta").has_value());
  std::ostringstream out;
  kv.write(out);
  EXPECT_EQ(out.str(), "dim = 16\nvariant = intra\n");
}

TEST(KeyValueTest, MissingEqualsReportsLine) {
  std::istringstream in("a = 1\nbroken\n");
  try {
    KeyValueFile::parse(in);
    FAIL() << "expected IngestError";
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(ConfigTest, PublishedDefaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.dim, 64u);
  EXPECT_EQ(cfg.grec.num_layers, 2);
  EXPECT_DOUBLE_EQ(cfg.grec.alpha, 0.1);
  EXPECT_DOUBLE_EQ(cfg.train.beta, 0.03);
  EXPECT_DOUBLE_EQ(cfg.train.lambda, 1e-4);
  EXPECT_DOUBLE_EQ(cfg.train.learning_rate, 1e-3);
  EXPECT_EQ(cfg.train.batch_size, 8092u);
  EXPECT_DOUBLE_EQ(cfg.train.edge_dropout, 0.3);
  EXPECT_EQ(cfg.walk.walk_length, 4);
  EXPECT_EQ(cfg.walk.num_walks, 500);
  EXPECT_EQ(cfg.train.k, 1u);
  EXPECT_EQ(cfg.split_ratios, (std::vector<int>{7, 1, 2}));
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ConfigTest, KeyValueRoundTrip) {
  RunConfig cfg;
  cfg.set("variant", "ed-mf");
  cfg.set("beta", "0.01");
  cfg.set("split", "8:1:1");
  cfg.set("determinism", "false");
  cfg.set("encoder", "grec");
  RunConfig back;
  back.apply(cfg.to_key_values());
  EXPECT_EQ(back.variant, Variant::kEdMf);
  EXPECT_DOUBLE_EQ(back.train.beta, 0.01);
  EXPECT_EQ(back.split_ratios, (std::vector<int>{8, 1, 1}));
  EXPECT_FALSE(back.determinism);
  EXPECT_EQ(back.encoder, EncoderKind::kGRec);
  std::ostringstream a;
  std::ostringstream b;
  cfg.to_key_values().write(a);
  back.to_key_values().write(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(ConfigTest, BadKeysAndValuesThrow) {
  RunConfig cfg;
  EXPECT_THROW(cfg.set("nope", "1"), InvalidArgument);
  EXPECT_THROW(cfg.set("dim", "abc"), InvalidArgument);
  EXPECT_THROW(cfg.set("dim", "12x"), InvalidArgument);
  EXPECT_THROW(cfg.set("variant", "other"), InvalidArgument);
  cfg.set("edge_dropout", "1.0");
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(ConfigTest, VariantsShapeTheModel) {
  RunConfig cfg;
  cfg.dim = 8;
  cfg.variant = Variant::kInter;
  auto spec = cfg.model_spec();
  EXPECT_FALSE(spec.use_intra);
  EXPECT_EQ(spec.inter_dim, 16u);
  EXPECT_EQ(cfg.train_config().beta, 0.0);

  cfg.variant = Variant::kIntra;
  spec = cfg.model_spec();
  EXPECT_FALSE(spec.use_inter);
  EXPECT_EQ(spec.intra_dim, 16u);

  cfg.variant = Variant::kEdMf;
  EXPECT_EQ(cfg.model_spec().encoder, EncoderKind::kMF);
  cfg.variant = Variant::kIntra;
  cfg.encoder = EncoderKind::kMF;
  EXPECT_EQ(cfg.model_spec().encoder, EncoderKind::kMF);

  cfg.encoder.reset();
  cfg.variant = Variant::kEdda;
  EXPECT_TRUE(cfg.uses_alignment());
  EXPECT_DOUBLE_EQ(cfg.train_config().beta, 0.03);
  cfg.variant = Variant::kWithoutAlignment;
  EXPECT_FALSE(cfg.uses_alignment());
  for (const char* name : {"edda", "wo-da", "inter", "intra", "ed-mf"}) {
    EXPECT_STREQ(to_string(parse_variant(name)), name);
  }
}

TEST(ConfigTest, ComponentSeedsAreDistinctAndStable) {
  RunConfig cfg;
  cfg.seed = 5;
  const std::vector<std::uint64_t> seeds = {cfg.split_seed(), cfg.eval_seed(),
                                            cfg.init_seed(), cfg.walk_seed(),
                                            cfg.train_seed()};
  for (std::size_t a = 0; a < seeds.size(); ++a) {
    for (std::size_t b = a + 1; b < seeds.size(); ++b) EXPECT_NE(seeds[a], seeds[b]);
  }
  EXPECT_EQ(cfg.walk_config().rng_seed, cfg.walk_seed());
  EXPECT_EQ(cfg.train_config().seed, cfg.train_seed());
  RunConfig other;
  other.seed = 6;
  EXPECT_NE(other.split_seed(), cfg.split_seed());
}

TEST(SynthConfigTest, BroadcastsSingleValues) {
  std::istringstream in(
      "num_domains = 3\nusers = 50\nitems = 40,40,30\ninteractions = 300,300,100\n"
      "overlap = 0.1\nshared_weight = 0.7\nseed = 9\n");
  const auto spec = synth_spec_from(KeyValueFile::parse(in));
  EXPECT_EQ(spec.users, (std::vector<std::size_t>{50, 50, 50}));
  EXPECT_EQ(spec.overlap, (std::vector<double>{0.1, 0.1, 0.1}));
  EXPECT_EQ(spec.seed, 9u);
  const auto back = synth_spec_from(to_key_values(spec));
  EXPECT_EQ(back.items, spec.items);
  EXPECT_EQ(back.shared_weight, spec.shared_weight);
}

TEST(SynthConfigTest, RejectsUnknownKeys) {
  std::istringstream in("colour = blue\n");
  EXPECT_THROW(synth_spec_from(KeyValueFile::parse(in)), InvalidArgument);
}

}  // namespace
}  // namespace edda
