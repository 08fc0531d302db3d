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


#include "edda/encoders.hpp"

#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "edda/error.hpp"
#include "oracles.hpp"

namespace edda {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = normal(rng);
  }
  return m;
}

double relative_error(const Matrix& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (Eigen::MatrixXd(a) - b).norm() / scale;
}

TEST(GRecTest, MatchesDenseOperatorOnRandomGraphs) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> layers(0, 4);
  std::uniform_real_distribution<double> alpha(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = testing::random_records(rng, 1, 25, 20, 60);
    const auto ds = ingest(records);
    const auto& g = ds.domain(0);
    ASSERT_LE(g.num_nodes(), 50u);
    const GRecConfig cfg{layers(rng), alpha(rng)};
    const Matrix x = random_matrix(g.num_nodes(), 5, rng);
    EXPECT_LE(relative_error(propagate(g, x, cfg), testing::dense_grec(g, x, cfg)), 1e-10);
  }
}

TEST(GRecTest, FixpointsAreBitwise) {
  std::mt19937_64 rng(2);
  const auto ds = ingest(testing::random_records(rng, 1, 10, 10, 30));
  const auto& g = ds.domain(0);
  const Matrix x = random_matrix(g.num_nodes(), 4, rng);
  EXPECT_TRUE(propagate(g, x, GRecConfig{3, 1.0}) == x);
  EXPECT_TRUE(propagate(g, x, GRecConfig{0, 0.3}) == x);
}

TEST(GRecTest, FullyMaskedGraphOnlyKeepsResidual) {
  std::mt19937_64 rng(3);
  const auto ds = ingest(testing::random_records(rng, 1, 8, 8, 20));
  const auto& g = ds.domain(0);
  const Matrix x = random_matrix(g.num_nodes(), 3, rng);
  const EdgeMask none(g.num_edges(), 0);
  const Matrix y = propagate(g, x, GRecConfig{2, 0.5}, &none);
  EXPECT_LE((y - 0.25 * x).norm(), 1e-14);
}

TEST(GRecTest, MaskKeepsFullGraphDegrees) {
  // Path u0 - i0 - u1 with edge (u1, i0) dropped; i0 still has degree 2.
  const DomainGraph g(0, {{0, 0}, {1, 0}});
  Matrix x(3, 1);
  x << 1.0, 2.0, 4.0;  // u0, u1, i0
  EdgeMask mask(2, 1);
  mask[1] = 0;
  const Matrix y = propagate(g, x, GRecConfig{1, 0.0}, &mask);
  EXPECT_DOUBLE_EQ(y(0, 0), 4.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(y(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(y(2, 0), 1.0 / std::sqrt(2.0));
}

TEST(GRecTest, OperatorIsSelfAdjoint) {
  std::mt19937_64 rng(4);
  const auto ds = ingest(testing::random_records(rng, 1, 12, 9, 30));
  const auto& g = ds.domain(0);
  const GRecConfig cfg{2, 0.1};
  const Matrix x = random_matrix(g.num_nodes(), 3, rng);
  const Matrix y = random_matrix(g.num_nodes(), 3, rng);
  const double lhs = propagate(g, x, cfg).cwiseProduct(y).sum();
  const double rhs = x.cwiseProduct(propagate(g, y, cfg)).sum();
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
}

TEST(GRecTest, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(5);
  const auto ds = ingest(testing::random_records(rng, 1, 40, 30, 200));
  const auto& g = ds.domain(0);
  const Matrix x = random_matrix(g.num_nodes(), 6, rng);
  const GRecConfig cfg{3, 0.2};
  EXPECT_TRUE(propagate(g, x, cfg, nullptr, 1) == propagate(g, x, cfg, nullptr, 4));
}

TEST(GRecTest, InvalidConfigRejected) {
  EXPECT_THROW((GRecConfig{-1, 0.1}.validate()), InvalidArgument);
  EXPECT_THROW((GRecConfig{2, 1.5}.validate()), InvalidArgument);
  const DomainGraph g(0, {{0, 0}});
  EXPECT_THROW(propagate(g, Matrix::Zero(3, 2), GRecConfig{}), InvalidArgument);
}

TEST(InterEncoderTest, SumsPerDomainPropagation) {
  std::mt19937_64 rng(6);
  const auto ds = ingest(testing::random_records(rng, 3, 10, 10, 20));
  const GRecConfig cfg{2, 0.1};
  const Matrix x = random_matrix(ds.num_nodes(), 4, rng);
  const Matrix y = inter_propagate(ds, x, cfg);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (DomainId d = 0; d < ds.num_domains(); ++d) {
    const auto& g = ds.domain(d);
    const auto globals = ds.global_of(d);
    Eigen::MatrixXd local(g.num_nodes(), x.cols());
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) local.row(v) = x.row(globals[v]);
    const Eigen::MatrixXd out = testing::dense_grec(g, local, cfg);
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) expected.row(globals[v]) += out.row(v);
  }
  EXPECT_LE(relative_error(y, expected), 1e-12);

  const EmbeddingTable table(std::vector<NodeId>(ds.nodes().begin(), ds.nodes().end()), x);
  const auto encoded = inter_encode(ds, table, cfg);
  EXPECT_LE(relative_error(encoded.values(), expected), 1e-12);
}

TEST(InterEncoderTest, MfIsIdentity) {
  std::mt19937_64 rng(7);
  const EmbeddingTable t({user_node(1), item_node(1)}, random_matrix(2, 3, rng));
  EXPECT_EQ(mf_encode(t), t);
}

TEST(EmbeddingTableTest, LookupAndDuplicates) {
  const EmbeddingTable t({item_node(4), user_node(9)}, Matrix::Zero(2, 2));
  EXPECT_EQ(*t.row_of(user_node(9)), 1u);
  EXPECT_FALSE(t.row_of(user_node(4)).has_value());
  EXPECT_THROW(t.require_row(user_node(4)), DataError);
  EXPECT_THROW(EmbeddingTable({user_node(1), user_node(1)}, Matrix::Zero(2, 2)),
               InvalidArgument);
  EXPECT_THROW(EmbeddingTable({user_node(1)}, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(EmbeddingTableTest, BinaryRoundTripIsExact) {
  std::mt19937_64 rng(8);
  const EmbeddingTable t({user_node(0), user_node(3), item_node(2)}, random_matrix(3, 5, rng));
  std::stringstream buf;
  write_table(buf, t);
  EXPECT_EQ(buf.str().substr(0, 4), "EDDA");
  EXPECT_EQ(read_table(buf), t);

  const auto dir = std::filesystem::temp_directory_path() / "edda_encoders_test";
  std::filesystem::create_directories(dir);
  const Matrix m = random_matrix(4, 2, rng);
  write_matrix_file((dir / "m.mat").string(), m);
  EXPECT_TRUE(read_matrix_file((dir / "m.mat").string()) == m);
  std::filesystem::remove_all(dir);
}

TEST(EmbeddingTableTest, CorruptInputRejected) {
  std::stringstream bad("NOPE");
  EXPECT_THROW(read_table(bad), DataError);
  std::mt19937_64 rng(9);
  std::stringstream buf;
  write_table(buf, EmbeddingTable({user_node(0)}, random_matrix(1, 3, rng)));
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 4);
  std::stringstream truncated(bytes);
  EXPECT_THROW(read_table(truncated), DataError);
}

}  // namespace
}  // namespace edda
