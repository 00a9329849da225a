// Copyright 2026 The RepExp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repexp/pool.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "gtest/gtest.h"
#include "repexp/linalg.h"

namespace repexp {
namespace {

namespace fs = std::filesystem;

EmbeddingPool RandomPool(int n, int dim, std::uint64_t seed, bool rewards, bool lengths) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  EmbeddingPool pool;
  pool.prompt_id = "q" + std::to_string(seed);
  pool.pooling_mode = PoolingMode::kLastToken;
  pool.embeddings.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) pool.embeddings(i, j) = normal(rng);
  }
  if (rewards) {
    pool.rewards.emplace();
    for (int i = 0; i < n; ++i) pool.rewards->push_back(static_cast<std::uint8_t>(rng() & 1));
  }
  if (lengths) {
    pool.lengths.emplace();
    for (int i = 0; i < n; ++i) pool.lengths->push_back(static_cast<std::uint32_t>(rng() % 5000));
  }
  return pool;
}

class PoolFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("repexp_pool_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(PoolFileTest, RoundTripIsExact) {
  for (int variant = 0; variant < 4; ++variant) {
    const auto pool = RandomPool(17, 9, 100 + variant, variant & 1, variant & 2);
    const fs::path file = dir_ / "p.bin";
    WritePool(pool, file);
    const auto back = ReadPool(RecordFor(pool, "p.bin"), file);
    EXPECT_EQ(back.prompt_id, pool.prompt_id);
    EXPECT_EQ(back.pooling_mode, pool.pooling_mode);
    ASSERT_EQ(back.embeddings.rows(), 17);
    EXPECT_EQ(std::memcmp(back.embeddings.data(), pool.embeddings.data(), 17 * 9 * 4), 0);
    EXPECT_EQ(back.rewards, pool.rewards);
    EXPECT_EQ(back.lengths, pool.lengths);
    EXPECT_EQ(EncodePool(back), EncodePool(pool));
  }
}

TEST(PoolEncodingTest, HeaderLayoutIsLittleEndian) {
  EmbeddingPool pool;
  pool.embeddings.resize(2, 3);
  pool.embeddings << 1, 2, 3, 4, 5, 6;
  pool.rewards = std::vector<std::uint8_t>{0, 1};
  const auto bytes = EncodePool(pool);
  ASSERT_EQ(bytes.size(), 28u + 24u + 2u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "REPX");
  EXPECT_EQ(bytes[4], 1);  // version
  EXPECT_EQ(bytes[8], 2);  // n
  EXPECT_EQ(bytes[16], 3);  // dim
  EXPECT_EQ(bytes[24], 1);  // flags
  // 1.0f = 0x3f800000
  EXPECT_EQ(bytes[28], 0x00);
  EXPECT_EQ(bytes[31], 0x3f);
  EXPECT_EQ(bytes[52], 0);
  EXPECT_EQ(bytes[53], 1);
}

PoolError::Code DecodeError(const ManifestRecord& record, const std::vector<std::uint8_t>& bytes) {
  try {
    DecodePool(record, bytes);
  } catch (const PoolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return PoolError::Code::kInvalid;
}

TEST(PoolEncodingTest, ManifestClaimsMoreRowsThanFileHolds) {
  const auto nine = RandomPool(9, 4, 1, false, false);
  auto record = RecordFor(nine, "x.bin");
  record.n = 10;
  EXPECT_EQ(DecodeError(record, EncodePool(nine)), PoolError::Code::kTruncated);

  // Header says 10 rows but only 9 are present.
  const auto ten = RandomPool(10, 4, 1, false, false);
  auto bytes = EncodePool(ten);
  bytes.resize(bytes.size() - 16);
  EXPECT_EQ(DecodeError(RecordFor(ten, "x.bin"), bytes), PoolError::Code::kTruncated);
}

TEST(PoolEncodingTest, DistinctErrors) {
  const auto pool = RandomPool(5, 3, 2, true, false);
  const auto record = RecordFor(pool, "x.bin");
  auto bytes = EncodePool(pool);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(DecodeError(record, bad_magic), PoolError::Code::kBadMagic);

  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_EQ(DecodeError(record, bad_version), PoolError::Code::kBadVersion);

  auto wrong_dim = record;
  wrong_dim.dim = 4;
  EXPECT_EQ(DecodeError(wrong_dim, bytes), PoolError::Code::kDimensionMismatch);

  auto fewer = record;
  fewer.n = 4;
  EXPECT_EQ(DecodeError(fewer, bytes), PoolError::Code::kDimensionMismatch);

  auto nan = bytes;
  // Overwrite the first float with a quiet NaN (0x7fc00000).
  nan[28] = 0x00;
  nan[29] = 0x00;
  nan[30] = 0xc0;
  nan[31] = 0x7f;
  EXPECT_EQ(DecodeError(record, nan), PoolError::Code::kNonFinite);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(DecodeError(record, truncated), PoolError::Code::kTruncated);
  EXPECT_EQ(DecodeError(record, std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10)),
            PoolError::Code::kTruncated);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(DecodeError(record, trailing), PoolError::Code::kTrailingData);

  auto no_rewards = record;
  no_rewards.has_rewards = false;
  EXPECT_EQ(DecodeError(no_rewards, bytes), PoolError::Code::kInvalid);

  auto bad_reward = bytes;
  bad_reward[28 + 5 * 3 * 4] = 2;
  EXPECT_EQ(DecodeError(record, bad_reward), PoolError::Code::kInvalid);
}

TEST_F(PoolFileTest, MissingFileIsIoError) {
  ManifestRecord record;
  record.file = "missing.bin";
  try {
    ReadPool(record, dir_ / "missing.bin");
    FAIL();
  } catch (const PoolError& e) {
    EXPECT_EQ(e.code(), PoolError::Code::kIo);
  }
}

TEST_F(PoolFileTest, ManifestRoundTrip) {
  std::vector<ManifestRecord> records(2);
  records[0] = {"a", 3, 4, PoolingMode::kMean, "a.bin", true};
  records[1] = {"b,\"x\"", 5, 6, PoolingMode::kPenultimateToken, "sub/b.bin", false};
  WriteManifest(records, dir_ / "m.jsonl");
  const auto back = ReadManifest(dir_ / "m.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].prompt_id, "b,\"x\"");
  EXPECT_EQ(back[1].pooling_mode, PoolingMode::kPenultimateToken);
  EXPECT_EQ(back[1].file, "sub/b.bin");
  EXPECT_EQ(back[0].has_rewards, true);
  EXPECT_EQ(back[0].n, 3);
}

TEST_F(PoolFileTest, ManifestRejectsBadRecords) {
  std::ofstream(dir_ / "m.jsonl") << R"({"prompt_id":"a","n":3,"dim":4,"pooling_mode":"max","file":"a","has_rewards":true})"
                                  << "\n";
  EXPECT_THROW(ReadManifest(dir_ / "m.jsonl"), PoolError);
  std::ofstream(dir_ / "m2.jsonl") << "{not json\n";
  EXPECT_THROW(ReadManifest(dir_ / "m2.jsonl"), PoolError);
}

TEST(PreprocessTest, IdenticalRowsBecomeZero) {
  EmbeddingPool pool;
  pool.embeddings = RowMatrixXf::Constant(6, 20, 0.75f);
  const auto out = Preprocess(pool, SparseProjection::Make(20, 5, 3));
  EXPECT_TRUE(out.vectors.isZero(0.0));
}

TEST(PreprocessTest, TwoRowsAreSymmetricHalfDifferences) {
  EmbeddingPool pool;
  pool.embeddings.resize(2, 3);
  pool.embeddings << 1, 2, 3, 5, -2, 0;
  const auto out = Preprocess(pool, SparseProjection::Passthrough(3));
  Eigen::Vector3d half(-2, 2, 1.5);  // (a - b) / 2
  EXPECT_EQ(out.vectors.row(0).transpose(), half);
  EXPECT_EQ(out.vectors.row(1).transpose(), -half);
}

TEST(PreprocessTest, ColumnMeansVanishAndCenteringIsIdempotent) {
  const auto pool = RandomPool(40, 64, 9, false, false);
  const auto proj = SparseProjection::Make(64, 16, 4);
  const auto out = Preprocess(pool, proj);
  EXPECT_EQ(out.projection_seed, 4u);
  // Recompute: project each row directly, then subtract the mean by hand.
  Eigen::MatrixXd expected(40, 16);
  for (int i = 0; i < 40; ++i) {
    expected.row(i) = proj.Apply(pool.embeddings.row(i).cast<double>().transpose()).transpose();
  }
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(16);
  for (int i = 0; i < 40; ++i) mean += expected.row(i) / 40.0;
  for (int i = 0; i < 40; ++i) expected.row(i) -= mean;
  EXPECT_LT((out.vectors - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(out.vectors.colwise().mean().cwiseAbs().maxCoeff(), 1e-9);

  Eigen::MatrixXd again = out.vectors;
  CenterRows(again);
  EXPECT_LT((again - out.vectors).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PreprocessTest, ProjectionMustMatchPoolDim) {
  const auto pool = RandomPool(3, 8, 1, false, false);
  EXPECT_THROW(Preprocess(pool, SparseProjection::Make(9, 4, 1)), DimensionError);
}

TEST(PoolingModeTest, NamesRoundTrip) {
  for (auto m : {PoolingMode::kMean, PoolingMode::kLastToken, PoolingMode::kPenultimateToken}) {
    EXPECT_EQ(ParsePoolingMode(PoolingModeName(m)), m);
  }
  EXPECT_THROW(ParsePoolingMode("first"), std::invalid_argument);
}

}  // namespace
}  // namespace repexp
