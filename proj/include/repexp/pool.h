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

#ifndef REPEXP_POOL_H_
#define REPEXP_POOL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Core"
#include "repexp/projection.h"

namespace repexp {

enum class PoolingMode { kMean, kLastToken, kPenultimateToken };

std::string_view PoolingModeName(PoolingMode mode);
// Throws std::invalid_argument on an unknown name.
PoolingMode ParsePoolingMode(std::string_view name);

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Response-level embeddings for one prompt, as stored on disk.
struct EmbeddingPool {
  std::string prompt_id;
  PoolingMode pooling_mode = PoolingMode::kMean;
  RowMatrixXf embeddings;  // n x D
  std::optional<std::vector<std::uint8_t>> rewards;
  std::optional<std::vector<std::uint32_t>> lengths;

  Eigen::Index n() const { return embeddings.rows(); }
  Eigen::Index dim() const { return embeddings.cols(); }
  // Number of responses with reward 1; zero when rewards are absent.
  std::int64_t num_correct() const;

  // Throws PoolError (kInvalid / kNonFinite) when an invariant is broken.
  void Validate() const;
};

// Projected, mean-centered vectors in double precision.
struct PreprocessedPool {
  std::string prompt_id;
  Eigen::MatrixXd vectors;  // n x d
  std::uint64_t projection_seed = 0;

  Eigen::Index n() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

// One line of the JSONL manifest.
struct ManifestRecord {
  std::string prompt_id;
  std::int64_t n = 0;
  std::int64_t dim = 0;
  PoolingMode pooling_mode = PoolingMode::kMean;
  std::string file;  // relative to the manifest's directory
  bool has_rewards = false;
};

class PoolError : public std::runtime_error {
 public:
  enum class Code {
    kIo,
    kBadMagic,
    kBadVersion,
    kDimensionMismatch,
    kNonFinite,
    kTruncated,
    kTrailingData,
    kInvalid,
  };

  PoolError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

inline constexpr char kPoolMagic[4] = {'R', 'E', 'P', 'X'};
inline constexpr std::uint32_t kPoolVersion = 1;
inline constexpr std::uint32_t kFlagRewards = 1u << 0;
inline constexpr std::uint32_t kFlagLengths = 1u << 1;

// Binary encoding: little-endian header (magic, version u32, n u64, dim u64,
// flags u32), n*dim float32 row-major, optional n reward bytes, optional n
// u32 lengths.
std::vector<std::uint8_t> EncodePool(const EmbeddingPool& pool);
// Decodes and validates against `record`. The record's prompt id and pooling
// mode are copied into the result.
EmbeddingPool DecodePool(const ManifestRecord& record,
                         const std::vector<std::uint8_t>& bytes);

void WritePool(const EmbeddingPool& pool, const std::filesystem::path& path);
EmbeddingPool ReadPool(const ManifestRecord& record,
                       const std::filesystem::path& data_file);

// Manifest JSONL; blank lines are skipped.
std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::vector<ManifestRecord>& records,
                   const std::filesystem::path& path);
ManifestRecord RecordFor(const EmbeddingPool& pool, std::string file);

// Projects every row, then subtracts the pool mean from each row.
PreprocessedPool Preprocess(const EmbeddingPool& pool, const SparseProjection& projection);

// Subtracts the column means in place.
void CenterRows(Eigen::MatrixXd& rows);

}  // namespace repexp

#endif  // REPEXP_POOL_H_
