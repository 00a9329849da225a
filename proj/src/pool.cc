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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "repexp/linalg.h"

namespace repexp {
namespace {

using Code = PoolError::Code;

constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 4;

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T GetLe(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  }
  return value;
}

std::string Where(const ManifestRecord& record) {
  return "pool '" + record.prompt_id + "' (" + record.file + ")";
}

}  // namespace

std::string_view PoolingModeName(PoolingMode mode) {
  switch (mode) {
    case PoolingMode::kMean:
      return "mean";
    case PoolingMode::kLastToken:
      return "last_token";
    case PoolingMode::kPenultimateToken:
      return "penultimate_token";
  }
  return "mean";
}

PoolingMode ParsePoolingMode(std::string_view name) {
  if (name == "mean") return PoolingMode::kMean;
  if (name == "last_token") return PoolingMode::kLastToken;
  if (name == "penultimate_token") return PoolingMode::kPenultimateToken;
  throw std::invalid_argument("unknown pooling mode '" + std::string(name) + "'");
}

std::int64_t EmbeddingPool::num_correct() const {
  if (!rewards) return 0;
  return std::count(rewards->begin(), rewards->end(), std::uint8_t{1});
}

void EmbeddingPool::Validate() const {
  const auto rows = static_cast<std::size_t>(n());
  if (rewards) {
    if (rewards->size() != rows) {
      throw PoolError(Code::kInvalid, "pool '" + prompt_id + "': rewards length mismatch");
    }
    for (auto r : *rewards) {
      if (r > 1) throw PoolError(Code::kInvalid, "pool '" + prompt_id + "': reward not in {0,1}");
    }
  }
  if (lengths && lengths->size() != rows) {
    throw PoolError(Code::kInvalid, "pool '" + prompt_id + "': lengths length mismatch");
  }
  if (!embeddings.allFinite()) {
    throw PoolError(Code::kNonFinite, "pool '" + prompt_id + "': non-finite embedding entry");
  }
}

std::vector<std::uint8_t> EncodePool(const EmbeddingPool& pool) {
  pool.Validate();
  const auto n = static_cast<std::uint64_t>(pool.n());
  const auto dim = static_cast<std::uint64_t>(pool.dim());
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + n * dim * 4 + n * 5);
  out.insert(out.end(), std::begin(kPoolMagic), std::end(kPoolMagic));
  PutLe<std::uint32_t>(out, kPoolVersion);
  PutLe<std::uint64_t>(out, n);
  PutLe<std::uint64_t>(out, dim);
  std::uint32_t flags = 0;
  if (pool.rewards) flags |= kFlagRewards;
  if (pool.lengths) flags |= kFlagLengths;
  PutLe<std::uint32_t>(out, flags);
  const float* data = pool.embeddings.data();
  for (std::uint64_t i = 0; i < n * dim; ++i) {
    PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(data[i]));
  }
  if (pool.rewards) out.insert(out.end(), pool.rewards->begin(), pool.rewards->end());
  if (pool.lengths) {
    for (auto len : *pool.lengths) PutLe<std::uint32_t>(out, len);
  }
  return out;
}

EmbeddingPool DecodePool(const ManifestRecord& record,
                         const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kPoolMagic, 4) != 0) {
    throw PoolError(Code::kBadMagic, Where(record) + ": bad magic");
  }
  if (bytes.size() < kHeaderBytes) {
    throw PoolError(Code::kTruncated, Where(record) + ": truncated header");
  }
  const std::uint8_t* p = bytes.data() + 4;
  const auto version = GetLe<std::uint32_t>(p);
  if (version != kPoolVersion) {
    throw PoolError(Code::kBadVersion,
                    Where(record) + ": unsupported version " + std::to_string(version));
  }
  const auto n = GetLe<std::uint64_t>(p + 4);
  const auto dim = GetLe<std::uint64_t>(p + 12);
  const auto flags = GetLe<std::uint32_t>(p + 20);

  if (dim != static_cast<std::uint64_t>(record.dim)) {
    throw PoolError(Code::kDimensionMismatch, Where(record) + ": file dim " +
                                                  std::to_string(dim) + " but manifest dim " +
                                                  std::to_string(record.dim));
  }
  if (n < static_cast<std::uint64_t>(record.n)) {
    throw PoolError(Code::kTruncated, Where(record) + ": file holds " + std::to_string(n) +
                                          " rows but manifest claims " +
                                          std::to_string(record.n));
  }
  if (n != static_cast<std::uint64_t>(record.n)) {
    throw PoolError(Code::kDimensionMismatch, Where(record) + ": file n " +
                                                  std::to_string(n) + " but manifest n " +
                                                  std::to_string(record.n));
  }
  const bool has_rewards = (flags & kFlagRewards) != 0;
  const bool has_lengths = (flags & kFlagLengths) != 0;
  if (has_rewards != record.has_rewards) {
    throw PoolError(Code::kInvalid, Where(record) + ": rewards flag disagrees with manifest");
  }
  if (dim > 0 && n > (UINT64_MAX / 4) / dim) {
    throw PoolError(Code::kInvalid, Where(record) + ": header sizes overflow");
  }

  const std::uint64_t need = kHeaderBytes + n * dim * 4 + (has_rewards ? n : 0) +
                             (has_lengths ? n * 4 : 0);
  if (bytes.size() < need) {
    throw PoolError(Code::kTruncated, Where(record) + ": expected " + std::to_string(need) +
                                          " bytes, found " + std::to_string(bytes.size()));
  }
  if (bytes.size() > need) {
    throw PoolError(Code::kTrailingData, Where(record) + ": " +
                                             std::to_string(bytes.size() - need) +
                                             " trailing bytes");
  }

  EmbeddingPool pool;
  pool.prompt_id = record.prompt_id;
  pool.pooling_mode = record.pooling_mode;
  pool.embeddings.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  const std::uint8_t* cursor = bytes.data() + kHeaderBytes;
  float* data = pool.embeddings.data();
  for (std::uint64_t i = 0; i < n * dim; ++i, cursor += 4) {
    data[i] = std::bit_cast<float>(GetLe<std::uint32_t>(cursor));
  }
  if (has_rewards) {
    pool.rewards.emplace(cursor, cursor + n);
    cursor += n;
  }
  if (has_lengths) {
    pool.lengths.emplace(n);
    for (std::uint64_t i = 0; i < n; ++i, cursor += 4) {
      (*pool.lengths)[i] = GetLe<std::uint32_t>(cursor);
    }
  }
  pool.Validate();
  return pool;
}

void WritePool(const EmbeddingPool& pool, const std::filesystem::path& path) {
  const auto bytes = EncodePool(pool);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PoolError(Code::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PoolError(Code::kIo, "write failed for " + path.string());
}

EmbeddingPool ReadPool(const ManifestRecord& record,
                       const std::filesystem::path& data_file) {
  std::ifstream in(data_file, std::ios::binary);
  if (!in) throw PoolError(Code::kIo, "cannot open " + data_file.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodePool(record, bytes);
}

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PoolError(Code::kIo, "cannot open manifest " + path.string());
  std::vector<ManifestRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestRecord r;
      r.prompt_id = j.at("prompt_id").get<std::string>();
      r.n = j.at("n").get<std::int64_t>();
      r.dim = j.at("dim").get<std::int64_t>();
      r.pooling_mode = ParsePoolingMode(j.at("pooling_mode").get<std::string>());
      r.file = j.at("file").get<std::string>();
      r.has_rewards = j.at("has_rewards").get<bool>();
      if (r.n < 0 || r.dim < 0) throw std::invalid_argument("negative n or dim");
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw PoolError(Code::kInvalid, path.string() + ":" + std::to_string(line_no) +
                                          ": bad manifest record: " + e.what());
    }
  }
  return records;
}

void WriteManifest(const std::vector<ManifestRecord>& records,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PoolError(Code::kIo, "cannot open " + path.string() + " for writing");
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["prompt_id"] = r.prompt_id;
    j["n"] = r.n;
    j["dim"] = r.dim;
    j["pooling_mode"] = PoolingModeName(r.pooling_mode);
    j["file"] = r.file;
    j["has_rewards"] = r.has_rewards;
    out << j.dump() << '\n';
  }
  if (!out) throw PoolError(Code::kIo, "write failed for " + path.string());
}

ManifestRecord RecordFor(const EmbeddingPool& pool, std::string file) {
  ManifestRecord r;
  r.prompt_id = pool.prompt_id;
  r.n = pool.n();
  r.dim = pool.dim();
  r.pooling_mode = pool.pooling_mode;
  r.file = std::move(file);
  r.has_rewards = pool.rewards.has_value();
  return r;
}

void CenterRows(Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return;
  // Shifted by the first row, so a pool of identical rows centers to exact
  // zeros.
  const Eigen::RowVectorXd shift = rows.row(0);
  const Eigen::RowVectorXd mean = shift + (rows.rowwise() - shift).colwise().mean();
  rows.rowwise() -= mean;
}

PreprocessedPool Preprocess(const EmbeddingPool& pool, const SparseProjection& projection) {
  if (projection.input_dim() != pool.dim()) {
    throw DimensionError("preprocess: projection input", pool.dim(), projection.input_dim());
  }
  PreprocessedPool out;
  out.prompt_id = pool.prompt_id;
  out.projection_seed = projection.seed();
  out.vectors = projection.ApplyRows(pool.embeddings.cast<double>());
  CenterRows(out.vectors);
  return out;
}

}  // namespace repexp
