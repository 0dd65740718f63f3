// Copyright 2026 The infracls Authors
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

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "infracls/model.hpp"

namespace infracls {

/// Binary checkpoint: UTF-8 JSON header, a single '\0', then the raw
/// little-endian tensor data. The header is
///
///   {"format": "infracls-checkpoint", "version": 1,
///    "architecture": "...", "config": {...}, "metadata": {...},
///    "tensors": [{"name": ..., "shape": [...], "dtype": "f32"|"f64",
///                 "offset": <byte offset from the start of the data>}]}
struct Checkpoint {
  nlohmann::json header;
  std::vector<std::pair<std::string, Tensor<double>>> tensors;

  const nlohmann::json& metadata() const { return header.at("metadata"); }
  std::string architecture() const { return header.at("architecture").get<std::string>(); }
};

template <typename T>
void save_checkpoint(const std::filesystem::path& path, Model<T>& model, const nlohmann::json& metadata = {});

/// Same bytes as save_checkpoint writes, with the tensors taken from a
/// snapshot instead of the live model.
template <typename T>
void save_checkpoint(const std::filesystem::path& path, Model<T>& model, const std::vector<Tensor<T>>& state,
                     const nlohmann::json& metadata);

/// Throws DataError on malformed files.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies tensors into \p model by name; every model tensor must be present
/// with a matching shape.
template <typename T>
void load_into(Model<T>& model, const Checkpoint& ckpt);

/// Rebuilds the recorded architecture and loads its tensors.
template <typename T>
std::unique_ptr<Model<T>> model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace infracls
