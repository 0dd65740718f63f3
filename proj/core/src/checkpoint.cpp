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

#include "infracls/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "infracls/inception.hpp"
#include "infracls/resnet.hpp"

namespace infracls {
namespace {

constexpr const char* kFormat = "infracls-checkpoint";

template <typename T>
constexpr const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

template <typename T>
void append_le(std::string& out, const Tensor<T>& t) {
  const std::size_t start = out.size();
  out.resize(start + t.size() * sizeof(T));
  std::memcpy(out.data() + start, t.raw(), t.size() * sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = start; i < out.size(); i += sizeof(T)) {
      std::reverse(out.begin() + static_cast<std::ptrdiff_t>(i),
                   out.begin() + static_cast<std::ptrdiff_t>(i + sizeof(T)));
    }
  }
}

template <typename U>
U read_le(const char* p) {
  char bytes[sizeof(U)];
  std::memcpy(bytes, p, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(U));
  U v;
  std::memcpy(&v, bytes, sizeof(U));
  return v;
}

template <typename T>
void write_file(const std::filesystem::path& path, Model<T>& model, const std::vector<const Tensor<T>*>& tensors,
                const nlohmann::json& metadata) {
  const auto named = model.named_tensors();
  nlohmann::json entries = nlohmann::json::array();
  std::string data;
  for (std::size_t i = 0; i < named.size(); ++i) {
    entries.push_back({{"name", named[i].first},
                       {"shape", tensors[i]->shape()},
                       {"dtype", dtype_name<T>()},
                       {"offset", data.size()}});
    append_le(data, *tensors[i]);
  }
  nlohmann::json header = {{"format", kFormat},
                           {"version", 1},
                           {"architecture", model.architecture()},
                           {"config", model.config_json()},
                           {"metadata", metadata.is_null() ? nlohmann::json::object() : metadata},
                           {"tensors", entries}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  const std::string text = header.dump();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.put('\0');
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

}  // namespace

template <typename T>
void save_checkpoint(const std::filesystem::path& path, Model<T>& model, const nlohmann::json& metadata) {
  std::vector<const Tensor<T>*> tensors;
  for (const auto& [name, t] : model.named_tensors()) tensors.push_back(t);
  write_file(path, model, tensors, metadata);
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, Model<T>& model, const std::vector<Tensor<T>>& state,
                     const nlohmann::json& metadata) {
  const auto named = model.named_tensors();
  if (state.size() != named.size()) throw ShapeError("save_checkpoint: state does not match the model");
  std::vector<const Tensor<T>*> tensors;
  for (const Tensor<T>& t : state) tensors.push_back(&t);
  write_file(path, model, tensors, metadata);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t nul = bytes.find('\0');
  if (nul == std::string::npos) throw DataError(path.string() + ": missing header terminator");

  Checkpoint ckpt;
  try {
    ckpt.header = nlohmann::json::parse(bytes.substr(0, nul));
    if (ckpt.header.at("format").get<std::string>() != kFormat) {
      throw DataError(path.string() + ": not an infracls checkpoint");
    }
    const char* data = bytes.data() + nul + 1;
    const std::size_t data_size = bytes.size() - nul - 1;
    for (const auto& entry : ckpt.header.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<Shape>();
      const auto dtype = entry.at("dtype").get<std::string>();
      const auto offset = entry.at("offset").get<std::size_t>();
      const std::size_t width = dtype == "f32" ? 4 : dtype == "f64" ? 8 : 0;
      if (width == 0) throw DataError(path.string() + ": tensor " + name + " has unknown dtype " + dtype);
      const std::size_t count = element_count(shape);
      if (offset + count * width > data_size) {
        throw DataError(path.string() + ": tensor " + name + " extends past the end of the file");
      }
      std::vector<double> values(count);
      for (std::size_t i = 0; i < count; ++i) {
        const char* p = data + offset + i * width;
        values[i] = width == 4 ? static_cast<double>(read_le<float>(p)) : read_le<double>(p);
      }
      ckpt.tensors.emplace_back(name, Tensor<double>(shape, std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": malformed checkpoint header: " + e.what());
  }
  return ckpt;
}

template <typename T>
void load_into(Model<T>& model, const Checkpoint& ckpt) {
  for (auto& [name, tensor] : model.named_tensors()) {
    auto it = std::find_if(ckpt.tensors.begin(), ckpt.tensors.end(),
                           [&](const auto& entry) { return entry.first == name; });
    if (it == ckpt.tensors.end()) throw DataError("checkpoint has no tensor " + name);
    if (it->second.shape() != tensor->shape()) {
      throw DataError("checkpoint tensor " + name + " has shape " + to_string(it->second.shape()) +
                      ", model expects " + to_string(tensor->shape()));
    }
    const bool flag = tensor->requires_grad();
    *tensor = it->second.template cast<T>();
    tensor->set_requires_grad(flag);
  }
}

template <typename T>
std::unique_ptr<Model<T>> model_from_checkpoint(const Checkpoint& ckpt) {
  const std::string arch = ckpt.architecture();
  std::unique_ptr<Model<T>> model;
  try {
    if (arch == "inception_time") {
      model = build_inception_time<T>(InceptionConfig::from_json(ckpt.header.at("config")), 0);
    } else if (arch == "small_resnet") {
      model = build_small_resnet<T>(ResNet2DConfig::from_json(ckpt.header.at("config")), 0);
    } else {
      throw DataError("checkpoint architecture '" + arch + "' is not supported");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint config: ") + e.what());
  }
  load_into(*model, ckpt);
  return model;
}

#define INFRACLS_INSTANTIATE_CHECKPOINT(T)                                                               \
  template void save_checkpoint<T>(const std::filesystem::path&, Model<T>&, const nlohmann::json&);      \
  template void save_checkpoint<T>(const std::filesystem::path&, Model<T>&, const std::vector<Tensor<T>>&, \
                                   const nlohmann::json&);                                               \
  template void load_into<T>(Model<T>&, const Checkpoint&);                                              \
  template std::unique_ptr<Model<T>> model_from_checkpoint<T>(const Checkpoint&);

INFRACLS_INSTANTIATE_CHECKPOINT(float)
INFRACLS_INSTANTIATE_CHECKPOINT(double)

#undef INFRACLS_INSTANTIATE_CHECKPOINT

}  // namespace infracls
