#include "red10/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace red10::nn {
namespace fs = std::filesystem;

namespace {

void put_le(std::ofstream& out, float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

float get_le(const char* p) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, p, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

}  // namespace

nlohmann::json spec_to_json(const NetSpec& spec) {
  return {
      {"history_steps", spec.history_steps},
      {"history_width", spec.history_width},
      {"flat_width", spec.flat_width},
      {"lstm_hidden", spec.lstm_hidden},
      {"layers", spec.layers},
      {"output", spec.output == OutputActivation::kSigmoid ? "sigmoid" : "identity"},
      {"hidden", spec.hidden == HiddenActivation::kTanh ? "tanh" : "relu"},
  };
}

NetSpec spec_from_json(const nlohmann::json& j) {
  NetSpec spec;
  spec.history_steps = j.at("history_steps").get<int>();
  spec.history_width = j.at("history_width").get<int>();
  spec.flat_width = j.at("flat_width").get<int>();
  spec.lstm_hidden = j.at("lstm_hidden").get<int>();
  spec.layers = j.at("layers").get<std::vector<int>>();
  spec.output = j.at("output").get<std::string>() == "sigmoid" ? OutputActivation::kSigmoid
                                                               : OutputActivation::kIdentity;
  spec.hidden = j.value("hidden", "relu") == "tanh" ? HiddenActivation::kTanh
                                                    : HiddenActivation::kReLU;
  spec.validate();
  return spec;
}

bool has_checkpoint(const fs::path& dir) {
  return fs::exists(dir / "manifest.json") && fs::exists(dir / "params.bin");
}

void save_checkpoint(const fs::path& dir, const ParamStore& store, const nlohmann::json& metadata) {
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format_version"] = kCheckpointFormat;
  manifest["spec"] = spec_to_json(store.params.spec);
  manifest["version"] = store.version;
  manifest["metadata"] = metadata;
  nlohmann::json table = nlohmann::json::array();
  std::ofstream blob(dir / "params.bin", std::ios::binary | std::ios::trunc);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < store.params.tensors.size(); ++i) {
    const auto& t = store.params.tensors[i];
    table.push_back({{"name", store.params.names[i]},
                     {"shape", {t.rows(), t.cols()}},
                     {"offset", offset}});
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) put_le(blob, t(r, c));
    }
    offset += static_cast<std::size_t>(t.size()) * sizeof(float);
  }
  manifest["tensors"] = table;
  if (!blob) throw std::runtime_error("failed writing " + (dir / "params.bin").string());
  std::ofstream(dir / "manifest.json", std::ios::trunc) << manifest.dump(2) << '\n';
}

ParamStore load_checkpoint(const fs::path& dir) {
  if (!has_checkpoint(dir)) throw MissingCheckpoint("no checkpoint in " + dir.string());
  nlohmann::json manifest;
  std::ifstream(dir / "manifest.json") >> manifest;
  if (manifest.at("format_version").get<int>() != kCheckpointFormat) {
    throw std::runtime_error("unsupported checkpoint format in " + dir.string());
  }
  ParamStore store(Params<float>::zeros(spec_from_json(manifest.at("spec"))));
  store.version = manifest.at("version").get<std::uint64_t>();
  std::ifstream in(dir / "params.bin", std::ios::binary);
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto& table = manifest.at("tensors");
  if (table.size() != store.params.tensors.size()) throw ShapeMismatch("tensor count mismatch");
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& t = store.params.tensors[i];
    const auto& entry = table[i];
    if (entry.at("name").get<std::string>() != store.params.names[i] ||
        entry.at("shape")[0].get<Eigen::Index>() != t.rows() ||
        entry.at("shape")[1].get<Eigen::Index>() != t.cols()) {
      throw ShapeMismatch("tensor table mismatch at " + store.params.names[i]);
    }
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    if (offset + t.size() * sizeof(float) > blob.size()) throw ShapeMismatch("blob too short");
    const char* p = blob.data() + offset;
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c, p += sizeof(float)) t(r, c) = get_le(p);
    }
  }
  return store;
}

}  // namespace red10::nn
