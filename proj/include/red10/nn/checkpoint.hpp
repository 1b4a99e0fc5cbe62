#ifndef RED10_NN_CHECKPOINT_HPP_
#define RED10_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "red10/nn/optimizer.hpp"

namespace red10::nn {

class MissingCheckpoint : public std::runtime_error {
 public:
  explicit MissingCheckpoint(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kCheckpointFormat = 1;

nlohmann::json spec_to_json(const NetSpec& spec);
NetSpec spec_from_json(const nlohmann::json& j);

// Writes <dir>/manifest.json (format_version, spec, version, extra metadata
// and a tensor table of name/shape/byte offset) and <dir>/params.bin holding
// little-endian float32 values, each tensor row-major.
void save_checkpoint(const std::filesystem::path& dir, const ParamStore& store,
                     const nlohmann::json& metadata = nlohmann::json::object());
// Loads parameters and version; optimizer state starts at zero.
ParamStore load_checkpoint(const std::filesystem::path& dir);
bool has_checkpoint(const std::filesystem::path& dir);

}  // namespace red10::nn

#endif  // RED10_NN_CHECKPOINT_HPP_
