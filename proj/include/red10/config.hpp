#ifndef RED10_CONFIG_HPP_
#define RED10_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "red10/training.hpp"

namespace red10 {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct AppConfig {
  std::uint64_t seed = 0;
  RLConfig rl;
  NetShape net;
  int actors = 1;
  bool deterministic = true;
  double cooperative_fraction = 0.1;
  int buffer_batches = 8;
  bool finetune_policy = false;
  long long policy_decks = 100000;
  long long identify_decks = 20000;
  long long finetune_decks = 10000;
  std::filesystem::path checkpoint_dir;
  std::filesystem::path log_file;
  int eval_threads = 1;
  int port = 8080;
  bool insight = false;

  void validate(const std::string& source = "<config>") const;
  nlohmann::json to_json() const;
  // Training run for one phase, with this config echoed into its manifests.
  TrainRun train_run(Phase phase) const;
};

// "key = value" lines; '#' starts a comment. Unknown keys, malformed values
// and repeated keys are errors.
AppConfig parse_config(std::istream& in, const std::string& source = "<config>");
AppConfig load_config(const std::filesystem::path& path);

}  // namespace red10

#endif  // RED10_CONFIG_HPP_
