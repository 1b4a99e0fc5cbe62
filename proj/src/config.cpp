#include "red10/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace red10 {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(text, &used));
      return used == text.size();
    } catch (const std::exception&) {
      return false;
    }
  } else {
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && p == text.data() + text.size();
  }
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") {
    out = true;
  } else if (text == "false" || text == "0" || text == "no") {
    out = false;
  } else {
    return false;
  }
  return true;
}

using Setter = std::function<bool(AppConfig&, const std::string&)>;

template <typename T>
Setter number(T AppConfig::*field) {
  return [field](AppConfig& c, const std::string& v) { return parse_number(v, c.*field); };
}
template <typename T>
Setter rl_number(T RLConfig::*field) {
  return [field](AppConfig& c, const std::string& v) { return parse_number(v, c.rl.*field); };
}
Setter flag(bool AppConfig::*field) {
  return [field](AppConfig& c, const std::string& v) { return parse_bool(v, c.*field); };
}
Setter path(std::filesystem::path AppConfig::*field) {
  return [field](AppConfig& c, const std::string& v) {
    c.*field = v;
    return !v.empty();
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", number(&AppConfig::seed)},
      {"gamma", rl_number(&RLConfig::gamma)},
      {"gamma_cooperative", rl_number(&RLConfig::gamma_cooperative)},
      {"epsilon", rl_number(&RLConfig::epsilon)},
      {"learning_rate", rl_number(&RLConfig::learning_rate)},
      {"flush_size", rl_number(&RLConfig::flush_size)},
      {"batch_size", rl_number(&RLConfig::batch_size)},
      {"lambda", rl_number(&RLConfig::lambda)},
      {"temperature", rl_number(&RLConfig::temperature)},
      {"constant_risk",
       [](AppConfig& c, const std::string& v) {
         double x = 0;
         if (!parse_number(v, x)) return false;
         c.rl.constant_risk = x;
         return true;
       }},
      {"lstm_hidden", [](AppConfig& c, const std::string& v) { return parse_number(v, c.net.lstm_hidden); }},
      {"width", [](AppConfig& c, const std::string& v) { return parse_number(v, c.net.width); }},
      {"actors", number(&AppConfig::actors)},
      {"deterministic", flag(&AppConfig::deterministic)},
      {"cooperative_fraction", number(&AppConfig::cooperative_fraction)},
      {"buffer_batches", number(&AppConfig::buffer_batches)},
      {"finetune_policy", flag(&AppConfig::finetune_policy)},
      {"policy_decks", number(&AppConfig::policy_decks)},
      {"identify_decks", number(&AppConfig::identify_decks)},
      {"finetune_decks", number(&AppConfig::finetune_decks)},
      {"checkpoint_dir", path(&AppConfig::checkpoint_dir)},
      {"log_file", path(&AppConfig::log_file)},
      {"eval_threads", number(&AppConfig::eval_threads)},
      {"port", number(&AppConfig::port)},
      {"insight", flag(&AppConfig::insight)},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& field,
                         const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " +
                         (field.empty() ? "" : field + ": ") + what),
      line_(line),
      field_(field) {}

void AppConfig::validate(const std::string& source) const {
  try {
    rl.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, "", e.what());
  }
  auto require = [&](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(source, 0, field, what);
  };
  require(net.lstm_hidden > 0, "lstm_hidden", "must be > 0");
  require(net.width > 0, "width", "must be > 0");
  require(actors >= 1, "actors", "must be >= 1");
  require(cooperative_fraction >= 0 && cooperative_fraction <= 1, "cooperative_fraction",
          "must be in [0,1]");
  require(buffer_batches >= 1, "buffer_batches", "must be >= 1");
  require(policy_decks >= 0, "policy_decks", "must be >= 0");
  require(identify_decks >= 0, "identify_decks", "must be >= 0");
  require(finetune_decks >= 0, "finetune_decks", "must be >= 0");
  require(eval_threads >= 1, "eval_threads", "must be >= 1");
  require(port > 0 && port < 65536, "port", "must be in [1,65535]");
}

nlohmann::json AppConfig::to_json() const {
  nlohmann::json j = {{"seed", seed},
                      {"gamma", rl.gamma},
                      {"gamma_cooperative", rl.gamma_cooperative},
                      {"epsilon", rl.epsilon},
                      {"learning_rate", rl.learning_rate},
                      {"flush_size", rl.flush_size},
                      {"batch_size", rl.batch_size},
                      {"lambda", rl.lambda},
                      {"temperature", rl.temperature},
                      {"lstm_hidden", net.lstm_hidden},
                      {"width", net.width},
                      {"actors", actors},
                      {"deterministic", deterministic},
                      {"cooperative_fraction", cooperative_fraction},
                      {"buffer_batches", buffer_batches},
                      {"finetune_policy", finetune_policy},
                      {"policy_decks", policy_decks},
                      {"identify_decks", identify_decks},
                      {"finetune_decks", finetune_decks},
                      {"checkpoint_dir", checkpoint_dir.string()},
                      {"log_file", log_file.string()},
                      {"eval_threads", eval_threads},
                      {"port", port},
                      {"insight", insight}};
  j["constant_risk"] = rl.constant_risk ? nlohmann::json(*rl.constant_risk) : nlohmann::json();
  return j;
}

TrainRun AppConfig::train_run(Phase phase) const {
  TrainRun r;
  r.phase = phase;
  r.rl = rl;
  r.net = net;
  r.actors = actors;
  r.deterministic = deterministic;
  r.cooperative_fraction = cooperative_fraction;
  r.buffer_batches = buffer_batches;
  r.finetune_policy = finetune_policy;
  r.seed = seed;
  r.dir = checkpoint_dir;
  switch (phase) {
    case Phase::kPolicy: r.decks = policy_decks; break;
    case Phase::kIdentify: r.decks = identify_decks; break;
    case Phase::kFinetune: r.decks = finetune_decks; break;
  }
  r.config_echo = to_json();
  return r;
}

AppConfig parse_config(std::istream& in, const std::string& source) {
  AppConfig c;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(source, line, key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(source, line, key, "repeated key");
    if (!it->second(c, value)) throw ConfigError(source, line, key, "bad value '" + value + "'");
  }
  c.validate(source);
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  return parse_config(in, path.string());
}

}  // namespace red10
