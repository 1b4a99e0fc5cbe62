#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "red10/config.hpp"
#include "red10/evaluation.hpp"
#include "red10/features.hpp"
#include "red10/service.hpp"

// After Eigen: resolv.h defines a `_res` macro that collides with it.
#include <httplib.h>

namespace {

using namespace red10;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--seed", c.seed, "random seed");
}

AppConfig config_of(const Common& c) {
  AppConfig cfg = c.config.empty() ? AppConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

const std::string& require_out(const Common& c) {
  if (c.out.empty()) throw UsageError("--out is required");
  return c.out;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw UsageError("cannot write " + p.string());
  return out;
}

// A bank alone is enough for Monte-Carlo-only agents.
std::shared_ptr<const Models> models_from(const std::string& dir, bool need_identify = true) {
  if (dir.empty()) return nullptr;
  if (need_identify) return std::make_shared<const Models>(load_models(dir));
  auto m = std::make_shared<Models>();
  m->bank = load_bank(dir);
  return m;
}

int train(Phase phase, const Common& c, std::optional<long long> decks) {
  AppConfig cfg = config_of(c);
  cfg.checkpoint_dir = require_out(c);
  TrainRun run = cfg.train_run(phase);
  if (decks) run.decks = *decks;
  fs::create_directories(run.dir);
  std::ofstream log;
  const fs::path log_path = cfg.log_file.empty()
                                ? run.dir / ("train_" + std::string(phase_name(phase)) + ".jsonl")
                                : cfg.log_file;
  log.open(log_path, std::ios::app);
  run.log = &log;
  const PhaseResult r = run_phase(run);
  std::cout << nlohmann::json{{"phase", phase_name(phase)},
                              {"decks", r.decks},
                              {"transitions", r.transitions},
                              {"updates", r.log.size()},
                              {"dir", run.dir.string()}}
                   .dump()
            << '\n';
  return 0;
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Red-10 identification and reinforcement learning toolkit"};
  app.require_subcommand(1);

  Common common;
  std::optional<long long> decks;
  auto* train_policy = app.add_subcommand("train-policy", "phase 1: policy bank self-play");
  auto* train_identify = app.add_subcommand("train-identify", "phase 2: relation and danger networks");
  auto* finetune = app.add_subcommand("finetune", "phase 3: intrinsic-reward fine-tuning");
  for (auto* cmd : {train_policy, train_identify, finetune}) {
    add_common(cmd, common);
    cmd->add_option("--decks", decks, "override the phase budget");
  }

  std::string a = "idrl", b = "random", models_dir, b_models_dir, results_path;
  int match_decks = 2000, threads = 0;
  auto* eval = app.add_subcommand("eval", "paired-seat match between two agent kinds");
  add_common(eval, common);
  eval->add_option("--a", a, "agent X: idrl, random, rule, mc:<bits>, const:<nu>");
  eval->add_option("--b", b, "agent Y");
  eval->add_option("--decks", match_decks)->check(CLI::PositiveNumber);
  eval->add_option("--models", models_dir, "checkpoint directory for X");
  eval->add_option("--b-models", b_models_dir, "checkpoint directory for Y (defaults to --models)");
  eval->add_option("--results", results_path, "per-deck CSV");
  eval->add_option("--threads", threads);

  std::string variant = "none";
  auto* ablate = app.add_subcommand("ablate", "full IDRL against an ablated variant");
  add_common(ablate, common);
  ablate->add_option("--variant", variant, "none (Monte-Carlo only) or const:<nu>");
  ablate->add_option("--decks", match_decks)->check(CLI::PositiveNumber);
  ablate->add_option("--models", models_dir)->required();
  ablate->add_option("--threads", threads);

  int curve_decks = 10;
  auto* curves = app.add_subcommand("export-curves", "per-turn identification curves as CSV");
  add_common(curves, common);
  curves->add_option("--decks", curve_decks)->check(CLI::PositiveNumber);
  curves->add_option("--models", models_dir)->required();

  std::string which = "q";
  auto* layout = app.add_subcommand("layout", "feature layout table");
  add_common(layout, common);
  layout->add_option("--which", which)->check(CLI::IsMember({"q", "identify"}));

  std::optional<int> port;
  bool insight = false;
  std::string replay_dir;
  auto* serve = app.add_subcommand("serve", "HTTP game service under /v1");
  add_common(serve, common);
  serve->add_option("--models", models_dir)->required();
  serve->add_option("--port", port);
  serve->add_flag("--insight", insight, "expose /insight");
  serve->add_option("--replay-dir", replay_dir);

  std::string replay_file;
  auto* replay = app.add_subcommand("replay", "re-verify every move of a replay file");
  add_common(replay, common);
  replay->add_option("file", replay_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_policy) return train(Phase::kPolicy, common, decks);
    if (*train_identify) return train(Phase::kIdentify, common, decks);
    if (*finetune) return train(Phase::kFinetune, common, decks);

    if (*eval || *ablate) {
      const AppConfig cfg = config_of(common);
      MatchOptions options;
      options.threads = threads > 0 ? threads : cfg.eval_threads;
      WinRateReport report;
      nlohmann::json meta;
      if (*eval) {
        const AgentKind x = AgentKind::parse(a);
        const AgentKind y = AgentKind::parse(b);
        const bool own_y = !b_models_dir.empty();
        const auto x_models = models_from(models_dir, x.needs_identify() || (!own_y && y.needs_identify()));
        const auto y_models = own_y ? models_from(b_models_dir, y.needs_identify()) : x_models;
        const auto results = play_match(x, y, x_models, y_models, match_decks, cfg.seed, options);
        if (!results_path.empty()) {
          auto out = open_out(results_path);
          write_results(out, results);
        }
        report = normalized_win_rate(results);
        meta = {{"x", a}, {"y", b}};
      } else {
        Ablation ab = NoIdentification{};
        if (variant.rfind("const:", 0) == 0) {
          ab = DangerConstant{std::stod(variant.substr(6))};
        } else if (variant != "none") {
          throw UsageError("--variant must be none or const:<nu>");
        }
        report = run_ablation(ab, models_from(models_dir), match_decks, cfg.seed, options);
        meta = {{"x", "idrl"}, {"y", ablated_kind(ab).to_string()}};
      }
      nlohmann::json j = report.to_json();
      j["match"] = meta;
      j["seed"] = cfg.seed;
      if (common.out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        open_out(common.out) << j.dump(2) << '\n';
      }
      return 0;
    }

    if (*curves) {
      const AppConfig cfg = config_of(common);
      const auto rows = export_curves(models_from(models_dir), curve_decks, cfg.seed);
      if (common.out.empty()) {
        write_curves(std::cout, rows);
      } else {
        auto out = open_out(common.out);
        write_curves(out, rows);
      }
      return 0;
    }

    if (*layout) {
      const std::string table = format_layout(which == "q" ? q_layout() : identify_layout());
      if (common.out.empty()) {
        std::cout << table;
      } else {
        open_out(common.out) << table;
      }
      return 0;
    }

    if (*serve) {
      const AppConfig cfg = config_of(common);
      ServiceOptions options;
      options.insight = insight || cfg.insight;
      options.replay_dir = replay_dir;
      GameService service(models_from(models_dir), options);
      httplib::Server server;
      mount(server, service);
      g_server = &server;
      std::signal(SIGINT, [](int) { g_server->stop(); });
      std::signal(SIGTERM, [](int) { g_server->stop(); });
      const int p = port.value_or(cfg.port);
      std::cerr << "listening on 127.0.0.1:" << p << '\n';
      if (!server.listen("127.0.0.1", p)) throw UsageError("cannot listen on port " + std::to_string(p));
      return 0;
    }

    if (*replay) {
      std::ifstream in(replay_file);
      const Replay r = read_replay(in);
      const GameState g = reconstruct(r);
      std::cout << "seed " << r.seed << ": " << r.turns.size() << " moves verified";
      if (g.winner) std::cout << ", " << team_name(*g.winner) << " team wins";
      std::cout << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
