#include "red10/service.hpp"

#include <condition_variable>
#include <fstream>
#include <random>

// After Eigen: resolv.h defines a `_res` macro that collides with it.
#include <httplib.h>

#include "red10/evaluation.hpp"

namespace red10 {

using nlohmann::json;

struct Session {
  mutable std::mutex mu;
  mutable std::condition_variable changed;
  std::string id;
  std::uint64_t seed = 0;
  GameState state;
  std::optional<int> human;
  std::array<std::string, kNumSeats> controllers;
  std::array<std::unique_ptr<Agent>, kNumSeats> agents;
  Rng rng{0};
  int revision = 0;
  std::vector<json> frames;
};

namespace {

json move_json(const Move& m) {
  return {{"category", m.is_pass() ? std::string("Pass") : std::string(category_name(m.play->category))},
          {"cards", m.is_pass() ? std::string("pass") : m.cards().to_string()}};
}

json codes(CardSet cards) {
  json out = json::array();
  for (Card c : cards.cards()) out.push_back(to_code(c));
  return out;
}

void apply(Session& s, const Move& m, const ServiceOptions& options) {
  const int seat = s.state.turn;
  s.state = step(s.state, m);
  ++s.revision;
  json frame = {{"revision", s.revision}, {"seat", seat}, {"move", move_json(m)},
                {"terminal", s.state.terminal()}};
  if (s.state.terminal()) {
    frame["winner"] = team_name(*s.state.winner);
    if (!options.replay_dir.empty()) {
      std::filesystem::create_directories(options.replay_dir);
      std::ofstream out(options.replay_dir / (s.id + ".replay"));
      write_replay(out, s.seed, s.state.history);
    }
  }
  s.frames.push_back(std::move(frame));
  s.changed.notify_all();
}

void advance(Session& s, const ServiceOptions& options) {
  while (!s.state.terminal() && s.human != s.state.turn) {
    apply(s, s.agents[s.state.turn]->act(s.state, s.rng), options);
  }
}

int parse_seat(const json& v) {
  if (!v.is_number_integer()) throw ServiceError(400, "human_seat must be an integer or null");
  const int seat = v.get<int>();
  if (seat < 0 || seat >= kNumSeats) throw ServiceError(400, "human_seat out of range");
  return seat;
}

}  // namespace

GameService::GameService(std::shared_ptr<const Models> models, ServiceOptions options)
    : models_(std::move(models)), options_(std::move(options)) {}

GameService::~GameService() = default;

std::string GameService::create(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "body must be a JSON object");
  auto s = std::make_shared<Session>();
  if (body.contains("human_seat") && !body["human_seat"].is_null()) s->human = parse_seat(body["human_seat"]);

  std::array<std::string, kNumSeats> kinds;
  const json agents = body.value("agents", json("idrl"));
  if (agents.is_string()) {
    kinds.fill(agents.get<std::string>());
  } else if (agents.is_array() && agents.size() == kNumSeats &&
             std::all_of(agents.begin(), agents.end(), [](const json& a) { return a.is_string(); })) {
    for (int i = 0; i < kNumSeats; ++i) kinds[i] = agents[i].get<std::string>();
  } else {
    throw ServiceError(400, "agents must be a kind or an array of 4 kinds");
  }
  for (int seat = 0; seat < kNumSeats; ++seat) {
    if (s->human == seat) {
      s->controllers[seat] = "human";
      continue;
    }
    if (kinds[seat] == "human") throw ServiceError(400, "at most one human seat, named by human_seat");
    try {
      s->agents[seat] = make_agent(AgentKind::parse(kinds[seat]), models_);
    } catch (const std::invalid_argument& e) {
      throw ServiceError(400, e.what());
    }
    s->controllers[seat] = kinds[seat];
  }

  if (body.contains("seed")) {
    const json& seed = body["seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      throw ServiceError(400, "seed must be a non-negative integer");
    }
    s->seed = seed.get<std::uint64_t>();
  } else {
    s->seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
  }
  s->state = deal(s->seed);
  s->rng = Rng(s->seed);
  {
    std::lock_guard lock(mu_);
    s->id = "g" + std::to_string(next_id_++);
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mu);
  advance(*s, options_);
  return s->id;
}

std::shared_ptr<Session> GameService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown game");
  return it->second;
}

json GameService::view(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mu);
  const GameState& g = s->state;
  json v = {{"game_id", s->id},
            {"revision", s->revision},
            {"seat", s->human ? json(*s->human) : json()},
            {"turn", g.turn},
            {"controllers", s->controllers},
            {"terminal", g.terminal()},
            {"winner", g.winner ? json(team_name(*g.winner)) : json()}};
  v["hand"] = s->human ? codes(g.hands[*s->human]) : json::array();
  json counts = json::array();
  for (const CardSet& h : g.hands) counts.push_back(h.size());
  v["hand_counts"] = counts;
  json history = json::array();
  for (const Turn& t : g.history) history.push_back({{"seat", t.seat}, {"move", move_json(t.move)}});
  v["history"] = history;
  v["lead"] = g.lead ? json{{"seat", g.lead->seat}, {"move", move_json(Move::of(g.lead->combination))}} : json();
  json legal = json::array();
  if (!g.terminal() && s->human == g.turn) {
    for (const Move& m : g.legal()) legal.push_back(move_json(m));
  }
  v["legal"] = legal;
  return v;
}

json GameService::submit(const std::string& id, const json& body) {
  const auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state.terminal()) throw ServiceError(409, "game is over");
  if (!s->human || *s->human != s->state.turn) throw ServiceError(409, "not your turn");
  if (!body.is_object() || !body.contains("cards") || !body["cards"].is_string()) {
    throw ServiceError(400, "body must carry cards: \"<codes>\" or \"pass\"");
  }
  if (body.contains("revision") && body["revision"] != s->revision) throw ServiceError(409, "stale revision");
  const std::string text = body["cards"].get<std::string>();
  std::optional<Category> category;
  if (text != "pass" && body.contains("category")) {
    if (!body["category"].is_string() || !(category = parse_category(body["category"].get<std::string>()))) {
      throw ServiceError(400, "unknown category");
    }
  }
  std::vector<Move> matches;
  if (text == "pass") {
    matches.push_back(Move::pass());
  } else {
    const auto cards = CardSet::parse(text);
    if (!cards || cards->empty()) throw ServiceError(400, "unparseable cards");
    for (const Move& m : s->state.legal()) {
      if (!m.is_pass() && m.cards() == *cards && (!category || m.play->category == *category)) {
        matches.push_back(m);
      }
    }
    if (matches.size() > 1) throw ServiceError(400, "ambiguous cards; give category");
    if (matches.empty()) throw ServiceError(400, "not in legal set");
  }
  try {
    check_legal(s->state, matches.front());
  } catch (const IllegalMove&) {
    throw ServiceError(400, "not in legal set");
  }
  apply(*s, matches.front(), options_);
  advance(*s, options_);
  return {{"accepted", true}, {"revision", s->revision}};
}

json GameService::insight(const std::string& id) const {
  if (!options_.insight) throw ServiceError(404, "insight disabled");
  const auto s = find(id);
  if (!models_) throw ServiceError(503, "no identification checkpoints loaded");
  std::lock_guard lock(s->mu);
  json rows = json::array();
  for (const CurveRow& r : deck_curves(models_->identify, s->state, 0)) {
    const InsightRecord& x = r.record;
    rows.push_back({{"turn", x.t},
                    {"seat", x.seat},
                    {"c_up", x.c[0]},
                    {"c_front", x.c[1]},
                    {"c_down", x.c[2]},
                    {"d", x.d},
                    {"mask", x.mask.bits()},
                    {"move", x.move ? json(move_json(*x.move)) : json()},
                    {"event", r.event}});
  }
  return {{"game_id", s->id}, {"revision", s->revision}, {"rows", rows}};
}

std::vector<json> GameService::frames(const std::string& id, int since,
                                      std::chrono::milliseconds wait) const {
  const auto s = find(id);
  std::unique_lock lock(s->mu);
  s->changed.wait_for(lock, wait, [&] { return s->revision > since; });
  const std::size_t from = static_cast<std::size_t>(std::max(since, 0));
  if (from >= s->frames.size()) return {};
  return {s->frames.begin() + static_cast<std::ptrdiff_t>(from), s->frames.end()};
}

void mount(httplib::Server& server, GameService& service) {
  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const ServiceError& e) {
        res.status = e.status();
        res.set_content(json{{"error", e.what()}, {"reason", e.what()}}.dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", "malformed JSON"}, {"reason", e.what()}}.dump(), "application/json");
      }
    };
  };
  auto reply = [](httplib::Response& res, const json& body) {
    res.set_content(body.dump(), "application/json");
  };

  server.Post("/v1/games", guarded([&service, reply](const httplib::Request& req, httplib::Response& res) {
    const json body = req.body.empty() ? json::object() : json::parse(req.body);
    res.status = 201;
    reply(res, {{"game_id", service.create(body)}});
  }));
  server.Get("/v1/games/:id", guarded([&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.view(req.path_params.at("id")));
  }));
  server.Post("/v1/games/:id/moves", guarded([&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.submit(req.path_params.at("id"), json::parse(req.body)));
  }));
  server.Get("/v1/games/:id/insight", guarded([&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.insight(req.path_params.at("id")));
  }));
  server.Get("/v1/games/:id/events", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    int since = 0;
    if (req.has_param("since")) {
      try {
        since = std::stoi(req.get_param_value("since"));
      } catch (const std::exception&) {
        throw ServiceError(400, "since must be an integer");
      }
    }
    service.view(id);  // 404 before streaming
    auto cursor = std::make_shared<int>(since);
    res.set_chunked_content_provider(
        "text/event-stream", [&service, id, cursor](std::size_t, httplib::DataSink& sink) {
          for (const json& f : service.frames(id, *cursor, std::chrono::seconds(15))) {
            const std::string chunk = "data: " + f.dump() + "\n\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
            *cursor = f["revision"].get<int>();
            if (f["terminal"].get<bool>()) {
              sink.done();
              return true;
            }
          }
          const json v = service.view(id);
          if (v["terminal"].get<bool>() && *cursor >= v["revision"].get<int>()) {
            sink.done();
            return true;
          }
          if (!sink.is_writable()) return false;
          static constexpr char kKeepAlive[] = ": keep-alive\n\n";
          return sink.write(kKeepAlive, sizeof(kKeepAlive) - 1);
        });
  }));
}

}  // namespace red10
