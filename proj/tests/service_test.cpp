#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "leak_check.hpp"
#include "red10/evaluation.hpp"
#include "red10/service.hpp"

// After Eigen: resolv.h defines a `_res` macro that collides with it.
#include <httplib.h>

namespace red10 {
namespace {

using nlohmann::json;

std::shared_ptr<const Models> tiny_models() {
  auto m = std::make_shared<Models>();
  m->bank = PolicyBank::init(default_q_spec(4, 8), 9);
  m->identify = IdentifyNets::init(default_relation_spec(4, 8), default_danger_spec(4, 8), 9);
  return m;
}

class Server {
 public:
  explicit Server(ServiceOptions options = {}) : service_(tiny_models(), std::move(options)) {
    mount(server_, service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Server() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }
  GameService& service() { return service_; }

 private:
  GameService service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json post(httplib::Client& c, const std::string& path, const json& body, int expect) {
  auto r = c.Post(path, body.dump(), "application/json");
  EXPECT_TRUE(r);
  if (!r) return {};
  EXPECT_EQ(r->status, expect) << path << " " << r->body;
  return json::parse(r->body);
}

json get(httplib::Client& c, const std::string& path, int expect = 200) {
  auto r = c.Get(path);
  EXPECT_TRUE(r);
  if (!r) return {};
  EXPECT_EQ(r->status, expect) << path << " " << r->body;
  return json::parse(r->body);
}

std::vector<json> read_events(httplib::Client& c, const std::string& id, int since) {
  std::string body;
  auto r = c.Get("/v1/games/" + id + "/events?since=" + std::to_string(since),
                 [&](const char* data, std::size_t n) {
                   body.append(data, n);
                   return true;
                 });
  EXPECT_TRUE(r);
  std::vector<json> frames;
  std::size_t pos = 0;
  while ((pos = body.find("data: ", pos)) != std::string::npos) {
    const auto end = body.find("\n\n", pos);
    frames.push_back(json::parse(body.substr(pos + 6, end - pos - 6)));
    pos = end;
  }
  return frames;
}

TEST(Service, ScriptedClientCompletesADeck) {
  Server server;
  auto c = server.client();
  const std::string id = post(c, "/v1/games", {{"agents", "idrl"}, {"human_seat", 2}, {"seed", 42}}, 201)["game_id"];
  json v = get(c, "/v1/games/" + id);
  int moves = 0;
  while (!v["terminal"].get<bool>()) {
    ASSERT_EQ(v["turn"], 2);
    ASSERT_FALSE(v["legal"].empty());
    const json& m = v["legal"][0];
    post(c, "/v1/games/" + id + "/moves",
         {{"cards", m["cards"]}, {"category", m["category"]}, {"revision", v["revision"]}}, 200);
    v = get(c, "/v1/games/" + id);
    ASSERT_LT(++moves, 200);
  }
  EXPECT_GT(moves, 0);
  const auto frames = read_events(c, id, 0);
  ASSERT_EQ(static_cast<int>(frames.size()), v["revision"].get<int>());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i]["revision"], static_cast<int>(i) + 1);
    EXPECT_EQ(frames[i]["terminal"], i + 1 == frames.size());
    EXPECT_EQ(frames[i]["seat"], v["history"][i]["seat"]);
  }
  EXPECT_EQ(frames.back()["winner"], v["winner"]);
  // Resuming from the middle yields only the tail.
  EXPECT_EQ(read_events(c, id, v["revision"].get<int>() - 1).size(), 1U);
}

TEST(Service, HumanLastCardWinsForHumansTeam) {
  Server server;
  auto c = server.client();
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60 && checked < 3; ++seed) {
    const std::string id =
        post(c, "/v1/games", {{"agents", "random"}, {"human_seat", 0}, {"seed", seed}}, 201)["game_id"];
    json v = get(c, "/v1/games/" + id);
    for (int guard = 0; !v["terminal"].get<bool>(); ++guard) {
      ASSERT_LT(guard, 200);
      // Play the largest legal group to empty the hand quickly.
      json best = v["legal"][0];
      for (const json& m : v["legal"]) {
        if (m["cards"] != "pass" && (best["cards"] == "pass" || m["cards"].get<std::string>().size() >
                                                              best["cards"].get<std::string>().size())) {
          best = m;
        }
      }
      post(c, "/v1/games/" + id + "/moves", {{"cards", best["cards"]}, {"category", best["category"]}}, 200);
      v = get(c, "/v1/games/" + id);
    }
    const auto frames = read_events(c, id, 0);
    if (frames.back()["seat"] != 0) continue;
    const Team human_team = deal(seed).layout.team_of(0);
    EXPECT_EQ(frames.back()["winner"], std::string(team_name(human_team)));
    EXPECT_TRUE(v["hand"].empty());
    ++checked;
  }
  EXPECT_EQ(checked, 3);
}

TEST(Service, Errors) {
  Server server;
  auto c = server.client();
  get(c, "/v1/games/nope", 404);
  post(c, "/v1/games/nope/moves", {{"cards", "pass"}}, 404);
  post(c, "/v1/games", {{"agents", "bogus"}}, 400);
  post(c, "/v1/games", {{"agents", {"idrl", "human", "idrl", "idrl"}}, {"human_seat", 0}}, 400);
  post(c, "/v1/games", {{"human_seat", 7}}, 400);

  const std::string id = post(c, "/v1/games", {{"human_seat", 1}, {"seed", 5}}, 201)["game_id"];
  const json before = get(c, "/v1/games/" + id);
  // A card the human does not hold.
  CardSet others = CardSet::full_deck();
  for (const json& code : before["hand"]) others -= *CardSet::parse(code.get<std::string>());
  CardSet played;
  for (const json& t : before["history"]) {
    if (t["move"]["cards"] != "pass") played |= *CardSet::parse(t["move"]["cards"].get<std::string>());
  }
  const Card foreign = (others - played).cards().front();
  const json bad = post(c, "/v1/games/" + id + "/moves", {{"cards", to_code(foreign)}}, 400);
  EXPECT_EQ(bad["reason"], "not in legal set");
  post(c, "/v1/games/" + id + "/moves", {{"cards", "XX"}}, 400);
  post(c, "/v1/games/" + id + "/moves", {{"nonsense", 1}}, 400);
  post(c, "/v1/games/" + id + "/moves", {{"cards", before["legal"][0]["cards"]}, {"revision", 9999}}, 409);
  EXPECT_EQ(get(c, "/v1/games/" + id), before);

  const std::string bots = post(c, "/v1/games", {{"agents", "rule"}, {"seed", 5}}, 201)["game_id"];
  EXPECT_TRUE(get(c, "/v1/games/" + bots)["terminal"].get<bool>());
  post(c, "/v1/games/" + bots + "/moves", {{"cards", "pass"}}, 409);
  get(c, "/v1/games/" + bots + "/insight", 404);

  auto raw = c.Post("/v1/games", "{not json", "application/json");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 400);
}

TEST(Service, NotYourTurn) {
  GameService service(tiny_models(), {});
  const std::string id = service.create({{"agents", "random"}, {"human_seat", 3}, {"seed", 1}});
  ASSERT_FALSE(service.view(id)["terminal"].get<bool>());
  const json v = service.view(id);
  EXPECT_EQ(v["turn"], 3);
  service.submit(id, {{"cards", v["legal"][0]["cards"]}, {"category", v["legal"][0]["category"]}});
  const json after = service.view(id);
  if (!after["terminal"].get<bool>()) EXPECT_EQ(after["turn"], 3);
  const std::string bots = service.create({{"agents", "random"}, {"seed", 1}});
  try {
    service.submit(bots, {{"cards", "pass"}});
    FAIL() << "expected 409";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 409);
  }
}

TEST(Service, ViewsNeverLeakHiddenHands) {
  GameService service(tiny_models(), {});
  Rng rng(77);
  const std::set<std::string> allowed = {"game_id", "revision", "seat",  "turn",        "controllers",
                                         "terminal", "winner",  "hand", "hand_counts", "history",
                                         "lead",     "legal"};
  int views = 0;
  std::uint64_t seed = 1000;
  while (views < 1000) {
    const int human = static_cast<int>(uniform_index(rng, kNumSeats));
    const std::string id = service.create({{"agents", uniform01(rng) < 0.5 ? "random" : "rule"},
                                           {"human_seat", human},
                                           {"seed", seed}});
    GameState truth = deal(seed++);
    while (true) {
      const json v = service.view(id);
      ++views;
      for (const auto& [k, x] : v.items()) EXPECT_TRUE(allowed.count(k)) << k;
      const auto replayed = testing::replay_view(truth, v);
      ASSERT_TRUE(replayed);
      truth = *replayed;
      const CardSet leaked = testing::leaked_cards(truth, human, v);
      EXPECT_TRUE(leaked.empty()) << "leaked " << leaked.to_string();
      CardSet mentioned;
      testing::collect_cards(v, mentioned);
      EXPECT_EQ(mentioned & truth.hands[human], truth.hands[human]);
      if (v["terminal"].get<bool>() || views >= 1000) break;
      const json& legal = v["legal"];
      const json& m = legal[uniform_index(rng, legal.size())];
      service.submit(id, {{"cards", m["cards"]}, {"category", m["category"]}});
    }
  }
  EXPECT_GE(views, 1000);
}

TEST(Service, InsightMatchesCurveExport) {
  const auto models = tiny_models();
  GameService service(models, {.insight = true});
  const std::uint64_t seed = 31;
  const std::string id = service.create({{"agents", "idrl"}, {"human_seat", nullptr}, {"seed", mix_seed(seed, 0)}});
  const json rows = service.insight(id)["rows"];
  const auto curves = export_curves(models, 1, seed);
  ASSERT_EQ(rows.size(), curves.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const InsightRecord& x = curves[i].record;
    EXPECT_EQ(rows[i]["turn"], x.t);
    EXPECT_EQ(rows[i]["seat"], x.seat);
    EXPECT_EQ(rows[i]["c_up"].get<float>(), x.c[0]);
    EXPECT_EQ(rows[i]["c_front"].get<float>(), x.c[1]);
    EXPECT_EQ(rows[i]["c_down"].get<float>(), x.c[2]);
    EXPECT_EQ(rows[i]["d"].get<float>(), x.d);
    EXPECT_EQ(rows[i]["mask"], x.mask.bits());
    EXPECT_EQ(rows[i]["event"], curves[i].event);
    EXPECT_EQ(rows[i]["move"].is_null(), !x.move.has_value());
  }
}

TEST(Service, ConcurrentGames) {
  GameService service(tiny_models(), {});
  std::vector<std::thread> pool;
  std::atomic<int> finished{0};
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (int g = 0; g < 5; ++g) {
        const std::string id = service.create({{"agents", "idrl"}, {"human_seat", t}, {"seed", t * 100 + g}});
        json v = service.view(id);
        while (!v["terminal"].get<bool>()) {
          service.submit(id, {{"cards", v["legal"][0]["cards"]}, {"category", v["legal"][0]["category"]}});
          v = service.view(id);
        }
        ++finished;
      }
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(finished, 20);
}

}  // namespace
}  // namespace red10
