#ifndef RED10_SERVICE_HPP_
#define RED10_SERVICE_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "red10/agents.hpp"

namespace httplib {
class Server;
}

namespace red10 {

class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& reason) : std::runtime_error(reason), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct ServiceOptions {
  bool insight = false;
  std::filesystem::path replay_dir;  // finished games are written here when set
};

struct Session;

// Game sessions behind the /v1 API. Each session is guarded by its own mutex;
// agents move synchronously until the human's turn or the end of the deck.
class GameService {
 public:
  GameService(std::shared_ptr<const Models> models, ServiceOptions options);
  ~GameService();

  // {agents: kind | [4 kinds], human_seat: int | null, seed?: u64} -> id
  std::string create(const nlohmann::json& body);
  nlohmann::json view(const std::string& id) const;
  // {cards: "<codes>" | "pass", category?, revision?}
  nlohmann::json submit(const std::string& id, const nlohmann::json& body);
  nlohmann::json insight(const std::string& id) const;
  // Frames with revision > since, waiting up to `wait` when there are none.
  std::vector<nlohmann::json> frames(const std::string& id, int since,
                                     std::chrono::milliseconds wait) const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;

  std::shared_ptr<const Models> models_;
  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  long long next_id_ = 1;
};

// Registers the /v1 routes on `server`.
void mount(httplib::Server& server, GameService& service);

}  // namespace red10

#endif  // RED10_SERVICE_HPP_
