#pragma once

#include "wss/io.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace wss {

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// One interactive run. State is the document plus the journal of steps and
// edits; undo replays the journal without its last entry.
class Session {
 public:
  Session(std::string id, PolygonDocument doc);

  const std::string& id() const { return id_; }
  std::mutex& mutex() { return mutex_; }
  const Engine& engine() const { return *engine_; }
  const std::vector<nlohmann::json>& journal() const { return journal_; }

  nlohmann::json state() const;
  nlohmann::json step(double dz);
  nlohmann::json edit(const nlohmann::json& body);
  nlohmann::json undo();
  // format: json, svg or obj. Returns {content type, body}.
  std::pair<std::string, std::string> export_as(const std::string& format) const;

  // Fresh engine with the journal applied.
  std::unique_ptr<Engine> replay(const std::vector<nlohmann::json>& journal) const;

 private:
  static nlohmann::json apply(Engine& e, const nlohmann::json& entry);
  void require_running() const;

  std::string id_;
  PolygonDocument doc_;
  std::unique_ptr<Engine> engine_;
  std::vector<nlohmann::json> journal_;
  std::string dump_path_;
  std::mutex mutex_;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Routes session requests. Requests on one session are serialized; distinct
// sessions run independently.
class Service {
 public:
  Response handle(const std::string& method, const std::string& path, const std::string& body,
                  const std::map<std::string, std::string>& query = {});

  std::shared_ptr<Session> find(const std::string& id);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  long next_id_ = 1;
};

// Blocks serving on 127.0.0.1:port. `on_ready` receives the bound port
// (useful with port 0).
void serve(Service& service, int port, const std::function<void(int)>& on_ready = {});
// Stops a running serve() call.
void stop_serving();

}  // namespace wss
