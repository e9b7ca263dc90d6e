#include "wss/session.hpp"

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>

namespace wss {

using nlohmann::json;

namespace {

json vec(const Vec2& p) { return json::array({p.x(), p.y()}); }

int int_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw HttpError(422, std::string("missing integer field ") + key);
  return j[key].get<int>();
}

double number_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number())
    throw HttpError(422, std::string("missing numeric field ") + key);
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw HttpError(422, std::string(key) + " is not finite");
  return v;
}

json events_json(const std::vector<KineticEvent>& events) {
  json out = json::array();
  for (const KineticEvent& e : events)
    out.push_back({{"kind", to_string(e.kind)}, {"contact", to_string(e.contact)}, {"location", vec(e.location)}});
  return out;
}

}  // namespace

Session::Session(std::string id, PolygonDocument doc) : id_(std::move(id)), doc_(std::move(doc)) {
  try {
    engine_ = make_engine(doc_);
  } catch (const std::exception& e) {
    throw HttpError(422, e.what());
  }
}

void Session::require_running() const {
  if (engine_->status() != RunStatus::running)
    throw HttpError(409, std::string("session is ") + to_string(engine_->status()));
}

json Session::apply(Engine& e, const json& entry) {
  if (entry.contains("step")) {
    const AdvanceResult r = e.advance(entry["step"].get<double>(), true);
    return {{"dz_requested", r.dz_requested},
            {"dz_advanced", r.dz_advanced},
            {"hit_event", r.hit_event},
            {"events", events_json(r.events)}};
  }
  if (!entry.is_object() || entry.size() != 1) throw HttpError(422, "edit must have exactly one operation");
  try {
    if (entry.contains("set_alpha")) {
      const json& a = entry["set_alpha"];
      const double alpha = number_field(a, "alpha");
      if (!(alpha > 0 && alpha < kPi)) throw HttpError(422, "angle out of range (0, pi)");
      e.set_alpha(int_field(a, "loop"), int_field(a, "edge"), alpha);
      return json::object();
    }
    if (entry.contains("insert_vertex")) {
      const json& a = entry["insert_vertex"];
      if (!a.contains("point") || !a["point"].is_array() || a["point"].size() != 2 ||
          !a["point"][0].is_number() || !a["point"][1].is_number())
        throw HttpError(422, "point must be [x, y]");
      const Vec2 p(a["point"][0].get<double>(), a["point"][1].get<double>());
      return {{"vertex", e.insert_vertex(int_field(a, "loop"), int_field(a, "edge"), p)}};
    }
    if (entry.contains("remove_vertex")) {
      e.remove_vertex(int_field(entry["remove_vertex"], "id"));
      return json::object();
    }
    if (entry.contains("set_schedule")) {
      const json& s = entry["set_schedule"];
      if (!s.is_array()) throw HttpError(422, "set_schedule expects a list of breakpoints");
      std::vector<HeightSchedule::Breakpoint> bps;
      for (const json& b : s) {
        bps.push_back({number_field(b, "z"), number_field(b, "vz")});
        if (!(bps.back().vz > 0) || bps.back().z < 0) throw HttpError(422, "invalid breakpoint");
        if (bps.size() > 1 && !(bps.back().z > bps[bps.size() - 2].z))
          throw HttpError(422, "breakpoint heights must increase");
      }
      e.set_schedule(bps);
      return json::object();
    }
  } catch (const GeometryError& ex) {
    throw HttpError(422, ex.what());
  } catch (const std::invalid_argument& ex) {
    throw HttpError(422, ex.what());
  }
  throw HttpError(422, "unknown edit");
}

std::unique_ptr<Engine> Session::replay(const std::vector<json>& journal) const {
  std::unique_ptr<Engine> e = make_engine(doc_);
  for (const json& entry : journal) {
    if (e->status() != RunStatus::running) break;
    try {
      apply(*e, entry);
    } catch (const RobustnessFault&) {
      break;
    }
  }
  return e;
}

json Session::state() const {
  const Engine& e = *engine_;
  json j;
  j["id"] = id_;
  j["status"] = to_string(e.status());
  j["z"] = e.z();
  j["t"] = e.t();
  j["journal_length"] = journal_.size();
  j["loops"] = json::array();
  const Wavefront& w = e.wavefront();
  for (int entry : w.loops()) {
    json loop = json::array();
    for (int id : w.loop_vertices(entry)) {
      const WavefrontVertex& v = w[id];
      loop.push_back({{"id", id},
                      {"position", vec(e.frame().to_world(v.pos))},
                      {"velocity", vec(v.vel.head<2>())},
                      {"alpha_prev", v.alpha_prev}});
    }
    j["loops"].push_back(loop);
  }
  if (e.status() == RunStatus::faulted) {
    j["fault"] = {{"message", e.fault_message()}, {"dump_path", dump_path_}};
  } else {
    j["skeleton"] = skeleton_to_json(e.view());
  }
  return j;
}

json Session::step(double dz) {
  require_running();
  if (!(dz > 0) || !std::isfinite(dz)) throw HttpError(422, "dz must be positive");
  const json entry = {{"step", dz}};
  journal_.push_back(entry);
  json out;
  try {
    out = apply(*engine_, entry);
  } catch (const RobustnessFault& f) {
    dump_path_ = (std::filesystem::temp_directory_path() / ("wss-" + id_ + "-fault.txt")).string();
    std::ofstream(dump_path_) << f.what() << "\n" << f.dump();
    out = {{"dz_requested", dz}, {"fault", {{"message", f.what()}, {"dump_path", dump_path_}}}};
  }
  out["status"] = to_string(engine_->status());
  out["z"] = engine_->z();
  return out;
}

json Session::edit(const json& body) {
  require_running();
  if (!body.is_object() || body.contains("step")) throw HttpError(422, "edit must have exactly one operation");
  json out;
  try {
    out = apply(*engine_, body);
  } catch (const HttpError&) {
    // A rejected edit may have touched the wavefront; rebuild.
    engine_ = replay(journal_);
    throw;
  }
  journal_.push_back(body);
  out["status"] = to_string(engine_->status());
  return out;
}

json Session::undo() {
  if (journal_.empty()) throw HttpError(409, "nothing to undo");
  journal_.pop_back();
  engine_ = replay(journal_);
  dump_path_.clear();
  return state();
}

std::pair<std::string, std::string> Session::export_as(const std::string& format) const {
  if (format != "json" && format != "svg" && format != "obj")
    throw HttpError(422, "format must be json, svg or obj");
  SkeletonView view;
  try {
    view = engine_->view();
  } catch (const std::exception& e) {
    throw HttpError(409, std::string("no consistent skeleton to export: ") + e.what());
  }
  if (format == "json") return {"application/json", skeleton_json_text(view)};
  if (format == "svg") return {"image/svg+xml", render_svg(view)};
  return {"text/plain", render_obj(view.graph)};
}

std::shared_ptr<Session> Service::find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError(404, "unknown session " + id);
  return it->second;
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body,
                         const std::map<std::string, std::string>& query) {
  static const std::regex session_re(R"(^/sessions/([A-Za-z0-9]+)(/(step|edit|undo|export))?/?$)");
  Response res;
  try {
    auto parse_body = [&]() {
      try {
        return json::parse(body);
      } catch (const json::parse_error& e) {
        throw HttpError(422, std::string("malformed JSON: ") + e.what());
      }
    };
    if (path == "/sessions" || path == "/sessions/") {
      if (method != "POST") throw HttpError(405, "method not allowed");
      PolygonDocument doc;
      try {
        doc = document_from_json(parse_body());
      } catch (const ParseError& e) {
        throw HttpError(422, e.what());
      }
      std::string id;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        id = "s" + std::to_string(next_id_++);
      }
      auto s = std::make_shared<Session>(id, std::move(doc));
      {
        std::lock_guard<std::mutex> lock(mutex_);
        sessions_[id] = s;
      }
      std::lock_guard<std::mutex> lock(s->mutex());
      res.status = 201;
      res.body = json{{"id", id}, {"state", s->state()}}.dump();
      return res;
    }
    std::smatch m;
    if (!std::regex_match(path, m, session_re)) throw HttpError(404, "no route " + path);
    const std::string action = m[3].str();
    std::shared_ptr<Session> s = find(m[1].str());
    std::lock_guard<std::mutex> lock(s->mutex());
    if (action.empty()) {
      if (method != "GET") throw HttpError(405, "method not allowed");
      res.body = s->state().dump();
    } else if (action == "export") {
      if (method != "GET") throw HttpError(405, "method not allowed");
      auto it = query.find("format");
      auto [type, text] = s->export_as(it == query.end() ? "json" : it->second);
      res.content_type = type;
      res.body = std::move(text);
    } else {
      if (method != "POST") throw HttpError(405, "method not allowed");
      if (action == "step") res.body = s->step(number_field(parse_body(), "dz")).dump();
      else if (action == "edit") res.body = s->edit(parse_body()).dump();
      else res.body = s->undo().dump();
    }
  } catch (const HttpError& e) {
    res.status = e.status();
    res.content_type = "application/json";
    res.body = json{{"error", e.what()}}.dump();
  } catch (const std::exception& e) {
    res.status = 500;
    res.content_type = "application/json";
    res.body = json{{"error", e.what()}}.dump();
  }
  return res;
}

namespace {
std::atomic<httplib::Server*> g_server{nullptr};
}

void serve(Service& service, int port, const std::function<void(int)>& on_ready) {
  httplib::Server server;
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    const Response r = service.handle(req.method, req.path, req.body, query);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  const int bound = port == 0 ? server.bind_to_any_port("127.0.0.1") : (server.bind_to_port("127.0.0.1", port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind 127.0.0.1:" + std::to_string(port));
  g_server = &server;
  if (on_ready) on_ready(bound);
  server.listen_after_bind();
  g_server = nullptr;
}

void stop_serving() {
  if (httplib::Server* s = g_server.load()) s->stop();
}

}  // namespace wss
