#pragma once

#include "wss/engine.hpp"
#include "wss/oracle.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wss {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, std::string reason)
      : std::runtime_error(path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) {}
  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

// Per-edge slope as written in the document.
struct EdgeAttr {
  enum class Kind { alpha, weight, stationary };
  Kind kind = Kind::alpha;
  double value = kPi / 4;  // unused for stationary

  double alpha() const;
  bool operator==(const EdgeAttr&) const = default;
};

// Edge k of loop j runs from point k to point k+1; `edges` and
// `start_times` list all loops in order.
struct PolygonDocument {
  std::vector<std::vector<Vec2>> loops;
  std::vector<EdgeAttr> edges;
  std::vector<HeightSchedule::Breakpoint> schedule;
  std::vector<double> start_times;

  bool operator==(const PolygonDocument& o) const;
  std::size_t edge_count() const;
};

PolygonDocument parse_document(std::string_view text);
PolygonDocument document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const PolygonDocument& doc);
std::string serialize(const PolygonDocument& doc);

std::vector<LoopInput> to_loop_inputs(const PolygonDocument& doc);
HeightSchedule to_schedule(const PolygonDocument& doc);
std::unique_ptr<Engine> make_engine(const PolygonDocument& doc, EngineOptions opts = {});

nlohmann::json skeleton_to_json(const SkeletonView& view);
// Fixed formatting so equal states give equal bytes.
std::string skeleton_json_text(const SkeletonView& view);
std::string render_svg(const SkeletonView& view);
// One planar polygon per roof face; vertices are the skeleton nodes.
std::string render_obj(const SkeletonGraph& graph);

// Replays the document with the dense oracle (and the convex oracle when the
// input is one strictly convex ring) and compares against engine events.
struct OracleCheck {
  bool ran = false;
  bool ok = false;
  std::string summary;
};
OracleCheck oracle_check(const PolygonDocument& doc, const std::vector<oracle::ReplayEvent>& events,
                         const SkeletonView& view);

enum ExitCode { kExitOk = 0, kExitInput = 2, kExitFault = 3, kExitRunaway = 4 };

struct BatchOptions {
  double step = 0.1;
  std::optional<double> max_z;
  std::string skeleton_path;
  std::string svg_path;
  std::string obj_path;
  std::string dump_path = "wss-fault-dump.txt";
  bool oracle_check = false;
  Tolerances tol;
};

struct BatchOutcome {
  int exit_code = kExitOk;
  RunStatus status = RunStatus::running;
  std::string message;
  std::vector<double> steps;
  std::vector<oracle::ReplayEvent> events;  // world units
  OracleCheck oracle;
};

BatchOutcome run_batch(const PolygonDocument& doc, const BatchOptions& opts);

}  // namespace wss
