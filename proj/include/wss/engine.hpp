#pragma once

#include "wss/kinetics.hpp"
#include "wss/skeleton.hpp"
#include "wss/wavefront.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wss {

// Maps the normalized working frame (bounding box extent 1) to world units.
struct Frame {
  Vec2 origin = Vec2::Zero();
  double scale = 1.0;

  Vec2 to_world(const Vec2& p) const { return origin + scale * p; }
  Vec2 to_local(const Vec2& p) const { return (p - origin) / scale; }
  static Frame fit(const std::vector<LoopInput>& loops);
};

struct EngineOptions {
  Tolerances tol;
  KineticsOptions kinetics;
  std::optional<double> max_z;  // world units
  // Guard for inputs that never shrink to nothing (world units).
  double runaway_z = 1e3;
};

enum class RunStatus { running, terminated, faulted, runaway };
const char* to_string(RunStatus s);

struct AdvanceResult {
  double dz_requested = 0.0;
  double dz_advanced = 0.0;
  std::vector<KineticEvent> events;  // locations in world units
  bool hit_event = false;
};

// Skeleton, faces and snapshots in world units.
struct SkeletonView {
  SkeletonGraph graph;
  RoofMesh mesh;
  std::vector<OffsetSnapshot> snapshots;
};

// Drives the wavefront through offset steps and records the skeleton.
// Not copyable: the recorder refers to members.
class Engine {
 public:
  Engine(const std::vector<LoopInput>& loops, const HeightSchedule& schedule,
         EngineOptions opts = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Offsets by dz (world height). With stop_at_event the call returns right
  // after the first event batch.
  AdvanceResult advance(double dz, bool stop_at_event = true);
  // Repeats advance(dz_step) until termination or max height.
  std::vector<double> run(double dz_step);

  // Edits address edges by loop index (ascending loop entry) and the edge
  // from the loop's k-th vertex to the next one.
  void set_alpha(int loop, int edge, double alpha);
  int insert_vertex(int loop, int edge, const Vec2& world_point);
  void remove_vertex(int id);
  void set_schedule(const std::vector<HeightSchedule::Breakpoint>& world_breakpoints);

  RunStatus status() const { return status_; }
  bool reached_max_z() const { return reached_max_z_; }
  double z() const;  // world
  double t() const { return w_.t * frame_.scale; }
  const Frame& frame() const { return frame_; }
  const Wavefront& wavefront() const { return w_; }
  const std::string& fault_dump() const { return fault_dump_; }
  const std::string& fault_message() const { return fault_message_; }

  // Finished copy of the current state (open arcs closed at the current
  // height).
  SkeletonView view() const;
  OffsetSnapshot world_snapshot(const OffsetSnapshot& s) const;
  OffsetSnapshot current_snapshot() const { return world_snapshot(take_snapshot(w_)); }
  // Vertex index and edge head for edit addressing.
  int edge_head(int loop, int edge) const;

 private:
  void settle();
  void refresh_status();
  double next_boundary(double t_from, double t_to) const;
  void start_edges_at(double t);
  KineticEvent to_world(KineticEvent e) const;
  void fault(const RobustnessFault& f);

  EngineOptions opts_;
  Frame frame_;
  HeightSchedule schedule_;  // normalized heights
  Wavefront w_;
  SkeletonGraph graph_;
  SkeletonRecorder recorder_;
  std::vector<OffsetSnapshot> snapshots_;
  std::vector<double> start_times_;
  RunStatus status_ = RunStatus::running;
  bool reached_max_z_ = false;
  int stalled_ = 0;  // consecutive zero-time batches
  std::string fault_dump_;
  std::string fault_message_;
};

}  // namespace wss
