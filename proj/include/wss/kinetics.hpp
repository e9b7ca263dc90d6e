#pragma once

#include "wss/geom.hpp"
#include "wss/wavefront.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace wss {

enum class EventKind { collapse, split };
enum class ContactClass { none, vertex_in_edge, vertex_on_vertex };

const char* to_string(EventKind kind);
const char* to_string(ContactClass contact);

struct KineticEvent {
  EventKind kind = EventKind::collapse;
  double dt_event = 0.0;  // from increment start
  double xi = -1.0;
  int subject = -1;  // collapse: vertex whose prev edge collapses; split: penetrating vertex
  int target = -1;   // split: head vertex of the penetrated edge, or the vertex hit
  int target_edge = -1;  // face id of the penetrated edge
  Vec2 location = Vec2::Zero();
  ContactClass contact = ContactClass::none;
};

struct OffsetSnapshot {
  double t = 0.0;
  std::vector<std::vector<Vec2>> loops;
  std::vector<std::vector<int>> ids;
};

struct StepResult {
  double advanced_dt = 0.0;
  std::vector<KineticEvent> events_applied;
  OffsetSnapshot snapshot;
  std::vector<int> terminated_loops;
};

class RobustnessFault : public std::runtime_error {
 public:
  RobustnessFault(const std::string& what, std::string dump)
      : std::runtime_error(what), dump_(std::move(dump)) {}
  const std::string& dump() const { return dump_; }

 private:
  std::string dump_;
};

struct KineticsOptions {
  bool broad_phase = true;
  bool check_admissibility = true;
};

// Positions after dt of free motion, indexed like w.vertices().
std::vector<Vec2> predict(const Wavefront& w, double dt);

std::vector<KineticEvent> detect_edge_swaps(const Wavefront& w, const std::vector<Vec2>& predicted,
                                            double dt);

std::vector<KineticEvent> detect_penetrations(const Wavefront& w, const std::vector<Vec2>& predicted,
                                              double dt, bool broad_phase = true);

// Events within the simultaneity window of the earliest one; collapses
// first, then splits, each ordered by subject.
std::vector<KineticEvent> earliest_event_batch(std::vector<KineticEvent> events, double dt_n,
                                               const Tolerances& tol = {});

// Pulls predicted positions back to the event time and advances w.t.
void correct(Wavefront& w, const std::vector<Vec2>& predicted, double dt_n, double dt_event);

StepResult step(Wavefront& w, double dt, TopologyObserver* obs, double v_z = 1.0,
                const KineticsOptions& opts = {});

// Zero-length probe: swapped edges and crossing edge pairs.
std::vector<std::string> find_violations(const Wavefront& w);

OffsetSnapshot take_snapshot(const Wavefront& w);

}  // namespace wss
