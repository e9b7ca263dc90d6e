#pragma once

// Brute-force references for testing the engine. Only Vec2 arithmetic is
// shared with the engine.

#include "wss/geom.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wss::oracle {

// Ring with one planar speed per edge k -> k+1 (inward positive).
struct Ring {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

struct ReplayEvent {
  double t = 0.0;
  bool split = false;
  Vec2 location = Vec2::Zero();
};

struct ReplaySnapshot {
  double t = 0.0;
  std::vector<std::vector<Vec2>> loops;
};

struct ReplayResult {
  std::vector<ReplayEvent> events;
  std::vector<ReplaySnapshot> snapshots;
  int final_loop_count = 0;
  double max_speed = 0.0;
  bool inconclusive = false;
  std::string notes;
};

// Raw integration with fixed dt_small and threshold event detection. Runs
// until every loop is reduced to at most two vertices or t_max.
ReplayResult dense_replay(const std::vector<Ring>& rings, double dt_small, double t_max,
                          int snapshot_every = 0);

struct ConvexSkeleton {
  std::vector<Vec2> nodes;  // input vertices first
  std::vector<double> times;
  std::vector<std::pair<int, int>> arcs;
};

// Skeleton of a strictly convex ring from offset-line intersections.
ConvexSkeleton convex_bisector_skeleton(const Ring& ring);

struct EventCluster {
  double t = 0.0;
  bool has_split = false;
  std::vector<Vec2> locations;
};

// Groups time-sorted events closer than `window` in time.
std::vector<EventCluster> cluster_events(std::vector<ReplayEvent> events, double window);

struct OracleReport {
  double max_position_error = 0.0;
  double max_time_error = 0.0;
  bool event_sequence_match = false;
  bool face_count_match = false;
  std::string notes;
};

// Engine events (as ReplayEvent) against a replay: clusters must pair up in
// order with equal split flags and times within time_tol.
OracleReport compare_event_sequences(const std::vector<ReplayEvent>& engine,
                                     const ReplayResult& replay, double window, double time_tol);

// Node positions (with offset time) and arc adjacency against the convex
// reference. `nodes` carry (x, y, t).
OracleReport compare_convex(const std::vector<Vec3>& nodes,
                            const std::vector<std::pair<int, int>>& arcs,
                            const ConvexSkeleton& ref, double tol);

}  // namespace wss::oracle
