#pragma once

#include "wss/geom.hpp"
#include "wss/wavefront.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <vector>

namespace wss {

struct SkeletonNode {
  Vec2 pos = Vec2::Zero();
  double z = 0.0;
  double t = 0.0;
  NodeKind kind = NodeKind::input;
};

// Arc traced by a wavefront vertex between two nodes (vertex = -1 for ridge
// and closure segments).
struct SkeletonArc {
  int a = -1;
  int b = -1;
  int vertex = -1;
};

// Directed boundary piece of the face of `edge` (face interior on the left).
struct FaceHalfEdge {
  int from = -1;
  int to = -1;
  int edge = -1;
};

struct SkeletonFace {
  int edge = -1;
  std::vector<int> nodes;
  double area = 0.0;
};

// Supporting line of a face's edge: time at point p is t0 + n_in.(p - p0) / w.
struct EdgeLine {
  Vec2 p0 = Vec2::Zero();
  Vec2 n_in = Vec2::Zero();
  double w = 0.0;
  double t0 = 0.0;
};

struct SkeletonGraph {
  std::vector<SkeletonNode> nodes;
  std::vector<SkeletonArc> arcs;
  std::vector<FaceHalfEdge> boundary;
  std::vector<SkeletonFace> faces;
  std::map<int, EdgeLine> edge_lines;
  int input_edge_count = 0;

  int interior_node_count() const;
};

// Piecewise constant v_z over height. Entry k applies from z_k upward; below
// the first entry v_z = 1.
class HeightSchedule {
 public:
  struct Breakpoint {
    double z;
    double vz;
  };

  HeightSchedule() { rebuild(); }
  explicit HeightSchedule(std::vector<Breakpoint> bps);

  const std::vector<Breakpoint>& breakpoints() const { return bps_; }
  double vz_at_time(double t) const;
  double z_of_t(double t) const;
  double t_of_z(double z) const;
  // Times where v_z changes, ascending.
  std::vector<double> knot_times() const;
  bool constant() const { return knots_.size() <= 1; }
  HeightSchedule scaled(double s) const;  // heights scaled by s

 private:
  struct Knot {
    double t, z, vz;
  };
  void rebuild();
  std::vector<Breakpoint> bps_;
  std::vector<Knot> knots_;
};

// Records traced arcs, event nodes and face boundaries as the wavefront
// evolves.
class SkeletonRecorder : public TopologyObserver {
 public:
  // Picks up arcs already present in `graph` so a copy can be finished.
  SkeletonRecorder(SkeletonGraph& graph, const HeightSchedule& schedule, double eps)
      : graph_(graph), schedule_(schedule), eps_(eps) {
    for (const SkeletonArc& a : graph.arcs) arc_pairs_.insert(std::minmax(a.a, a.b));
  }

  // Input nodes, trace starts and input edge boundaries.
  void begin(Wavefront& w);
  void register_edges(const Wavefront& w);
  // Closes every open arc and wavefront edge at the current state.
  void finish(Wavefront& w);

  void cut(Wavefront& w, int v, NodeKind kind) override;
  void close_edge(Wavefront& w, int tail, int head, int edge_id, NodeKind kind) override;
  void open_edge(Wavefront& w, int tail, int head, int edge_id, NodeKind kind) override;
  void start(Wavefront& w, int v, NodeKind kind) override;

  int node_at(const Vec2& pos, double t, NodeKind kind);

 private:
  int node_for(Wavefront& w, int v, NodeKind kind);
  void add_arc(int a, int b, int vertex);

  SkeletonGraph& graph_;
  const HeightSchedule& schedule_;
  double eps_;
  std::set<std::pair<int, int>> arc_pairs_;
};

// Chains the boundary pieces of every face into closed node loops.
std::vector<SkeletonFace> build_faces(const SkeletonGraph& graph);

struct RoofMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

RoofMesh build_roof_mesh(const SkeletonGraph& graph, const HeightSchedule& schedule);

// Ear clipping of a simple polygon given in order; returns index triples.
std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<Vec2>& poly);

bool is_terminated(const Wavefront& w);

}  // namespace wss
