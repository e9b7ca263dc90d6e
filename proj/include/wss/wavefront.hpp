#pragma once

#include "wss/geom.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wss {

enum class NodeKind { input, collapse, split, colinear, terminal, edit };

const char* to_string(NodeKind kind);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kinetic vertex of the deforming polygon. Edge attributes (direction,
// normal, inclination, face id) belong to the edge *before* the vertex.
struct WavefrontVertex {
  int id = -1;
  Vec2 pos = Vec2::Zero();
  Vec3 vel = Vec3::Zero();  // planar velocity, z = current v_z
  Vec2 u_prev = Vec2::UnitX();
  Vec2 n_prev = -Vec2::UnitY();
  double alpha_prev = kPi / 4;
  double start_prev = 0.0;  // edge before this vertex is stationary until then
  int edge_id = -1;
  int prev = -1;
  int next = -1;
  int below = -1;  // skeleton node where the current trace arc starts
  int above = -1;  // skeleton node where the previous trace arc ended
  bool active = false;
  bool colinear = false;
  bool split_origin = false;
  bool collapse_origin = false;
  bool pinned = false;
  bool velocity_valid = false;
};

class Wavefront;

// Receives skeleton bookkeeping callbacks from surgery so traced arcs can be
// closed before links change.
class TopologyObserver {
 public:
  virtual ~TopologyObserver() = default;
  // Ends v's current trace arc at v.pos and restarts it there.
  virtual void cut(Wavefront& w, int v, NodeKind kind) = 0;
  // The wavefront edge tail -> head (face edge_id) stops existing here.
  virtual void close_edge(Wavefront& w, int tail, int head, int edge_id,
                          NodeKind kind) = 0;
  // The wavefront edge tail -> head starts bounding face edge_id here.
  virtual void open_edge(Wavefront& w, int tail, int head, int edge_id, NodeKind kind) = 0;
  // Newly created vertex starts tracing at its position.
  virtual void start(Wavefront& w, int v, NodeKind kind) = 0;
};

struct LoopInput {
  std::vector<Vec2> points;
  std::vector<double> alphas;       // one per edge k -> k+1
  std::vector<double> start_times;  // optional, one per edge
};

class Wavefront {
 public:
  static constexpr double kAlphaMargin = 1e-6;

  // Builds loops from rings; orientation is normalized (outer CCW, holes CW).
  // Edge k of ring j gets face id `first_edge_id(j) + k` in document order.
  static Wavefront build(const std::vector<LoopInput>& rings,
                         const Tolerances& tol = {});

  std::vector<WavefrontVertex>& vertices() { return verts_; }
  const std::vector<WavefrontVertex>& vertices() const { return verts_; }
  WavefrontVertex& operator[](int i) { return verts_.at(static_cast<std::size_t>(i)); }
  const WavefrontVertex& operator[](int i) const {
    return verts_.at(static_cast<std::size_t>(i));
  }

  const Tolerances& tolerances() const { return tol_; }
  // Distance under which two vertices are treated as one event location.
  double coincide_tol() const { return 100.0 * tol_.eps_geom; }

  // Loop entries (smallest vertex index of each loop), ascending.
  std::vector<int> loops() const;
  std::vector<int> loop_vertices(int entry) const;
  int loop_size(int v) const;
  int loop_entry(int v) const;
  bool is_terminal(int v) const { return loop_size(v) <= 2; }
  bool terminated() const;
  int active_count() const;

  double effective_alpha(int v) const;
  double edge_weight(int v) const;  // planar inward speed of the edge before v

  // Velocity of v from its two roof planes (reference v_z = 1 for the planar
  // part). Returns false at the colinear singularity.
  bool compute_velocity(int v, double v_z);
  void update_velocities(double v_z);
  bool is_colinear_vertex(int v) const;

  // Surgery ---------------------------------------------------------------
  int collapse_edge(int v, TopologyObserver* obs = nullptr);
  std::pair<int, int> split_vertex_in_edge(int p, int e,
                                           TopologyObserver* obs = nullptr);
  std::vector<int> merge_vertex_on_vertex(int p, int q,
                                          TopologyObserver* obs = nullptr);
  // Resolves every vertex in `set` (all located at one point) by pairing the
  // incident edges around the point.
  std::vector<int> resolve_coincident(std::vector<int> set,
                                      TopologyObserver* obs = nullptr);
  // Inserts a vertex at `at` on the edge ending at `head` (same face id).
  int insert_split_vertex(int head, const Vec2& at, TopologyObserver* obs = nullptr);
  std::vector<int> remove_colinear_vertices(TopologyObserver* obs = nullptr,
                                            double v_z = 1.0);

  // Editing helpers (session API).
  int insert_vertex(int head, const Vec2& point, TopologyObserver* obs);
  void remove_vertex(int v, TopologyObserver* obs);
  void set_alpha(int head, double alpha, TopologyObserver* obs);

  int new_edge_id() { return next_edge_id_++; }
  int edge_id_count() const { return next_edge_id_; }

  void check_links() const;

  double t = 0.0;  // global time

 private:
  int add_vertex(const WavefrontVertex& proto);
  void refresh_edge_geometry(int v);

  std::vector<WavefrontVertex> verts_;
  Tolerances tol_;
  int next_edge_id_ = 0;
};

// Deterministic textual dump used for fault diagnostics.
std::string dump(const Wavefront& w);

}  // namespace wss
