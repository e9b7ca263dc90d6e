#include "wss/skeleton.hpp"

#include "wss/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

namespace wss {

int SkeletonGraph::interior_node_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const SkeletonNode& n) {
    return n.kind != NodeKind::input;
  }));
}

// --- HeightSchedule ---------------------------------------------------------

HeightSchedule::HeightSchedule(std::vector<Breakpoint> bps) : bps_(std::move(bps)) {
  for (std::size_t i = 0; i < bps_.size(); ++i) {
    if (!(bps_[i].vz > 0) || !std::isfinite(bps_[i].vz))
      throw std::invalid_argument("schedule: v_z must be positive");
    if (!std::isfinite(bps_[i].z)) throw std::invalid_argument("schedule: non-finite height");
    if (i > 0 && !(bps_[i].z > bps_[i - 1].z))
      throw std::invalid_argument("schedule: heights must be strictly increasing");
  }
  rebuild();
}

void HeightSchedule::rebuild() {
  knots_.clear();
  double vz0 = 1.0;
  for (const Breakpoint& b : bps_)
    if (b.z <= 0) vz0 = b.vz;
  knots_.push_back({0.0, 0.0, vz0});
  for (const Breakpoint& b : bps_) {
    if (b.z <= 0) continue;
    const Knot& k = knots_.back();
    knots_.push_back({k.t + (b.z - k.z) / k.vz, b.z, b.vz});
  }
}

double HeightSchedule::vz_at_time(double t) const {
  const Knot* k = &knots_.front();
  for (const Knot& x : knots_)
    if (x.t <= t) k = &x;
  return k->vz;
}

double HeightSchedule::z_of_t(double t) const {
  const Knot* k = &knots_.front();
  for (const Knot& x : knots_)
    if (x.t <= t) k = &x;
  if (k == &knots_.front() && knots_.size() == 1 && k->vz == 1.0) return t;
  return k->z + k->vz * (t - k->t);
}

double HeightSchedule::t_of_z(double z) const {
  const Knot* k = &knots_.front();
  for (const Knot& x : knots_)
    if (x.z <= z) k = &x;
  if (k == &knots_.front() && knots_.size() == 1 && k->vz == 1.0) return z;
  return k->t + (z - k->z) / k->vz;
}

std::vector<double> HeightSchedule::knot_times() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < knots_.size(); ++i) out.push_back(knots_[i].t);
  return out;
}

HeightSchedule HeightSchedule::scaled(double s) const {
  std::vector<Breakpoint> b = bps_;
  for (Breakpoint& x : b) x.z *= s;
  return HeightSchedule(std::move(b));
}

// --- SkeletonRecorder -------------------------------------------------------

int SkeletonRecorder::node_at(const Vec2& pos, double t, NodeKind kind) {
  for (std::size_t i = graph_.nodes.size(); i-- > 0;) {
    const SkeletonNode& n = graph_.nodes[i];
    if (n.t < t - 1e-12) break;
    if (std::abs(n.t - t) <= 1e-12 && (n.pos - pos).norm() <= eps_) return static_cast<int>(i);
  }
  graph_.nodes.push_back({pos, schedule_.z_of_t(t), t, kind});
  return static_cast<int>(graph_.nodes.size()) - 1;
}

int SkeletonRecorder::node_for(Wavefront& w, int v, NodeKind kind) {
  const WavefrontVertex& x = w[v];
  if (x.below >= 0 && (graph_.nodes[static_cast<std::size_t>(x.below)].pos - x.pos).norm() <= eps_)
    return x.below;
  return node_at(x.pos, w.t, kind);
}

void SkeletonRecorder::add_arc(int a, int b, int vertex) {
  if (a == b) return;
  const auto key = std::minmax(a, b);
  if (vertex < 0 && arc_pairs_.count(key)) return;
  arc_pairs_.insert(key);
  graph_.arcs.push_back({a, b, vertex});
}

void SkeletonRecorder::register_edges(const Wavefront& w) {
  for (const WavefrontVertex& v : w.vertices()) {
    if (!v.active || graph_.edge_lines.count(v.edge_id)) continue;
    EdgeLine line;
    line.p0 = v.pos;
    line.n_in = -v.n_prev;
    line.w = w.edge_weight(v.id);
    if (w.t + w.tolerances().eps_time_cluster < v.start_prev) line.w = alpha_to_weight(v.alpha_prev);
    line.t0 = std::max(w.t, v.start_prev);
    graph_.edge_lines[v.edge_id] = line;
  }
}

void SkeletonRecorder::begin(Wavefront& w) {
  for (WavefrontVertex& v : w.vertices()) {
    if (!v.active) continue;
    v.below = node_at(v.pos, w.t, NodeKind::input);
  }
  for (const WavefrontVertex& v : w.vertices()) {
    if (!v.active) continue;
    graph_.boundary.push_back({w[v.prev].below, v.below, v.edge_id});
  }
  graph_.input_edge_count = w.edge_id_count();
  register_edges(w);
}

void SkeletonRecorder::cut(Wavefront& w, int v, NodeKind kind) {
  const int node = node_for(w, v, kind);
  WavefrontVertex& x = w[v];
  if (x.below >= 0 && node != x.below) {
    add_arc(x.below, node, x.id);
    graph_.boundary.push_back({x.below, node, x.edge_id});
    graph_.boundary.push_back({node, x.below, w[x.next].edge_id});
    x.above = node;
  }
  w[v].below = node;
}

void SkeletonRecorder::close_edge(Wavefront& w, int tail, int head, int edge_id, NodeKind kind) {
  const int a = node_for(w, head, kind);
  const int b = node_for(w, tail, kind);
  if (a == b) return;
  graph_.boundary.push_back({a, b, edge_id});
  add_arc(b, a, -1);
}

void SkeletonRecorder::open_edge(Wavefront& w, int tail, int head, int edge_id, NodeKind kind) {
  const int a = node_for(w, tail, kind);
  const int b = node_for(w, head, kind);
  if (a == b) return;
  graph_.boundary.push_back({a, b, edge_id});
  add_arc(a, b, -1);
}

void SkeletonRecorder::start(Wavefront& w, int v, NodeKind kind) {
  w[v].below = node_at(w[v].pos, w.t, kind);
}

void SkeletonRecorder::finish(Wavefront& w) {
  register_edges(w);
  for (int entry : w.loops()) {
    const std::vector<int> loop = w.loop_vertices(entry);
    for (int v : loop) cut(w, v, NodeKind::terminal);
    for (int v : loop) close_edge(w, w[v].prev, v, w[v].edge_id, NodeKind::terminal);
  }
}

// --- faces ------------------------------------------------------------------

std::vector<SkeletonFace> build_faces(const SkeletonGraph& graph) {
  std::map<int, std::vector<std::size_t>> by_face;
  for (std::size_t i = 0; i < graph.boundary.size(); ++i) {
    const FaceHalfEdge& h = graph.boundary[i];
    if (h.from == h.to) continue;
    by_face[h.edge].push_back(i);
  }
  std::vector<SkeletonFace> faces;
  for (auto& [edge, halves] : by_face) {
    std::map<int, std::vector<std::size_t>> out;
    for (std::size_t i : halves) out[graph.boundary[i].from].push_back(i);
    std::set<std::size_t> used;
    for (std::size_t first : halves) {
      if (used.count(first)) continue;
      SkeletonFace face;
      face.edge = edge;
      std::size_t cur = first;
      const int start = graph.boundary[first].from;
      used.insert(cur);
      face.nodes.push_back(start);
      std::size_t guard = 0;
      while (true) {
        const FaceHalfEdge& h = graph.boundary[cur];
        if (h.to == start) break;
        face.nodes.push_back(h.to);
        std::vector<std::size_t> cand;
        for (std::size_t j : out[h.to])
          if (!used.count(j)) cand.push_back(j);
        if (cand.empty())
          throw std::runtime_error("malformed trace: face of edge " + std::to_string(edge) +
                                   " does not close");
        std::size_t pick = cand.front();
        if (cand.size() > 1) {
          // leftmost turn: first outgoing clockwise from the reversed incoming
          const Vec2 here = graph.nodes[static_cast<std::size_t>(h.to)].pos;
          const Vec2 back = graph.nodes[static_cast<std::size_t>(h.from)].pos - here;
          const double base = std::atan2(back.y(), back.x());
          double best = std::numeric_limits<double>::max();
          for (std::size_t j : cand) {
            const Vec2 d = graph.nodes[static_cast<std::size_t>(graph.boundary[j].to)].pos - here;
            double cw = base - std::atan2(d.y(), d.x());
            while (cw <= 1e-12) cw += 2 * kPi;
            if (cw < best) {
              best = cw;
              pick = j;
            }
          }
        }
        used.insert(pick);
        cur = pick;
        if (++guard > graph.boundary.size())
          throw std::runtime_error("malformed trace: face walk does not terminate");
      }
      std::vector<Vec2> ring;
      for (int n : face.nodes) ring.push_back(graph.nodes[static_cast<std::size_t>(n)].pos);
      face.area = signed_area(ring);
      faces.push_back(std::move(face));
    }
  }
  return faces;
}

// --- roof mesh --------------------------------------------------------------

std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<Vec2>& poly) {
  std::vector<std::array<int, 3>> tris;
  std::vector<int> idx(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  if (idx.size() < 3) return tris;
  if (signed_area(poly) < 0) std::reverse(idx.begin(), idx.end());
  auto P = [&](int i) -> const Vec2& { return poly[static_cast<std::size_t>(i)]; };
  double scale = 0;
  for (const Vec2& p : poly) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tiny = 1e-14 * std::max(scale * scale, 1e-300);

  while (idx.size() > 3) {
    const std::size_t n = idx.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n && !clipped; ++i) {
      const int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
      const double turn = cross2<double>(P(b) - P(a), P(c) - P(b));
      if (std::abs(turn) <= tiny) {  // drop colinear vertex
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        clipped = true;
        break;
      }
      if (turn < 0) continue;
      bool empty = true;
      for (std::size_t j = 0; j < n && empty; ++j) {
        const int q = idx[j];
        if (q == a || q == b || q == c) continue;
        if (P(q) == P(a) || P(q) == P(b) || P(q) == P(c)) continue;
        const double d1 = cross2<double>(P(b) - P(a), P(q) - P(a));
        const double d2 = cross2<double>(P(c) - P(b), P(q) - P(b));
        const double d3 = cross2<double>(P(a) - P(c), P(q) - P(c));
        if (d1 >= -tiny && d2 >= -tiny && d3 >= -tiny) empty = false;
      }
      if (!empty) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) {
      // Degenerate input: clip the most convex corner.
      std::size_t best = 0;
      double best_turn = -std::numeric_limits<double>::max();
      for (std::size_t i = 0; i < n; ++i) {
        const int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
        const double turn = cross2<double>(P(b) - P(a), P(c) - P(b));
        if (turn > best_turn) {
          best_turn = turn;
          best = i;
        }
      }
      tris.push_back({idx[(best + n - 1) % n], idx[best], idx[(best + 1) % n]});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
    }
  }
  const double turn = cross2<double>(P(idx[1]) - P(idx[0]), P(idx[2]) - P(idx[1]));
  if (std::abs(turn) > tiny) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

namespace {

// Convex polygon clipped to {p : a.p + b >= 0}.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& a, double b) {
  std::vector<Vec2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double fp = a.dot(p) + b, fq = a.dot(q) + b;
    if (fp >= 0) out.push_back(p);
    if ((fp >= 0) != (fq >= 0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  return out;
}

class MeshBuilder {
 public:
  int vertex(const Vec3& p) {
    const auto key = std::make_tuple(p.x(), p.y(), p.z());
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    index_.emplace(key, id);
    return id;
  }
  void triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).cross(c - a);
    if (n.norm() <= 1e-18) return;
    mesh.triangles.push_back({vertex(a), vertex(b), vertex(c)});
  }
  RoofMesh mesh;

 private:
  std::map<std::tuple<double, double, double>, int> index_;
};

}  // namespace

RoofMesh build_roof_mesh(const SkeletonGraph& graph, const HeightSchedule& schedule) {
  MeshBuilder mb;
  const std::vector<double> knots = schedule.knot_times();
  for (const SkeletonFace& face : graph.faces) {
    std::vector<Vec2> ring;
    std::vector<Vec3> ring3;
    for (int n : face.nodes) {
      const SkeletonNode& node = graph.nodes[static_cast<std::size_t>(n)];
      ring.push_back(node.pos);
      ring3.push_back(Vec3(node.pos.x(), node.pos.y(), node.z));
    }
    auto line_it = graph.edge_lines.find(face.edge);
    const bool sloped = line_it != graph.edge_lines.end() && std::abs(line_it->second.w) > 1e-12 &&
                        std::abs(face.area) > 1e-18;
    if (sloped) {
      const EdgeLine& line = line_it->second;
      const Vec2 grad = line.n_in / line.w;  // t(p) = grad.p + off
      const double off = line.t0 - grad.dot(line.p0);
      auto lift = [&](const Vec2& p) {
        if (knots.empty()) {
          // exact node heights where available
          for (std::size_t i = 0; i < ring.size(); ++i)
            if (ring[i] == p) return ring3[i];
        }
        return Vec3(p.x(), p.y(), schedule.z_of_t(grad.dot(p) + off));
      };
      for (const auto& tri : triangulate_polygon(ring)) {
        std::vector<Vec2> pieces{ring[static_cast<std::size_t>(tri[0])], ring[static_cast<std::size_t>(tri[1])],
                                 ring[static_cast<std::size_t>(tri[2])]};
        std::vector<std::vector<Vec2>> bands;
        if (knots.empty()) {
          bands.push_back(pieces);
        } else {
          double lo = -std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k <= knots.size(); ++k) {
            const double hi = k < knots.size() ? knots[k] : std::numeric_limits<double>::infinity();
            std::vector<Vec2> band = pieces;
            if (std::isfinite(lo)) band = clip_halfplane(band, grad, off - lo);
            if (std::isfinite(hi) && band.size() >= 3) band = clip_halfplane(band, -grad, hi - off);
            if (band.size() >= 3) bands.push_back(band);
            lo = hi;
          }
        }
        for (const auto& band : bands)
          for (std::size_t i = 1; i + 1 < band.size(); ++i)
            mb.triangle(lift(band[0]), lift(band[i]), lift(band[i + 1]));
      }
    } else {
      // Vertical or degenerate footprint: triangulate in the polygon's own plane.
      Vec3 normal = Vec3::Zero();
      for (std::size_t i = 0; i < ring3.size(); ++i) {
        const Vec3& a = ring3[i];
        const Vec3& b = ring3[(i + 1) % ring3.size()];
        normal += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()),
                       (a.x() - b.x()) * (a.y() + b.y()));
      }
      if (normal.norm() <= 1e-18) continue;
      int drop = 0;
      normal.cwiseAbs().maxCoeff(&drop);
      std::vector<Vec2> proj;
      for (const Vec3& p : ring3) {
        if (drop == 0) proj.emplace_back(p.y(), p.z());
        else if (drop == 1) proj.emplace_back(p.z(), p.x());
        else proj.emplace_back(p.x(), p.y());
      }
      for (const auto& tri : triangulate_polygon(proj)) {
        Vec3 a = ring3[static_cast<std::size_t>(tri[0])], b = ring3[static_cast<std::size_t>(tri[1])],
             c = ring3[static_cast<std::size_t>(tri[2])];
        if ((b - a).cross(c - a).dot(normal) < 0) std::swap(b, c);
        mb.triangle(a, b, c);
      }
    }
  }
  return mb.mesh;
}

bool is_terminated(const Wavefront& w) { return w.terminated(); }

}  // namespace wss
