#include "wss/wavefront.hpp"

#include "wss/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace wss {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::input: return "input";
    case NodeKind::collapse: return "collapse";
    case NodeKind::split: return "split";
    case NodeKind::colinear: return "colinear";
    case NodeKind::terminal: return "terminal";
    case NodeKind::edit: return "edit";
  }
  return "unknown";
}

namespace {

bool point_in_ring(const Vec2& p, const std::vector<Vec2>& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double angle_of(const Vec2& d) { return std::atan2(d.y(), d.x()); }

double ccw_angle(double from, double to) {
  double a = to - from;
  while (a <= 0) a += 2 * kPi;
  while (a > 2 * kPi) a -= 2 * kPi;
  return a;
}

}  // namespace

Wavefront Wavefront::build(const std::vector<LoopInput>& rings, const Tolerances& tol) {
  tol.validate();
  const double eps = tol.eps_geom;
  if (rings.empty()) throw GeometryError("no loops given");

  struct Ring {
    std::vector<Vec2> pts;
    std::vector<double> alphas;
    std::vector<double> starts;
    std::vector<int> ids;
  };
  std::vector<Ring> work;
  int base = 0;
  for (std::size_t r = 0; r < rings.size(); ++r) {
    const LoopInput& in = rings[r];
    const std::size_t n = in.points.size();
    const std::string where = "loop " + std::to_string(r);
    if (n < 3) throw GeometryError(where + ": ring requires >=3 points");
    if (in.alphas.size() != n)
      throw GeometryError(where + ": angle count does not match edge count");
    if (!in.start_times.empty() && in.start_times.size() != n)
      throw GeometryError(where + ": start time count does not match edge count");
    Ring ring;
    for (std::size_t k = 0; k < n; ++k) {
      if (!in.points[k].allFinite()) throw GeometryError(where + ": non-finite point");
      if ((in.points[(k + 1) % n] - in.points[k]).norm() <= eps)
        throw GeometryError(where + ": repeated consecutive point at " + std::to_string(k));
      const double a = in.alphas[k];
      if (!(a > 0 && a < kPi))
        throw GeometryError(where + ": angle out of range (0, pi) at edge " + std::to_string(k));
      ring.pts.push_back(in.points[k]);
      ring.alphas.push_back(std::clamp(a, kAlphaMargin, kPi - kAlphaMargin));
      ring.starts.push_back(in.start_times.empty() ? 0.0 : in.start_times[k]);
      ring.ids.push_back(base + static_cast<int>(k));
    }
    base += static_cast<int>(n);
    work.push_back(std::move(ring));
  }

  // Simplicity: non-adjacent edges may not touch, within or across rings.
  for (std::size_t r1 = 0; r1 < work.size(); ++r1) {
    for (std::size_t r2 = r1; r2 < work.size(); ++r2) {
      const auto& p1 = work[r1].pts;
      const auto& p2 = work[r2].pts;
      const std::size_t n1 = p1.size(), n2 = p2.size();
      for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = (r1 == r2 ? i + 1 : 0); j < n2; ++j) {
          if (r1 == r2 && (j == i + 1 || (i == 0 && j == n1 - 1))) {
            // adjacent edges: reject only a fold-back onto each other
            const std::size_t shared = (j == i + 1) ? j : i;
            const std::size_t before = (shared + n1 - 1) % n1, after = (shared + 1) % n1;
            const Vec2 d0 = (p1[before] - p1[shared]).normalized();
            const Vec2 d1 = (p1[after] - p1[shared]).normalized();
            if (std::abs(cross2<double>(d0, d1)) <= eps && d0.dot(d1) > 0)
              throw GeometryError("loop " + std::to_string(r1) + ": self-intersecting ring");
            continue;
          }
          if (segments_intersect(p1[i], p1[(i + 1) % n1], p2[j], p2[(j + 1) % n2], eps)) {
            throw GeometryError(r1 == r2 ? "loop " + std::to_string(r1) + ": self-intersecting ring"
                                         : "loops " + std::to_string(r1) + " and " +
                                               std::to_string(r2) + " intersect");
          }
        }
      }
    }
  }

  Wavefront w;
  w.tol_ = tol;
  w.next_edge_id_ = base;
  for (std::size_t r = 0; r < work.size(); ++r) {
    Ring& ring = work[r];
    int depth = 0;
    for (std::size_t o = 0; o < work.size(); ++o)
      if (o != r && point_in_ring(ring.pts[0], work[o].pts)) ++depth;
    const bool hole = depth % 2 == 1;
    const double area = signed_area(ring.pts);
    if ((area > 0) == hole) {
      const std::size_t n = ring.pts.size();
      Ring rev;
      for (std::size_t i = 0; i < n; ++i) {
        rev.pts.push_back(ring.pts[n - 1 - i]);
        const std::size_t k = (2 * n - 2 - i) % n;
        rev.alphas.push_back(ring.alphas[k]);
        rev.starts.push_back(ring.starts[k]);
        rev.ids.push_back(ring.ids[k]);
      }
      ring = std::move(rev);
    }
    const int n = static_cast<int>(ring.pts.size());
    const int first = static_cast<int>(w.verts_.size());
    for (int i = 0; i < n; ++i) {
      const int k = (i + n - 1) % n;  // edge k -> i is the edge before vertex i
      WavefrontVertex v;
      v.pos = ring.pts[static_cast<std::size_t>(i)];
      v.u_prev = (ring.pts[static_cast<std::size_t>(i)] - ring.pts[static_cast<std::size_t>(k)]).normalized();
      v.n_prev = outward_normal<double>(v.u_prev);
      v.alpha_prev = ring.alphas[static_cast<std::size_t>(k)];
      v.start_prev = ring.starts[static_cast<std::size_t>(k)];
      v.edge_id = ring.ids[static_cast<std::size_t>(k)];
      v.prev = first + k;
      v.next = first + (i + 1) % n;
      w.add_vertex(v);
    }
  }
  return w;
}

int Wavefront::add_vertex(const WavefrontVertex& proto) {
  WavefrontVertex v = proto;
  v.id = static_cast<int>(verts_.size());
  v.active = true;
  verts_.push_back(v);
  return v.id;
}

std::vector<int> Wavefront::loops() const {
  std::vector<int> entries;
  std::vector<char> seen(verts_.size(), 0);
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    if (!verts_[i].active || seen[i]) continue;
    entries.push_back(static_cast<int>(i));
    int v = static_cast<int>(i);
    do {
      seen[static_cast<std::size_t>(v)] = 1;
      v = verts_[static_cast<std::size_t>(v)].next;
    } while (v != static_cast<int>(i));
  }
  return entries;
}

std::vector<int> Wavefront::loop_vertices(int entry) const {
  std::vector<int> out;
  int v = entry;
  do {
    out.push_back(v);
    v = (*this)[v].next;
    if (out.size() > verts_.size()) throw GeometryError("broken loop links");
  } while (v != entry);
  return out;
}

int Wavefront::loop_size(int v) const {
  int n = 0;
  int c = v;
  do {
    ++n;
    c = (*this)[c].next;
    if (n > static_cast<int>(verts_.size())) throw GeometryError("broken loop links");
  } while (c != v);
  return n;
}

int Wavefront::loop_entry(int v) const {
  int best = v;
  int c = (*this)[v].next;
  while (c != v) {
    best = std::min(best, c);
    c = (*this)[c].next;
  }
  return best;
}

bool Wavefront::terminated() const {
  for (int e : loops())
    if (!is_terminal(e)) return false;
  return true;
}

int Wavefront::active_count() const {
  return static_cast<int>(std::count_if(verts_.begin(), verts_.end(),
                                        [](const WavefrontVertex& v) { return v.active; }));
}

double Wavefront::effective_alpha(int v) const {
  const WavefrontVertex& x = (*this)[v];
  if (t + tol_.eps_time_cluster < x.start_prev) return kPi / 2;
  return x.alpha_prev;
}

double Wavefront::edge_weight(int v) const { return alpha_to_weight(effective_alpha(v)); }

bool Wavefront::is_colinear_vertex(int v) const {
  const WavefrontVertex& p = (*this)[v];
  const WavefrontVertex& a = (*this)[p.next];
  const Vec3 s_prev = make_roof_plane(effective_alpha(v), p.u_prev, p.n_prev).s;
  const Vec3 s_next = make_roof_plane(effective_alpha(p.next), a.u_prev, a.n_prev).s;
  if (!is_colinear(s_prev, s_next, tol_.eps_geom)) return false;
  if (p.pinned && p.u_prev.dot(a.u_prev) > 0 &&
      std::abs(edge_weight(v) - edge_weight(p.next)) <= tol_.eps_geom)
    return false;
  return true;
}

bool Wavefront::compute_velocity(int v, double v_z) {
  WavefrontVertex& p = (*this)[v];
  const WavefrontVertex& a = (*this)[p.next];
  const Vec3 s_prev = make_roof_plane(effective_alpha(v), p.u_prev, p.n_prev).s;
  const Vec3 s_next = make_roof_plane(effective_alpha(p.next), a.u_prev, a.n_prev).s;
  auto sol = solve_vertex_velocity(s_prev, s_next, 1.0, tol_.eps_geom);
  if (!sol && p.pinned && p.u_prev.dot(a.u_prev) > 0 &&
      std::abs(edge_weight(v) - edge_weight(p.next)) <= tol_.eps_geom) {
    sol = Vec2(-edge_weight(v) * p.n_prev);
  }
  if (!sol) {
    p.velocity_valid = false;
    p.colinear = true;
    p.vel = Vec3(0, 0, v_z);
    return false;
  }
  p.velocity_valid = true;
  p.colinear = false;
  p.vel = Vec3(sol->x(), sol->y(), v_z);
  return true;
}

void Wavefront::update_velocities(double v_z) {
  for (int e : loops()) {
    if (is_terminal(e)) {
      for (int v : loop_vertices(e)) {
        verts_[static_cast<std::size_t>(v)].vel = Vec3(0, 0, v_z);
        verts_[static_cast<std::size_t>(v)].velocity_valid = true;
      }
      continue;
    }
    for (int v : loop_vertices(e)) compute_velocity(v, v_z);
  }
}

void Wavefront::refresh_edge_geometry(int v) {
  WavefrontVertex& x = (*this)[v];
  const Vec2 d = x.pos - (*this)[x.prev].pos;
  if (d.norm() > tol_.eps_geom) {
    x.u_prev = d.normalized();
    x.n_prev = outward_normal<double>(x.u_prev);
  }
}

int Wavefront::collapse_edge(int v, TopologyObserver* obs) {
  WavefrontVertex& x = (*this)[v];
  if (!x.active) throw GeometryError("collapse on inactive vertex");
  if (x.prev == v) throw GeometryError("collapse would empty the loop");
  const int b = x.prev;
  const int a = x.next;
  const Vec2 meet = 0.5 * ((*this)[b].pos + x.pos);
  (*this)[b].pos = meet;
  x.pos = meet;
  if (obs) {
    obs->cut(*this, v, NodeKind::collapse);
    obs->cut(*this, b, NodeKind::collapse);
  }
  WavefrontVertex& keep = (*this)[b];
  keep.next = a;
  (*this)[a].prev = b;
  x.active = false;
  x.prev = x.next = -1;
  keep.collapse_origin = true;
  return b;
}

std::pair<int, int> Wavefront::split_vertex_in_edge(int p, int e, TopologyObserver* obs) {
  const WavefrontVertex& head = (*this)[e];
  const int tail = head.prev;
  if (p == e || p == tail) throw GeometryError("split: vertex is an endpoint of the edge");
  if (!(*this)[p].active || !head.active) throw GeometryError("split: inactive vertex");
  const Vec2 a = (*this)[tail].pos, b = head.pos, q = (*this)[p].pos;
  const Vec2 ab = b - a;
  const double len = ab.norm();
  const double s = (q - a).dot(ab) / (len * len);
  const Vec2 foot = a + s * ab;
  if (s < -tol_.eps_geom / len || s > 1 + tol_.eps_geom / len ||
      (foot - q).norm() > 1e3 * tol_.eps_geom)
    throw GeometryError("split: vertex is not on the edge");
  if ((q - a).norm() <= tol_.eps_geom) {
    merge_vertex_on_vertex(p, tail, obs);
    return {p, tail};
  }
  if ((q - b).norm() <= tol_.eps_geom) {
    merge_vertex_on_vertex(p, e, obs);
    return {p, e};
  }
  const int xi = insert_split_vertex(e, q, obs);
  resolve_coincident({p, xi}, obs);
  return {p, xi};
}

int Wavefront::insert_split_vertex(int head, const Vec2& at, TopologyObserver* obs) {
  WavefrontVertex x = (*this)[head];
  const int tail = x.prev;
  x.pos = at;
  x.prev = tail;
  x.next = head;
  x.pinned = false;
  x.split_origin = true;
  x.below = x.above = -1;
  const int xi = add_vertex(x);
  (*this)[tail].next = xi;
  (*this)[head].prev = xi;
  if (obs) obs->start(*this, xi, NodeKind::split);
  return xi;
}

std::vector<int> Wavefront::merge_vertex_on_vertex(int p, int q, TopologyObserver* obs) {
  if (p == q) throw GeometryError("merge: identical vertices");
  if ((*this)[p].next == q || (*this)[q].next == p)
    throw GeometryError("merge: vertices are neighbors");
  return resolve_coincident({p, q}, obs);
}

std::vector<int> Wavefront::resolve_coincident(std::vector<int> set, TopologyObserver* obs) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  if (set.size() < 2) return set;

  Vec2 at = Vec2::Zero();
  for (int v : set) at += (*this)[v].pos;
  at /= static_cast<double>(set.size());
  for (int v : set) {
    (*this)[v].pos = at;
    if (obs) obs->cut(*this, v, NodeKind::split);
  }

  struct Ray {
    double angle;
    bool incoming;
    int vertex;
  };
  std::vector<Ray> rays;
  double interior_sum = 0.0;
  std::map<int, int> old_next;
  for (int v : set) {
    const WavefrontVertex& x = (*this)[v];
    const double in = angle_of(-x.u_prev);
    const double out = angle_of((*this)[x.next].u_prev);
    rays.push_back({in, true, v});
    rays.push_back({out, false, v});
    interior_sum += ccw_angle(out, in);
    old_next[v] = x.next;
  }
  std::sort(rays.begin(), rays.end(), [](const Ray& l, const Ray& r) {
    if (l.angle != r.angle) return l.angle < r.angle;
    if (l.incoming != r.incoming) return l.incoming < r.incoming;
    return l.vertex < r.vertex;
  });
  const std::size_t m = rays.size();
  bool alternating = true;
  for (std::size_t i = 0; i < m; ++i)
    if (rays[i].incoming == rays[(i + 1) % m].incoming) alternating = false;

  if (alternating) {
    // Shrinking contact: interiors overlap, pair so they become disjoint.
    // Expanding contact: same on the exterior side. A sum of exactly 2pi is
    // a zero-width sliver closing, which pairs like a shrinking contact.
    const bool interior_mode = interior_sum > 2 * kPi - 1e-9;
    for (std::size_t i = 0; i < m; ++i) {
      if (!rays[i].incoming) continue;
      const Ray& out = interior_mode ? rays[(i + m - 1) % m] : rays[(i + 1) % m];
      const int v = rays[i].vertex;
      const int nx = old_next[out.vertex];
      (*this)[v].next = nx;
      (*this)[nx].prev = v;
    }
  } else {
    const int p = set[0], q = set[1];
    const int pn = old_next[p], qn = old_next[q];
    (*this)[p].next = qn;
    (*this)[qn].prev = p;
    (*this)[q].next = pn;
    (*this)[pn].prev = q;
  }
  for (int v : set) (*this)[v].split_origin = true;
  return set;
}

std::vector<int> Wavefront::remove_colinear_vertices(TopologyObserver* obs, double v_z) {
  std::vector<int> removed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int entry : loops()) {
      if (is_terminal(entry)) continue;
      for (int v : loop_vertices(entry)) {
        if (!is_colinear_vertex(v)) continue;
        WavefrontVertex& x = (*this)[v];
        const int b = x.prev, a = x.next;
        if (obs) {
          obs->cut(*this, v, NodeKind::colinear);
          obs->cut(*this, b, NodeKind::colinear);
          obs->close_edge(*this, b, v, x.edge_id, NodeKind::colinear);
          obs->open_edge(*this, b, v, (*this)[a].edge_id, NodeKind::colinear);
        }
        (*this)[b].next = a;
        (*this)[a].prev = b;
        x.active = false;
        x.prev = x.next = -1;
        // A spike: the surviving edge may point the other way now.
        const Vec2 d = (*this)[a].pos - (*this)[b].pos;
        if (d.norm() > tol_.eps_geom && d.dot((*this)[a].u_prev) < 0) refresh_edge_geometry(a);
        removed.push_back(v);
        if (!is_terminal(b)) {
          compute_velocity(b, v_z);
          compute_velocity(a, v_z);
        }
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
  return removed;
}

int Wavefront::insert_vertex(int head, const Vec2& point, TopologyObserver* obs) {
  WavefrontVertex& h = (*this)[head];
  if (!h.active) throw GeometryError("insert: inactive vertex");
  const int tail = h.prev;
  if ((point - h.pos).norm() <= tol_.eps_geom || (point - (*this)[tail].pos).norm() <= tol_.eps_geom)
    throw GeometryError("insert: point coincides with an edge endpoint");
  if (obs) {
    obs->cut(*this, tail, NodeKind::edit);
    obs->cut(*this, head, NodeKind::edit);
    obs->close_edge(*this, tail, head, h.edge_id, NodeKind::edit);
  }
  WavefrontVertex x = (*this)[head];
  x.pos = point;
  x.prev = tail;
  x.next = head;
  x.edge_id = new_edge_id();
  x.pinned = true;
  x.below = x.above = -1;
  const int xi = add_vertex(x);
  (*this)[tail].next = xi;
  (*this)[head].prev = xi;
  (*this)[head].edge_id = new_edge_id();
  refresh_edge_geometry(xi);
  refresh_edge_geometry(head);
  if (obs) {
    obs->start(*this, xi, NodeKind::edit);
    obs->open_edge(*this, tail, xi, (*this)[xi].edge_id, NodeKind::edit);
    obs->open_edge(*this, xi, head, (*this)[head].edge_id, NodeKind::edit);
  }
  return xi;
}

void Wavefront::remove_vertex(int v, TopologyObserver* obs) {
  WavefrontVertex& x = (*this)[v];
  if (!x.active) throw GeometryError("remove: inactive vertex");
  if (loop_size(v) <= 3) throw GeometryError("remove: loop would degenerate");
  const int b = x.prev, a = x.next;
  if (obs) {
    obs->cut(*this, b, NodeKind::edit);
    obs->cut(*this, v, NodeKind::edit);
    obs->cut(*this, a, NodeKind::edit);
    obs->close_edge(*this, b, v, x.edge_id, NodeKind::edit);
    obs->close_edge(*this, v, a, (*this)[a].edge_id, NodeKind::edit);
  }
  (*this)[b].next = a;
  (*this)[a].prev = b;
  x.active = false;
  x.prev = x.next = -1;
  (*this)[a].edge_id = new_edge_id();
  (*this)[a].pinned = false;
  refresh_edge_geometry(a);
  if (obs) obs->open_edge(*this, b, a, (*this)[a].edge_id, NodeKind::edit);
}

void Wavefront::set_alpha(int head, double alpha, TopologyObserver* obs) {
  if (!(alpha > 0 && alpha < kPi)) throw GeometryError("angle out of range (0, pi)");
  WavefrontVertex& h = (*this)[head];
  if (!h.active) throw GeometryError("set_alpha: inactive vertex");
  const int tail = h.prev;
  if (obs) {
    obs->cut(*this, tail, NodeKind::edit);
    obs->cut(*this, head, NodeKind::edit);
    obs->close_edge(*this, tail, head, h.edge_id, NodeKind::edit);
  }
  WavefrontVertex& hh = (*this)[head];
  hh.edge_id = new_edge_id();
  hh.alpha_prev = std::clamp(alpha, kAlphaMargin, kPi - kAlphaMargin);
  hh.start_prev = 0.0;
  if (obs) obs->open_edge(*this, tail, head, hh.edge_id, NodeKind::edit);
}

void Wavefront::check_links() const {
  for (const WavefrontVertex& v : verts_) {
    if (!v.active) continue;
    if (v.next < 0 || v.prev < 0) throw GeometryError("dangling link");
    if (!(*this)[v.next].active || !(*this)[v.prev].active)
      throw GeometryError("link to inactive vertex");
    if ((*this)[v.next].prev != v.id || (*this)[v.prev].next != v.id)
      throw GeometryError("prev/next mismatch at vertex " + std::to_string(v.id));
  }
  for (int e : loops()) (void)loop_size(e);
}

std::string dump(const Wavefront& w) {
  std::ostringstream os;
  os.precision(17);
  os << "t " << w.t << "\n";
  for (int e : w.loops()) {
    os << "loop " << e << " size " << w.loop_size(e) << "\n";
    for (int v : w.loop_vertices(e)) {
      const WavefrontVertex& x = w[v];
      os << "  v " << x.id << " pos " << x.pos.x() << " " << x.pos.y() << " vel " << x.vel.x()
         << " " << x.vel.y() << " edge " << x.edge_id << " alpha " << x.alpha_prev << "\n";
    }
  }
  return os.str();
}

}  // namespace wss
