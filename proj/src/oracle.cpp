#include "wss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace wss::oracle {

namespace {

using Loop = Ring;

double area2(const std::vector<Vec2>& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - u.y() * v.x();
  }
  return a;
}

bool inside(const Vec2& q, const std::vector<Vec2>& p) {
  bool in = false;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    if ((p[i].y() > q.y()) != (p[j].y() > q.y()) &&
        q.x() < (p[j].x() - p[i].x()) * (q.y() - p[i].y()) / (p[j].y() - p[i].y()) + p[i].x())
      in = !in;
  }
  return in;
}

Vec2 left_of(const Vec2& d) { return Vec2(-d.y(), d.x()); }

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Outer rings counter-clockwise, holes clockwise.
std::vector<Loop> oriented(const std::vector<Ring>& rings) {
  std::vector<Loop> out;
  for (std::size_t r = 0; r < rings.size(); ++r) {
    int depth = 0;
    for (std::size_t o = 0; o < rings.size(); ++o)
      if (o != r && inside(rings[r].points[0], rings[o].points)) ++depth;
    const bool hole = depth % 2 == 1;
    Loop l = rings[r];
    if ((area2(l.points) > 0) == hole) {
      const std::size_t n = l.points.size();
      Loop rev;
      for (std::size_t i = 0; i < n; ++i) {
        rev.points.push_back(l.points[n - 1 - i]);
        rev.weights.push_back(l.weights[wrap(static_cast<long>(n) - 2 - static_cast<long>(i), n)]);
      }
      l = rev;
    }
    out.push_back(l);
  }
  return out;
}

struct Replay {
  std::vector<Loop> live;
  std::vector<std::vector<Vec2>> vel;
  ReplayResult res;
  double t = 0.0;
  double delta = 0.0;  // detection distance, above the closing distance of one step

  Vec2 inward(const Loop& l, std::size_t i) const {
    const Vec2 d = l.points[wrap(static_cast<long>(i) + 1, l.points.size())] - l.points[i];
    return left_of(d.normalized());
  }

  // Removes colinear and spike vertices, then computes velocities.
  void velocities() {
    for (std::size_t k = 0; k < live.size(); ++k) {
      Loop& l = live[k];
      bool again = true;
      while (again && l.points.size() > 2) {
        again = false;
        for (std::size_t i = 0; i < l.points.size(); ++i) {
          const std::size_t n = l.points.size();
          const std::size_t ib = wrap(static_cast<long>(i) - 1, n);
          const Vec2 na = inward(l, ib), nb = inward(l, i);
          const double det = na.x() * nb.y() - na.y() * nb.x();
          if (std::abs(det) >= 1e-9) continue;
          // A closing sliver is the boundary touching itself.
          if (na.dot(nb) < 0) res.events.push_back({t, true, l.points[i]});
          // Merged edge keeps the speed of the edge after the vertex.
          l.weights[ib] = l.weights[i];
          l.points.erase(l.points.begin() + static_cast<long>(i));
          l.weights.erase(l.weights.begin() + static_cast<long>(i));
          again = true;
          break;
        }
      }
    }
    retire();
    vel.assign(live.size(), {});
    for (std::size_t k = 0; k < live.size(); ++k) {
      const Loop& l = live[k];
      const std::size_t n = l.points.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ib = wrap(static_cast<long>(i) - 1, n);
        const Vec2 na = inward(l, ib), nb = inward(l, i);
        const double det = na.x() * nb.y() - na.y() * nb.x();
        const double wa = l.weights[ib], wb = l.weights[i];
        const Vec2 v((wa * nb.y() - wb * na.y()) / det, (na.x() * wb - nb.x() * wa) / det);
        vel[k].push_back(v);
        res.max_speed = std::max(res.max_speed, v.norm());
      }
    }
  }

  void retire() {
    std::vector<Loop> keep;
    for (Loop& l : live) {
      if (l.points.size() <= 2)
        ++res.final_loop_count;
      else
        keep.push_back(std::move(l));
    }
    live = std::move(keep);
  }

  bool collapse_once() {
    for (std::size_t k = 0; k < live.size(); ++k) {
      Loop& l = live[k];
      const std::size_t n = l.points.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = wrap(static_cast<long>(i) + 1, n);
        const Vec2 d = l.points[j] - l.points[i];
        if (d.norm() >= delta) continue;
        if (d.norm() > 0.1 * delta && (vel[k][j] - vel[k][i]).dot(d) > 0) continue;
        const Vec2 mid = 0.5 * (l.points[i] + l.points[j]);
        res.events.push_back({t, false, mid});
        l.points[i] = mid;
        l.points.erase(l.points.begin() + static_cast<long>(j));
        l.weights.erase(l.weights.begin() + static_cast<long>(i));
        vel[k].erase(vel[k].begin() + static_cast<long>(j));
        if (j == 0) std::rotate(l.weights.begin(), l.weights.begin() + 1, l.weights.end());
        return true;
      }
    }
    return false;
  }

  // Cyclic slice [from, from + count) of points and their outgoing weights.
  static void append(Loop& dst, const Loop& src, std::size_t from, std::size_t count) {
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t i = wrap(static_cast<long>(from + c), src.points.size());
      dst.points.push_back(src.points[i]);
      dst.weights.push_back(src.weights[i]);
    }
  }

  // P (loop ka, index a) touches the interior of edge e -> e+1 of loop kb at x.
  void split_in_edge(std::size_t ka, std::size_t a, std::size_t kb, std::size_t e, const Vec2& x) {
    const Loop A = live[ka];
    const Loop B = live[kb];
    const std::size_t na = A.points.size(), nb = B.points.size();
    std::vector<Loop> made;
    if (ka == kb) {
      Loop l1;
      l1.points.push_back(x);
      l1.weights.push_back(A.weights[a]);
      append(l1, A, a + 1, wrap(static_cast<long>(e) - static_cast<long>(a), na));
      Loop l2;
      l2.points.push_back(x);
      l2.weights.push_back(A.weights[e]);
      append(l2, A, e + 1, wrap(static_cast<long>(a) - static_cast<long>(e) - 1, na));
      made = {l1, l2};
    } else {
      Loop m;
      m.points.push_back(x);
      m.weights.push_back(A.weights[a]);
      append(m, A, a + 1, na - 1);
      m.points.push_back(x);
      m.weights.push_back(B.weights[e]);
      append(m, B, e + 1, nb);
      made = {m};
    }
    replace(ka, kb, made);
  }

  // P and Q (distinct, non-adjacent) meet at x: exchange their successors.
  void merge_vertices(std::size_t ka, std::size_t a, std::size_t kb, std::size_t b, const Vec2& x) {
    const Loop A = live[ka];
    const Loop B = live[kb];
    const std::size_t na = A.points.size(), nb = B.points.size();
    std::vector<Loop> made;
    if (ka == kb) {
      Loop l1;
      l1.points.push_back(x);
      l1.weights.push_back(A.weights[b]);
      append(l1, A, b + 1, wrap(static_cast<long>(a) - static_cast<long>(b) - 1, na));
      Loop l2;
      l2.points.push_back(x);
      l2.weights.push_back(A.weights[a]);
      append(l2, A, a + 1, wrap(static_cast<long>(b) - static_cast<long>(a) - 1, na));
      made = {l1, l2};
    } else {
      Loop m;
      m.points.push_back(x);
      m.weights.push_back(B.weights[b]);
      append(m, B, b + 1, nb - 1);
      m.points.push_back(x);
      m.weights.push_back(A.weights[a]);
      append(m, A, a + 1, na - 1);
      made = {m};
    }
    replace(ka, kb, made);
  }

  void replace(std::size_t ka, std::size_t kb, const std::vector<Loop>& made) {
    std::vector<Loop> next;
    for (std::size_t k = 0; k < live.size(); ++k)
      if (k != ka && k != kb) next.push_back(live[k]);
    for (const Loop& l : made) next.push_back(l);
    live = std::move(next);
  }

  // Several vertices of one loop meeting at a point: the loop falls apart
  // into the pieces between consecutive members.
  void pinch_group(std::size_t k, std::size_t a, std::size_t b) {
    const Loop A = live[k];
    const std::size_t n = A.points.size();
    const Vec2 mid = 0.5 * (A.points[a] + A.points[b]);
    std::vector<std::size_t> group;
    Vec2 x = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      // Covers the far corners of a closing square of side delta.
      if ((A.points[i] - mid).norm() >= 1.5 * delta) continue;
      if (!group.empty() && group.back() + 1 == i) continue;
      if (i == n - 1 && !group.empty() && group.front() == 0) continue;
      group.push_back(i);
      x += A.points[i];
    }
    x /= static_cast<double>(group.size());
    res.events.push_back({t, true, x});
    std::vector<Loop> made;
    for (std::size_t g = 0; g < group.size(); ++g) {
      const std::size_t from = group[g], to = group[(g + 1) % group.size()];
      Loop piece;
      piece.points.push_back(x);
      piece.weights.push_back(A.weights[from]);
      append(piece, A, from + 1, wrap(static_cast<long>(to) - static_cast<long>(from) - 1, n));
      if (piece.points.size() >= 3) made.push_back(piece);
      else ++res.final_loop_count;
    }
    replace(k, k, made);
  }

  // Non-adjacent vertices closing in on each other.
  bool pinch_once() {
    for (std::size_t ka = 0; ka < live.size(); ++ka) {
      for (std::size_t a = 0; a < live[ka].points.size(); ++a) {
        for (std::size_t kb = ka; kb < live.size(); ++kb) {
          const std::size_t na = live[ka].points.size(), nb = live[kb].points.size();
          for (std::size_t b = kb == ka ? a + 1 : 0; b < nb; ++b) {
            if (ka == kb && (wrap(static_cast<long>(a) + 1, na) == b || wrap(static_cast<long>(b) + 1, na) == a))
              continue;
            const Vec2 rel = live[ka].points[a] - live[kb].points[b];
            if (rel.norm() >= delta || rel.norm() <= 1e-15) continue;
            if (rel.dot(vel[ka][a] - vel[kb][b]) >= 0) continue;
            if (ka == kb) {
              pinch_group(ka, a, b);
              return true;
            }
            const Vec2 x = 0.5 * (live[ka].points[a] + live[kb].points[b]);
            res.events.push_back({t, true, x});
            merge_vertices(ka, a, kb, b, x);
            return true;
          }
        }
      }
    }
    return false;
  }

  // A triangle thinner than the detection distance is vanishing.
  bool thin_triangle_once() {
    for (std::size_t k = 0; k < live.size(); ++k) {
      const Loop& l = live[k];
      if (l.points.size() != 3) continue;
      double perimeter = 0;
      for (std::size_t i = 0; i < 3; ++i) perimeter += (l.points[(i + 1) % 3] - l.points[i]).norm();
      if (std::abs(area2(l.points)) > delta * perimeter) continue;
      const Vec2 c = (l.points[0] + l.points[1] + l.points[2]) / 3.0;
      res.events.push_back({t, false, c});
      live.erase(live.begin() + static_cast<long>(k));
      ++res.final_loop_count;
      return true;
    }
    return false;
  }

  bool split_once() {
    for (std::size_t ka = 0; ka < live.size(); ++ka) {
      const Loop& A = live[ka];
      const std::size_t na = A.points.size();
      for (std::size_t a = 0; a < na; ++a) {
        const Vec2 p = A.points[a];
        const Vec2 vp = vel[ka][a];
        for (std::size_t kb = 0; kb < live.size(); ++kb) {
          const Loop& B = live[kb];
          const std::size_t nb = B.points.size();
          for (std::size_t e = 0; e < nb; ++e) {
            const std::size_t f = wrap(static_cast<long>(e) + 1, nb);
            // Edges starting at P's successor or ending at its predecessor
            // meet P only through the collapse of the edge in between.
            if (ka == kb && (e == a || f == a || e == wrap(static_cast<long>(a) + 1, na) ||
                             f == wrap(static_cast<long>(a) - 1, na)))
              continue;
            const Vec2 q0 = B.points[e], q1 = B.points[f];
            const Vec2 d = q1 - q0;
            const double len = d.norm();
            if (len < delta) continue;
            const double s = (p - q0).dot(d) / (len * len);
            if (s < -delta / len || s > 1 + delta / len) continue;
            const Vec2 foot = q0 + std::clamp(s, 0.0, 1.0) * d;
            if ((p - foot).norm() >= delta) continue;
            const Vec2 n_in = left_of(d / len);
            if (s * len <= delta || (1 - s) * len <= delta) {
              const std::size_t b = s * len <= delta ? e : f;
              if (ka == kb && (wrap(static_cast<long>(b) + 1, na) == a || wrap(static_cast<long>(a) + 1, na) == b))
                continue;
              const Vec2 rel = p - B.points[b];
              if (rel.norm() <= 1e-15 || rel.dot(vp - vel[kb][b]) >= 0) continue;
              const Vec2 x = 0.5 * (p + B.points[b]);
              res.events.push_back({t, true, x});
              merge_vertices(ka, a, kb, b, x);
              return true;
            }
            const double approach = vp.dot(n_in) - B.weights[e];
            if (approach >= -1e-12) continue;
            res.events.push_back({t, true, foot});
            split_in_edge(ka, a, kb, e, foot);
            return true;
          }
        }
      }
    }
    return false;
  }
};

}  // namespace

ReplayResult dense_replay(const std::vector<Ring>& rings, double dt_small, double t_max,
                          int snapshot_every) {
  if (!(dt_small > 0)) throw std::invalid_argument("dt_small must be positive");
  Replay r;
  r.live = oriented(rings);
  r.velocities();
  const long steps = static_cast<long>(std::ceil(t_max / dt_small));
  for (long s = 0; s < steps && !r.live.empty(); ++s) {
    r.delta = 2.5 * std::max(r.res.max_speed, 1.0) * dt_small;
    for (std::size_t k = 0; k < r.live.size(); ++k)
      for (std::size_t i = 0; i < r.live[k].points.size(); ++i)
        r.live[k].points[i] += dt_small * r.vel[k][i];
    r.t += dt_small;
    int guard = 0;
    bool changed = true;
    while (changed && ++guard < 10000) {
      changed = r.collapse_once() || r.thin_triangle_once() || r.pinch_once() || r.split_once();
      if (changed) r.velocities();
    }
    if (guard >= 10000) {
      r.res.inconclusive = true;
      r.res.notes += "event cascade did not settle; ";
      break;
    }
    if (snapshot_every > 0 && (s + 1) % snapshot_every == 0) {
      ReplaySnapshot snap;
      snap.t = r.t;
      for (const Loop& l : r.live) snap.loops.push_back(l.points);
      r.res.snapshots.push_back(std::move(snap));
    }
  }
  if (!r.live.empty()) {
    r.res.inconclusive = true;
    r.res.notes += "loops still alive at t_max:";
    for (const Loop& l : r.live) {
      r.res.notes += " [";
      for (const Vec2& p : l.points)
        r.res.notes += "(" + std::to_string(p.x()) + "," + std::to_string(p.y()) + ")";
      r.res.notes += "]";
    }
    r.res.notes += "; ";
  }
  return r.res;
}

// --- convex reference ------------------------------------------------------

namespace {

struct Line {
  Vec2 n;   // inward unit normal
  double c;  // n . p at t = 0
  double w;  // inward speed: n . p = c + w t
};

// Point and time where three offset lines meet.
bool concurrent(const Line& a, const Line& b, const Line& c, Vec2& p, double& t) {
  // rows: n.x x + n.y y - w t = c
  const double m[3][3] = {{a.n.x(), a.n.y(), -a.w}, {b.n.x(), b.n.y(), -b.w}, {c.n.x(), c.n.y(), -c.w}};
  const double r[3] = {a.c, b.c, c.c};
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-14) return false;
  auto solve_col = [&](int col) {
    double k[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) k[i][j] = j == col ? r[i] : m[i][j];
    return (k[0][0] * (k[1][1] * k[2][2] - k[1][2] * k[2][1]) -
            k[0][1] * (k[1][0] * k[2][2] - k[1][2] * k[2][0]) +
            k[0][2] * (k[1][0] * k[2][1] - k[1][1] * k[2][0])) /
           det;
  };
  p = Vec2(solve_col(0), solve_col(1));
  t = solve_col(2);
  return true;
}

Vec2 meet(const Line& a, const Line& b, double t) {
  const double det = a.n.x() * b.n.y() - a.n.y() * b.n.x();
  const double ca = a.c + a.w * t, cb = b.c + b.w * t;
  return Vec2((ca * b.n.y() - cb * a.n.y()) / det, (a.n.x() * cb - b.n.x() * ca) / det);
}

}  // namespace

ConvexSkeleton convex_bisector_skeleton(const Ring& ring_in) {
  const std::size_t n = ring_in.points.size();
  if (n < 3 || ring_in.weights.size() != n) throw std::invalid_argument("bad ring");
  Ring ring = oriented({ring_in}).front();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d0 = ring.points[(i + 1) % n] - ring.points[i];
    const Vec2 d1 = ring.points[(i + 2) % n] - ring.points[(i + 1) % n];
    if (d0.x() * d1.y() - d0.y() * d1.x() <= 0) throw std::invalid_argument("ring is not strictly convex");
    if (!(ring.weights[i] > 0)) throw std::invalid_argument("weights must be positive");
  }

  ConvexSkeleton sk;
  std::vector<Line> lines;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = (ring.points[(i + 1) % n] - ring.points[i]).normalized();
    const Vec2 nn = left_of(d);
    lines.push_back({nn, nn.dot(ring.points[i]), ring.weights[i]});
  }
  // Vertex i sits at the start of edge i; its trace starts at node[i].
  std::vector<int> prev(n), next(n), start(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = static_cast<int>((i + n - 1) % n);
    next[i] = static_cast<int>((i + 1) % n);
    sk.nodes.push_back(ring.points[i]);
    sk.times.push_back(0.0);
    start[i] = static_cast<int>(i);  // trace node of the vertex starting edge i
  }
  std::vector<int> version(n, 0);
  std::vector<bool> alive(n, true);
  int count = static_cast<int>(n);

  using Item = std::tuple<double, int, int>;  // time, edge, version
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  auto schedule = [&](int e) {
    ++version[static_cast<std::size_t>(e)];
    Vec2 p;
    double t;
    const Line& a = lines[static_cast<std::size_t>(prev[static_cast<std::size_t>(e)])];
    const Line& b = lines[static_cast<std::size_t>(e)];
    const Line& c = lines[static_cast<std::size_t>(next[static_cast<std::size_t>(e)])];
    if (!concurrent(a, b, c, p, t)) return;
    queue.push({t, e, version[static_cast<std::size_t>(e)]});
  };
  auto node_at = [&](const Vec2& p, double t) {
    for (std::size_t i = n; i < sk.nodes.size(); ++i)
      if ((sk.nodes[i] - p).norm() <= 1e-9 && std::abs(sk.times[i] - t) <= 1e-9) return static_cast<int>(i);
    sk.nodes.push_back(p);
    sk.times.push_back(t);
    return static_cast<int>(sk.nodes.size()) - 1;
  };
  auto arc = [&](int a, int b) {
    if (a == b) return;
    const auto key = std::minmax(a, b);
    for (const auto& x : sk.arcs)
      if (std::minmax(x.first, x.second) == key) return;
    sk.arcs.push_back(key);
  };
  for (std::size_t i = 0; i < n; ++i) schedule(static_cast<int>(i));

  double now = 0.0;
  while (count > 2 && !queue.empty()) {
    const auto [t, e, ver] = queue.top();
    queue.pop();
    const std::size_t ue = static_cast<std::size_t>(e);
    if (!alive[ue] || ver != version[ue]) continue;
    if (t < now - 1e-12) continue;  // growing edge
    const int pe = prev[ue], ne = next[ue];
    const Vec2 p = meet(lines[static_cast<std::size_t>(pe)], lines[ue], t);
    now = std::max(now, t);
    const int node = node_at(p, t);
    arc(start[ue], node);                          // vertex at the start of e
    arc(start[static_cast<std::size_t>(ne)], node);  // vertex at the end of e
    alive[ue] = false;
    --count;
    next[static_cast<std::size_t>(pe)] = ne;
    prev[static_cast<std::size_t>(ne)] = pe;
    start[static_cast<std::size_t>(ne)] = node;
    if (count == 2) {
      // Two antiparallel lines: the remaining vertices bound a ridge.
      const Line& a = lines[static_cast<std::size_t>(pe)];
      const Line& b = lines[static_cast<std::size_t>(ne)];
      if (a.n.dot(b.n) < -1 + 1e-12)
        arc(start[static_cast<std::size_t>(pe)], start[static_cast<std::size_t>(ne)]);
      else
        arc(start[static_cast<std::size_t>(pe)], node);
      break;
    }
    if (count == 3) {
      // A triangle of non-parallel lines shrinks to a single point.
      const int third = next[static_cast<std::size_t>(ne)];
      const Line& a = lines[static_cast<std::size_t>(pe)];
      const Line& b = lines[static_cast<std::size_t>(ne)];
      const Line& c = lines[static_cast<std::size_t>(third)];
      if (a.n.dot(b.n) < -1 + 1e-12) {
        // The strip between a and b has zero width now: the rest is a segment.
        const int q = node_at(meet(b, c, t), t);
        arc(node, q);
        arc(start[static_cast<std::size_t>(third)], q);
        arc(start[static_cast<std::size_t>(pe)], q);
        break;
      }
      const bool parallel = a.n.dot(b.n) < -1 + 1e-12 || b.n.dot(c.n) < -1 + 1e-12 ||
                            a.n.dot(c.n) < -1 + 1e-12;
      if (!parallel) {
        Vec2 q;
        double tq;
        if (concurrent(a, b, c, q, tq)) {
          const int apex = node_at(q, tq);
          for (int v : {pe, ne, third}) arc(start[static_cast<std::size_t>(v)], apex);
        }
        break;
      }
    }
    schedule(pe);
    schedule(ne);
  }
  return sk;
}

// --- comparisons -------------------------------------------------------------

std::vector<EventCluster> cluster_events(std::vector<ReplayEvent> events, double window) {
  std::stable_sort(events.begin(), events.end(),
                   [](const ReplayEvent& a, const ReplayEvent& b) { return a.t < b.t; });
  std::vector<EventCluster> out;
  double last = -std::numeric_limits<double>::infinity();
  for (const ReplayEvent& e : events) {
    if (out.empty() || e.t - last > window) out.push_back({e.t, false, {}});
    out.back().has_split = out.back().has_split || e.split;
    out.back().locations.push_back(e.location);
    last = e.t;
  }
  return out;
}

OracleReport compare_event_sequences(const std::vector<ReplayEvent>& engine,
                                     const ReplayResult& replay, double window, double time_tol) {
  OracleReport rep;
  const std::vector<EventCluster> a = cluster_events(engine, window);
  const std::vector<EventCluster> b = cluster_events(replay.events, window);
  rep.event_sequence_match = a.size() == b.size() && !replay.inconclusive;
  if (a.size() != b.size())
    rep.notes += "cluster count " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + "; ";
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    rep.max_time_error = std::max(rep.max_time_error, std::abs(a[i].t - b[i].t));
    if (std::abs(a[i].t - b[i].t) > time_tol || a[i].has_split != b[i].has_split) {
      rep.event_sequence_match = false;
      rep.notes += "cluster " + std::to_string(i) + " differs; ";
    }
    for (const Vec2& q : b[i].locations) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& p : a[i].locations) best = std::min(best, (p - q).norm());
      rep.max_position_error = std::max(rep.max_position_error, best);
    }
  }
  if (replay.inconclusive) rep.notes += "replay inconclusive: " + replay.notes;
  return rep;
}

OracleReport compare_convex(const std::vector<Vec3>& nodes,
                            const std::vector<std::pair<int, int>>& arcs,
                            const ConvexSkeleton& ref, double tol) {
  OracleReport rep;
  std::vector<int> map(ref.nodes.size(), -1);
  bool ok = true;
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double d = std::max((nodes[j].head<2>() - ref.nodes[i]).norm(),
                                std::abs(nodes[j].z() - ref.times[i]));
      if (d < best) {
        best = d;
        map[i] = static_cast<int>(j);
      }
    }
    rep.max_position_error = std::max(rep.max_position_error, best);
    if (best > tol) ok = false;
  }
  std::set<std::pair<int, int>> want, have;
  for (const auto& a : ref.arcs) {
    const int x = map[static_cast<std::size_t>(a.first)], y = map[static_cast<std::size_t>(a.second)];
    if (x != y) want.insert(std::minmax(x, y));
  }
  for (const auto& a : arcs)
    if (a.first != a.second) have.insert(std::minmax(a.first, a.second));
  std::set<int> used;
  for (int m : map) used.insert(m);
  rep.face_count_match = used.size() == ref.nodes.size();
  rep.event_sequence_match = ok && want == have;
  if (!ok) rep.notes += "node mismatch; ";
  if (want != have)
    rep.notes += "arc sets differ (" + std::to_string(want.size()) + " vs " + std::to_string(have.size()) + "); ";
  return rep;
}

}  // namespace wss::oracle
