#include "wss/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace wss {

const char* to_string(EventKind kind) {
  return kind == EventKind::collapse ? "collapse" : "split";
}

const char* to_string(ContactClass contact) {
  switch (contact) {
    case ContactClass::none: return "none";
    case ContactClass::vertex_in_edge: return "vertex_in_edge";
    case ContactClass::vertex_on_vertex: return "vertex_on_vertex";
  }
  return "none";
}

namespace {

const Vec2& at(const std::vector<Vec2>& v, int i) { return v[static_cast<std::size_t>(i)]; }

Vec2 planar_vel(const WavefrontVertex& v) { return v.vel.head<2>(); }

// Active vertices of loops that still move.
std::vector<int> live_vertices(const Wavefront& w) {
  std::vector<int> out;
  for (int e : w.loops()) {
    if (w.is_terminal(e)) continue;
    for (int v : w.loop_vertices(e)) out.push_back(v);
  }
  return out;
}

struct Box {
  Vec2 lo, hi;
  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool overlaps(const Box& o, double eps) const {
    return lo.x() <= o.hi.x() + eps && o.lo.x() <= hi.x() + eps && lo.y() <= o.hi.y() + eps &&
           o.lo.y() <= hi.y() + eps;
  }
};

Box swept(const Vec2& a, const Vec2& b) { return Box{a.cwiseMin(b), a.cwiseMax(b)}; }

}  // namespace

std::vector<Vec2> predict(const Wavefront& w, double dt) {
  std::vector<Vec2> out;
  out.reserve(w.vertices().size());
  for (const WavefrontVertex& v : w.vertices())
    out.push_back(v.active ? Vec2(v.pos + dt * planar_vel(v)) : v.pos);
  return out;
}

std::vector<KineticEvent> detect_edge_swaps(const Wavefront& w, const std::vector<Vec2>& predicted,
                                            double dt) {
  const double eps = w.tolerances().eps_geom;
  std::vector<KineticEvent> events;
  for (int v : live_vertices(w)) {
    const WavefrontVertex& p = w[v];
    const int b = p.prev;
    const double l_n = project_length<double>(p.pos - w[b].pos, p.u_prev);
    const double l_np1 = project_length<double>(at(predicted, v) - at(predicted, b), p.u_prev);
    std::optional<double> xi;
    if (l_n > eps) {
      if (l_np1 <= eps) xi = zero_crossing_xi(l_n, l_np1, eps);
    } else if (l_np1 - l_n <= eps) {
      xi = -1.0;  // already degenerate and not growing
    }
    if (!xi) continue;
    KineticEvent ev;
    ev.kind = EventKind::collapse;
    ev.xi = *xi;
    ev.dt_event = xi_to_dt(*xi, dt);
    ev.subject = v;
    ev.location = p.pos + ev.dt_event * planar_vel(p);
    events.push_back(ev);
  }
  return events;
}

std::vector<KineticEvent> detect_penetrations(const Wavefront& w, const std::vector<Vec2>& predicted,
                                              double dt, bool broad_phase) {
  const double eps = w.tolerances().eps_geom;
  const double ctol = w.coincide_tol();
  const std::vector<int> live = live_vertices(w);
  std::vector<Box> vbox;
  vbox.reserve(live.size());
  std::vector<Box> ebox;
  for (int v : live) {
    vbox.push_back(swept(w[v].pos, at(predicted, v)));
    Box e = swept(w[v].pos, at(predicted, v));
    e.add(w[w[v].prev].pos);
    e.add(at(predicted, w[v].prev));
    ebox.push_back(e);
  }

  std::vector<KineticEvent> events;
  for (std::size_t i = 0; i < live.size(); ++i) {
    const int pv = live[i];
    const WavefrontVertex& p = w[pv];
    for (std::size_t j = 0; j < live.size(); ++j) {
      const int head = live[j];
      const int tail = w[head].prev;
      if (head == pv || tail == pv) continue;
      if (broad_phase && !vbox[i].overlaps(ebox[j], eps)) continue;

      const Vec2 n = w[head].n_prev;
      const double g_n = (p.pos - w[tail].pos).dot(n);
      const double g_np1 = (at(predicted, pv) - at(predicted, tail)).dot(n);
      std::optional<double> xi;
      if (g_n > eps) {
        if (g_np1 <= eps) xi = zero_crossing_xi(g_n, g_np1, eps);
      } else if (g_n < -eps) {
        if (g_np1 >= -eps) xi = zero_crossing_xi(g_n, g_np1, eps);
      } else {
        // Starting on the supporting line: an event only if the vertex is
        // crossing now and its wedge trails behind it.
        const double dg = g_np1 - g_n;
        if (std::abs(dg) <= eps) continue;
        const double from = dg > 0 ? -1.0 : 1.0;
        const double sb = (-p.u_prev).dot(n);
        const double sa = w[p.next].u_prev.dot(n);
        if (sb * from <= eps || sa * from <= eps) continue;
        const Vec2 a = w[tail].pos, b = w[head].pos;
        const double len = (b - a).norm();
        const double s = (p.pos - a).dot(b - a) / len;
        if (s <= ctol || s >= len - ctol) continue;
        xi = -1.0;
      }
      if (!xi) continue;

      const double dt_s = xi_to_dt(*xi, dt);
      const Vec2 ps = p.pos + dt_s * planar_vel(p);
      const Vec2 as = w[tail].pos + dt_s * planar_vel(w[tail]);
      const Vec2 bs = w[head].pos + dt_s * planar_vel(w[head]);
      const double len = (bs - as).norm();
      KineticEvent ev;
      ev.kind = EventKind::split;
      ev.xi = *xi;
      ev.dt_event = dt_s;
      ev.subject = pv;
      ev.target_edge = w[head].edge_id;
      ev.location = ps;
      if (len <= ctol) {
        if ((ps - as).norm() > ctol && (ps - bs).norm() > ctol) continue;
        ev.contact = ContactClass::vertex_on_vertex;
        ev.target = head;
      } else {
        const double s = (ps - as).dot(bs - as) / len;
        if (s < -eps || s > len + eps) continue;
        if ((ps - as).norm() <= ctol) {
          ev.contact = ContactClass::vertex_on_vertex;
          ev.target = tail;
        } else if ((ps - bs).norm() <= ctol) {
          ev.contact = ContactClass::vertex_on_vertex;
          ev.target = head;
        } else {
          ev.contact = ContactClass::vertex_in_edge;
          ev.target = head;
        }
      }
      events.push_back(ev);
    }
  }
  return events;
}

std::vector<KineticEvent> earliest_event_batch(std::vector<KineticEvent> events, double dt_n,
                                               const Tolerances& tol) {
  if (events.empty()) return events;
  double first = events.front().dt_event;
  for (const KineticEvent& e : events) first = std::min(first, e.dt_event);
  const double window = tol.eps_time_cluster * dt_n;
  std::vector<KineticEvent> batch;
  for (const KineticEvent& e : events)
    if (e.dt_event <= first + window) batch.push_back(e);
  std::stable_sort(batch.begin(), batch.end(), [](const KineticEvent& a, const KineticEvent& b) {
    return std::make_tuple(static_cast<int>(a.kind), a.subject, a.target) <
           std::make_tuple(static_cast<int>(b.kind), b.subject, b.target);
  });
  return batch;
}

void correct(Wavefront& w, const std::vector<Vec2>& predicted, double dt_n, double dt_event) {
  for (WavefrontVertex& v : w.vertices()) {
    if (!v.active) continue;
    v.pos = at(predicted, v.id) + (dt_event - dt_n) * planar_vel(v);
  }
  w.t += dt_event;
}

OffsetSnapshot take_snapshot(const Wavefront& w) {
  OffsetSnapshot s;
  s.t = w.t;
  for (int e : w.loops()) {
    std::vector<Vec2> ring;
    std::vector<int> ids;
    for (int v : w.loop_vertices(e)) {
      ring.push_back(w[v].pos);
      ids.push_back(v);
    }
    s.loops.push_back(std::move(ring));
    s.ids.push_back(std::move(ids));
  }
  return s;
}

std::vector<std::string> find_violations(const Wavefront& w) {
  const double eps = w.tolerances().eps_geom;
  std::vector<std::string> out;
  const std::vector<int> live = live_vertices(w);
  for (int v : live) {
    const WavefrontVertex& p = w[v];
    if ((p.pos - w[p.prev].pos).dot(p.u_prev) < -w.coincide_tol())
      out.push_back("swapped edge before vertex " + std::to_string(v));
  }
  for (std::size_t i = 0; i < live.size(); ++i) {
    const int h1 = live[i], t1 = w[h1].prev;
    for (std::size_t j = i + 1; j < live.size(); ++j) {
      const int h2 = live[j], t2 = w[h2].prev;
      if (h1 == t2 || h2 == t1 || h1 == h2) continue;
      if (segments_cross(w[t1].pos, w[h1].pos, w[t2].pos, w[h2].pos, 10 * eps))
        out.push_back("edges ending at " + std::to_string(h1) + " and " + std::to_string(h2) +
                      " cross");
    }
  }
  return out;
}

namespace {

// Collapses zero-length edges until none remain.
void collapse_degenerate_edges(Wavefront& w, TopologyObserver* obs, std::vector<KineticEvent>& log) {
  const double ctol = w.coincide_tol();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int e : w.loops()) {
      if (w.loop_size(e) < 2) continue;
      for (int v : w.loop_vertices(e)) {
        if ((w[v].pos - w[w[v].prev].pos).norm() > ctol) continue;
        KineticEvent ev;
        ev.kind = EventKind::collapse;
        ev.subject = v;
        ev.location = w[v].pos;
        log.push_back(ev);
        w.collapse_edge(v, obs);
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
}

std::vector<int> vertices_near(const Wavefront& w, const Vec2& p, double tol) {
  std::vector<int> out;
  for (int v : live_vertices(w))
    if ((w[v].pos - p).norm() <= tol) out.push_back(v);
  return out;
}

// Current edge (by head vertex) with face id `edge_id` that the point touches.
std::optional<int> locate_edge(const Wavefront& w, int subject, int edge_id, const Vec2& p,
                               double tol) {
  for (int head : live_vertices(w)) {
    if (w[head].edge_id != edge_id) continue;
    const int tail = w[head].prev;
    if (head == subject || tail == subject) continue;
    const Vec2 a = w[tail].pos, b = w[head].pos;
    const Vec2 ab = b - a;
    const double len = ab.norm();
    if (len <= tol) continue;
    const double s = (p - a).dot(ab) / len;
    if (s < -tol || s > len + tol) continue;
    if (std::abs(cross2<double>(ab / len, p - a)) > tol) continue;
    return head;
  }
  return std::nullopt;
}

}  // namespace

StepResult step(Wavefront& w, double dt, TopologyObserver* obs, double v_z,
                const KineticsOptions& opts) {
  StepResult result;
  const std::vector<Vec2> pred = predict(w, dt);
  std::vector<KineticEvent> events = detect_edge_swaps(w, pred, dt);
  {
    std::vector<KineticEvent> splits = detect_penetrations(w, pred, dt, opts.broad_phase);
    events.insert(events.end(), splits.begin(), splits.end());
  }

  if (events.empty()) {
    for (WavefrontVertex& v : w.vertices())
      if (v.active) v.pos = at(pred, v.id);
    w.t += dt;
    result.advanced_dt = dt;
    result.snapshot = take_snapshot(w);
    return result;
  }

  std::vector<KineticEvent> batch = earliest_event_batch(std::move(events), dt, w.tolerances());
  const double dt_event = batch.front().dt_event;
  double t_before = w.t;
  correct(w, pred, dt, dt_event);
  if (dt_event == dt) w.t = t_before + dt;
  result.advanced_dt = dt_event;

  // Deterministic order: collapses, then splits, by loop then vertex.
  std::stable_sort(batch.begin(), batch.end(), [&](const KineticEvent& a, const KineticEvent& b) {
    const int la = w[a.subject].active ? w.loop_entry(a.subject) : -1;
    const int lb = w[b.subject].active ? w.loop_entry(b.subject) : -1;
    return std::make_tuple(static_cast<int>(a.kind), la, a.subject) <
           std::make_tuple(static_cast<int>(b.kind), lb, b.subject);
  });

  const double ctol = w.coincide_tol();
  for (const KineticEvent& ev : batch) {
    if (ev.kind != EventKind::collapse) continue;
    const int v = ev.subject;
    if (!w[v].active || w.loop_size(v) < 2) continue;
    if ((w[v].pos - w[w[v].prev].pos).norm() > ctol) continue;
    w.collapse_edge(v, obs);
    result.events_applied.push_back(ev);
  }
  collapse_degenerate_edges(w, obs, result.events_applied);

  std::vector<int> resolved;
  for (const KineticEvent& ev : batch) {
    if (ev.kind != EventKind::split) continue;
    const int p = ev.subject;
    if (!w[p].active || w.is_terminal(p)) continue;
    if (std::find(resolved.begin(), resolved.end(), p) != resolved.end()) continue;
    const Vec2 where = w[p].pos;
    std::vector<int> group;
    if (ev.contact == ContactClass::vertex_on_vertex) {
      group = vertices_near(w, where, ctol);
    } else {
      const auto head = locate_edge(w, p, ev.target_edge, where, ctol);
      if (!head) continue;
      const int tail = w[*head].prev;
      if ((w[tail].pos - where).norm() <= ctol || (w[*head].pos - where).norm() <= ctol) {
        group = vertices_near(w, where, ctol);
      } else {
        const Vec2 a = w[tail].pos, b = w[*head].pos;
        const Vec2 foot = a + (where - a).dot(b - a) / (b - a).squaredNorm() * (b - a);
        w.insert_split_vertex(*head, foot, obs);
        group = vertices_near(w, where, ctol);
      }
    }
    if (group.size() < 2) continue;
    // Neighbours inside the group mean zero-length edges; collapse them first.
    w.resolve_coincident(group, obs);
    resolved.insert(resolved.end(), group.begin(), group.end());
    result.events_applied.push_back(ev);
    collapse_degenerate_edges(w, obs, result.events_applied);
  }

  w.check_links();
  w.update_velocities(v_z);
  w.remove_colinear_vertices(obs, v_z);
  collapse_degenerate_edges(w, obs, result.events_applied);
  w.update_velocities(v_z);

  for (int e : w.loops())
    if (w.is_terminal(e)) result.terminated_loops.push_back(e);
  result.snapshot = take_snapshot(w);

  if (opts.check_admissibility) {
    const std::vector<std::string> bad = find_violations(w);
    if (!bad.empty()) {
      std::ostringstream os;
      for (const std::string& s : bad) os << s << "\n";
      throw RobustnessFault("inadmissible configuration after surgery: " + bad.front(),
                            os.str() + dump(w));
    }
  }
  return result;
}

}  // namespace wss
