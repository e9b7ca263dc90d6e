#include "wss/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wss {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::running: return "running";
    case RunStatus::terminated: return "terminated";
    case RunStatus::faulted: return "faulted";
    case RunStatus::runaway: return "runaway";
  }
  return "running";
}

Frame Frame::fit(const std::vector<LoopInput>& loops) {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const LoopInput& l : loops)
    for (const Vec2& p : l.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  Frame f;
  if (!lo.allFinite() || !hi.allFinite()) return f;
  const double extent = (hi - lo).maxCoeff();
  f.origin = lo;
  f.scale = extent > 0 ? extent : 1.0;
  return f;
}

namespace {

std::vector<LoopInput> localize(const std::vector<LoopInput>& loops, const Frame& f) {
  std::vector<LoopInput> out = loops;
  for (LoopInput& l : out) {
    for (Vec2& p : l.points) p = f.to_local(p);
    for (double& s : l.start_times) s /= f.scale;
  }
  return out;
}

// Exact-time tolerance for boundary snapping.
constexpr double kTimeSnap = 1e-12;

}  // namespace

Engine::Engine(const std::vector<LoopInput>& loops, const HeightSchedule& schedule,
               EngineOptions opts)
    : opts_(std::move(opts)),
      frame_(Frame::fit(loops)),
      schedule_(schedule.scaled(1.0 / frame_.scale)),
      w_(Wavefront::build(localize(loops, frame_), opts_.tol)),
      recorder_(graph_, schedule_, opts_.tol.eps_geom) {
  for (const WavefrontVertex& v : w_.vertices())
    if (v.start_prev > 0) start_times_.push_back(v.start_prev);
  std::sort(start_times_.begin(), start_times_.end());
  start_times_.erase(std::unique(start_times_.begin(), start_times_.end()), start_times_.end());
  recorder_.begin(w_);
  settle();
  snapshots_.push_back(take_snapshot(w_));
  refresh_status();
}

double Engine::z() const { return schedule_.z_of_t(w_.t) * frame_.scale; }

void Engine::settle() {
  const double vz = schedule_.vz_at_time(w_.t);
  w_.update_velocities(vz);
  w_.remove_colinear_vertices(&recorder_, vz);
  w_.update_velocities(vz);
  recorder_.register_edges(w_);
}

void Engine::refresh_status() {
  if (status_ == RunStatus::faulted) return;
  if (w_.terminated()) {
    status_ = RunStatus::terminated;
    return;
  }
  if (opts_.max_z && z() >= *opts_.max_z - kTimeSnap * frame_.scale) {
    reached_max_z_ = true;
    status_ = RunStatus::terminated;
    return;
  }
  if (!opts_.max_z && z() >= opts_.runaway_z) {
    status_ = RunStatus::runaway;
    return;
  }
  status_ = RunStatus::running;
}

double Engine::next_boundary(double t_from, double t_to) const {
  double b = t_to;
  for (double k : schedule_.knot_times())
    if (k > t_from + kTimeSnap) b = std::min(b, k);
  for (double s : start_times_)
    if (s > t_from + kTimeSnap) b = std::min(b, s);
  return b;
}

void Engine::start_edges_at(double t) {
  bool any = false;
  for (const WavefrontVertex& v : w_.vertices()) {
    if (!v.active || std::abs(v.start_prev - t) > kTimeSnap) continue;
    recorder_.cut(w_, v.id, NodeKind::edit);
    recorder_.cut(w_, v.prev, NodeKind::edit);
    any = true;
  }
  if (any) settle();
}

KineticEvent Engine::to_world(KineticEvent e) const {
  e.location = frame_.to_world(e.location);
  e.dt_event *= frame_.scale;
  return e;
}

void Engine::fault(const RobustnessFault& f) {
  status_ = RunStatus::faulted;
  fault_message_ = f.what();
  fault_dump_ = f.dump();
}

AdvanceResult Engine::advance(double dz, bool stop_at_event) {
  AdvanceResult res;
  res.dz_requested = dz;
  if (status_ != RunStatus::running || !(dz > 0)) return res;
  const double z0 = z();
  double z_target = (schedule_.z_of_t(w_.t) + dz / frame_.scale);
  if (opts_.max_z) z_target = std::min(z_target, *opts_.max_z / frame_.scale);
  const double t_target = schedule_.t_of_z(z_target);

  try {
    while (w_.t < t_target - kTimeSnap && !w_.terminated()) {
      const double bound = next_boundary(w_.t, t_target);
      const double dt = bound - w_.t;
      const double vz = schedule_.vz_at_time(w_.t);
      StepResult sr = step(w_, dt, &recorder_, vz, opts_.kinetics);
      if (sr.events_applied.empty() && sr.advanced_dt >= dt) {
        w_.t = bound;
        start_edges_at(bound);
        if (schedule_.vz_at_time(w_.t) != vz) w_.update_velocities(schedule_.vz_at_time(w_.t));
      } else {
        res.hit_event = true;
        for (const KineticEvent& e : sr.events_applied) res.events.push_back(to_world(e));
        if (sr.events_applied.empty() && !(sr.advanced_dt > 0))
          throw RobustnessFault("events detected at zero time but no surgery applies", dump(w_));
        stalled_ = sr.advanced_dt > 0 ? 0 : stalled_ + 1;
        if (stalled_ > 10000)
          throw RobustnessFault("no progress after repeated zero-time events", dump(w_));
      }
      recorder_.register_edges(w_);
      snapshots_.push_back(sr.snapshot);
      snapshots_.back().t = w_.t;
      if (res.hit_event && stop_at_event) break;
    }
  } catch (const RobustnessFault& f) {
    fault(f);
    res.dz_advanced = z() - z0;
    throw;
  }
  if (std::abs(w_.t - t_target) <= kTimeSnap) w_.t = t_target;
  res.dz_advanced = z() - z0;
  refresh_status();
  return res;
}

std::vector<double> Engine::run(double dz_step) {
  std::vector<double> log;
  if (!(dz_step > 0)) throw std::invalid_argument("step must be positive");
  while (status_ == RunStatus::running) {
    log.push_back(dz_step);
    advance(dz_step, true);
  }
  return log;
}

int Engine::edge_head(int loop, int edge) const {
  const std::vector<int> entries = w_.loops();
  if (loop < 0 || loop >= static_cast<int>(entries.size()))
    throw GeometryError("no loop " + std::to_string(loop));
  const std::vector<int> verts = w_.loop_vertices(entries[static_cast<std::size_t>(loop)]);
  const int n = static_cast<int>(verts.size());
  if (edge < 0 || edge >= n) throw GeometryError("no edge " + std::to_string(edge));
  return verts[static_cast<std::size_t>((edge + 1) % n)];
}

void Engine::set_alpha(int loop, int edge, double alpha) {
  const int head = edge_head(loop, edge);
  if (w_.is_terminal(head)) throw GeometryError("loop is terminal");
  w_.set_alpha(head, alpha, &recorder_);
  settle();
  snapshots_.push_back(take_snapshot(w_));
  refresh_status();
}

int Engine::insert_vertex(int loop, int edge, const Vec2& world_point) {
  const int head = edge_head(loop, edge);
  if (w_.is_terminal(head)) throw GeometryError("loop is terminal");
  const Vec2 p = frame_.to_local(world_point);
  const Vec2 a = w_[w_[head].prev].pos, b = w_[head].pos;
  const double len = (b - a).norm();
  const double s = (p - a).dot(b - a) / len;
  if (std::abs(cross2<double>((b - a) / len, p - a)) > w_.coincide_tol() || s <= 0 || s >= len)
    throw GeometryError("point does not lie inside the edge");
  const int id = w_.insert_vertex(head, a + s / len * (b - a), &recorder_);
  settle();
  snapshots_.push_back(take_snapshot(w_));
  refresh_status();
  return id;
}

void Engine::remove_vertex(int id) {
  if (id < 0 || id >= static_cast<int>(w_.vertices().size()) || !w_[id].active)
    throw GeometryError("stale vertex id " + std::to_string(id));
  w_.remove_vertex(id, &recorder_);
  if (!find_violations(w_).empty()) throw GeometryError("removal makes the polygon invalid");
  settle();
  snapshots_.push_back(take_snapshot(w_));
  refresh_status();
}

void Engine::set_schedule(const std::vector<HeightSchedule::Breakpoint>& world_breakpoints) {
  // Heights already travelled keep their old rates.
  const double z_now = schedule_.z_of_t(w_.t);
  HeightSchedule incoming(world_breakpoints);
  incoming = incoming.scaled(1.0 / frame_.scale);
  std::vector<HeightSchedule::Breakpoint> merged;
  for (const auto& b : schedule_.breakpoints())
    if (b.z < z_now) merged.push_back(b);
  const double vz_now = incoming.vz_at_time(incoming.t_of_z(z_now));
  if (z_now > 0 || merged.empty()) merged.push_back({z_now, vz_now});
  for (const auto& b : incoming.breakpoints())
    if (b.z > z_now) merged.push_back(b);
  schedule_ = HeightSchedule(std::move(merged));
  if (std::abs(schedule_.z_of_t(w_.t) - z_now) > 1e-12)
    throw GeometryError("schedule change would move the current height");
  w_.update_velocities(schedule_.vz_at_time(w_.t));
  refresh_status();
}

OffsetSnapshot Engine::world_snapshot(const OffsetSnapshot& s) const {
  OffsetSnapshot o = s;
  o.t *= frame_.scale;
  for (auto& ring : o.loops)
    for (Vec2& p : ring) p = frame_.to_world(p);
  return o;
}

SkeletonView Engine::view() const {
  Wavefront w = w_;
  SkeletonGraph g = graph_;
  SkeletonRecorder rec(g, schedule_, opts_.tol.eps_geom);
  rec.finish(w);
  g.faces = build_faces(g);
  RoofMesh mesh = build_roof_mesh(g, schedule_);

  SkeletonView v;
  const double s = frame_.scale;
  for (SkeletonNode& n : g.nodes) {
    n.pos = frame_.to_world(n.pos);
    n.z *= s;
    n.t *= s;
  }
  for (SkeletonFace& f : g.faces) f.area *= s * s;
  for (auto& [id, line] : g.edge_lines) {
    line.p0 = frame_.to_world(line.p0);
    line.t0 *= s;
  }
  for (Vec3& p : mesh.vertices) {
    p.head<2>() = frame_.to_world(p.head<2>());
    p.z() *= s;
  }
  v.graph = std::move(g);
  v.mesh = std::move(mesh);
  for (const OffsetSnapshot& snap : snapshots_) v.snapshots.push_back(world_snapshot(snap));
  return v;
}

}  // namespace wss
