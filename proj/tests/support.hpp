#pragma once

#include "wss/engine.hpp"
#include "wss/oracle.hpp"
#include "wss/velocity.hpp"

#include <random>
#include <string>
#include <vector>

namespace wss::test {

inline LoopInput ring(std::vector<Vec2> pts, double alpha = kPi / 4) {
  LoopInput l;
  l.points = std::move(pts);
  l.alphas.assign(l.points.size(), alpha);
  return l;
}

inline std::vector<Vec2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }
inline std::vector<Vec2> rectangle() { return {{0, 0}, {2, 0}, {2, 1}, {0, 1}}; }
inline std::vector<Vec2> l_shape() { return {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}; }
inline std::vector<Vec2> u_shape() {
  return {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
}
inline std::vector<Vec2> plus_shape() {
  return {{1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {2, 2}, {2, 3}, {1, 3}, {1, 2}, {0, 2}, {0, 1}, {1, 1}};
}
// Arms widen away from the center so they outlive the central pinch.
inline std::vector<Vec2> flared_cross() {
  std::vector<Vec2> arm = {{0.5, -0.5}, {3, -1.5}, {3, 1.5}}, out;
  for (int k = 0; k < 4; ++k) {
    for (const Vec2& p : arm) out.push_back(p);
    for (Vec2& p : arm) p = Vec2(-p.y(), p.x());
  }
  return out;
}
// Star with slightly uneven radii (a regular star collapses in one instant).
inline std::vector<Vec2> star() {
  std::vector<Vec2> s;
  for (int i = 0; i < 10; ++i) {
    const double r = i % 2 ? 0.45 + 0.03 * i : 1.0 - 0.02 * i;
    const double a = kPi / 2 + i * kPi / 5;
    s.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return s;
}
inline std::vector<LoopInput> square_with_hole() {
  return {ring({{0, 0}, {4, 0}, {4, 3}, {0, 3}}), ring({{1, 1}, {1.8, 1.1}, {1.6, 1.9}})};
}

struct Case {
  std::string name;
  std::vector<LoopInput> loops;
};

inline std::vector<Case> nonconvex_corpus() {
  return {{"L-shape", {ring(l_shape())}},
          {"U-shape", {ring(u_shape())}},
          {"star", {ring(star())}},
          {"plus", {ring(plus_shape())}},
          {"flared cross", {ring(flared_cross())}},
          {"square with hole", square_with_hole()}};
}

// Random strictly convex polygon: sorted angles on a stretched circle.
inline LoopInput random_convex(unsigned seed, bool unit_weights) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  const int n = 4 + static_cast<int>(seed % 9);
  std::vector<double> ang;
  for (int i = 0; i < n; ++i) ang.push_back(2 * kPi * U(rng));
  std::sort(ang.begin(), ang.end());
  const double sx = 1 + U(rng), sy = 1 + U(rng);
  LoopInput l;
  for (double a : ang) l.points.emplace_back(sx * std::cos(a), sy * std::sin(a));
  for (int i = 0; i < n; ++i) l.alphas.push_back(weight_to_alpha(unit_weights ? 1.0 : 0.5 + 1.5 * U(rng)));
  return l;
}

// Random star-shaped simple polygon around the origin.
inline LoopInput random_star_shaped(unsigned seed, int n) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  LoopInput l;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * (i + 0.8 * U(rng)) / n;
    const double r = 0.3 + 0.7 * U(rng);
    l.points.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  l.alphas.assign(static_cast<std::size_t>(n), kPi / 4);
  return l;
}

inline std::vector<oracle::Ring> to_rings(const std::vector<LoopInput>& loops) {
  std::vector<oracle::Ring> out;
  for (const LoopInput& l : loops) {
    oracle::Ring r;
    r.points = l.points;
    for (double a : l.alphas) r.weights.push_back(std::abs(a - kPi / 2) < 1e-15 ? 0.0 : alpha_to_weight(a));
    out.push_back(r);
  }
  return out;
}

struct Run {
  std::vector<oracle::ReplayEvent> events;
  SkeletonView view;
  RunStatus status = RunStatus::running;
  std::vector<std::string> violations;  // zero-length probe after each increment
};

inline Run run_engine(const std::vector<LoopInput>& loops, double dz = 0.1, bool probe = false,
                      const HeightSchedule& schedule = {}) {
  Engine e(loops, schedule);
  Run r;
  while (e.status() == RunStatus::running) {
    const AdvanceResult a = e.advance(dz, true);
    for (const KineticEvent& k : a.events) r.events.push_back({e.t(), k.kind == EventKind::split, k.location});
    if (probe)
      for (const std::string& v : find_violations(e.wavefront())) r.violations.push_back(v);
  }
  r.status = e.status();
  r.view = e.view();
  return r;
}

// First ring is the outer boundary, the rest are holes.
inline double polygon_area(const std::vector<LoopInput>& loops) {
  double a = std::abs(signed_area(loops.front().points));
  for (std::size_t i = 1; i < loops.size(); ++i) a -= std::abs(signed_area(loops[i].points));
  return a;
}

inline double face_area_sum(const SkeletonGraph& g) {
  double a = 0;
  for (const SkeletonFace& f : g.faces) a += f.area;
  return a;
}

inline std::vector<Vec3> node_xyt(const SkeletonGraph& g) {
  std::vector<Vec3> out;
  for (const SkeletonNode& n : g.nodes) out.emplace_back(n.pos.x(), n.pos.y(), n.t);
  return out;
}

inline std::vector<std::pair<int, int>> arc_pairs(const SkeletonGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const SkeletonArc& a : g.arcs) out.emplace_back(a.a, a.b);
  return out;
}

}  // namespace wss::test
