// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include "support.hpp"

#include "wss/io.hpp"
#include "wss/kinetics.hpp"
#include "wss/session.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace wss;
using nlohmann::json;
using test::ring;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  failures += !ok;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Wavefront settled(const std::vector<LoopInput>& in) {
  Wavefront w = Wavefront::build(in);
  w.update_velocities(1.0);
  w.remove_colinear_vertices(nullptr, 1.0);
  w.update_velocities(1.0);
  return w;
}

std::size_t edge_count(const std::vector<LoopInput>& loops) {
  std::size_t n = 0;
  for (const LoopInput& l : loops) n += l.points.size();
  return n;
}

PolygonDocument to_document(const std::vector<LoopInput>& loops) {
  PolygonDocument d;
  for (const LoopInput& l : loops) {
    d.loops.push_back(l.points);
    for (double a : l.alphas) d.edges.push_back({EdgeAttr::Kind::alpha, a});
  }
  return d;
}

// Every node of `a` has a partner in `b` within tol (and counts agree).
double node_set_distance(const SkeletonGraph& a, const SkeletonGraph& b) {
  if (a.nodes.size() != b.nodes.size()) return 1e300;
  double worst = 0;
  for (const SkeletonNode& n : a.nodes) {
    double best = 1e300;
    for (const SkeletonNode& m : b.nodes)
      best = std::min(best, (Vec3(n.pos.x(), n.pos.y(), n.z) - Vec3(m.pos.x(), m.pos.y(), m.z)).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

void unit_square() {
  const auto t0 = Clock::now();
  Engine e({ring(test::unit_square())}, HeightSchedule{});
  e.run(0.1);
  const SkeletonView v = e.view();
  const double elapsed = ms_since(t0);

  bool ok = e.status() == RunStatus::terminated && std::abs(e.z() - 0.5) <= 1e-9;
  int collapse = 0;
  for (const SkeletonNode& n : v.graph.nodes)
    if (n.kind == NodeKind::collapse) {
      ++collapse;
      ok = ok && (Vec3(n.pos.x(), n.pos.y(), n.z) - Vec3(0.5, 0.5, 0.5)).norm() <= 1e-9;
    }
  ok = ok && collapse == 1 && v.graph.faces.size() == 4;
  for (const SkeletonFace& f : v.graph.faces) ok = ok && std::abs(f.area - 0.25) <= 1e-9;

  // Closed form at l_n = 1, l_{n+1} = -1 is exact; the probe on computed
  // velocities agrees to rounding.
  const auto xi = zero_crossing_xi(1.0, -1.0);
  ok = ok && xi && *xi == 0.0 && xi_to_dt(*xi, 1.0) == 0.5;
  const Wavefront w = settled({ring(test::unit_square())});
  const auto probe = detect_edge_swaps(w, predict(w, 1.0), 1.0);
  double probe_err = probe.empty() ? 1.0 : 0.0;
  for (const KineticEvent& k : probe) probe_err = std::max(probe_err, std::abs(k.dt_event - 0.5));
  ok = ok && probe.size() == 4 && probe_err <= 1e-15 && elapsed < 10.0;
  report(1, "unit square", ok,
         "z=" + fmt("%.17g", e.z()) + ", collapse nodes " + std::to_string(collapse) + ", probe dt err " +
             fmt("%.1e", probe_err) + ", " + fmt("%.2f", elapsed) + " ms (< 10)");
}

void convex_corpus() {
  const auto t0 = Clock::now();
  double worst = 0;
  int matched = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const LoopInput l = test::random_convex(seed, seed % 2 == 0);
    const test::Run r = test::run_engine({l});
    const auto ref = oracle::convex_bisector_skeleton(test::to_rings({l}).front());
    const auto rep = oracle::compare_convex(test::node_xyt(r.view.graph), test::arc_pairs(r.view.graph), ref, 1e-9);
    worst = std::max(worst, rep.max_position_error);
    matched += rep.event_sequence_match && r.status == RunStatus::terminated;
  }
  const double elapsed = ms_since(t0);
  report(2, "convex corpus", matched == 20 && worst <= 1e-9 && elapsed < 1000.0,
         std::to_string(matched) + "/20 match, max node error " + fmt("%.1e", worst) + ", " + fmt("%.1f", elapsed) +
             " ms (< 1000)");
}

void nonconvex_corpus() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (const test::Case& c : test::nonconvex_corpus()) {
    const test::Run r = test::run_engine(c.loops);
    double t_end = 0;
    for (const SkeletonNode& n : r.view.graph.nodes) t_end = std::max(t_end, n.t);
    const double dt = 1e-4;
    const auto rep = oracle::dense_replay(test::to_rings(c.loops), dt, 1.2 * t_end + 20 * dt);
    const double tol = 10 * dt * std::max(1.0, rep.max_speed);
    const bool seq = oracle::compare_event_sequences(r.events, rep, tol, tol).event_sequence_match;
    const bool faces = r.view.graph.faces.size() == edge_count(c.loops);
    const double area_err = std::abs(test::face_area_sum(r.view.graph) - test::polygon_area(c.loops));
    const bool case_ok = r.status == RunStatus::terminated && seq && faces && area_err <= 1e-8;
    ok = ok && case_ok;
    if (!case_ok)
      detail += c.name + " (replay " + (seq ? "ok" : "mismatch") + ", faces " +
                std::to_string(r.view.graph.faces.size()) + ", area err " + fmt("%.1e", area_err) + ") ";
  }
  // Four reflex vertices meet at the center in one batch.
  Wavefront w = settled({ring(test::flared_cross())});
  std::set<int> subjects;
  for (const KineticEvent& k : earliest_event_batch(detect_penetrations(w, predict(w, 1.0), 1.0), 1.0))
    if (k.contact == ContactClass::vertex_on_vertex) subjects.insert(k.subject);
  const int on_vertex = static_cast<int>(subjects.size());
  step(w, 1.0, nullptr);
  const bool cross = on_vertex == 4 && w.loops().size() == 4;
  const double elapsed = ms_since(t0);
  ok = ok && cross && elapsed < 10000.0;
  report(3, "non-convex corpus", ok,
         (detail.empty() ? std::string("all cases match replay, faces and areas") : detail) + "; cross: " +
             std::to_string(on_vertex) + " reflex vertices in one vertex-on-vertex batch -> " + std::to_string(w.loops().size()) +
             " loops; " + fmt("%.0f", elapsed) + " ms (< 10000)");
}

void identities() {
  int good = 0, total = 0;
  std::string bad;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const int n = 6 + static_cast<int>(seed % 15);
    const LoopInput l = test::random_star_shaped(seed, n);
    const test::Run r = test::run_engine({l});
    const int interior = r.view.graph.interior_node_count();
    const int arcs = static_cast<int>(r.view.graph.arcs.size());
    ++total;
    if (r.status == RunStatus::terminated && interior == n - 2 && arcs == 2 * n - 3)
      ++good;
    else
      bad += " seed " + std::to_string(seed) + " (n=" + std::to_string(n) + ": " + std::to_string(interior) + " nodes, " +
             std::to_string(arcs) + " arcs)";
  }
  report(4, "classical identities", good == total,
         std::to_string(good) + "/" + std::to_string(total) + " random polygons with n-2 nodes and 2n-3 arcs" + bad);
}

void step_independence() {
  std::vector<test::Case> inputs = test::nonconvex_corpus();
  inputs.push_back({"square", {ring(test::unit_square())}});
  inputs.push_back({"rectangle", {ring(test::rectangle())}});
  double worst = 0;
  std::string bad;
  for (const test::Case& c : inputs) {
    const test::Run ref = test::run_engine(c.loops, 0.5);
    for (double dz : {0.1, 0.01}) {
      const test::Run r = test::run_engine(c.loops, dz);
      const double d = std::max(node_set_distance(ref.view.graph, r.view.graph),
                                node_set_distance(r.view.graph, ref.view.graph));
      const bool same_arcs = ref.view.graph.arcs.size() == r.view.graph.arcs.size();
      worst = std::max(worst, same_arcs ? d : 1e300);
      if (d > 1e-9 || !same_arcs) bad += " " + c.name + "@" + fmt("%g", dz);
    }
  }
  report(5, "step-size independence", worst <= 1e-9,
         "max node distance across dz 0.5/0.1/0.01 " + fmt("%.1e", worst) + (bad.empty() ? "" : ";" + bad));
}

void colinear_singularity() {
  LoopInput l = ring({{0, 0}, {2, 0}, {2.2, -0.2}, {4, -0.2}, {4, 2}, {0, 2}});
  l.alphas[0] = kPi / 2;
  Engine e({l}, HeightSchedule{});
  e.run(0.05);
  const SkeletonView v = e.view();
  int colinear = 0;
  bool slope_after = false;
  for (const SkeletonNode& n : v.graph.nodes) {
    colinear += n.kind == NodeKind::colinear;
    // Wall carried on at the next edge's slope: y = t - 0.2 meets y = 2 - t.
    if (n.kind == NodeKind::collapse && std::abs(n.t - 1.1) <= 1e-12 && std::abs(n.pos.y() - 0.9) <= 1e-12)
      slope_after = true;
  }
  const bool ok = e.status() == RunStatus::terminated && colinear == 1 && slope_after &&
                  std::abs(test::face_area_sum(v.graph) - signed_area(l.points)) <= 1e-9;
  report(6, "colinear singularity", ok,
         std::string("status ") + to_string(e.status()) + ", colinear removals " + std::to_string(colinear) +
             ", continued at the next edge's slope: " + (slope_after ? "yes" : "no"));
}

void stationary_extremes() {
  auto first_split = [](const LoopInput& l) {
    Engine e({l}, HeightSchedule{});
    while (e.status() == RunStatus::running) {
      const AdvanceResult a = e.advance(0.1);
      for (const KineticEvent& k : a.events)
        if (k.kind == EventKind::split) return std::make_pair(e.t(), k.location);
    }
    return std::make_pair(-1.0, Vec2(0, 0));
  };
  LoopInput apex = ring({{0, 0}, {4, 0}, {4, 3}, {2, 1}, {0, 3}});
  apex.alphas = {weight_to_alpha(0.7), kPi / 4, kPi / 2, kPi / 2, kPi / 4};
  const auto a = first_split(apex);
  LoopInput notch = ring({{0, 0}, {4, 0}, {4, 2}, {2.5, 2}, {2, 1}, {1.5, 2}, {0, 2}});
  notch.alphas[0] = kPi / 2;
  const auto b = first_split(notch);
  const double ea = std::abs(a.first - 1 / 0.7), eb = std::abs(b.first - 1 / std::sqrt(5.0));
  const bool ok = ea <= 1e-12 && eb <= 1e-12 && (a.second - Vec2(2, 1)).norm() <= 1e-12 &&
                  (b.second - Vec2(2, 0)).norm() <= 1e-12;
  report(7, "stationary extremes", ok,
         "edge onto stationary vertex t err " + fmt("%.1e", ea) + ", vertex onto stationary edge t err " +
             fmt("%.1e", eb));
}

void admissibility() {
  std::vector<test::Case> inputs = test::nonconvex_corpus();
  for (unsigned seed = 0; seed < 5; ++seed) inputs.push_back({"convex", {test::random_convex(seed, false)}});
  for (unsigned seed = 1; seed <= 5; ++seed) inputs.push_back({"random", {test::random_star_shaped(seed, 15)}});
  std::size_t violations = 0;
  std::string first;
  for (const test::Case& c : inputs) {
    const test::Run r = test::run_engine(c.loops, 0.05, true);
    violations += r.violations.size();
    if (first.empty() && !r.violations.empty()) first = "; first: " + c.name + ": " + r.violations.front();
  }
  report(8, "admissibility", violations == 0,
         std::to_string(violations) + " violations after every increment on " + std::to_string(inputs.size()) +
             " inputs" + first);
}

void journal_determinism() {
  const fs::path dir = fs::temp_directory_path() / "wss-acceptance";
  fs::create_directories(dir);
  const std::vector<test::Case> inputs = {{"L-shape", {ring(test::l_shape())}},
                                          {"U-shape", {ring(test::u_shape())}},
                                          {"square with hole", test::square_with_hole()}};
  int same = 0;
  for (const test::Case& c : inputs) {
    const PolygonDocument doc = to_document(c.loops);
    BatchOptions o;
    o.step = 0.1;
    o.skeleton_path = (dir / "batch.json").string();
    run_batch(doc, o);
    std::ifstream in(o.skeleton_path);
    std::stringstream batch;
    batch << in.rdbuf();

    Service s;
    const std::string id = json::parse(s.handle("POST", "/sessions", serialize(doc)).body)["id"];
    for (int guard = 0; guard < 10000; ++guard) {
      const json r = json::parse(s.handle("POST", "/sessions/" + id + "/step", R"({"dz": 0.1})").body);
      if (r.value("status", "") != "running") break;
    }
    same += s.handle("GET", "/sessions/" + id + "/export", "", {{"format", "json"}}).body == batch.str();
  }
  report(9, "journal determinism", same == static_cast<int>(inputs.size()),
         std::to_string(same) + "/" + std::to_string(inputs.size()) + " batch exports byte-identical to session replays");
}

}  // namespace

int main() {
  unit_square();
  convex_corpus();
  nonconvex_corpus();
  identities();
  step_independence();
  colinear_singularity();
  stationary_extremes();
  admissibility();
  journal_determinism();
  return failures == 0 ? 0 : 1;
}
