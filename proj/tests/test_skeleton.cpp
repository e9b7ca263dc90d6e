#include "support.hpp"

#include <doctest.h>

using namespace wss;
using test::ring;

namespace {

int count_kind(const SkeletonGraph& g, NodeKind k) {
  int n = 0;
  for (const SkeletonNode& node : g.nodes) n += node.kind == k;
  return n;
}

const std::vector<Vec2> kNotch = {{0, 0}, {4, 0}, {4, 2}, {2.5, 2}, {2, 1}, {1.5, 2}, {0, 2}};

}  // namespace

TEST_CASE("height schedule") {
  const HeightSchedule constant;
  CHECK(constant.z_of_t(0.7) == 0.7);
  CHECK(constant.t_of_z(0.7) == 0.7);

  const HeightSchedule two_band({{0.0, 1.0}, {0.25, 0.5}});
  CHECK(two_band.z_of_t(0.25) == doctest::Approx(0.25));
  CHECK(two_band.z_of_t(0.5) == doctest::Approx(0.375));
  CHECK(two_band.t_of_z(0.375) == doctest::Approx(0.5));
  CHECK(two_band.vz_at_time(0.1) == 1.0);
  CHECK(two_band.vz_at_time(0.3) == 0.5);
  REQUIRE(two_band.knot_times().size() >= 1);
  CHECK(two_band.knot_times().back() == doctest::Approx(0.25));

  const HeightSchedule doubled = two_band.scaled(2.0);
  CHECK(doubled.z_of_t(1.0) == doctest::Approx(0.75));
}

TEST_CASE("square skeleton") {
  const test::Run r = test::run_engine({ring(test::unit_square())});
  const SkeletonGraph& g = r.view.graph;
  CHECK(g.arcs.size() == 4);
  CHECK(count_kind(g, NodeKind::collapse) == 1);
  for (const SkeletonNode& n : g.nodes) {
    if (n.kind == NodeKind::input) CHECK(n.z == 0.0);
    if (n.kind == NodeKind::collapse) {
      CHECK((n.pos - Vec2(0.5, 0.5)).norm() < 1e-12);
      CHECK(std::abs(n.z - 0.5) < 1e-12);
    }
  }
  REQUIRE(g.faces.size() == 4);
  for (const SkeletonFace& f : g.faces) {
    CHECK(f.nodes.size() == 3);
    CHECK(std::abs(f.area - 0.25) < 1e-12);
  }
}

TEST_CASE("no-event increments only extend arcs") {
  Engine e({ring(test::unit_square())}, HeightSchedule{});
  e.advance(0.2);
  const SkeletonView v1 = e.view();
  e.advance(0.1);
  const SkeletonView v2 = e.view();
  // Open arcs are closed at the current height; nothing else is added.
  CHECK(count_kind(v1.graph, NodeKind::collapse) == 0);
  CHECK(count_kind(v2.graph, NodeKind::collapse) == 0);
  CHECK(v1.graph.arcs.size() == v2.graph.arcs.size());
  CHECK(v1.graph.nodes.size() == v2.graph.nodes.size());
}

TEST_CASE("rectangle ridge") {
  const test::Run r = test::run_engine({ring(test::rectangle())});
  const SkeletonGraph& g = r.view.graph;
  std::vector<Vec2> interior;
  for (const SkeletonNode& n : g.nodes)
    if (n.kind != NodeKind::input) interior.push_back(n.pos);
  REQUIRE(interior.size() == 2);
  std::sort(interior.begin(), interior.end(), [](const Vec2& a, const Vec2& b) { return a.x() < b.x(); });
  CHECK((interior[0] - Vec2(0.5, 0.5)).norm() < 1e-12);
  CHECK((interior[1] - Vec2(1.5, 0.5)).norm() < 1e-12);
  CHECK(g.arcs.size() == 5);
  REQUIRE(g.faces.size() == 4);
  int triangles = 0, trapezoids = 0;
  for (const SkeletonFace& f : g.faces) {
    triangles += f.nodes.size() == 3;
    trapezoids += f.nodes.size() == 4;
  }
  CHECK(triangles == 2);
  CHECK(trapezoids == 2);
  CHECK(test::face_area_sum(g) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("L-shape faces partition the polygon") {
  const test::Run r = test::run_engine({ring(test::l_shape())});
  CHECK(r.view.graph.faces.size() == 6);
  CHECK(std::abs(test::face_area_sum(r.view.graph) - 3.0) < 1e-9);
}

TEST_CASE("split node is shared by the penetrated face and the notch faces") {
  const test::Run r = test::run_engine({ring(kNotch)});
  const SkeletonGraph& g = r.view.graph;
  int split = -1;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].kind == NodeKind::split) split = static_cast<int>(i);
  REQUIRE(split >= 0);
  int sharing = 0;
  for (const SkeletonFace& f : g.faces)
    if (std::find(f.nodes.begin(), f.nodes.end(), split) != f.nodes.end()) {
      ++sharing;
      CHECK((f.edge == 0 || f.edge == 3 || f.edge == 4));
    }
  CHECK(sharing == 3);
  CHECK(std::abs(test::face_area_sum(g) - 7.5) < 1e-9);
}

TEST_CASE("roof mesh heights") {
  SUBCASE("constant v_z = 1") {
    const test::Run r = test::run_engine({ring(test::unit_square())});
    double top = 0;
    for (const Vec3& p : r.view.mesh.vertices) top = std::max(top, p.z());
    CHECK(std::abs(top - 0.5) < 1e-12);
  }
  SUBCASE("v_z = 2 keeps the plan and doubles heights") {
    const test::Run a = test::run_engine({ring(test::unit_square())});
    const test::Run b = test::run_engine({ring(test::unit_square())}, 0.1, false, HeightSchedule({{0.0, 2.0}}));
    REQUIRE(a.view.graph.nodes.size() == b.view.graph.nodes.size());
    for (std::size_t i = 0; i < a.view.graph.nodes.size(); ++i)
      CHECK((a.view.graph.nodes[i].pos - b.view.graph.nodes[i].pos).norm() < 1e-12);
    double top = 0;
    for (const Vec3& p : b.view.mesh.vertices) top = std::max(top, p.z());
    CHECK(std::abs(top - 1.0) < 1e-12);
  }
  SUBCASE("two bands kink at the band boundary") {
    const test::Run b =
        test::run_engine({ring(test::unit_square())}, 0.1, false, HeightSchedule({{0.0, 1.0}, {0.25, 0.5}}));
    double top = 0;
    bool band = false;
    for (const Vec3& p : b.view.mesh.vertices) {
      top = std::max(top, p.z());
      band = band || std::abs(p.z() - 0.25) < 1e-12;
    }
    CHECK(std::abs(top - 0.375) < 1e-12);
    CHECK(band);
    // Planar arcs do not depend on the schedule.
    for (const SkeletonNode& n : b.view.graph.nodes)
      if (n.kind == NodeKind::collapse) CHECK((n.pos - Vec2(0.5, 0.5)).norm() < 1e-12);
  }
}

TEST_CASE("is_terminated") {
  Wavefront sq = Wavefront::build({ring(test::unit_square())});
  sq.update_velocities(1.0);
  CHECK_FALSE(is_terminated(sq));
  step(sq, 1.0, nullptr);
  CHECK(is_terminated(sq));

  Wavefront rect = Wavefront::build({ring(test::rectangle())});
  rect.update_velocities(1.0);
  step(rect, 1.0, nullptr);
  CHECK(is_terminated(rect));

  Wavefront notch = Wavefront::build({ring(kNotch)});
  notch.update_velocities(1.0);
  step(notch, 1.0, nullptr);
  CHECK(notch.loops().size() == 2);
  CHECK_FALSE(is_terminated(notch));
}

TEST_CASE("triangulate_polygon") {
  const std::vector<Vec2> l = test::l_shape();
  const auto tris = triangulate_polygon(l);
  CHECK(tris.size() == l.size() - 2);
  double area = 0;
  for (const auto& t : tris)
    area += std::abs(cross2<double>(l[static_cast<std::size_t>(t[1])] - l[static_cast<std::size_t>(t[0])],
                                    l[static_cast<std::size_t>(t[2])] - l[static_cast<std::size_t>(t[0])])) / 2;
  CHECK(area == doctest::Approx(3.0));
}
