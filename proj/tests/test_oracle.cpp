#include "support.hpp"

#include <doctest.h>

using namespace wss;
using test::ring;

namespace {

oracle::Ring weighted(std::vector<Vec2> pts, std::vector<double> w) { return {std::move(pts), std::move(w)}; }

bool has_node(const oracle::ConvexSkeleton& s, const Vec2& p, double t) {
  for (std::size_t i = 0; i < s.nodes.size(); ++i)
    if ((s.nodes[i] - p).norm() < 1e-12 && std::abs(s.times[i] - t) < 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("dense replay: unit square") {
  const double dt = 1e-4;
  const auto r = oracle::dense_replay({weighted(test::unit_square(), {1, 1, 1, 1})}, dt, 1.0);
  REQUIRE_FALSE(r.events.empty());
  CHECK_FALSE(r.inconclusive);
  for (const auto& e : r.events) {
    CHECK_FALSE(e.split);
    CHECK(std::abs(e.t - 0.5) <= dt + 1e-12);
    CHECK((e.location - Vec2(0.5, 0.5)).norm() < 10 * dt);
  }
  CHECK(r.max_speed >= std::sqrt(2.0));
}

TEST_CASE("dense replay: L-shape is self-consistent across dt") {
  const std::vector<oracle::Ring> l = {weighted(test::l_shape(), std::vector<double>(6, 1.0))};
  const auto a = oracle::dense_replay(l, 1e-3, 2.0);
  const auto b = oracle::dense_replay(l, 1e-4, 2.0);
  const auto ca = oracle::cluster_events(a.events, 1e-2);
  const auto cb = oracle::cluster_events(b.events, 1e-2);
  REQUIRE(ca.size() == cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    CHECK(ca[i].has_split == cb[i].has_split);
    CHECK(std::abs(ca[i].t - cb[i].t) < 1e-2);
  }
  bool split = false;
  for (const auto& c : cb) split = split || c.has_split;
  CHECK(split);
}

TEST_CASE("dense replay snapshots") {
  const auto r = oracle::dense_replay({weighted(test::unit_square(), {1, 1, 1, 1})}, 1e-3, 1.0, 100);
  REQUIRE(r.snapshots.size() >= 2);
  CHECK(r.snapshots[0].t == doctest::Approx(0.1));
  for (const Vec2& p : r.snapshots[1].loops.front())
    CHECK(std::abs(std::max(std::abs(p.x() - 0.5), std::abs(p.y() - 0.5)) - 0.3) < 1e-9);
}

TEST_CASE("convex reference: square") {
  const auto s = oracle::convex_bisector_skeleton(weighted(test::unit_square(), {1, 1, 1, 1}));
  CHECK(s.nodes.size() == 5);
  CHECK(has_node(s, Vec2(0.5, 0.5), 0.5));
  CHECK(s.arcs.size() == 4);
}

TEST_CASE("convex reference: rectangle ridge") {
  const auto s = oracle::convex_bisector_skeleton(weighted(test::rectangle(), {1, 1, 1, 1}));
  CHECK(has_node(s, Vec2(0.5, 0.5), 0.5));
  CHECK(has_node(s, Vec2(1.5, 0.5), 0.5));
  CHECK(s.arcs.size() == 5);
}

TEST_CASE("convex reference: heavy left edge") {
  // Left edge at weight 3 meets the right edge at x = 0.75 when t = 0.25.
  const auto s = oracle::convex_bisector_skeleton(weighted(test::unit_square(), {1, 1, 1, 3}));
  CHECK(has_node(s, Vec2(0.75, 0.25), 0.25));
  CHECK(has_node(s, Vec2(0.75, 0.75), 0.25));

  LoopInput in = ring(test::unit_square());
  in.alphas[3] = weight_to_alpha(3.0);
  const test::Run r = test::run_engine({in});
  const auto rep = oracle::compare_convex(test::node_xyt(r.view.graph), test::arc_pairs(r.view.graph), s, 1e-9);
  CHECK(rep.event_sequence_match);
  CHECK(rep.max_position_error < 1e-9);
}

TEST_CASE("convex reference rejects reflex input") {
  CHECK_THROWS(oracle::convex_bisector_skeleton(weighted(test::l_shape(), std::vector<double>(6, 1.0))));
}

TEST_CASE("cluster_events") {
  const std::vector<oracle::ReplayEvent> ev = {
      {0.5, false, Vec2(0, 0)}, {0.1, true, Vec2(1, 1)}, {0.5005, false, Vec2(0, 1)}};
  const auto c = oracle::cluster_events(ev, 1e-3);
  REQUIRE(c.size() == 2);
  CHECK(c[0].has_split);
  CHECK(c[1].locations.size() == 2);
  CHECK_FALSE(c[1].has_split);
}

TEST_CASE("compare_event_sequences") {
  oracle::ReplayResult ref;
  ref.events = {{0.3, true, Vec2(1, 1)}, {0.6, false, Vec2(2, 2)}};
  std::vector<oracle::ReplayEvent> same = ref.events;
  same[0].t += 1e-4;
  CHECK(oracle::compare_event_sequences(same, ref, 1e-3, 1e-3).event_sequence_match);

  std::vector<oracle::ReplayEvent> wrong_kind = ref.events;
  wrong_kind[0].split = false;
  CHECK_FALSE(oracle::compare_event_sequences(wrong_kind, ref, 1e-3, 1e-3).event_sequence_match);

  std::vector<oracle::ReplayEvent> late = ref.events;
  late[1].t += 0.1;
  CHECK_FALSE(oracle::compare_event_sequences(late, ref, 1e-3, 1e-3).event_sequence_match);

  const std::vector<oracle::ReplayEvent> missing = {ref.events[0]};
  CHECK_FALSE(oracle::compare_event_sequences(missing, ref, 1e-3, 1e-3).event_sequence_match);
}

TEST_CASE("compare_convex detects a moved node") {
  const auto ref = oracle::convex_bisector_skeleton(weighted(test::unit_square(), {1, 1, 1, 1}));
  const test::Run r = test::run_engine({ring(test::unit_square())});
  auto nodes = test::node_xyt(r.view.graph);
  const auto arcs = test::arc_pairs(r.view.graph);
  CHECK(oracle::compare_convex(nodes, arcs, ref, 1e-9).event_sequence_match);
  nodes.back() += Vec3(1e-6, 0, 0);
  const auto bad = oracle::compare_convex(nodes, arcs, ref, 1e-9);
  CHECK_FALSE(bad.event_sequence_match);
  CHECK(bad.max_position_error >= 1e-6 * 0.99);
}
