#include "wss/io.hpp"

#include "wss/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wss {

using nlohmann::json;

double EdgeAttr::alpha() const {
  switch (kind) {
    case Kind::alpha: return value;
    case Kind::weight: return weight_to_alpha(value);
    case Kind::stationary: return kPi / 2;
  }
  return value;
}

bool PolygonDocument::operator==(const PolygonDocument& o) const {
  if (loops.size() != o.loops.size() || schedule.size() != o.schedule.size()) return false;
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (loops[i] != o.loops[i]) return false;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (schedule[i].z != o.schedule[i].z || schedule[i].vz != o.schedule[i].vz) return false;
  return edges == o.edges && start_times == o.start_times;
}

std::size_t PolygonDocument::edge_count() const {
  std::size_t n = 0;
  for (const auto& l : loops) n += l.size();
  return n;
}

namespace {

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "number is not finite");
  return v;
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

std::vector<Vec2> parse_ring(const json& j, const std::string& path) {
  std::vector<Vec2> ring;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    const std::string p = at(path, i);
    const json& pt = array(j[i], p);
    if (pt.size() != 2) throw ParseError(p, "point must have two coordinates");
    ring.emplace_back(number(pt[0], p + "[0]"), number(pt[1], p + "[1]"));
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw ParseError(path, "ring requires ≥3 points");
  return ring;
}

EdgeAttr parse_edge(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  if (j.size() != 1) throw ParseError(path, "exactly one of alpha, weight, stationary required");
  EdgeAttr e;
  if (j.contains("alpha")) {
    e.kind = EdgeAttr::Kind::alpha;
    e.value = number(j["alpha"], path + ".alpha");
    if (!(e.value > 0 && e.value < kPi)) throw ParseError(path + ".alpha", "angle out of range (0, pi)");
  } else if (j.contains("weight")) {
    e.kind = EdgeAttr::Kind::weight;
    e.value = number(j["weight"], path + ".weight");
  } else if (j.contains("stationary")) {
    if (j["stationary"] != true) throw ParseError(path + ".stationary", "must be true");
    e.kind = EdgeAttr::Kind::stationary;
    e.value = 0.0;
  } else {
    throw ParseError(path, "exactly one of alpha, weight, stationary required");
  }
  return e;
}

}  // namespace

PolygonDocument document_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("$", "expected an object");
  for (const auto& [key, _] : j.items())
    if (key != "loops" && key != "edges" && key != "schedule" && key != "start_times")
      throw ParseError("$." + key, "unknown field");
  PolygonDocument doc;
  if (!j.contains("loops")) throw ParseError("$.loops", "missing");
  const json& loops = array(j["loops"], "$.loops");
  if (loops.empty()) throw ParseError("$.loops", "at least one loop required");
  for (std::size_t i = 0; i < loops.size(); ++i) doc.loops.push_back(parse_ring(loops[i], at("$.loops", i)));

  const std::size_t n = doc.edge_count();
  if (!j.contains("edges")) throw ParseError("$.edges", "missing");
  const json& edges = array(j["edges"], "$.edges");
  if (edges.size() != n)
    throw ParseError("$.edges", "count mismatch: " + std::to_string(edges.size()) + " attributes for " +
                                    std::to_string(n) + " edges");
  for (std::size_t i = 0; i < n; ++i) doc.edges.push_back(parse_edge(edges[i], at("$.edges", i)));

  if (j.contains("schedule")) {
    const json& s = array(j["schedule"], "$.schedule");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = at("$.schedule", i);
      if (!s[i].is_object() || !s[i].contains("z") || !s[i].contains("vz"))
        throw ParseError(p, "expected {\"z\", \"vz\"}");
      HeightSchedule::Breakpoint b{number(s[i]["z"], p + ".z"), number(s[i]["vz"], p + ".vz")};
      if (b.z < 0) throw ParseError(p + ".z", "height must be non-negative");
      if (!(b.vz > 0)) throw ParseError(p + ".vz", "vertical speed must be positive");
      if (!doc.schedule.empty() && !(b.z > doc.schedule.back().z))
        throw ParseError(p + ".z", "heights must increase");
      doc.schedule.push_back(b);
    }
  }
  if (j.contains("start_times")) {
    const json& s = array(j["start_times"], "$.start_times");
    if (s.size() != n)
      throw ParseError("$.start_times", "count mismatch: " + std::to_string(s.size()) + " values for " +
                                            std::to_string(n) + " edges");
    for (std::size_t i = 0; i < n; ++i) {
      const double t = number(s[i], at("$.start_times", i));
      if (t < 0) throw ParseError(at("$.start_times", i), "start time must be non-negative");
      doc.start_times.push_back(t);
    }
  }
  return doc;
}

PolygonDocument parse_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("malformed JSON: ") + e.what());
  }
  return document_from_json(j);
}

json document_to_json(const PolygonDocument& doc) {
  json j;
  j["loops"] = json::array();
  for (const auto& ring : doc.loops) {
    json r = json::array();
    for (const Vec2& p : ring) r.push_back({p.x(), p.y()});
    j["loops"].push_back(r);
  }
  j["edges"] = json::array();
  for (const EdgeAttr& e : doc.edges) {
    switch (e.kind) {
      case EdgeAttr::Kind::alpha: j["edges"].push_back({{"alpha", e.value}}); break;
      case EdgeAttr::Kind::weight: j["edges"].push_back({{"weight", e.value}}); break;
      case EdgeAttr::Kind::stationary: j["edges"].push_back({{"stationary", true}}); break;
    }
  }
  if (!doc.schedule.empty()) {
    j["schedule"] = json::array();
    for (const auto& b : doc.schedule) j["schedule"].push_back({{"z", b.z}, {"vz", b.vz}});
  }
  if (!doc.start_times.empty()) j["start_times"] = doc.start_times;
  return j;
}

std::string serialize(const PolygonDocument& doc) { return document_to_json(doc).dump(2) + "\n"; }

std::vector<LoopInput> to_loop_inputs(const PolygonDocument& doc) {
  std::vector<LoopInput> out;
  std::size_t k = 0;
  for (const auto& ring : doc.loops) {
    LoopInput l;
    l.points = ring;
    for (std::size_t i = 0; i < ring.size(); ++i, ++k) {
      l.alphas.push_back(doc.edges.at(k).alpha());
      if (!doc.start_times.empty()) l.start_times.push_back(doc.start_times.at(k));
    }
    out.push_back(std::move(l));
  }
  return out;
}

HeightSchedule to_schedule(const PolygonDocument& doc) {
  return doc.schedule.empty() ? HeightSchedule{} : HeightSchedule(doc.schedule);
}

std::unique_ptr<Engine> make_engine(const PolygonDocument& doc, EngineOptions opts) {
  return std::make_unique<Engine>(to_loop_inputs(doc), to_schedule(doc), std::move(opts));
}

json skeleton_to_json(const SkeletonView& view) {
  const SkeletonGraph& g = view.graph;
  json j;
  j["input_edges"] = g.input_edge_count;
  j["nodes"] = json::array();
  int terminal = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const SkeletonNode& n = g.nodes[i];
    if (n.kind == NodeKind::terminal) ++terminal;
    j["nodes"].push_back({{"id", i},
                          {"x", n.pos.x()},
                          {"y", n.pos.y()},
                          {"z", n.z},
                          {"t", n.t},
                          {"kind", to_string(n.kind)}});
  }
  j["arcs"] = json::array();
  for (const SkeletonArc& a : g.arcs) j["arcs"].push_back({{"from", a.a}, {"to", a.b}, {"vertex", a.vertex}});
  j["faces"] = json::array();
  for (const SkeletonFace& f : g.faces) j["faces"].push_back({{"edge", f.edge}, {"nodes", f.nodes}, {"area", f.area}});
  j["interior_nodes"] = g.interior_node_count();
  j["terminal_nodes"] = terminal;
  return j;
}

std::string skeleton_json_text(const SkeletonView& view) { return skeleton_to_json(view).dump(2) + "\n"; }

namespace {

const char* kind_color(NodeKind k) {
  switch (k) {
    case NodeKind::input: return "black";
    case NodeKind::collapse: return "#1f77b4";
    case NodeKind::split: return "#d62728";
    case NodeKind::colinear: return "#2ca02c";
    case NodeKind::terminal: return "#9467bd";
    case NodeKind::edit: return "#ff7f0e";
  }
  return "black";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string render_svg(const SkeletonView& view) {
  Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
  for (const SkeletonNode& n : view.graph.nodes) {
    lo = lo.cwiseMin(n.pos);
    hi = hi.cwiseMax(n.pos);
  }
  for (const auto& s : view.snapshots)
    for (const auto& ring : s.loops)
      for (const Vec2& p : ring) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
  if (!(hi.x() >= lo.x())) lo = hi = Vec2::Zero();
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const double size = 800.0, pad = 20.0, k = size / extent;
  const double width = (hi.x() - lo.x()) * k + 2 * pad, height = (hi.y() - lo.y()) * k + 2 * pad;
  auto X = [&](const Vec2& p) { return fmt((p.x() - lo.x()) * k + pad); };
  auto Y = [&](const Vec2& p) { return fmt((hi.y() - p.y()) * k + pad); };
  auto polygon = [&](const std::vector<Vec2>& ring, const std::string& style) {
    std::string s = "<polygon points=\"";
    for (const Vec2& p : ring) s += X(p) + "," + Y(p) + " ";
    return s + "\" " + style + "/>\n";
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
    << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
  o << "<g id=\"input\" fill=\"none\" stroke=\"black\" stroke-width=\"2\">\n";
  if (!view.snapshots.empty())
    for (const auto& ring : view.snapshots.front().loops) o << polygon(ring, "");
  o << "</g>\n<g id=\"offsets\" fill=\"none\" stroke-width=\"1\">\n";
  const std::size_t ns = view.snapshots.size();
  for (std::size_t i = 1; i < ns; ++i) {
    const int grey = static_cast<int>(60 + 160.0 * static_cast<double>(i) / static_cast<double>(ns));
    const std::string style = "stroke=\"rgb(" + std::to_string(grey) + "," + std::to_string(grey) + "," +
                              std::to_string(grey) + ")\"";
    for (const auto& ring : view.snapshots[i].loops) o << polygon(ring, style);
  }
  o << "</g>\n<g id=\"arcs\" stroke=\"red\" stroke-width=\"1.5\">\n";
  for (const SkeletonArc& a : view.graph.arcs) {
    const Vec2& p = view.graph.nodes[static_cast<std::size_t>(a.a)].pos;
    const Vec2& q = view.graph.nodes[static_cast<std::size_t>(a.b)].pos;
    o << "<line x1=\"" << X(p) << "\" y1=\"" << Y(p) << "\" x2=\"" << X(q) << "\" y2=\"" << Y(q) << "\"/>\n";
  }
  o << "</g>\n<g id=\"nodes\">\n";
  for (std::size_t i = 0; i < view.graph.nodes.size(); ++i) {
    const SkeletonNode& n = view.graph.nodes[i];
    o << "<circle class=\"" << to_string(n.kind) << "\" cx=\"" << X(n.pos) << "\" cy=\"" << Y(n.pos)
      << "\" r=\"4\" fill=\"" << kind_color(n.kind) << "\"><title>node " << i << " " << to_string(n.kind)
      << " z=" << fmt(n.z) << "</title></circle>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::string render_obj(const SkeletonGraph& graph) {
  std::string out = "# roof faces, z up\n";
  char buf[96];
  for (const SkeletonNode& n : graph.nodes) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", n.pos.x(), n.pos.y(), n.z);
    out += buf;
  }
  for (const SkeletonFace& f : graph.faces) {
    out += "f";
    for (int v : f.nodes) out += " " + std::to_string(v + 1);
    out += "\n";
  }
  return out;
}

namespace {

bool has_delayed_edges(const PolygonDocument& doc) {
  return std::any_of(doc.start_times.begin(), doc.start_times.end(), [](double t) { return t > 0; });
}

std::string fmt_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

OracleCheck oracle_check(const PolygonDocument& doc, const std::vector<oracle::ReplayEvent>& events,
                         const SkeletonView& view) {
  OracleCheck out;
  if (has_delayed_edges(doc)) {
    out.summary = "skipped: the replay does not model delayed edge starts";
    return out;
  }
  std::vector<oracle::Ring> rings;
  Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
  std::size_t k = 0;
  for (const auto& ring : doc.loops) {
    oracle::Ring r;
    r.points = ring;
    for (std::size_t i = 0; i < ring.size(); ++i, ++k) {
      const EdgeAttr& e = doc.edges[k];
      r.weights.push_back(e.kind == EdgeAttr::Kind::stationary ? 0.0
                          : e.kind == EdgeAttr::Kind::weight   ? e.value
                                                               : alpha_to_weight(e.value));
    }
    for (const Vec2& p : ring) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    rings.push_back(std::move(r));
  }
  const double scale = std::max((hi - lo).maxCoeff(), 1e-300);
  double t_end = 0.0;
  for (const SkeletonNode& n : view.graph.nodes) t_end = std::max(t_end, n.t);
  const double dt_small = 1e-4 * scale;
  const oracle::ReplayResult replay = oracle::dense_replay(rings, dt_small, 1.2 * t_end + 20 * dt_small);
  out.ran = true;
  if (replay.inconclusive) {
    out.summary = "replay inconclusive: " + replay.notes;
    return out;
  }
  const double tol = 10 * dt_small * std::max(1.0, replay.max_speed);
  const oracle::OracleReport rep = oracle::compare_event_sequences(events, replay, tol, tol);
  out.ok = rep.event_sequence_match;
  out.summary = std::string("replay ") + (rep.event_sequence_match ? "match" : "MISMATCH") +
                " time_err=" + fmt_err(rep.max_time_error) + " pos_err=" + fmt_err(rep.max_position_error);
  if (!rep.notes.empty()) out.summary += " (" + rep.notes + ")";

  if (rings.size() == 1) {
    oracle::ConvexSkeleton ref;
    try {
      ref = oracle::convex_bisector_skeleton(rings.front());
    } catch (const std::invalid_argument&) {
      return out;
    }
    std::vector<Vec3> nodes;
    for (const SkeletonNode& n : view.graph.nodes) nodes.emplace_back(n.pos.x(), n.pos.y(), n.t);
    std::vector<std::pair<int, int>> arcs;
    for (const SkeletonArc& a : view.graph.arcs) arcs.emplace_back(a.a, a.b);
    const oracle::OracleReport c = oracle::compare_convex(nodes, arcs, ref, 1e-9 * scale);
    out.ok = out.ok && c.event_sequence_match;
    out.summary += std::string("; convex ") + (c.event_sequence_match ? "match" : "MISMATCH") +
                   " pos_err=" + fmt_err(c.max_position_error);
    if (!c.notes.empty()) out.summary += " (" + c.notes + ")";
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

BatchOutcome run_batch(const PolygonDocument& doc, const BatchOptions& opts) {
  BatchOutcome out;
  std::unique_ptr<Engine> engine;
  try {
    if (!(opts.step > 0)) throw GeometryError("step must be positive");
    EngineOptions eo;
    eo.tol = opts.tol;
    eo.max_z = opts.max_z;
    engine = make_engine(doc, eo);
  } catch (const std::exception& e) {
    out.exit_code = kExitInput;
    out.message = e.what();
    return out;
  }

  try {
    while (engine->status() == RunStatus::running) {
      out.steps.push_back(opts.step);
      const AdvanceResult r = engine->advance(opts.step, true);
      for (const KineticEvent& e : r.events)
        out.events.push_back({engine->t(), e.kind == EventKind::split, e.location});
    }
  } catch (const RobustnessFault&) {
  }
  out.status = engine->status();

  if (out.status == RunStatus::faulted) {
    out.exit_code = kExitFault;
    out.message = "robustness fault: " + engine->fault_message() + "; dump written to " + opts.dump_path;
    write_file(opts.dump_path, engine->fault_message() + "\n" + engine->fault_dump());
    return out;
  }
  const SkeletonView view = engine->view();
  if (!opts.skeleton_path.empty()) write_file(opts.skeleton_path, skeleton_json_text(view));
  if (!opts.svg_path.empty()) write_file(opts.svg_path, render_svg(view));
  if (!opts.obj_path.empty()) write_file(opts.obj_path, render_obj(view.graph));
  if (opts.oracle_check) out.oracle = oracle_check(doc, out.events, view);

  if (out.status == RunStatus::runaway) {
    out.exit_code = kExitRunaway;
    out.message = "no termination below z=" + fmt_err(engine->z()) + "; pass a maximum height";
  } else {
    out.message = engine->reached_max_z() ? "reached maximum height" : "terminated";
  }
  return out;
}

}  // namespace wss
