#include "wss/io.hpp"
#include "wss/session.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted straight skeleton by wavefront propagation"};
  app.require_subcommand(1);

  std::string input;
  wss::BatchOptions opts;
  double max_z = 0;
  double eps = 0;
  std::string dump;
  CLI::App* build = app.add_subcommand("build", "Propagate a polygon document to termination");
  build->add_option("input", input, "Polygon document (JSON)")->required();
  build->add_option("--step", opts.step, "Height increment per step")->required();
  build->add_option("--max-z", max_z, "Stop at this height");
  build->add_option("--skeleton", opts.skeleton_path, "Write skeleton JSON");
  build->add_option("--svg", opts.svg_path, "Write layered SVG");
  build->add_option("--obj", opts.obj_path, "Write roof mesh OBJ");
  build->add_option("--dump", dump, "Fault dump path (default <input>.fault.txt)");
  build->add_option("--eps", eps, "Geometric tolerance in the normalized frame");
  build->add_flag("--oracle-check", opts.oracle_check, "Compare events against the brute-force oracles");

  int port = 8080;
  CLI::App* serve = app.add_subcommand("serve", "Run the session service on 127.0.0.1");
  serve->add_option("--port", port, "Port");

  CLI11_PARSE(app, argc, argv);

  if (*serve) {
    wss::Service service;
    std::signal(SIGINT, [](int) { wss::stop_serving(); });
    std::signal(SIGTERM, [](int) { wss::stop_serving(); });
    try {
      wss::serve(service, port, [](int p) { std::cerr << "listening on 127.0.0.1:" << p << "\n"; });
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }

  wss::PolygonDocument doc;
  try {
    doc = wss::parse_document(read_file(input));
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return wss::kExitInput;
  }
  if (build->count("--max-z")) opts.max_z = max_z;
  if (build->count("--eps")) opts.tol.eps_geom = eps;
  opts.dump_path = dump.empty() ? input + ".fault.txt" : dump;

  wss::BatchOutcome out;
  try {
    out = wss::run_batch(doc, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "status: " << wss::to_string(out.status) << " after " << out.steps.size() << " steps, "
            << out.events.size() << " events\n";
  if (out.oracle.ran || !out.oracle.summary.empty()) std::cout << "oracle: " << out.oracle.summary << "\n";
  if (out.exit_code != wss::kExitOk) std::cerr << out.message << "\n";
  return out.exit_code;
}
