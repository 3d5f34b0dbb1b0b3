// scapula_ik command-line interface: solve, sweep, metrics, gen-db, validate, serve.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scapula_ik/http_server.hpp"
#include "scapula_ik/motion_db.hpp"
#include "scapula_ik/service.hpp"
#include "scapula_ik/solver.hpp"

namespace {

using namespace scapula_ik;

constexpr int kExitFailure = 1;
constexpr int kExitOutOfRange = 2;

struct GlobalOptions {
  std::string db_path;
  std::string method = "squad";
  std::string clamp = "clamp";
  std::string skeleton_path;
};

/// --db, then $SCAPULA_IK_DB, then the built-in synthetic database.
MotionDatabase open_database(const std::string& path) {
  if (!path.empty()) return load_csv(path);
  if (const char* env = std::getenv("SCAPULA_IK_DB"); env != nullptr && *env != '\0') return load_csv(env);
  return generate_synthetic();
}

ServiceContext make_context(const GlobalOptions& g) {
  ServiceContext ctx{open_database(g.db_path), {}, *parse_clamp(g.clamp)};
  if (!g.skeleton_path.empty()) ctx.skeleton = load_skeleton(g.skeleton_path);
  return ctx;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

int run_validate(const std::string& path) {
  const MotionDatabase db = load_csv(path);
  const auto problems = check_invariants(db);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "invalid: " << p << '\n';
    return kExitFailure;
  }
  std::cout << "valid: " << path << '\n'
            << "  source: " << db.metadata().source << '\n'
            << "  cells per joint: " << kThetaKnots * kPsiKnots << " (" << kThetaKnots << " theta x " << kPsiKnots
            << " psi)\n";
  for (JointId j : kJoints)
    std::cout << "  " << to_string(j) << ": " << db.metadata().sequences[index_of(j)].label() << '\n';
  std::cout << "  hemisphere alignment: ok\n  quaternion cache: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven shoulder inverse kinematics"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--db", g.db_path, "Motion database CSV (default: $SCAPULA_IK_DB, else built-in synthetic data)");
  app.add_option("--method", g.method, "Interpolation method")->check(CLI::IsMember({"squad", "slerp"}));
  app.add_option("--clamp", g.clamp, "Out-of-range policy")->check(CLI::IsMember({"clamp", "error"}));
  app.add_option("--skeleton", g.skeleton_path, "Skeleton config JSON");

  auto* solve_cmd = app.add_subcommand("solve", "Solve one pose and print JSON");
  std::string theta_arg, psi_arg;
  solve_cmd->add_option("--theta", theta_arg, "Humerothoracic elevation, degrees")->required();
  solve_cmd->add_option("--psi", psi_arg, "Plane of elevation, degrees")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve along a range and print CSV");
  std::string output_path;
  sweep_cmd->add_option("--theta", theta_arg, "Degrees or start:end:step")->required();
  sweep_cmd->add_option("--psi", psi_arg, "Degrees or start:end:step")->required();
  sweep_cmd->add_option("-o,--output", output_path, "Output file (default stdout)");

  auto* metrics_cmd = app.add_subcommand("metrics", "Compare elbow-trajectory smoothness of squad and slerp");
  std::size_t bench = 0;
  metrics_cmd->add_option("--theta", theta_arg, "Degrees or start:end:step")->required();
  metrics_cmd->add_option("--psi", psi_arg, "Degrees or start:end:step")->required();
  metrics_cmd->add_option("--bench", bench, "Also time this many single-threaded solves");

  auto* gen_cmd = app.add_subcommand("gen-db", "Write the synthetic motion database CSV");
  gen_cmd->add_option("-o,--output", output_path, "Output file (default stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "Load a database and check its invariants");
  std::string validate_path;
  validate_cmd->add_option("path", validate_path, "Database CSV (default: --db)");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFailure;
  }

  try {
    const Method method = *parse_method(g.method);

    if (solve_cmd->parsed()) {
      const ServiceContext ctx = make_context(g);
      const SolveRequest req{parse_degrees(theta_arg, "theta"), parse_degrees(psi_arg, "psi"), method};
      std::cout << to_json(build_solve_response(ctx, req)).dump(2) << '\n';
    } else if (sweep_cmd->parsed()) {
      const ServiceContext ctx = make_context(g);
      const SweepRequest req{parse_range(theta_arg, "theta"), parse_range(psi_arg, "psi"), method};
      write_output(output_path, sweep_csv(run_sweep(ctx, req), ctx.skeleton));
    } else if (metrics_cmd->parsed()) {
      const ServiceContext ctx = make_context(g);
      const SweepRequest req{parse_range(theta_arg, "theta"), parse_range(psi_arg, "psi"), method};
      json report = metrics_report(ctx, req);
      if (bench > 0) report["benchmark"] = to_json(run_benchmark(ctx.db, bench, method));
      std::cout << report.dump(2) << '\n';
    } else if (gen_cmd->parsed()) {
      write_output(output_path, to_csv_string(generate_synthetic()));
    } else if (validate_cmd->parsed()) {
      const std::string path = validate_path.empty() ? g.db_path : validate_path;
      if (path.empty()) throw InvalidArgument("validate needs a database path");
      return run_validate(path);
    } else if (serve_cmd->parsed()) {
      const ServiceContext ctx = make_context(g);
      httplib::Server server;
      install_routes(server, ctx);
      std::cerr << "serving on http://" << host << ':' << port << "/api/\n";
      if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const OutOfRange& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOutOfRange;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
