#pragma once
// Transport-facing layer shared by the CLI and the HTTP server: request
// parsing, JSON/CSV rendering, elbow-trajectory smoothness metrics and
// API routing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scapula_ik/errors.hpp"
#include "scapula_ik/motion_db.hpp"
#include "scapula_ik/quaternion.hpp"
#include "scapula_ik/shoulder.hpp"
#include "scapula_ik/solver.hpp"

namespace scapula_ik {

using json = nlohmann::json;

/// Rounds to 9 significant digits so emitted JSON is reproducible.
inline double round9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline std::string format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", round9(v));
  return buf;
}

inline std::optional<Method> parse_method(std::string_view s) noexcept {
  if (s == "squad") return Method::Squad;
  if (s == "slerp") return Method::Slerp;
  return std::nullopt;
}

inline std::optional<ClampPolicy> parse_clamp(std::string_view s) noexcept {
  if (s == "clamp") return ClampPolicy::Clamp;
  if (s == "error") return ClampPolicy::Error;
  return std::nullopt;
}

inline double parse_degrees(std::string_view s, std::string_view what) {
  const auto v = detail::parse_number(s);
  if (!v) throw InvalidArgument("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return *v;
}

/// Parses `start:end:step` or a single value (a zero-length range).
inline DegreeRange parse_range(std::string_view s, std::string_view what) {
  const auto parts = detail::split(s, ':');
  if (parts.size() == 1) {
    const double v = parse_degrees(parts[0], what);
    return {v, v, 1.0};
  }
  if (parts.size() != 3) throw InvalidArgument(std::string(what) + " range must be start:end:step");
  DegreeRange r{parse_degrees(parts[0], what), parse_degrees(parts[1], what), parse_degrees(parts[2], what)};
  r.samples();  // validates
  return r;
}

inline json vec_json(Vec3 v) { return json::array({round9(v.x), round9(v.y), round9(v.z)}); }

// --- skeleton configuration -------------------------------------------------

inline json skeleton_to_json(const SkeletonConfig& cfg) {
  return {{"clavicle_length", round9(cfg.clavicle_length)},
          {"scapula_offset", vec_json(cfg.scapula_offset)},
          {"humerus_length", round9(cfg.humerus_length)},
          {"thorax_origin", vec_json(cfg.thorax_origin)}};
}

/// Missing keys keep their defaults.
inline SkeletonConfig skeleton_from_json(const json& j) {
  SkeletonConfig cfg;
  const auto vec = [](const json& v) {
    if (!v.is_array() || v.size() != 3) throw InvalidArgument("skeleton vectors must be [x, y, z]");
    return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  };
  try {
    if (!j.is_object()) throw InvalidArgument("skeleton config must be a JSON object");
    if (j.contains("clavicle_length")) cfg.clavicle_length = j.at("clavicle_length").get<double>();
    if (j.contains("humerus_length")) cfg.humerus_length = j.at("humerus_length").get<double>();
    if (j.contains("scapula_offset")) cfg.scapula_offset = vec(j.at("scapula_offset"));
    if (j.contains("thorax_origin")) cfg.thorax_origin = vec(j.at("thorax_origin"));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("skeleton config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline SkeletonConfig load_skeleton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open skeleton config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("skeleton config '" + path + "': " + e.what());
  }
  return skeleton_from_json(j);
}

// --- solve ------------------------------------------------------------------

struct SolveRequest {
  double theta = 15.0;
  double psi = 0.0;
  Method method = Method::Squad;
};

struct JointReport {
  UnitQuaternion quaternion;
  EulerDecomposition euler;
};

struct SolveResponse {
  SolveRequest request;
  Solution solution;
  std::array<JointReport, 3> joints;
  LandmarkSet landmarks;
};

/// Service context: immutable after construction, shared by all requests.
struct ServiceContext {
  MotionDatabase db;
  SkeletonConfig skeleton{};
  ClampPolicy clamp = ClampPolicy::Clamp;
};

inline SolveResponse build_solve_response(const ServiceContext& ctx, const SolveRequest& req) {
  SolveResponse r;
  r.request = req;
  r.solution = solve_detailed(ctx.db, {req.theta, req.psi}, {req.method, ctx.clamp});
  for (JointId j : kJoints) {
    // Report the w >= 0 representative.
    const UnitQuaternion q = align_hemisphere(UnitQuaternion::identity(), r.solution.pose[j]);
    r.joints[index_of(j)] = {q, quat_to_euler(q, ctx.db.metadata().sequences[index_of(j)])};
  }
  r.landmarks = forward_kinematics(r.solution.pose, ctx.skeleton);
  return r;
}

inline json to_json(const SolveResponse& r) {
  json joints = json::object();
  for (JointId j : kJoints) {
    const JointReport& jr = r.joints[index_of(j)];
    const auto& q = jr.quaternion;
    const auto& e = jr.euler.angles;
    joints[std::string(to_string(j))] = {
        {"quaternion", json::array({round9(q.w()), round9(q.x()), round9(q.y()), round9(q.z())})},
        {"euler",
         {{"sequence", e.sequence.label()},
          {"angles_deg", json::array({round9(e.a1), round9(e.a2), round9(e.a3)})},
          {"gimbal_degenerate", jr.euler.gimbal_degenerate}}}};
  }
  const auto& s = r.solution;
  return {{"theta", round9(s.input.theta)},
          {"psi", round9(s.input.psi)},
          {"requested", {{"theta", round9(r.request.theta)}, {"psi", round9(r.request.psi)}}},
          {"method", std::string(to_string(r.request.method))},
          {"clamped", s.clamped},
          {"cell", {{"i", s.cell.i}, {"j", s.cell.j}, {"t_theta", round9(s.cell.t_theta)}, {"t_psi", round9(s.cell.t_psi)}}},
          {"joints", joints},
          {"landmarks",
           {{"sc", vec_json(r.landmarks.sc)},
            {"ac", vec_json(r.landmarks.ac)},
            {"gh", vec_json(r.landmarks.gh)},
            {"elbow", vec_json(r.landmarks.elbow)}}}};
}

// --- sweep ------------------------------------------------------------------

/// A sweep varies one angle while the other is a single value.
struct SweepRequest {
  DegreeRange theta;
  DegreeRange psi;
  Method method = Method::Squad;

  SweepAxis axis() const {
    const bool theta_fixed = theta.start == theta.end;
    const bool psi_fixed = psi.start == psi.end;
    if (!theta_fixed && !psi_fixed) throw InvalidArgument("sweep one of theta or psi; the other must be a single value");
    return theta_fixed && !psi_fixed ? SweepAxis::Psi : SweepAxis::Theta;
  }
  double fixed() const { return axis() == SweepAxis::Theta ? psi.start : theta.start; }
  const DegreeRange& range() const { return axis() == SweepAxis::Theta ? theta : psi; }
  double parameter(const PoseInput& in) const { return axis() == SweepAxis::Theta ? in.theta : in.psi; }
};

inline std::vector<SweepSample> run_sweep(const ServiceContext& ctx, const SweepRequest& req) {
  return sweep(ctx.db, req.axis(), req.fixed(), req.range(), {req.method, ctx.clamp});
}

inline constexpr std::string_view kSweepCsvHeader = "theta_deg,psi_deg,joint,qw,qx,qy,qz,elbow_x,elbow_y,elbow_z";

/// One row per (sample, joint), ordered by the sweep parameter then SC, AC, GH.
inline std::string sweep_csv(const std::vector<SweepSample>& samples, const SkeletonConfig& cfg) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  for (const SweepSample& s : samples) {
    const Vec3 elbow = forward_kinematics(s.pose, cfg).elbow;
    for (JointId j : kJoints) {
      const UnitQuaternion& q = s.pose[j];
      out << format9(s.input.theta) << ',' << format9(s.input.psi) << ',' << to_string(j) << ',' << format9(q.w())
          << ',' << format9(q.x()) << ',' << format9(q.y()) << ',' << format9(q.z()) << ',' << format9(elbow.x)
          << ',' << format9(elbow.y) << ',' << format9(elbow.z) << '\n';
    }
  }
  return out.str();
}

// --- smoothness metrics -----------------------------------------------------

struct KnotSecondDifference {
  double parameter = 0.0;
  double magnitude = 0.0;
};

/// Discrete second differences |p[k+1] - 2 p[k] + p[k-1]| of the elbow path.
struct SmoothnessReport {
  Method method = Method::Squad;
  std::vector<double> parameters;
  std::vector<Vec3> elbow;
  std::vector<double> second_differences;
  double max_second_difference = 0.0;
  double mean_second_difference = 0.0;
  std::vector<KnotSecondDifference> at_knots;
};

inline SmoothnessReport smoothness(const ServiceContext& ctx, SweepRequest req, Method method) {
  req.method = method;
  const auto samples = run_sweep(ctx, req);
  if (samples.size() < 3) throw InvalidArgument("need >= 3 samples for second differences");
  const SweepAxis axis = req.axis();
  const auto& knots = axis == SweepAxis::Theta ? std::vector<double>(ctx.db.axes().theta_knots.begin(),
                                                                     ctx.db.axes().theta_knots.end())
                                               : std::vector<double>(ctx.db.axes().psi_knots.begin(),
                                                                     ctx.db.axes().psi_knots.end());
  SmoothnessReport rep;
  rep.method = method;
  for (const auto& s : samples) {
    rep.parameters.push_back(req.parameter(s.input));
    rep.elbow.push_back(forward_kinematics(s.pose, ctx.skeleton).elbow);
  }
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < rep.elbow.size(); ++k) {
    const double m = norm(rep.elbow[k + 1] - 2.0 * rep.elbow[k] + rep.elbow[k - 1]);
    rep.second_differences.push_back(m);
    rep.max_second_difference = std::max(rep.max_second_difference, m);
    sum += m;
    for (double knot : knots)
      if (std::abs(rep.parameters[k] - knot) < 1e-9) rep.at_knots.push_back({rep.parameters[k], m});
  }
  rep.mean_second_difference = sum / static_cast<double>(rep.second_differences.size());
  return rep;
}

inline json to_json(const SmoothnessReport& rep) {
  json elbow = json::array();
  for (Vec3 p : rep.elbow) elbow.push_back(vec_json(p));
  json knots = json::array();
  for (const auto& k : rep.at_knots) knots.push_back({{"parameter", round9(k.parameter)}, {"second_difference", round9(k.magnitude)}});
  json params = json::array();
  for (double p : rep.parameters) params.push_back(round9(p));
  return {{"method", std::string(to_string(rep.method))},
          {"samples", rep.elbow.size()},
          {"max_second_difference", round9(rep.max_second_difference)},
          {"mean_second_difference", round9(rep.mean_second_difference)},
          {"knots", knots},
          {"parameters", params},
          {"elbow", elbow}};
}

struct BenchmarkResult {
  std::size_t solves = 0;
  Method method = Method::Squad;
  double seconds = 0.0;
  double checksum = 0.0;

  double microseconds_per_solve() const { return solves == 0 ? 0.0 : 1e6 * seconds / static_cast<double>(solves); }
};

/// Times `count` single-threaded solves at quasi-random poses covering the grid.
inline BenchmarkResult run_benchmark(const MotionDatabase& db, std::size_t count, Method method = Method::Squad) {
  const GridAxes& axes = db.axes();
  constexpr double kG1 = 0.7548776662466927;  // plastic-number R2 sequence
  constexpr double kG2 = 0.5698402909980532;
  BenchmarkResult res;
  res.solves = count;
  res.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t n = 0; n < count; ++n) {
    const double u = std::fmod(0.5 + kG1 * static_cast<double>(n), 1.0);
    const double v = std::fmod(0.5 + kG2 * static_cast<double>(n), 1.0);
    const PoseInput in{axes.theta_min() + u * (axes.theta_max() - axes.theta_min()),
                       axes.psi_min() + v * (axes.psi_max() - axes.psi_min())};
    const ShoulderPose p = solve(db, in, {method, ClampPolicy::Clamp});
    res.checksum += p.q_sc.w() + p.q_ac.w() + p.q_gh.w();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline json to_json(const BenchmarkResult& b) {
  return {{"solves", b.solves},
          {"method", std::string(to_string(b.method))},
          {"seconds", round9(b.seconds)},
          {"microseconds_per_solve", round9(b.microseconds_per_solve())}};
}

/// Runs the sweep under both methods and compares their maxima.
inline json metrics_report(const ServiceContext& ctx, const SweepRequest& req) {
  const SmoothnessReport squad_rep = smoothness(ctx, req, Method::Squad);
  const SmoothnessReport slerp_rep = smoothness(ctx, req, Method::Slerp);
  const SweepAxis axis = req.axis();
  const DegreeRange& r = req.range();
  return {{"sweep",
           {{"axis", axis == SweepAxis::Theta ? "theta" : "psi"},
            {"fixed", round9(req.fixed())},
            {"start", round9(r.start)},
            {"end", round9(r.end)},
            {"step", round9(r.step)},
            {"samples", squad_rep.elbow.size()}}},
          {"squad", to_json(squad_rep)},
          {"slerp", to_json(slerp_rep)},
          {"squad_smoother", squad_rep.max_second_difference < slerp_rep.max_second_difference}};
}

// --- HTTP API routing -------------------------------------------------------

struct ApiResponse {
  int status = 200;
  json body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

inline json info_json(const ServiceContext& ctx) {
  const GridAxes& axes = ctx.db.axes();
  json seqs = json::object();
  for (JointId j : kJoints) seqs[std::string(to_string(j))] = ctx.db.metadata().sequences[index_of(j)].label();
  return {{"theta_knots", axes.theta_knots},
          {"psi_knots", axes.psi_knots},
          {"domain", {{"theta", {axes.theta_min(), axes.theta_max()}}, {"psi", {axes.psi_min(), axes.psi_max()}}}},
          {"joint_sequences", seqs},
          {"skeleton", skeleton_to_json(ctx.skeleton)},
          {"source", ctx.db.metadata().source},
          {"clamp", ctx.clamp == ClampPolicy::Clamp ? "clamp" : "error"},
          {"methods", {"squad", "slerp"}}};
}

/// Largest number of samples a single /api/sweep call may request.
inline constexpr std::size_t kMaxSweepSamples = 20000;

inline ApiResponse handle_api(const ServiceContext& ctx, std::string_view path, const QueryParams& params) {
  const auto error = [](int status, const std::string& msg) { return ApiResponse{status, {{"error", msg}}}; };
  const auto param = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  const auto method_param = [&]() {
    const auto m = param("method");
    if (!m) return Method::Squad;
    const auto parsed = parse_method(*m);
    if (!parsed) throw InvalidArgument("method must be squad or slerp");
    return *parsed;
  };

  try {
    if (path == "/api/info") return {200, info_json(ctx)};
    if (path == "/api/solve") {
      const auto theta = param("theta");
      const auto psi = param("psi");
      if (!theta || !psi) return error(400, "theta and psi are required");
      const SolveRequest req{parse_degrees(*theta, "theta"), parse_degrees(*psi, "psi"), method_param()};
      return {200, to_json(build_solve_response(ctx, req))};
    }
    if (path == "/api/sweep") {
      const auto theta = param("theta");
      const auto psi = param("psi");
      if (!theta || !psi) return error(400, "theta and psi are required");
      const SweepRequest req{parse_range(*theta, "theta"), parse_range(*psi, "psi"), method_param()};
      const DegreeRange& r = req.range();
      if ((r.end - r.start) / r.step > static_cast<double>(kMaxSweepSamples))
        return error(400, "sweep exceeds " + std::to_string(kMaxSweepSamples) + " samples");
      json out = json::array();
      for (const SweepSample& s : run_sweep(ctx, req))
        out.push_back(to_json(build_solve_response(ctx, {s.input.theta, s.input.psi, req.method})));
      return {200, out};
    }
  } catch (const InvalidArgument& e) {
    return error(400, e.what());
  } catch (const OutOfRange& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
  return error(404, "unknown path '" + std::string(path) + "'");
}

}  // namespace scapula_ik
