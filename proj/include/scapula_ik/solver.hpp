#pragma once
// Shoulder IK: maps humerothoracic elevation theta and plane of elevation psi
// to SC, AC and GH rotations by two-stage spherical interpolation over the
// motion database, first along theta in each psi column, then along psi.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scapula_ik/errors.hpp"
#include "scapula_ik/motion_db.hpp"
#include "scapula_ik/quaternion.hpp"
#include "scapula_ik/shoulder.hpp"

namespace scapula_ik {

/// Degrees.
struct PoseInput {
  double theta = 15.0;
  double psi = 0.0;

  friend constexpr bool operator==(const PoseInput&, const PoseInput&) = default;
};

enum class Method { Squad, Slerp };
enum class ClampPolicy { Clamp, Error };

constexpr std::string_view to_string(Method m) noexcept { return m == Method::Squad ? "squad" : "slerp"; }

struct SolveOptions {
  Method method = Method::Squad;
  ClampPolicy clamp = ClampPolicy::Clamp;
};

/// Lower-left lattice corner (i, j) of the interpolation patch and the
/// weights toward (i+1, j+1).
struct InterpolationCell {
  std::size_t i = 0;
  std::size_t j = 0;
  double t_theta = 0.0;
  double t_psi = 0.0;

  friend constexpr bool operator==(const InterpolationCell&, const InterpolationCell&) = default;
};

/// Result of the theta stage, one rotation per psi knot.
struct IntermediateRotations {
  std::array<UnitQuaternion, kPsiKnots> q_psi;
};

struct ClampedInput {
  PoseInput input;
  bool clamped = false;
};

/// Clamps (or rejects, under ClampPolicy::Error) inputs outside the grid.
inline ClampedInput clamp_input(const GridAxes& axes, PoseInput in, ClampPolicy policy) {
  if (!std::isfinite(in.theta) || !std::isfinite(in.psi)) throw InvalidArgument("theta and psi must be finite");
  ClampedInput out{{std::clamp(in.theta, axes.theta_min(), axes.theta_max()),
                    std::clamp(in.psi, axes.psi_min(), axes.psi_max())},
                   false};
  out.clamped = !(out.input == in);
  if (out.clamped && policy == ClampPolicy::Error)
    throw OutOfRange("pose (theta=" + std::to_string(in.theta) + ", psi=" + std::to_string(in.psi) +
                     ") outside grid theta [" + std::to_string(axes.theta_min()) + ", " +
                     std::to_string(axes.theta_max()) + "], psi [" + std::to_string(axes.psi_min()) + ", " +
                     std::to_string(axes.psi_max()) + "]");
  return out;
}

namespace detail {

/// Index k with knots[k] < v <= knots[k+1]; the first knot maps to k = 0
/// (weight 0). Returns {k, weight}.
template <std::size_t N>
std::pair<std::size_t, double> bracket(const std::array<double, N>& knots, double v) noexcept {
  const auto it = std::lower_bound(knots.begin(), knots.end(), v);
  std::size_t k = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  k = std::min(k, N - 2);
  return {k, (v - knots[k]) / (knots[k + 1] - knots[k])};
}

/// Interpolates between knots a and b of a sequence whose outer neighbours
/// are prev and next. A missing neighbour at the end of the sequence is taken
/// as the reflection of the inner knot through the end knot (q[-1] = q0 q1^-1 q0),
/// whose logs cancel in the quadrangle formula, so the end point is its own
/// quadrangle point.
inline UnitQuaternion interpolate_segment(const std::optional<UnitQuaternion>& prev, const UnitQuaternion& a,
                                          const UnitQuaternion& b_raw, const std::optional<UnitQuaternion>& next,
                                          double t, Method method) {
  const UnitQuaternion b = align_hemisphere(a, b_raw);
  if (method == Method::Slerp) return slerp(a, b, t);
  const UnitQuaternion s_a = prev ? inner_quadrangle(align_hemisphere(a, *prev), a, b) : a;
  const UnitQuaternion s_b = next ? inner_quadrangle(a, b, align_hemisphere(b, *next)) : b;
  return squad(a, b, align_hemisphere(a, s_a), align_hemisphere(a, s_b), t);
}

template <std::size_t N>
std::optional<UnitQuaternion> neighbour(const std::array<UnitQuaternion, N>& seq, std::ptrdiff_t k) {
  if (k < 0 || k >= static_cast<std::ptrdiff_t>(N)) return std::nullopt;
  return seq[static_cast<std::size_t>(k)];
}

}  // namespace detail

/// Candidate selection and weights for an input within the grid (after clamping).
inline InterpolationCell select_cell(const GridAxes& axes, PoseInput input,
                                     ClampPolicy policy = ClampPolicy::Clamp) {
  const PoseInput in = clamp_input(axes, input, policy).input;
  const auto [i, t_theta] = detail::bracket(axes.theta_knots, in.theta);
  const auto [j, t_psi] = detail::bracket(axes.psi_knots, in.psi);
  return {i, j, t_theta, t_psi};
}

/// Interpolates every psi column of the grid along theta at cell.t_theta.
inline IntermediateRotations theta_interpolate(const JointRotationGrid& grid, const InterpolationCell& cell,
                                               Method method) {
  const auto& q = grid.quat();
  const std::size_t i = cell.i;
  IntermediateRotations out;
  for (std::size_t k = 0; k < kPsiKnots; ++k) {
    std::optional<UnitQuaternion> prev, next;
    if (i > 0) prev = q[i - 1][k];
    if (i + 2 < kThetaKnots) next = q[i + 2][k];
    out.q_psi[k] = detail::interpolate_segment(prev, q[i][k], q[i + 1][k], next, cell.t_theta, method);
    if (k > 0) out.q_psi[k] = align_hemisphere(out.q_psi[k - 1], out.q_psi[k]);
  }
  return out;
}

/// Second stage: interpolates the theta-stage results along psi at cell.t_psi.
inline UnitQuaternion psi_interpolate(const IntermediateRotations& inter, const InterpolationCell& cell,
                                      Method method) {
  const auto& q = inter.q_psi;
  const auto j = static_cast<std::ptrdiff_t>(cell.j);
  return detail::interpolate_segment(detail::neighbour(q, j - 1), q[cell.j], q[cell.j + 1], detail::neighbour(q, j + 2),
                                     cell.t_psi, method);
}

struct Solution {
  ShoulderPose pose;
  InterpolationCell cell;
  /// Input after clamping.
  PoseInput input;
  bool clamped = false;
};

inline Solution solve_detailed(const MotionDatabase& db, PoseInput input, const SolveOptions& opts = {}) {
  const ClampedInput c = clamp_input(db.axes(), input, opts.clamp);
  Solution out;
  out.input = c.input;
  out.clamped = c.clamped;
  out.cell = select_cell(db.axes(), c.input, opts.clamp);
  for (JointId j : kJoints)
    out.pose[j] = psi_interpolate(theta_interpolate(db.grid(j), out.cell, opts.method), out.cell, opts.method);
  return out;
}

inline ShoulderPose solve(const MotionDatabase& db, PoseInput input, const SolveOptions& opts = {}) {
  return solve_detailed(db, input, opts).pose;
}

/// Inclusive degree range `start:end:step`; the last step is shortened to land on end.
struct DegreeRange {
  double start = 0.0;
  double end = 0.0;
  double step = 1.0;

  std::vector<double> samples() const {
    if (!std::isfinite(start) || !std::isfinite(end) || !std::isfinite(step))
      throw InvalidArgument("range bounds must be finite");
    if (!(step > 0.0)) throw InvalidArgument("range step must be positive");
    if (end < start) throw InvalidArgument("range end precedes start");
    std::vector<double> out;
    // Points within 1e-9 of the end collapse onto it.
    for (std::size_t k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v >= end - 1e-9 * step) break;
      out.push_back(v);
    }
    out.push_back(end);
    return out;
  }
};

enum class SweepAxis { Theta, Psi };

struct SweepSample {
  PoseInput input;
  ShoulderPose pose;
  bool clamped = false;
};

/// Solves along `axis` over `range` with the other angle held at `fixed`.
/// Each joint's quaternion is hemisphere-aligned to the previous sample.
inline std::vector<SweepSample> sweep(const MotionDatabase& db, SweepAxis axis, double fixed, const DegreeRange& range,
                                      const SolveOptions& opts = {}) {
  std::vector<SweepSample> out;
  const std::vector<double> values = range.samples();
  out.reserve(values.size());
  for (double v : values) {
    const PoseInput in = axis == SweepAxis::Theta ? PoseInput{v, fixed} : PoseInput{fixed, v};
    Solution s = solve_detailed(db, in, opts);
    if (!out.empty())
      for (JointId j : kJoints) s.pose[j] = align_hemisphere(out.back().pose[j], s.pose[j]);
    out.push_back({in, s.pose, s.clamped});
  }
  return out;
}

}  // namespace scapula_ik
