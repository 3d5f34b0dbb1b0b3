#pragma once
// Shoulder complex model: joints, Euler conventions and thorax-to-elbow
// forward kinematics.
//
// Frames are right-handed with y up. The sternum and ribs form the fixed
// world (thorax) frame. Each joint rotation is expressed relative to its
// parent segment: clavicle in thorax, scapula in clavicle, humerus in scapula.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "scapula_ik/errors.hpp"
#include "scapula_ik/quaternion.hpp"

namespace scapula_ik {

enum class JointId { SC, AC, GH };

inline constexpr std::array<JointId, 3> kJoints{JointId::SC, JointId::AC, JointId::GH};

constexpr std::size_t index_of(JointId j) noexcept { return static_cast<std::size_t>(j); }

constexpr std::string_view to_string(JointId j) noexcept {
  switch (j) {
    case JointId::SC: return "SC";
    case JointId::AC: return "AC";
    case JointId::GH: return "GH";
  }
  return "?";
}

inline std::optional<JointId> parse_joint(std::string_view s) noexcept {
  for (JointId j : kJoints)
    if (to_string(j) == s) return j;
  return std::nullopt;
}

enum class Axis { X, Y, Z };

constexpr char axis_label(Axis a) noexcept { return "XYZ"[static_cast<int>(a)]; }

/// Ordered triple of elemental rotation axes.
///
/// Intrinsic Y-X'-Z'' composes as R = Ry(a1) Rx(a2) Rz(a3); extrinsic
/// sequences compose about the fixed axes, R = R3(a3) R2(a2) R1(a1).
struct EulerSequence {
  std::array<Axis, 3> axes{Axis::Y, Axis::X, Axis::Z};
  bool intrinsic = true;

  constexpr bool symmetric() const noexcept { return axes[0] == axes[2]; }

  friend constexpr bool operator==(const EulerSequence&, const EulerSequence&) = default;

  /// "YXY-intrinsic" style label used in dataset metadata.
  std::string label() const {
    std::string s{axis_label(axes[0]), axis_label(axes[1]), axis_label(axes[2])};
    return s + (intrinsic ? "-intrinsic" : "-extrinsic");
  }

  static std::optional<EulerSequence> parse(std::string_view s) noexcept {
    auto axis = [](char c) -> std::optional<Axis> {
      switch (c) {
        case 'X': case 'x': return Axis::X;
        case 'Y': case 'y': return Axis::Y;
        case 'Z': case 'z': return Axis::Z;
        default: return std::nullopt;
      }
    };
    if (s.size() < 3) return std::nullopt;
    EulerSequence seq;
    for (int k = 0; k < 3; ++k) {
      auto a = axis(s[k]);
      if (!a) return std::nullopt;
      seq.axes[k] = *a;
    }
    if (seq.axes[0] == seq.axes[1] || seq.axes[1] == seq.axes[2]) return std::nullopt;
    const std::string_view rest = s.substr(3);
    if (rest.empty() || rest == "-intrinsic") {
      seq.intrinsic = true;
    } else if (rest == "-extrinsic") {
      seq.intrinsic = false;
    } else {
      return std::nullopt;
    }
    return seq;
  }
};

inline constexpr EulerSequence kYXZ{{Axis::Y, Axis::X, Axis::Z}, true};
inline constexpr EulerSequence kYXY{{Axis::Y, Axis::X, Axis::Y}, true};

/// Default decomposition per joint: SC (protraction, elevation, posterior
/// rotation) and AC (internal rotation, upward rotation, posterior tilt) use
/// Y-X'-Z''; GH (plane of elevation, elevation, axial rotation) uses Y-X'-Y''.
constexpr EulerSequence joint_sequence(JointId j) noexcept { return j == JointId::GH ? kYXY : kYXZ; }

/// Euler angles in degrees.
struct EulerTriple {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  EulerSequence sequence{};

  friend constexpr bool operator==(const EulerTriple&, const EulerTriple&) = default;
};

/// Middle angles closer than this (degrees) to a singular value are rejected
/// by euler_to_quat and flagged by quat_to_euler.
inline constexpr double kGimbalMarginDeg = 0.1;

/// Distance in degrees from a2 to the nearest singular middle angle of `seq`
/// (multiples of 180 for symmetric sequences, 90 + k*180 otherwise).
inline double gimbal_distance_deg(double a2, const EulerSequence& seq) noexcept {
  const double shifted = seq.symmetric() ? a2 : a2 - 90.0;
  const double r = std::fmod(std::abs(shifted), 180.0);
  return std::min(r, 180.0 - r);
}

namespace detail {

inline UnitQuaternion elemental(Axis a, double radians) {
  switch (a) {
    case Axis::X: return rot_x(radians);
    case Axis::Y: return rot_y(radians);
    case Axis::Z: return rot_z(radians);
  }
  return {};
}

inline double wrap_pi(double a) noexcept {
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

}  // namespace detail

inline UnitQuaternion euler_to_quat(const EulerTriple& e) {
  if (!std::isfinite(e.a1) || !std::isfinite(e.a2) || !std::isfinite(e.a3))
    throw InvalidArgument("non-finite Euler angle");
  if (gimbal_distance_deg(e.a2, e.sequence) < kGimbalMarginDeg)
    throw GimbalSingularity("middle angle " + std::to_string(e.a2) + " deg is singular for " + e.sequence.label());
  const auto& ax = e.sequence.axes;
  const UnitQuaternion r1 = detail::elemental(ax[0], deg_to_rad(e.a1));
  const UnitQuaternion r2 = detail::elemental(ax[1], deg_to_rad(e.a2));
  const UnitQuaternion r3 = detail::elemental(ax[2], deg_to_rad(e.a3));
  return e.sequence.intrinsic ? r1 * r2 * r3 : r3 * r2 * r1;
}

struct EulerDecomposition {
  EulerTriple angles;
  /// Middle angle within kGimbalMarginDeg of a singularity. At the exact
  /// singularity a3 is set to 0 and the combined rotation goes to a1.
  bool gimbal_degenerate = false;
};

/// Decomposes q into `seq`. First and third angles lie in (-180, 180]; the
/// middle angle in [0, 180] for symmetric sequences, [-90, 90] otherwise.
inline EulerDecomposition quat_to_euler(const UnitQuaternion& q, const EulerSequence& seq) {
  // Work on the equivalent extrinsic sequence (intrinsic i-j-k == extrinsic k-j-i
  // with the angle order reversed), then use the direct quaternion method of
  // Bernardes & Viollet (2022).
  std::array<int, 3> axis{static_cast<int>(seq.axes[0]), static_cast<int>(seq.axes[1]),
                          static_cast<int>(seq.axes[2])};
  if (seq.intrinsic) std::swap(axis[0], axis[2]);
  const int i = axis[0];
  const int j = axis[1];
  int k = axis[2];
  const bool symmetric = i == k;
  if (symmetric) k = 3 - i - j;
  const double sign = static_cast<double>((i - j) * (j - k) * (k - i) / 2);

  const std::array<double, 3> v{q.x(), q.y(), q.z()};
  double a, b, c, d;
  if (symmetric) {
    a = q.w();
    b = v[i];
    c = v[j];
    d = v[k] * sign;
  } else {
    a = q.w() - v[j];
    b = v[i] + v[k] * sign;
    c = v[j] + q.w();
    d = v[k] * sign - v[i];
  }

  std::array<double, 3> ang{};
  ang[1] = 2.0 * std::atan2(std::hypot(c, d), std::hypot(a, b));
  const double half_sum = std::atan2(b, a);
  const double half_diff = std::atan2(d, c);
  constexpr double kExact = 1e-12;
  if (std::abs(ang[1]) <= kExact) {
    ang[0] = 0.0;
    ang[2] = 2.0 * half_sum;
  } else if (std::abs(ang[1] - kPi) <= kExact) {
    ang[0] = 0.0;
    ang[2] = 2.0 * half_diff;
  } else {
    ang[0] = half_sum - half_diff;
    ang[2] = half_sum + half_diff;
  }
  if (!symmetric) {
    ang[2] *= sign;
    ang[1] -= kPi / 2.0;
  }
  if (seq.intrinsic) std::swap(ang[0], ang[2]);

  EulerDecomposition out;
  out.angles = {rad_to_deg(detail::wrap_pi(ang[0])), rad_to_deg(ang[1]), rad_to_deg(detail::wrap_pi(ang[2])), seq};
  out.gimbal_degenerate = gimbal_distance_deg(out.angles.a2, seq) < kGimbalMarginDeg;
  return out;
}

/// Segment geometry of the thorax -> clavicle -> scapula -> humerus chain, meters.
struct SkeletonConfig {
  double clavicle_length = 0.17;
  /// AC -> GH offset in the scapula frame.
  Vec3 scapula_offset{0.01, -0.02, 0.10};
  /// GH -> elbow distance along -y of the humerus frame.
  double humerus_length = 0.30;
  Vec3 thorax_origin{};

  void validate() const {
    if (!(clavicle_length > 0.0) || !(humerus_length > 0.0))
      throw InvalidArgument("skeleton segment lengths must be positive");
    for (double c : {scapula_offset.x, scapula_offset.y, scapula_offset.z, thorax_origin.x, thorax_origin.y,
                     thorax_origin.z})
      if (!std::isfinite(c)) throw InvalidArgument("skeleton offsets must be finite");
  }
};

/// Parent-relative joint rotations.
struct ShoulderPose {
  UnitQuaternion q_sc;
  UnitQuaternion q_ac;
  UnitQuaternion q_gh;

  const UnitQuaternion& operator[](JointId j) const noexcept {
    switch (j) {
      case JointId::SC: return q_sc;
      case JointId::AC: return q_ac;
      case JointId::GH: break;
    }
    return q_gh;
  }
  UnitQuaternion& operator[](JointId j) noexcept {
    return const_cast<UnitQuaternion&>(static_cast<const ShoulderPose&>(*this)[j]);
  }
};

/// Landmark positions in thorax coordinates, meters.
struct LandmarkSet {
  Vec3 sc;
  Vec3 ac;
  Vec3 gh;
  Vec3 elbow;
};

inline LandmarkSet forward_kinematics(const ShoulderPose& pose, const SkeletonConfig& cfg) noexcept {
  const UnitQuaternion clavicle = pose.q_sc;
  const UnitQuaternion scapula = clavicle * pose.q_ac;
  const UnitQuaternion humerus = scapula * pose.q_gh;
  LandmarkSet out;
  out.sc = cfg.thorax_origin;
  out.ac = out.sc + rotate(clavicle, {0.0, 0.0, cfg.clavicle_length});
  out.gh = out.ac + rotate(scapula, cfg.scapula_offset);
  out.elbow = out.gh + rotate(humerus, {0.0, -cfg.humerus_length, 0.0});
  return out;
}

}  // namespace scapula_ik
