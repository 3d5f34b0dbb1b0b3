#pragma once
// Unit-quaternion algebra and spherical interpolation primitives.
//
// Convention: Hamilton product, scalar-first storage, right-handed frames.
// All functions are pure and operate on value types.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "scapula_ik/errors.hpp"

namespace scapula_ik {

constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / kPi); }

/// Below this angle (radians) interpolation and log/exp switch to series forms.
inline constexpr double kSmallAngle = 1e-6;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) noexcept { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return s * a; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }

/// Quaternion with zero scalar part; the log/exp tangent space of the unit sphere.
struct PureQuaternion {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr PureQuaternion operator+(PureQuaternion a, PureQuaternion b) noexcept {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr PureQuaternion operator*(double s, PureQuaternion a) noexcept {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(PureQuaternion, PureQuaternion) = default;
};

inline double norm(PureQuaternion v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

/// Arbitrary (not necessarily unit) quaternion, the input to normalize().
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

class UnitQuaternion;
UnitQuaternion normalize(const Quaternion& q);

/// Rotation quaternion. Every public construction path yields unit norm.
class UnitQuaternion {
 public:
  constexpr UnitQuaternion() noexcept = default;

  static constexpr UnitQuaternion identity() noexcept { return {}; }

  /// Rotation of `radians` about `axis` (need not be normalized, must be nonzero).
  static UnitQuaternion from_axis_angle(Vec3 axis, double radians) {
    const double n = norm(axis);
    if (n == 0.0) throw InvalidArgument("rotation axis has zero length");
    const double s = std::sin(radians / 2.0) / n;
    return {std::cos(radians / 2.0), axis.x * s, axis.y * s, axis.z * s};
  }

  constexpr double w() const noexcept { return w_; }
  constexpr double x() const noexcept { return x_; }
  constexpr double y() const noexcept { return y_; }
  constexpr double z() const noexcept { return z_; }

  constexpr std::array<double, 4> components() const noexcept { return {w_, x_, y_, z_}; }

  /// The antipodal representative; denotes the same rotation.
  constexpr UnitQuaternion operator-() const noexcept { return {-w_, -x_, -y_, -z_}; }

  /// Component-wise equality. Use angular_distance() for rotation equality.
  friend constexpr bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;

 private:
  constexpr UnitQuaternion(double w, double x, double y, double z) noexcept : w_(w), x_(x), y_(y), z_(z) {}

  friend UnitQuaternion normalize(const Quaternion& q);
  friend UnitQuaternion mul(const UnitQuaternion& p, const UnitQuaternion& q) noexcept;
  friend constexpr UnitQuaternion conjugate(const UnitQuaternion& q) noexcept;

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

inline UnitQuaternion normalize(const Quaternion& q) {
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateQuaternion();
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Quaternion raw(const UnitQuaternion& q) noexcept { return {q.w(), q.x(), q.y(), q.z()}; }

/// Hamilton product p*q (apply q first, then p, when rotating vectors).
inline UnitQuaternion mul(const UnitQuaternion& p, const UnitQuaternion& q) noexcept {
  return {p.w_ * q.w_ - p.x_ * q.x_ - p.y_ * q.y_ - p.z_ * q.z_,
          p.w_ * q.x_ + p.x_ * q.w_ + p.y_ * q.z_ - p.z_ * q.y_,
          p.w_ * q.y_ - p.x_ * q.z_ + p.y_ * q.w_ + p.z_ * q.x_,
          p.w_ * q.z_ + p.x_ * q.y_ - p.y_ * q.x_ + p.z_ * q.w_};
}

inline UnitQuaternion operator*(const UnitQuaternion& p, const UnitQuaternion& q) noexcept { return mul(p, q); }

constexpr UnitQuaternion conjugate(const UnitQuaternion& q) noexcept { return {q.w_, -q.x_, -q.y_, -q.z_}; }

constexpr UnitQuaternion inverse(const UnitQuaternion& q) noexcept { return conjugate(q); }

constexpr double dot(const UnitQuaternion& p, const UnitQuaternion& q) noexcept {
  return p.w() * q.w() + p.x() * q.x() + p.y() * q.y() + p.z() * q.z();
}

inline UnitQuaternion rot_x(double radians) { return UnitQuaternion::from_axis_angle({1, 0, 0}, radians); }
inline UnitQuaternion rot_y(double radians) { return UnitQuaternion::from_axis_angle({0, 1, 0}, radians); }
inline UnitQuaternion rot_z(double radians) { return UnitQuaternion::from_axis_angle({0, 0, 1}, radians); }

/// Rotates v by q (q v q*).
inline Vec3 rotate(const UnitQuaternion& q, Vec3 v) noexcept {
  // v + 2w(u x v) + 2 u x (u x v), u = vector part
  const Vec3 u{q.x(), q.y(), q.z()};
  const Vec3 t = 2.0 * cross(u, v);
  return v + q.w() * t + cross(u, t);
}

/// Returns q or -q, whichever lies in the same hemisphere as `reference`.
constexpr UnitQuaternion align_hemisphere(const UnitQuaternion& reference, const UnitQuaternion& q) noexcept {
  return dot(reference, q) < 0.0 ? -q : q;
}

namespace detail {

inline double chord(const std::array<double, 4>& a, const std::array<double, 4>& b, double sign) noexcept {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double d = a[k] + sign * b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Angle between p and q as 4-vectors, accurate near 0 and pi.
inline double sphere_angle(const UnitQuaternion& p, const UnitQuaternion& q) noexcept {
  const auto a = p.components();
  const auto b = q.components();
  return 2.0 * std::atan2(chord(a, b, -1.0), chord(a, b, 1.0));
}

}  // namespace detail

/// Rotation angle (radians, in [0, pi]) taking p to q; invariant under q -> -q.
///
/// Equal to 2*acos(|<p,q>|), evaluated through the chord form so that
/// distances far below sqrt(machine epsilon) are still resolved.
inline double angular_distance(const UnitQuaternion& p, const UnitQuaternion& q) noexcept {
  return 2.0 * detail::sphere_angle(p, align_hemisphere(p, q));
}

inline PureQuaternion qlog(const UnitQuaternion& q) noexcept {
  const double s = std::sqrt(q.x() * q.x() + q.y() * q.y() + q.z() * q.z());
  double scale;
  if (s < kSmallAngle && q.w() > 0.0) {
    // atan(s/w)/s, third-order series
    const double r = s / q.w();
    scale = (1.0 - r * r / 3.0) / q.w();
  } else if (s == 0.0) {
    // q = -1: any axis; pick x
    return {kPi, 0.0, 0.0};
  } else {
    scale = std::atan2(s, q.w()) / s;
  }
  return {scale * q.x(), scale * q.y(), scale * q.z()};
}

inline UnitQuaternion qexp(PureQuaternion v) {
  const double angle = norm(v);
  const double sinc = angle < kSmallAngle ? 1.0 - angle * angle / 6.0 : std::sin(angle) / angle;
  return normalize({std::cos(angle), sinc * v.x, sinc * v.y, sinc * v.z});
}

/// Spherical linear interpolation, constant angular speed from q0 (t=0) to q1 (t=1).
///
/// Inputs are expected hemisphere-aligned. Nearly coincident inputs fall back to
/// normalized linear interpolation. Exactly antipodal inputs travel through the
/// perpendicular (-x, w, -z, y) of q0, which is deterministic but arbitrary.
inline UnitQuaternion slerp(const UnitQuaternion& q0, const UnitQuaternion& q1, double t) {
  if (t == 0.0) return q0;
  if (t == 1.0) return q1;
  const double omega = detail::sphere_angle(q0, q1);
  const auto a = q0.components();
  const auto b = q1.components();
  Quaternion out;
  if (omega < kSmallAngle) {
    out = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2]), a[3] + t * (b[3] - a[3])};
  } else if (kPi - omega < kSmallAngle) {
    const std::array<double, 4> p{-a[1], a[0], -a[3], a[2]};
    const double c = std::cos(kPi * t);
    const double s = std::sin(kPi * t);
    out = {c * a[0] + s * p[0], c * a[1] + s * p[1], c * a[2] + s * p[2], c * a[3] + s * p[3]};
  } else {
    const double sin_omega = std::sin(omega);
    const double k0 = std::sin((1.0 - t) * omega) / sin_omega;
    const double k1 = std::sin(t * omega) / sin_omega;
    out = {k0 * a[0] + k1 * b[0], k0 * a[1] + k1 * b[1], k0 * a[2] + k1 * b[2], k0 * a[3] + k1 * b[3]};
  }
  return normalize(out);
}

constexpr Vec3 lerp(Vec3 x0, Vec3 x1, double t) noexcept { return (1.0 - t) * x0 + t * x1; }

/// Cubic Bezier through P1, P2 with inner control points B1, A2, written as
/// three linear interpolations. Euclidean analogue of squad().
constexpr Vec3 bezier3(Vec3 p1, Vec3 p2, Vec3 b1, Vec3 a2, double t) noexcept {
  return lerp(lerp(p1, p2, t), lerp(b1, a2, t), 2.0 * t * (1.0 - t));
}

/// Squad control point s_i for keyframe q_i with neighbours q_prev and q_next.
/// Neighbours are hemisphere-aligned to q_i before the logs are taken.
inline UnitQuaternion inner_quadrangle(const UnitQuaternion& q_prev, const UnitQuaternion& q_i,
                                       const UnitQuaternion& q_next) {
  const UnitQuaternion inv = inverse(q_i);
  const PureQuaternion to_next = qlog(inv * align_hemisphere(q_i, q_next));
  const PureQuaternion to_prev = qlog(inv * align_hemisphere(q_i, q_prev));
  return q_i * qexp(-0.25 * (to_next + to_prev));
}

/// Spherical quadrangle interpolation between q_i and q_ip1 with control points s_i, s_ip1.
inline UnitQuaternion squad(const UnitQuaternion& q_i, const UnitQuaternion& q_ip1, const UnitQuaternion& s_i,
                            const UnitQuaternion& s_ip1, double t) {
  return slerp(slerp(q_i, q_ip1, t), slerp(s_i, s_ip1, t), 2.0 * t * (1.0 - t));
}

}  // namespace scapula_ik
