#pragma once

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "scapula_ik/quaternion.hpp"

namespace scapula_ik::testing {

inline UnitQuaternion rx(double deg) { return rot_x(deg_to_rad(deg)); }
inline UnitQuaternion ry(double deg) { return rot_y(deg_to_rad(deg)); }
inline UnitQuaternion rz(double deg) { return rot_z(deg_to_rad(deg)); }

/// Uniformly distributed rotation (Shoemake's subgroup method).
inline UnitQuaternion random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return normalize({a * std::sin(2 * kPi * u2), a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3),
                    b * std::cos(2 * kPi * u3)});
}

inline Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    const Vec3 v{n(rng), n(rng), n(rng)};
    if (norm(v) > 1e-3) return (1.0 / norm(v)) * v;
  }
}

inline double unit_error(const UnitQuaternion& q) { return std::abs(dot(q, q) - 1.0); }

}  // namespace scapula_ik::testing

#define EXPECT_ROT_NEAR(a, b, tol) EXPECT_LE(::scapula_ik::angular_distance((a), (b)), (tol))
#define EXPECT_VEC_NEAR(a, b, tol)     \
  do {                                 \
    const auto va_ = (a);              \
    const auto vb_ = (b);              \
    EXPECT_NEAR(va_.x, vb_.x, (tol));  \
    EXPECT_NEAR(va_.y, vb_.y, (tol));  \
    EXPECT_NEAR(va_.z, vb_.z, (tol));  \
  } while (0)
