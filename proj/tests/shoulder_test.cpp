#include "scapula_ik/shoulder.hpp"

#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace scapula_ik {
namespace {

using testing::random_rotation;
using testing::rx;
using testing::ry;
using testing::rz;

using Mat = std::array<std::array<double, 3>, 3>;

Mat mat_mul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k)
      for (int s = 0; s < 3; ++s) c[r][k] += a[r][s] * b[s][k];
  return c;
}

Mat mat_x(double deg) {
  const double c = std::cos(deg * kPi / 180), s = std::sin(deg * kPi / 180);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
Mat mat_y(double deg) {
  const double c = std::cos(deg * kPi / 180), s = std::sin(deg * kPi / 180);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
Mat mat_z(double deg) {
  const double c = std::cos(deg * kPi / 180), s = std::sin(deg * kPi / 180);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

void expect_matches_matrix(const UnitQuaternion& q, const Mat& m, double tol) {
  const Vec3 basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int col = 0; col < 3; ++col) {
    const Vec3 v = rotate(q, basis[col]);
    EXPECT_NEAR(v.x, m[0][col], tol);
    EXPECT_NEAR(v.y, m[1][col], tol);
    EXPECT_NEAR(v.z, m[2][col], tol);
  }
}

const EulerSequence kAllSequences[] = {
    {{Axis::Y, Axis::X, Axis::Z}, true},  {{Axis::Y, Axis::X, Axis::Y}, true},  {{Axis::X, Axis::Y, Axis::Z}, true},
    {{Axis::Z, Axis::Y, Axis::X}, true},  {{Axis::Z, Axis::X, Axis::Z}, true},  {{Axis::X, Axis::Z, Axis::X}, true},
    {{Axis::Y, Axis::X, Axis::Z}, false}, {{Axis::Y, Axis::X, Axis::Y}, false}, {{Axis::X, Axis::Y, Axis::Z}, false},
    {{Axis::Z, Axis::X, Axis::Y}, false}, {{Axis::Y, Axis::Z, Axis::Y}, false}, {{Axis::X, Axis::Z, Axis::Y}, true},
};

TEST(Joints, SequencesPerJoint) {
  EXPECT_EQ(joint_sequence(JointId::SC), kYXZ);
  EXPECT_EQ(joint_sequence(JointId::AC), kYXZ);
  EXPECT_EQ(joint_sequence(JointId::GH), kYXY);
  EXPECT_EQ(kYXY.label(), "YXY-intrinsic");
  EXPECT_EQ(EulerSequence::parse("YXZ-intrinsic"), kYXZ);
  EXPECT_EQ(EulerSequence::parse("yxy"), kYXY);
  EXPECT_FALSE(EulerSequence::parse("YYZ"));
  EXPECT_FALSE(EulerSequence::parse("YXZ-sideways"));
  EXPECT_EQ(parse_joint("GH"), JointId::GH);
  EXPECT_FALSE(parse_joint("ST"));
}

TEST(EulerToQuat, SingleAxisTriples) {
  EXPECT_ROT_NEAR(euler_to_quat({30, 0, 0, kYXZ}), ry(30), 1e-15);
  EXPECT_ROT_NEAR(euler_to_quat({0, 20, 0, kYXZ}), rx(20), 1e-15);
  EXPECT_ROT_NEAR(euler_to_quat({0, 0, 10, kYXZ}), rz(10), 1e-15);
}

TEST(EulerToQuat, MatchesRotationMatrixProduct) {
  expect_matches_matrix(euler_to_quat({30, 45, 10, kYXZ}), mat_mul(mat_mul(mat_y(30), mat_x(45)), mat_z(10)), 1e-12);
  expect_matches_matrix(euler_to_quat({25, 60, 40, kYXY}), mat_mul(mat_mul(mat_y(25), mat_x(60)), mat_y(40)), 1e-12);
  const EulerSequence ext{{Axis::Y, Axis::X, Axis::Z}, false};
  expect_matches_matrix(euler_to_quat({30, 45, 10, ext}), mat_mul(mat_mul(mat_z(10), mat_x(45)), mat_y(30)), 1e-12);
}

TEST(EulerToQuat, RejectsSingularMiddleAngle) {
  EXPECT_THROW(euler_to_quat({10, 90, 5, kYXZ}), GimbalSingularity);
  EXPECT_THROW(euler_to_quat({10, -90.05, 5, kYXZ}), GimbalSingularity);
  EXPECT_THROW(euler_to_quat({10, 0, 5, kYXY}), GimbalSingularity);
  EXPECT_THROW(euler_to_quat({10, 180, 5, kYXY}), GimbalSingularity);
  EXPECT_NO_THROW(euler_to_quat({10, 89.8, 5, kYXZ}));
  EXPECT_NO_THROW(euler_to_quat({10, -0.2, 5, kYXY}));
  EXPECT_THROW(euler_to_quat({NAN, 10, 5, kYXZ}), InvalidArgument);
}

TEST(QuatToEuler, Examples) {
  const auto a = quat_to_euler(euler_to_quat({30, 45, 10, kYXZ}), kYXZ);
  EXPECT_NEAR(a.angles.a1, 30, 1e-9);
  EXPECT_NEAR(a.angles.a2, 45, 1e-9);
  EXPECT_NEAR(a.angles.a3, 10, 1e-9);
  EXPECT_FALSE(a.gimbal_degenerate);

  const auto b = quat_to_euler(euler_to_quat({25, 60, 40, kYXY}), kYXY);
  EXPECT_NEAR(b.angles.a1, 25, 1e-9);
  EXPECT_NEAR(b.angles.a2, 60, 1e-9);
  EXPECT_NEAR(b.angles.a3, 40, 1e-9);
}

TEST(QuatToEuler, NegativeSymmetricMiddleAngleMapsToCanonicalBranch) {
  const auto d = quat_to_euler(euler_to_quat({10, -50, 20, kYXY}), kYXY);
  EXPECT_NEAR(d.angles.a2, 50, 1e-9);
  EXPECT_NEAR(d.angles.a1, -170, 1e-9);
  EXPECT_NEAR(d.angles.a3, -160, 1e-9);
}

TEST(QuatToEuler, RoundTripRandomTriples) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> outer(-179.9, 180.0);
  for (const EulerSequence& seq : kAllSequences) {
    std::uniform_real_distribution<double> middle(seq.symmetric() ? 0.2 : -89.8, seq.symmetric() ? 179.8 : 89.8);
    for (int n = 0; n < 1000; ++n) {
      const EulerTriple e{outer(rng), middle(rng), outer(rng), seq};
      const auto d = quat_to_euler(euler_to_quat(e), seq);
      EXPECT_NEAR(d.angles.a1, e.a1, 1e-6) << seq.label();
      EXPECT_NEAR(d.angles.a2, e.a2, 1e-6) << seq.label();
      EXPECT_NEAR(d.angles.a3, e.a3, 1e-6) << seq.label();
      EXPECT_FALSE(d.gimbal_degenerate);
    }
  }
}

TEST(QuatToEuler, RandomRotationsRecompose) {
  std::mt19937_64 rng(102);
  for (const EulerSequence& seq : kAllSequences)
    for (int n = 0; n < 500; ++n) {
      const UnitQuaternion q = random_rotation(rng);
      const auto d = quat_to_euler(q, seq);
      if (d.gimbal_degenerate) continue;
      EXPECT_ROT_NEAR(euler_to_quat(d.angles), q, 1e-9) << seq.label();
    }
}

TEST(QuatToEuler, ExactSingularitiesAreFlaggedAndConsistent) {
  // YXY with zero middle angle collapses to one Y rotation.
  const auto a = quat_to_euler(ry(50), kYXY);
  EXPECT_TRUE(a.gimbal_degenerate);
  EXPECT_NEAR(a.angles.a2, 0, 1e-12);
  EXPECT_NEAR(a.angles.a1, 50, 1e-9);
  EXPECT_EQ(a.angles.a3, 0.0);

  const UnitQuaternion flip = ry(30) * rx(180) * ry(10);
  const auto b = quat_to_euler(flip, kYXY);
  EXPECT_TRUE(b.gimbal_degenerate);
  EXPECT_NEAR(b.angles.a2, 180, 1e-9);
  EXPECT_EQ(b.angles.a3, 0.0);
  EXPECT_ROT_NEAR(ry(b.angles.a1) * rx(180), flip, 1e-9);

  for (double mid : {90.0, -90.0}) {
    const UnitQuaternion q = ry(20) * rx(mid) * rz(35);
    const auto c = quat_to_euler(q, kYXZ);
    EXPECT_TRUE(c.gimbal_degenerate);
    EXPECT_NEAR(c.angles.a2, mid, 1e-6);
    EXPECT_EQ(c.angles.a3, 0.0);
    EXPECT_ROT_NEAR(ry(c.angles.a1) * rx(c.angles.a2), q, 1e-7);
  }
}

TEST(QuatToEuler, FlagsNearSingularWithinMargin) {
  const auto d = quat_to_euler(ry(20) * rx(89.95) * rz(35), kYXZ);
  EXPECT_TRUE(d.gimbal_degenerate);
  EXPECT_NEAR(d.angles.a2, 89.95, 1e-6);
  EXPECT_FALSE(quat_to_euler(ry(20) * rx(89.8) * rz(35), kYXZ).gimbal_degenerate);
}

TEST(ForwardKinematics, IdentityPose) {
  const SkeletonConfig cfg;
  const LandmarkSet l = forward_kinematics({}, cfg);
  EXPECT_VEC_NEAR(l.sc, (Vec3{0, 0, 0}), 0);
  EXPECT_VEC_NEAR(l.ac, (Vec3{0, 0, 0.17}), 1e-15);
  EXPECT_VEC_NEAR(l.gh, (Vec3{0.01, -0.02, 0.27}), 1e-15);
  EXPECT_VEC_NEAR(l.elbow, (Vec3{0.01, -0.32, 0.27}), 1e-15);
}

TEST(ForwardKinematics, ClavicleRotationMovesAcromion) {
  SkeletonConfig cfg;
  ShoulderPose pose;
  pose.q_sc = ry(90);
  EXPECT_VEC_NEAR(forward_kinematics(pose, cfg).ac, (Vec3{cfg.clavicle_length, 0, 0}), 1e-15);
}

TEST(ForwardKinematics, HumerusRotationSwingsElbow) {
  SkeletonConfig cfg;
  ShoulderPose pose;
  pose.q_gh = rz(90);
  const LandmarkSet l = forward_kinematics(pose, cfg);
  EXPECT_VEC_NEAR(l.elbow - l.gh, (Vec3{cfg.humerus_length, 0, 0}), 1e-15);
}

TEST(ForwardKinematics, SegmentLengthsArePreserved) {
  std::mt19937_64 rng(9);
  const SkeletonConfig cfg;
  const double offset = norm(cfg.scapula_offset);
  for (int n = 0; n < 1000; ++n) {
    const ShoulderPose pose{random_rotation(rng), random_rotation(rng), random_rotation(rng)};
    const LandmarkSet l = forward_kinematics(pose, cfg);
    EXPECT_NEAR(norm(l.ac - l.sc), cfg.clavicle_length, 1e-9);
    EXPECT_NEAR(norm(l.gh - l.ac), offset, 1e-9);
    EXPECT_NEAR(norm(l.elbow - l.gh), cfg.humerus_length, 1e-9);
  }
}

TEST(ForwardKinematics, EquivariantUnderThoraxRotation) {
  std::mt19937_64 rng(10);
  const SkeletonConfig cfg;
  for (int n = 0; n < 200; ++n) {
    const ShoulderPose pose{random_rotation(rng), random_rotation(rng), random_rotation(rng)};
    const UnitQuaternion r = random_rotation(rng);
    ShoulderPose turned = pose;
    turned.q_sc = r * pose.q_sc;
    const LandmarkSet a = forward_kinematics(pose, cfg);
    const LandmarkSet b = forward_kinematics(turned, cfg);
    EXPECT_VEC_NEAR(b.ac, rotate(r, a.ac), 1e-12);
    EXPECT_VEC_NEAR(b.gh, rotate(r, a.gh), 1e-12);
    EXPECT_VEC_NEAR(b.elbow, rotate(r, a.elbow), 1e-12);
  }
}

TEST(ForwardKinematics, SignFlipInvariant) {
  std::mt19937_64 rng(12);
  const SkeletonConfig cfg;
  const ShoulderPose pose{random_rotation(rng), random_rotation(rng), random_rotation(rng)};
  const ShoulderPose flipped{-pose.q_sc, pose.q_ac, -pose.q_gh};
  EXPECT_VEC_NEAR(forward_kinematics(pose, cfg).elbow, forward_kinematics(flipped, cfg).elbow, 1e-15);
}

TEST(Skeleton, Validation) {
  SkeletonConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.humerus_length = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.scapula_offset.y = NAN;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

}  // namespace
}  // namespace scapula_ik
