#include "cnav/attitude.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cnav/types.hpp"

namespace cnav {
namespace {

constexpr double kPi = 3.14159265358979323846;

TEST(Skew, MatchesCrossProduct) {
  const Vec3 a(0.3, -1.2, 2.5);
  const Vec3 b(-0.7, 0.4, 1.1);
  EXPECT_LT((skew(a) * b - a.cross(b)).norm(), 1e-15);
  EXPECT_LT((skew(a) + skew(a).transpose()).norm(), 1e-15);
}

TEST(QuatExp, ZeroVectorIsIdentity) {
  const Eigen::Quaterniond q = quat_exp(Vec3::Zero());
  EXPECT_DOUBLE_EQ(q.w(), 1.0);
  EXPECT_DOUBLE_EQ(q.vec().norm(), 0.0);
}

TEST(QuatExp, MatchesAxisAngle) {
  const Vec3 axis = Vec3(1.0, 2.0, -0.5).normalized();
  const double angle = 0.73;
  const Eigen::Quaterniond q = quat_exp(angle * axis);
  const Eigen::Quaterniond ref(Eigen::AngleAxisd(angle, axis));
  EXPECT_LT(q.angularDistance(ref), 1e-12);
}

TEST(QuatExp, SameAxisComposes) {
  const Vec3 axis = Vec3(0.2, -0.9, 0.4).normalized();
  const Eigen::Quaterniond a = quat_exp(0.31 * axis);
  const Eigen::Quaterniond b = quat_exp(0.47 * axis);
  const Eigen::Quaterniond ab = a * b;
  EXPECT_LT(ab.angularDistance(quat_exp(0.78 * axis)), 1e-12);
}

TEST(EulerQuat, FrozenValue) {
  // Half-angle product formula evaluated independently for (0.1, 0.2, 0.3).
  const Eigen::Quaterniond q = euler_to_quat({0.1, 0.2, 0.3});
  EXPECT_NEAR(q.w(), 0.983347443256356, 1e-14);
  EXPECT_NEAR(q.x(), 0.034270798550482, 1e-14);
  EXPECT_NEAR(q.y(), 0.106020511061796, 1e-14);
  EXPECT_NEAR(q.z(), 0.143572175027392, 1e-14);
}

TEST(EulerDcm, FrozenValue) {
  const Mat3 c = euler_to_dcm({0.1, 0.2, 0.3});
  Mat3 ref;
  ref << 0.936293363584199, -0.275095847318244, 0.218350663146334,
      0.289629477625516, 0.956425085849232, -0.036957013524625,
      -0.198669330795061, 0.097843395007256, 0.975170327201816;
  EXPECT_LT((c - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EulerQuat, DcmAndQuatAgree) {
  const Vec3 rpy(-0.35, 0.22, 2.4);
  const Mat3 via_quat = euler_to_quat(rpy).toRotationMatrix();
  EXPECT_LT((via_quat - euler_to_dcm(rpy)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EulerQuat, RoundTripGrid) {
  for (double roll = -1.2; roll <= 1.2; roll += 0.4) {
    for (double pitch = -1.2; pitch <= 1.2; pitch += 0.4) {
      for (double yaw = -3.0; yaw <= 3.0; yaw += 0.75) {
        const Vec3 rpy(roll, pitch, yaw);
        const Vec3 back = quat_to_euler(euler_to_quat(rpy));
        EXPECT_LT((back - rpy).cwiseAbs().maxCoeff(), 1e-12)
            << "rpy " << rpy.transpose();
      }
    }
  }
}

TEST(EulerQuat, GimbalLockThrows) {
  EXPECT_THROW(quat_to_euler(euler_to_quat({0.0, kPi / 2, 0.0})),
               std::domain_error);
  EXPECT_THROW(dcm_to_euler(euler_to_dcm({0.3, -kPi / 2 + 1e-9, 1.0})),
               std::domain_error);
  EXPECT_NO_THROW(quat_to_euler(euler_to_quat({0.0, kPi / 2 - 1e-3, 0.0})));
}

TEST(QuatNorm, StaysUnitUnderComposition) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  Eigen::Quaterniond q = euler_to_quat({0.1, -0.2, 0.5});
  for (int i = 0; i < 10000; ++i) {
    q = quat_exp({u(rng), u(rng), u(rng)}) * q;
    q.normalize();
  }
  EXPECT_NEAR(q.norm(), 1.0, 1e-9);
}

TEST(WrapAngle, PrincipalInterval) {
  EXPECT_NEAR(wrap_angle(kPi + 0.1), -kPi + 0.1, 1e-12);
  EXPECT_NEAR(wrap_angle(-kPi - 0.1), kPi - 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(wrap_angle(0.25), 0.25);
  EXPECT_NEAR(wrap_angle(7.0 * kPi + 0.3), -kPi + 0.3, 1e-9);
}

TEST(QuatAngle, RecoverRotationBetween) {
  const Eigen::Quaterniond a = euler_to_quat({0.1, 0.0, 1.0});
  const Eigen::Quaterniond b = quat_exp(Vec3(0.0, 0.02, 0.0)) * a;
  EXPECT_NEAR(quat_angle(a, b), 0.02, 1e-12);
  EXPECT_NEAR(quat_angle(a, a), 0.0, 1e-12);
}

// The tilt-to-Euler map should match central differences of the Euler
// extraction under a small left rotation at several attitudes.
TEST(NavTiltToEuler, MatchesFiniteDifferences) {
  const Vec3 attitudes[] = {{0.0, 0.0, 0.0},
                            {0.1, -0.3, 2.1},
                            {-0.4, 0.25, -2.8},
                            {0.05, 0.0, 1.5707}};
  const double h = 1e-6;
  for (const Vec3& rpy : attitudes) {
    const Eigen::Quaterniond q0 = euler_to_quat(rpy);
    const Mat3 m = nav_tilt_to_euler(rpy);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 dv = Vec3::Zero();
      dv(axis) = h;
      const Vec3 plus = quat_to_euler(quat_exp(dv) * q0);
      const Vec3 minus = quat_to_euler(quat_exp(-dv) * q0);
      Vec3 num;
      for (int i = 0; i < 3; ++i) {
        num(i) = wrap_angle(plus(i) - minus(i)) / (2.0 * h);
      }
      EXPECT_LT((num - m.col(axis)).cwiseAbs().maxCoeff(), 1e-6)
          << "attitude " << rpy.transpose() << " axis " << axis;
    }
  }
}

TEST(NavTiltToEuler, ThrowsNearGimbalLock) {
  EXPECT_THROW(nav_tilt_to_euler({0.0, kPi / 2, 0.0}), std::domain_error);
}

}  // namespace
}  // namespace cnav
