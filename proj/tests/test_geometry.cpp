#include <doctest.h>

#include <Eigen/LU>
#include <cmath>

#include "movemes/geometry.hpp"
#include "movemes/rng.hpp"
#include "movemes/types.hpp"

using namespace movemes;

TEST_CASE("rotation matrix at zero is the identity") {
  CHECK((rotation_matrix(0.0) - Eigen::Matrix3d::Identity()).norm() == 0.0);
}

TEST_CASE("rotation by pi/2 maps (x,y,z) to (z,y,-x)") {
  Eigen::Vector3d v(1.0, 2.0, 3.0);
  Eigen::Vector3d r = rotation_matrix(kPi / 2) * v;
  CHECK(r(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r(2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("rotations compose additively") {
  Eigen::Matrix3d lhs = rotation_matrix(0.3) * rotation_matrix(0.5);
  CHECK((lhs - rotation_matrix(0.8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotation matrices are orthogonal with unit determinant") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double theta = rng.uniform(-10.0, 10.0);
    Eigen::Matrix3d q = rotation_matrix(theta);
    CHECK((q.transpose() * q - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rotation is 2pi-periodic") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double theta = rng.uniform(0.0, kTwoPi);
    CHECK((rotation_matrix(theta + kTwoPi) - rotation_matrix(theta)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("non-finite angles are rejected") {
  CHECK_THROWS_AS(rotation_matrix(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(rotation_matrix(INFINITY), std::invalid_argument);
}

TEST_CASE("projection at angle zero returns the x,y blocks unchanged") {
  Pose3D pose;
  pose.coords.resize(9);
  pose.coords << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  Pose2D flat = project_to_2d(pose, 0.0);
  for (int i = 0; i < 6; ++i) CHECK(flat.coords(i) == pose.coords(i));
}

TEST_CASE("projection of a single joint at pi/2") {
  Pose3D pose;
  pose.coords.resize(3);
  pose.coords << 1.0, 2.0, 0.0;
  Pose2D flat = project_to_2d(pose, kPi / 2);
  CHECK(flat.coords(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.coords(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("projection matches a per-joint scalar oracle") {
  const int d = 7;
  Rng rng(13);
  Pose3D pose;
  pose.coords.resize(3 * d);
  for (int i = 0; i < 3 * d; ++i) pose.coords(i) = rng.normal();
  const double theta = 0.7;
  Pose2D flat = project_to_2d(pose, theta);

  // Independent computation: plain double arithmetic joint by joint.
  for (int i = 0; i < d; ++i) {
    const double x = pose.coords(i);
    const double y = pose.coords(d + i);
    const double z = pose.coords(2 * d + i);
    const double expect_x = std::cos(theta) * x + std::sin(theta) * z;
    CHECK(flat.coords(i) == doctest::Approx(expect_x).epsilon(1e-12));
    CHECK(flat.coords(d + i) == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("pan projection never moves y coordinates") {
  const int d = 5;
  Rng rng(14);
  Pose3D pose;
  pose.coords.resize(3 * d);
  for (int i = 0; i < 3 * d; ++i) pose.coords(i) = rng.normal();
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = rng.uniform(0.0, kTwoPi);
    Pose2D flat = project_to_2d(pose, theta);
    for (int i = 0; i < d; ++i) CHECK(flat.coords(d + i) == pose.coords(d + i));
  }
}

TEST_CASE("projection rejects malformed input") {
  Pose3D pose;
  pose.coords.resize(4);
  pose.coords.setZero();
  CHECK_THROWS_AS(project_to_2d(pose, 0.0), std::invalid_argument);
  pose.coords.resize(6);
  pose.coords.setZero();
  CHECK_THROWS_AS(project_to_2d(pose, std::nan("")), std::invalid_argument);
}

TEST_CASE("wrap_angle lands in [0, 2pi)") {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(rng.uniform(-50.0, 50.0));
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kTwoPi) == 0.0);
}
