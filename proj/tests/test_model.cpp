#include <doctest.h>

#include <cmath>
#include <vector>

#include "movemes/geometry.hpp"
#include "movemes/objective.hpp"
#include "movemes/optimizer.hpp"
#include "movemes/rng.hpp"
#include "movemes/svd.hpp"
#include "test_support.hpp"

using namespace movemes;

namespace {

// Scalar-loop objective oracle: plain double arithmetic, no linear algebra
// library on the evaluation path.
double oracle_objective(const FactorModel& m, const PoseSet& set) {
  const int d = m.joint_count();
  const int n = m.n();
  const int k = m.rank;
  double recon = 0.0;
  for (int j = 0; j < n; ++j) {
    std::vector<double> rec(static_cast<std::size_t>(2 * d), 0.0);
    switch (m.variant) {
      case Variant::svd:
        for (int i = 0; i < 2 * d; ++i) {
          double s = m.mean(i);
          for (int c = 0; c < k; ++c) s += m.bases(i, c) * m.coeffs(c, j);
          rec[static_cast<std::size_t>(i)] = s;
        }
        break;
      case Variant::svd_rot: {
        const int a = m.cluster_of[static_cast<std::size_t>(j)];
        for (int i = 0; i < 2 * d; ++i) {
          double s = m.cluster_means[static_cast<std::size_t>(a)](i);
          for (int c = 0; c < k; ++c)
            s += m.cluster_bases[static_cast<std::size_t>(a)](i, c) * m.coeffs(c, j);
          rec[static_cast<std::size_t>(i)] = s;
        }
        break;
      }
      case Variant::lfa2d: {
        const int a = m.cluster_of[static_cast<std::size_t>(j)];
        for (int i = 0; i < d; ++i) {
          double sx = m.cluster_means[static_cast<std::size_t>(a)](i);
          double sy = m.cluster_means[static_cast<std::size_t>(a)](d + i);
          for (int c = 0; c < k; ++c) {
            sx += m.bases_x[static_cast<std::size_t>(a)](i, c) * m.coeffs(c, j);
            sy += m.bases_y(i, c) * m.coeffs(c, j);
          }
          rec[static_cast<std::size_t>(i)] = sx;
          rec[static_cast<std::size_t>(d + i)] = sy;
        }
        break;
      }
      case Variant::lfa3d: {
        const double c0 = std::cos(m.view_angles(j));
        const double s0 = std::sin(m.view_angles(j));
        for (int i = 0; i < d; ++i) {
          double x = m.mean(i), y = m.mean(d + i), z = m.mean(2 * d + i);
          for (int c = 0; c < k; ++c) {
            x += m.bases(i, c) * m.coeffs(c, j);
            y += m.bases(d + i, c) * m.coeffs(c, j);
            z += m.bases(2 * d + i, c) * m.coeffs(c, j);
          }
          rec[static_cast<std::size_t>(i)] = c0 * x + s0 * z;
          rec[static_cast<std::size_t>(d + i)] = y;
        }
        break;
      }
    }
    for (int i = 0; i < 2 * d; ++i) {
      const double e = set.coords(i, j) - rec[static_cast<std::size_t>(i)];
      recon += e * e;
    }
  }

  double reg = 0.0;
  const double lu = m.config.lambda_bases;
  switch (m.variant) {
    case Variant::svd:
    case Variant::lfa3d:
      for (Eigen::Index i = 0; i < m.bases.rows(); ++i)
        for (int c = 0; c < k; ++c) reg += lu * m.bases(i, c) * m.bases(i, c);
      break;
    case Variant::svd_rot:
      for (const auto& u : m.cluster_bases)
        for (Eigen::Index i = 0; i < u.rows(); ++i)
          for (int c = 0; c < k; ++c) reg += lu * u(i, c) * u(i, c);
      break;
    case Variant::lfa2d: {
      for (const auto& u : m.bases_x)
        for (int i = 0; i < d; ++i)
          for (int c = 0; c < k; ++c) reg += lu * u(i, c) * u(i, c);
      for (int i = 0; i < d; ++i)
        for (int c = 0; c < k; ++c)
          reg += lu * m.p() * m.bases_y(i, c) * m.bases_y(i, c);
      const Eigen::MatrixXd kappa = m.config.resolved_similarity();
      for (int a = 0; a < m.p(); ++a)
        for (int b = 0; b < m.p(); ++b) {
          double diff2 = 0.0;
          for (int i = 0; i < d; ++i)
            for (int c = 0; c < k; ++c) {
              const double diff = m.bases_x[static_cast<std::size_t>(a)](i, c) -
                                  m.bases_x[static_cast<std::size_t>(b)](i, c);
              diff2 += diff * diff;
            }
          reg += m.config.lambda_spatial * kappa(a, b) * diff2;
        }
      break;
    }
  }
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < k; ++c) reg += m.config.lambda_coeffs * std::abs(m.coeffs(c, j));
  return recon + reg;
}

}  // namespace

TEST_CASE("svd reconstruction with zero coefficients is the mean pose") {
  FactorModel m = test::random_model(Variant::svd, 4, 3, 2, 1, 41);
  m.coeffs.col(1).setZero();
  CHECK((reconstruct(m, 1).coords - m.mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lfa3d reconstruction with zero coefficients at angle zero is the 3-D mean's x,y") {
  FactorModel m = test::random_model(Variant::lfa3d, 4, 3, 2, 1, 42);
  m.coeffs.col(0).setZero();
  m.view_angles(0) = 0.0;
  const Eigen::VectorXd rec = reconstruct(m, 0).coords;
  CHECK((rec.head(4) - m.mean.head(4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rec.tail(4) - m.mean.segment(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lfa3d reconstruction equals a per-joint projection oracle") {
  const int d = 6;
  FactorModel m = test::random_model(Variant::lfa3d, d, 5, 3, 1, 43);
  for (int j = 0; j < 5; ++j) {
    Pose3D full;
    full.coords = m.mean + m.bases * m.coeffs.col(j);
    const Pose2D expect = project_to_2d(full, m.view_angles(j));
    CHECK((reconstruct(m, j).coords - expect.coords).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("reconstruction rejects out-of-range indices") {
  FactorModel m = test::random_model(Variant::svd, 3, 4, 2, 1, 44);
  CHECK_THROWS_AS(reconstruct(m, 4), std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(m, -1), std::invalid_argument);
}

TEST_CASE("a perfect model scores zero objective at lambda zero") {
  const int d = 5, n = 8, k = 3;
  FactorModel m = test::random_model(Variant::lfa3d, d, n, k, 1, 45);
  m.config.lambda_bases = m.config.lambda_coeffs = 0.0;
  PoseSet set = test::random_pose_set(d, n, 46);
  for (int j = 0; j < n; ++j) set.coords.col(j) = reconstruct(m, j).coords;
  CHECK(objective(m, set).total() < 1e-10);
}

TEST_CASE("zero bases and coefficients leave the centered variance") {
  const int d = 4, n = 10, k = 2;
  PoseSet set = test::random_pose_set(d, n, 47);
  FactorModel m = test::random_model(Variant::svd, d, n, k, 1, 48);
  m.bases.setZero();
  m.coeffs.setZero();
  m.mean = set.coords.rowwise().mean();
  m.config.lambda_bases = m.config.lambda_coeffs = 0.0;
  double centered = 0.0;
  for (int j = 0; j < n; ++j) centered += (set.coords.col(j) - m.mean).squaredNorm();
  CHECK(objective(m, set).total() == doctest::Approx(centered).epsilon(1e-12));
}

TEST_CASE("objective matches the scalar-loop oracle on every variant") {
  const int d = 3, n = 5, k = 2, p = 3;
  PoseSet set = test::random_pose_set(d, n, 49);
  int seed = 50;
  for (Variant variant : {Variant::svd, Variant::svd_rot, Variant::lfa2d, Variant::lfa3d}) {
    FactorModel m = test::random_model(variant, d, n, k, p, static_cast<std::uint64_t>(seed++));
    m.config.lambda_bases = 0.017;
    m.config.lambda_coeffs = 0.031;
    m.config.lambda_spatial = 0.007;
    const double expect = oracle_objective(m, set);
    CHECK(objective(m, set).total() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(objective_serial(m, set).total() == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("objective decomposition is exact") {
  FactorModel m = test::random_model(Variant::lfa2d, 4, 6, 2, 3, 57);
  PoseSet set = test::random_pose_set(4, 6, 58);
  const ObjectiveValue value = objective(m, set);
  CHECK(value.total() == value.recon + value.reg_smooth + value.reg_l1);
  CHECK(value.reg() == value.reg_smooth + value.reg_l1);
}

TEST_CASE("spatial regularizer: identical clusters cost nothing") {
  FactorModel m = test::random_model(Variant::lfa2d, 4, 6, 2, 3, 59);
  for (int a = 1; a < 3; ++a) m.bases_x[static_cast<std::size_t>(a)] = m.bases_x[0];
  CHECK(spatial_regularizer(m) == 0.0);
}

TEST_CASE("spatial regularizer: symmetric pair arithmetic") {
  // p = 2, kappa symmetric ones, |Ux(0) - Ux(1)|_F = 2, lambda = 0.5
  // ordered double sum -> 0.5 * (4 + 4) = 4
  FactorModel m = test::random_model(Variant::lfa2d, 2, 3, 2, 2, 60);
  m.config.lambda_spatial = 0.5;
  m.config.clusters = 2;
  m.config.cluster_similarity = Eigen::MatrixXd::Ones(2, 2);
  m.bases_x[0].setZero();
  m.bases_x[1].setZero();
  m.bases_x[1](0, 0) = 2.0;
  CHECK(spatial_regularizer(m) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("spatial regularizer matches a double-loop oracle") {
  FactorModel m = test::random_model(Variant::lfa2d, 5, 4, 3, 4, 61);
  m.config.lambda_spatial = 0.13;
  m.config.clusters = 4;
  const Eigen::MatrixXd kappa = m.config.resolved_similarity();
  double oracle = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double diff2 = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int c = 0; c < 3; ++c) {
          const double diff = m.bases_x[static_cast<std::size_t>(a)](i, c) -
                              m.bases_x[static_cast<std::size_t>(b)](i, c);
          diff2 += diff * diff;
        }
      oracle += 0.13 * kappa(a, b) * diff2;
    }
  CHECK(spatial_regularizer(m) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("spatial regularizer rejects non-clustered variants") {
  FactorModel m = test::random_model(Variant::svd, 3, 3, 2, 1, 62);
  CHECK_THROWS_AS(spatial_regularizer(m), std::invalid_argument);
}

TEST_CASE("lfa3d y block of the projection is independent of the view angle") {
  const int d = 5;
  FactorModel m = test::random_model(Variant::lfa3d, d, 2, 3, 1, 63);
  const Eigen::VectorXd v = m.coeffs.col(0);
  const Eigen::VectorXd at_zero = reconstruct_coords(m, v, 0.0, 0);
  Rng rng(64);
  for (int i = 0; i < 25; ++i) {
    const Eigen::VectorXd rec = reconstruct_coords(m, v, rng.uniform(0.0, kTwoPi), 0);
    CHECK((rec.tail(d) - at_zero.tail(d)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rank-k SVD beats random perturbations on the plain least-squares loss") {
  const int d = 3, n = 12, k = 2;
  PoseSet set = test::random_pose_set(d, n, 65);
  TrainConfig config;
  config.rank = k;
  config.lambda_bases = config.lambda_coeffs = config.lambda_spatial = 0.0;
  FactorModel best = init_bases(set, Variant::svd, config);
  const double best_total = objective(best, set).total();
  Rng rng(66);
  for (int trial = 0; trial < 100; ++trial) {
    FactorModel perturbed = best;
    for (Eigen::Index i = 0; i < perturbed.bases.size(); ++i)
      perturbed.bases.data()[i] += rng.normal(0.0, 0.05);
    for (Eigen::Index i = 0; i < perturbed.coeffs.size(); ++i)
      perturbed.coeffs.data()[i] += rng.normal(0.0, 0.05);
    CHECK(objective(perturbed, set).total() >= best_total - 1e-9);
  }
}

TEST_CASE("encode recovers a pose generated by the model") {
  const int d = 5, k = 3;
  FactorModel m = test::random_model(Variant::lfa3d, d, 2, k, 1, 67);
  m.config.lambda_coeffs = 0.0;
  m.config.lr_factors = 0.02;
  m.config.lr_angle = 0.002;
  m.config.encode_iters = 3000;
  Rng rng(68);
  Eigen::VectorXd v_true(k);
  for (int i = 0; i < k; ++i) v_true(i) = rng.uniform(-1.0, 1.0);
  const double theta_true = 2.1;
  Pose2D pose;
  pose.coords = reconstruct_coords(m, v_true, theta_true, 0);
  const EncodeResult fit = encode(m, pose, theta_true);
  CHECK(fit.rmse <= 1e-4);
}

TEST_CASE("a heavy L1 weight shrinks encode coefficients to zero") {
  const int d = 4, k = 2;
  FactorModel m = test::random_model(Variant::lfa3d, d, 2, k, 1, 69);
  m.config.lambda_coeffs = 1e6;
  m.config.lr_factors = 0.02;
  m.config.lr_angle = 0.0;
  m.config.encode_iters = 50;
  Rng rng(70);
  Eigen::VectorXd v_true(k);
  for (int i = 0; i < k; ++i) v_true(i) = rng.uniform(-0.2, 0.2);
  const double theta = 0.8;
  Pose2D pose;
  pose.coords = reconstruct_coords(m, v_true, theta, 0);
  const EncodeResult fit = encode(m, pose, theta);
  CHECK(fit.coeffs.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd baseline_residual =
      pose.coords - reconstruct_coords(m, Eigen::VectorXd::Zero(k), theta, 0);
  CHECK(fit.rmse == doctest::Approx(residual_rmse(baseline_residual)).epsilon(1e-12));
}

TEST_CASE("encode rejects svd-rot models") {
  FactorModel m = test::random_model(Variant::svd_rot, 3, 4, 2, 2, 71);
  Pose2D pose;
  pose.coords = Eigen::VectorXd::Zero(6);
  CHECK_THROWS_AS(encode(m, pose, 0.0), std::invalid_argument);
}
