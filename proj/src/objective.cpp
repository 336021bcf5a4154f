#include "movemes/objective.hpp"

#include <cmath>
#include <limits>

#include "movemes/geometry.hpp"
#include "movemes/parallel.hpp"

namespace movemes {

namespace {

void mask_rows(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& visibility,
               int j, Eigen::VectorXd& residual) {
  const int d = static_cast<int>(residual.size()) / 2;
  for (int i = 0; i < d; ++i) {
    if (!visibility(i, j)) {
      residual(i) = 0.0;
      residual(d + i) = 0.0;
    }
  }
}

}  // namespace

Eigen::VectorXd reconstruct_coords(const FactorModel& model,
                                   const Eigen::VectorXd& coeffs, double theta,
                                   int cluster) {
  switch (model.variant) {
    case Variant::svd:
      return model.mean + model.bases * coeffs;
    case Variant::svd_rot:
      return model.cluster_means[static_cast<std::size_t>(cluster)] +
             model.cluster_bases[static_cast<std::size_t>(cluster)] * coeffs;
    case Variant::lfa2d: {
      const int d = model.joint_count();
      Eigen::VectorXd out(2 * d);
      out.head(d) = model.bases_x[static_cast<std::size_t>(cluster)] * coeffs;
      out.tail(d) = model.bases_y * coeffs;
      out += model.cluster_means[static_cast<std::size_t>(cluster)];
      return out;
    }
    case Variant::lfa3d:
      return project_vector(model.mean + model.bases * coeffs, theta);
  }
  throw std::logic_error("unreachable");
}

Pose2D reconstruct(const FactorModel& model, int j) {
  if (j < 0 || j >= model.n())
    throw std::invalid_argument("pose index out of range: " + std::to_string(j));
  Pose2D out;
  const double theta = model.variant == Variant::lfa3d ? model.view_angles(j) : 0.0;
  const int cluster = is_clustered(model.variant) ? model.cluster_of[static_cast<std::size_t>(j)] : 0;
  out.coords = reconstruct_coords(model, model.coeffs.col(j), theta, cluster);
  return out;
}

double instance_error(const FactorModel& model, const PoseSet& set, int j) {
  const double theta = model.variant == Variant::lfa3d ? model.view_angles(j) : 0.0;
  const int cluster = is_clustered(model.variant) ? model.cluster_of[static_cast<std::size_t>(j)] : 0;
  Eigen::VectorXd residual =
      set.coords.col(j) - reconstruct_coords(model, model.coeffs.col(j), theta, cluster);
  if (model.config.mask_visibility && set.visibility.size() > 0)
    mask_rows(set.visibility, j, residual);
  return residual.squaredNorm();
}

double spatial_regularizer(const FactorModel& model) {
  if (model.variant != Variant::lfa2d)
    throw std::invalid_argument("spatial regularizer is defined for lfa2d only");
  const int p = model.p();
  const Eigen::MatrixXd kappa = model.config.resolved_similarity();
  double sum = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      if (kappa(a, b) == 0.0) continue;
      sum += kappa(a, b) * (model.bases_x[static_cast<std::size_t>(a)] -
                            model.bases_x[static_cast<std::size_t>(b)])
                               .squaredNorm();
    }
  return model.config.lambda_spatial * sum;
}

namespace {

ObjectiveValue finish_objective(const FactorModel& model, double recon) {
  ObjectiveValue out;
  out.recon = recon;
  const double lu = model.config.lambda_bases;
  switch (model.variant) {
    case Variant::svd:
    case Variant::lfa3d:
      out.reg_smooth = lu * model.bases.squaredNorm();
      break;
    case Variant::svd_rot:
      for (const auto& u : model.cluster_bases) out.reg_smooth += lu * u.squaredNorm();
      break;
    case Variant::lfa2d: {
      // The shared y block appears in every cluster's Frobenius norm.
      for (const auto& u : model.bases_x) out.reg_smooth += lu * u.squaredNorm();
      out.reg_smooth += lu * static_cast<double>(model.p()) * model.bases_y.squaredNorm();
      out.reg_smooth += spatial_regularizer(model);
      break;
    }
  }
  out.reg_l1 = model.config.lambda_coeffs * model.coeffs.cwiseAbs().sum();
  return out;
}

}  // namespace

ObjectiveValue objective(const FactorModel& model, const PoseSet& set) {
  if (set.n() != model.n()) throw std::invalid_argument("model/set pose count mismatch");
  const double recon =
      blocked_sum(set.n(), [&](std::ptrdiff_t j) { return instance_error(model, set, static_cast<int>(j)); });
  return finish_objective(model, recon);
}

ObjectiveValue objective_serial(const FactorModel& model, const PoseSet& set) {
  if (set.n() != model.n()) throw std::invalid_argument("model/set pose count mismatch");
  const double recon =
      serial_sum(set.n(), [&](std::ptrdiff_t j) { return instance_error(model, set, static_cast<int>(j)); });
  return finish_objective(model, recon);
}

double residual_rmse(const Eigen::VectorXd& residual) {
  const double d = static_cast<double>(residual.size()) / 2.0;
  return std::sqrt(residual.squaredNorm() / d);
}

namespace {

double soft_threshold_local(double x, double lambda) {
  const double mag = std::abs(x) - lambda;
  return mag > 0 ? (x > 0 ? mag : -mag) : 0.0;
}

}  // namespace

EncodeResult encode(const FactorModel& model, const Pose2D& pose, double theta_init) {
  if (model.variant == Variant::svd_rot)
    throw std::invalid_argument("encode is not defined for svd-rot (no global bases)");
  const int d = model.joint_count();
  if (pose.coords.size() != 2 * d)
    throw std::invalid_argument("pose dimension does not match model");
  const TrainConfig& cfg = model.config;
  const bool masked = cfg.mask_visibility && !pose.visibility.empty();
  int visible = d;
  if (masked) {
    visible = 0;
    for (int i = 0; i < d; ++i) visible += pose.visible(i) ? 1 : 0;
    if (visible == 0) throw std::invalid_argument("pose has no visible joints");
  }

  double theta = wrap_angle(theta_init);
  const int cluster = model.variant == Variant::lfa2d ? assign_cluster(theta, model.p()) : 0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(model.rank);

  EncodeResult best;
  best.rmse = std::numeric_limits<double>::infinity();
  Eigen::VectorXd residual(2 * d), grad_v(model.rank);
  Eigen::VectorXd recon3d;

  auto eval_and_keep_best = [&] {
    residual = pose.coords - reconstruct_coords(model, v, theta, cluster);
    if (masked) {
      for (int i = 0; i < d; ++i)
        if (!pose.visible(i)) {
          residual(i) = 0.0;
          residual(d + i) = 0.0;
        }
    }
    const double rmse = std::sqrt(residual.squaredNorm() / static_cast<double>(visible));
    if (rmse < best.rmse) {
      best.coeffs = v;
      best.theta = theta;
      best.rmse = rmse;
    }
  };

  const double threshold = cfg.lr_factors * cfg.lambda_coeffs;
  for (int it = 0; it < cfg.encode_iters; ++it) {
    eval_and_keep_best();
    if (model.variant == Variant::lfa3d) {
      recon3d = model.mean + model.bases * v;
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const auto ex = residual.head(d);
      const auto ey = residual.tail(d);
      Eigen::VectorXd g3(3 * d);
      g3.head(d) = -2.0 * c * ex;
      g3.segment(d, d) = -2.0 * ey;
      g3.tail(d) = -2.0 * s * ex;
      grad_v.noalias() = model.bases.transpose() * g3;
      const double g_theta =
          2.0 * ex.dot(s * recon3d.head(d) - c * recon3d.tail(d));
      theta = wrap_angle(theta - cfg.lr_angle * g_theta);
    } else if (model.variant == Variant::lfa2d) {
      grad_v.noalias() =
          -2.0 * (model.bases_x[static_cast<std::size_t>(cluster)].transpose() * residual.head(d) +
                  model.bases_y.transpose() * residual.tail(d));
    } else {
      grad_v.noalias() = -2.0 * model.bases.transpose() * residual;
    }
    v -= cfg.lr_factors * grad_v;
    for (int i = 0; i < model.rank; ++i) v(i) = soft_threshold_local(v(i), threshold);
    if (cfg.nonneg_coeffs)
      v = v.cwiseMax(0.0).cwiseMin(1.0);
  }
  eval_and_keep_best();
  return best;
}

EncodeResult encode_multi_start(const FactorModel& model, const Pose2D& pose, int starts) {
  if (starts < 1) throw std::invalid_argument("encode needs at least one start");
  EncodeResult best;
  best.rmse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < starts; ++i) {
    EncodeResult r = encode(model, pose, cluster_center(i, starts));
    if (r.rmse < best.rmse) best = r;
  }
  return best;
}

std::vector<EncodeResult> encode_batch(const FactorModel& model, const PoseSet& set, int starts) {
  std::vector<EncodeResult> out(static_cast<std::size_t>(set.n()));
  parallel_for(set.n(), [&](std::ptrdiff_t j) {
    out[static_cast<std::size_t>(j)] = encode_multi_start(model, set.pose(static_cast<int>(j)), starts);
  });
  return out;
}

std::vector<EncodeResult> encode_batch_serial(const FactorModel& model, const PoseSet& set,
                                              int starts) {
  std::vector<EncodeResult> out(static_cast<std::size_t>(set.n()));
  for (int j = 0; j < set.n(); ++j)
    out[static_cast<std::size_t>(j)] = encode_multi_start(model, set.pose(j), starts);
  return out;
}

}  // namespace movemes
