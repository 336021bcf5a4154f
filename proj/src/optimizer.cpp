#include "movemes/optimizer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "movemes/geometry.hpp"
#include "movemes/parallel.hpp"
#include "movemes/preprocess.hpp"
#include "movemes/rng.hpp"
#include "movemes/svd.hpp"

namespace movemes {

namespace {

// Sub-stream tags so initialization draws never perturb the visit order.
constexpr std::uint64_t kStreamAngles = 0x616e676c65ULL;
constexpr std::uint64_t kStreamBases = 0x6261736573ULL;
constexpr std::uint64_t kStreamVisits = 0x7669736974ULL;

void mask_residual(const PoseSet& set, int j, Eigen::VectorXd& residual) {
  const int d = static_cast<int>(residual.size()) / 2;
  for (int i = 0; i < d; ++i) {
    if (!set.visibility(i, j)) {
      residual(i) = 0.0;
      residual(d + i) = 0.0;
    }
  }
}

}  // namespace

double soft_threshold(double x, double lambda) {
  if (lambda < 0) throw std::invalid_argument("soft threshold needs lambda >= 0");
  const double mag = std::abs(x) - lambda;
  return mag > 0 ? (x > 0 ? mag : -mag) : 0.0;
}

void grad_into(const FactorModel& model, const PoseSet& set, int j, bool include_reg,
               Gradients& out) {
  if (j < 0 || j >= model.n())
    throw std::invalid_argument("pose index out of range: " + std::to_string(j));
  const int d = model.joint_count();
  const auto v = model.coeffs.col(j);
  const bool masked = model.config.mask_visibility && set.visibility.size() > 0;

  out.theta = 0.0;
  switch (model.variant) {
    case Variant::svd: {
      Eigen::VectorXd residual = set.coords.col(j) - model.mean - model.bases * v;
      if (masked) mask_residual(set, j, residual);
      out.bases = -2.0 * residual * v.transpose();
      out.coeffs.noalias() = -2.0 * model.bases.transpose() * residual;
      break;
    }
    case Variant::svd_rot: {
      const int a = model.cluster_of[static_cast<std::size_t>(j)];
      const auto& u = model.cluster_bases[static_cast<std::size_t>(a)];
      Eigen::VectorXd residual =
          set.coords.col(j) - model.cluster_means[static_cast<std::size_t>(a)] - u * v;
      if (masked) mask_residual(set, j, residual);
      out.cluster_bases.resize(model.cluster_bases.size());
      for (auto& g : out.cluster_bases) {
        g.resize(u.rows(), u.cols());
        g.setZero();
      }
      out.cluster_bases[static_cast<std::size_t>(a)] = -2.0 * residual * v.transpose();
      out.coeffs.noalias() = -2.0 * u.transpose() * residual;
      break;
    }
    case Variant::lfa2d: {
      const int a = model.cluster_of[static_cast<std::size_t>(j)];
      const auto& ux = model.bases_x[static_cast<std::size_t>(a)];
      Eigen::VectorXd residual(2 * d);
      residual.head(d) = set.coords.col(j).head(d) -
                         model.cluster_means[static_cast<std::size_t>(a)].head(d) - ux * v;
      residual.tail(d) = set.coords.col(j).tail(d) -
                         model.cluster_means[static_cast<std::size_t>(a)].tail(d) -
                         model.bases_y * v;
      if (masked) mask_residual(set, j, residual);
      out.bases_x.resize(model.bases_x.size());
      for (auto& g : out.bases_x) {
        g.resize(d, model.rank);
        g.setZero();
      }
      out.bases_x[static_cast<std::size_t>(a)] = -2.0 * residual.head(d) * v.transpose();
      out.bases_y = -2.0 * residual.tail(d) * v.transpose();
      out.coeffs.noalias() = -2.0 * (ux.transpose() * residual.head(d) +
                                     model.bases_y.transpose() * residual.tail(d));
      break;
    }
    case Variant::lfa3d: {
      const double theta = model.view_angles(j);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      Eigen::VectorXd recon3d = model.mean + model.bases * v;
      Eigen::VectorXd residual(2 * d);
      residual.head(d) =
          set.coords.col(j).head(d) - (c * recon3d.head(d) + s * recon3d.tail(d));
      residual.tail(d) = set.coords.col(j).tail(d) - recon3d.segment(d, d);
      if (masked) mask_residual(set, j, residual);
      Eigen::VectorXd g3(3 * d);
      g3.head(d) = -2.0 * c * residual.head(d);
      g3.segment(d, d) = -2.0 * residual.tail(d);
      g3.tail(d) = -2.0 * s * residual.head(d);
      out.bases = g3 * v.transpose();
      out.coeffs.noalias() = model.bases.transpose() * g3;
      out.theta = 2.0 * residual.head(d).dot(s * recon3d.head(d) - c * recon3d.tail(d));
      break;
    }
  }

  if (!include_reg) return;
  const double lu = model.config.lambda_bases;
  switch (model.variant) {
    case Variant::svd:
    case Variant::lfa3d:
      out.bases += 2.0 * lu * model.bases;
      break;
    case Variant::svd_rot:
      for (std::size_t a = 0; a < model.cluster_bases.size(); ++a)
        out.cluster_bases[a] += 2.0 * lu * model.cluster_bases[a];
      break;
    case Variant::lfa2d: {
      const int p = model.p();
      for (std::size_t a = 0; a < model.bases_x.size(); ++a)
        out.bases_x[a] += 2.0 * lu * model.bases_x[a];
      out.bases_y += 2.0 * lu * static_cast<double>(p) * model.bases_y;
      const double ls = model.config.lambda_spatial;
      if (ls > 0.0 && p > 1) {
        const Eigen::MatrixXd kappa = model.config.resolved_similarity();
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) {
            const double w = kappa(a, b) + kappa(b, a);
            if (w == 0.0 || a == b) continue;
            out.bases_x[static_cast<std::size_t>(a)] +=
                2.0 * ls * w *
                (model.bases_x[static_cast<std::size_t>(a)] -
                 model.bases_x[static_cast<std::size_t>(b)]);
          }
      }
      break;
    }
  }
}

Gradients grad(const FactorModel& model, const PoseSet& set, int j, bool include_reg) {
  Gradients out;
  grad_into(model, set, j, include_reg, out);
  return out;
}

std::vector<double> init_angles(const PoseSet& set, AngleInit mode, int p, std::uint64_t seed) {
  const int n = set.n();
  std::vector<double> angles(static_cast<std::size_t>(n));
  switch (mode) {
    case AngleInit::random: {
      Rng rng(seed);
      for (auto& a : angles) a = rng.uniform(0.0, kTwoPi);
      break;
    }
    case AngleInit::coarse: {
      if (!set.has_gt_angles())
        throw DataError("coarse angle initialization requires ground-truth angles");
      if (p < 1) throw std::invalid_argument("coarse init needs p >= 1");
      for (int j = 0; j < n; ++j)
        angles[static_cast<std::size_t>(j)] =
            cluster_center(assign_cluster(set.gt_angles[static_cast<std::size_t>(j)], p), p);
      break;
    }
    case AngleInit::ground_truth: {
      if (!set.has_gt_angles())
        throw DataError("ground-truth angle initialization requires ground-truth angles");
      for (int j = 0; j < n; ++j)
        angles[static_cast<std::size_t>(j)] = wrap_angle(set.gt_angles[static_cast<std::size_t>(j)]);
      break;
    }
  }
  return angles;
}

Eigen::MatrixXd lift_poses(const PoseSet& set, const std::vector<double>& angles) {
  const int d = set.d();
  const int n = set.n();
  if (static_cast<int>(angles.size()) != n)
    throw std::invalid_argument("angle count does not match pose count");
  Eigen::MatrixXd out(3 * d, n);
  for (int j = 0; j < n; ++j) {
    // Un-rotate the observation [px, py, 0]: the canonical point whose
    // rotation by theta projects back onto the observation.
    const double c = std::cos(angles[static_cast<std::size_t>(j)]);
    const double s = std::sin(angles[static_cast<std::size_t>(j)]);
    out.col(j).head(d) = c * set.coords.col(j).head(d);
    out.col(j).segment(d, d) = set.coords.col(j).tail(d);
    out.col(j).tail(d) = s * set.coords.col(j).head(d);
  }
  return out;
}

FactorModel init_bases(const PoseSet& set, Variant variant, const TrainConfig& config,
                       const Eigen::MatrixXd* init3d) {
  config.validate(variant);
  set.validate();
  if (set.n() < 1) throw DataError("cannot initialize a model on an empty dataset");
  const int d = set.d();
  const int n = set.n();
  const int k = config.rank;

  FactorModel model;
  model.variant = variant;
  model.rank = k;
  model.config = config;
  model.skeleton_hash = set.skeleton.hash();

  std::vector<double> angles =
      init_angles(set, config.angle_init, config.clusters, derive_seed(config.seed, kStreamAngles));

  switch (variant) {
    case Variant::svd: {
      model.mean = mean_pose(set, config.mask_visibility);
      const Eigen::MatrixXd centered = set.coords.colwise() - model.mean;
      TruncatedSvd svd = truncated_svd(centered, k);
      model.bases = svd.u;
      model.coeffs = svd.singular.asDiagonal() * svd.v.transpose();
      break;
    }
    case Variant::svd_rot:
    case Variant::lfa2d: {
      const int p = config.clusters;
      model.cluster_of.resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j)
        model.cluster_of[static_cast<std::size_t>(j)] =
            assign_cluster(angles[static_cast<std::size_t>(j)], p);
      // Per-cluster means over members; empty clusters fall back to the
      // global mean so they stay well-defined.
      const Eigen::VectorXd global_mean = mean_pose(set, config.mask_visibility);
      model.cluster_means.assign(static_cast<std::size_t>(p), global_mean);
      for (int a = 0; a < p; ++a) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(2 * d);
        int count = 0;
        for (int j = 0; j < n; ++j) {
          if (model.cluster_of[static_cast<std::size_t>(j)] == a) {
            sum += set.coords.col(j);
            ++count;
          }
        }
        if (count > 0) model.cluster_means[static_cast<std::size_t>(a)] = sum / count;
      }
      if (variant == Variant::svd_rot) {
        model.cluster_bases.resize(static_cast<std::size_t>(p));
        for (int a = 0; a < p; ++a) {
          Rng rng(derive_seed(config.seed, kStreamBases, static_cast<std::uint64_t>(a)));
          auto& u = model.cluster_bases[static_cast<std::size_t>(a)];
          u.resize(2 * d, k);
          for (int col = 0; col < k; ++col)
            for (int row = 0; row < 2 * d; ++row) u(row, col) = rng.uniform(-1.0, 1.0);
        }
      } else {
        model.bases_x.resize(static_cast<std::size_t>(p));
        for (int a = 0; a < p; ++a) {
          Rng rng(derive_seed(config.seed, kStreamBases, static_cast<std::uint64_t>(a)));
          auto& u = model.bases_x[static_cast<std::size_t>(a)];
          u.resize(d, k);
          for (int col = 0; col < k; ++col)
            for (int row = 0; row < d; ++row) u(row, col) = rng.uniform(-1.0, 1.0);
        }
        Rng rng(derive_seed(config.seed, kStreamBases, 0x79ULL << 32));
        model.bases_y.resize(d, k);
        for (int col = 0; col < k; ++col)
          for (int row = 0; row < d; ++row) model.bases_y(row, col) = rng.uniform(-1.0, 1.0);
      }
      model.coeffs = Eigen::MatrixXd::Zero(k, n);
      break;
    }
    case Variant::lfa3d: {
      Eigen::MatrixXd poses3d;
      if (init3d != nullptr) {
        if (init3d->rows() != 3 * d || init3d->cols() != n)
          throw DataError("3-D initialization must be 3d x n (" + std::to_string(3 * d) + "x" +
                          std::to_string(n) + "), got " + std::to_string(init3d->rows()) + "x" +
                          std::to_string(init3d->cols()));
        poses3d = *init3d;
      } else {
        poses3d = lift_poses(set, angles);
      }
      model.mean = poses3d.rowwise().mean();
      const Eigen::MatrixXd centered = poses3d.colwise() - model.mean;
      TruncatedSvd svd = truncated_svd(centered, k);
      model.bases = svd.u;
      model.coeffs = svd.singular.asDiagonal() * svd.v.transpose();
      model.view_angles.resize(n);
      for (int j = 0; j < n; ++j) model.view_angles(j) = angles[static_cast<std::size_t>(j)];
      break;
    }
  }
  return model;
}

namespace {

inline double angle_step(const FactorModel& model, const PoseSet& set, int j, double lr) {
  const int d = model.joint_count();
  const double theta = model.view_angles(j);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::VectorXd recon3d = model.mean + model.bases * model.coeffs.col(j);
  Eigen::VectorXd ex =
      set.coords.col(j).head(d) - (c * recon3d.head(d) + s * recon3d.tail(d));
  if (model.config.mask_visibility && set.visibility.size() > 0) {
    for (int i = 0; i < d; ++i)
      if (!set.visibility(i, j)) ex(i) = 0.0;
  }
  const double g = 2.0 * ex.dot(s * recon3d.head(d) - c * recon3d.tail(d));
  return wrap_angle(theta - lr * g);
}

}  // namespace

void angle_sweep_serial(FactorModel& model, const PoseSet& set, double lr) {
  if (model.variant != Variant::lfa3d)
    throw std::invalid_argument("angle sweep applies to lfa3d only");
  Eigen::VectorXd updated(model.n());
  for (int j = 0; j < model.n(); ++j) updated(j) = angle_step(model, set, j, lr);
  model.view_angles = updated;
}

void angle_sweep(FactorModel& model, const PoseSet& set, double lr) {
  if (model.variant != Variant::lfa3d)
    throw std::invalid_argument("angle sweep applies to lfa3d only");
  Eigen::VectorXd updated(model.n());
  parallel_for(model.n(), [&](std::ptrdiff_t j) {
    updated(j) = angle_step(model, set, static_cast<int>(j), lr);
  });
  model.view_angles = updated;
}

namespace {

void apply_factor_step(FactorModel& model, const Gradients& g, int j, double lr) {
  const TrainConfig& cfg = model.config;
  switch (model.variant) {
    case Variant::svd:
    case Variant::lfa3d:
      model.bases -= lr * g.bases;
      break;
    case Variant::svd_rot:
      for (std::size_t a = 0; a < model.cluster_bases.size(); ++a)
        model.cluster_bases[a] -= lr * g.cluster_bases[a];
      break;
    case Variant::lfa2d:
      for (std::size_t a = 0; a < model.bases_x.size(); ++a)
        model.bases_x[a] -= lr * g.bases_x[a];
      model.bases_y -= lr * g.bases_y;
      break;
  }
  auto v = model.coeffs.col(j);
  v -= lr * g.coeffs;
  const double threshold = lr * cfg.lambda_coeffs;
  for (int i = 0; i < model.rank; ++i) v(i) = soft_threshold(v(i), threshold);
  if (cfg.nonneg_coeffs)
    v = v.cwiseMax(0.0).cwiseMin(1.0);
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace file: " + path);
  out << "epoch,iter,recon_error,reg,total\n";
  char buf[64];
  auto fmt = [&buf](double x) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
  };
  for (const auto& t : trace)
    out << t.epoch << ',' << t.iter << ',' << fmt(t.recon) << ',' << fmt(t.reg) << ','
        << fmt(t.total) << '\n';
}

}  // namespace

FactorModel train(const PoseSet& set, const TrainConfig& config, Variant variant,
                  const Eigen::MatrixXd* init3d, const std::string& trace_csv_path) {
  FactorModel model = init_bases(set, variant, config, init3d);
  const int n = set.n();

  Rng visits(derive_seed(config.seed, kStreamVisits));
  Gradients work;

  ObjectiveValue value = objective(model, set);
  const double initial_total = value.total();
  const double divergence_limit = 1e6 * (initial_total > 0.0 ? initial_total : 1.0);
  model.trace.push_back({0, 0, value.recon, value.reg(), value.total()});

  long iter_count = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int it = 0; it < config.iters_per_epoch; ++it) {
      const int j = static_cast<int>(visits.uniform_index(static_cast<std::uint64_t>(n)));
      grad_into(model, set, j, true, work);
      apply_factor_step(model, work, j, config.lr_factors);
      ++iter_count;
    }
    if (variant == Variant::lfa3d && config.lr_angle > 0.0) {
      for (int sweep = 0; sweep < config.angle_sweeps; ++sweep)
        angle_sweep(model, set, config.lr_angle);
    }
    value = objective(model, set);
    model.trace.push_back({epoch, iter_count, value.recon, value.reg(), value.total()});
    if (!std::isfinite(value.total()) || value.total() > divergence_limit) {
      if (!trace_csv_path.empty()) write_trace_csv(model.trace, trace_csv_path);
      throw NumericalError(
          "training diverged at epoch " + std::to_string(epoch) + ": objective " +
          std::to_string(value.total()) + " vs initial " + std::to_string(initial_total));
    }
  }
  if (!trace_csv_path.empty()) write_trace_csv(model.trace, trace_csv_path);
  return model;
}

}  // namespace movemes
