#include "movemes/model.hpp"

#include <cmath>
#include <stdexcept>

namespace movemes {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::svd: return "svd";
    case Variant::svd_rot: return "svd-rot";
    case Variant::lfa2d: return "lfa2d";
    case Variant::lfa3d: return "lfa3d";
  }
  throw std::logic_error("unreachable");
}

Variant variant_from_string(const std::string& name) {
  if (name == "svd") return Variant::svd;
  if (name == "svd-rot") return Variant::svd_rot;
  if (name == "lfa2d") return Variant::lfa2d;
  if (name == "lfa3d") return Variant::lfa3d;
  throw std::invalid_argument("unknown model variant '" + name +
                              "' (expected svd, svd-rot, lfa2d or lfa3d)");
}

bool is_clustered(Variant v) { return v == Variant::svd_rot || v == Variant::lfa2d; }

std::string to_string(AngleInit m) {
  switch (m) {
    case AngleInit::random: return "random";
    case AngleInit::coarse: return "coarse";
    case AngleInit::ground_truth: return "ground-truth";
  }
  throw std::logic_error("unreachable");
}

AngleInit angle_init_from_string(const std::string& name) {
  if (name == "random") return AngleInit::random;
  if (name == "coarse") return AngleInit::coarse;
  if (name == "ground-truth") return AngleInit::ground_truth;
  throw std::invalid_argument("unknown angle init '" + name +
                              "' (expected random, coarse or ground-truth)");
}

void TrainConfig::validate(Variant variant) const {
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (lambda_bases < 0 || lambda_coeffs < 0 || lambda_spatial < 0)
    throw std::invalid_argument("regularization weights must be nonnegative");
  if (epochs < 0 || iters_per_epoch < 0)
    throw std::invalid_argument("epochs and iterations must be nonnegative");
  if (lr_factors < 0 || lr_angle < 0)
    throw std::invalid_argument("learning rates must be nonnegative");
  if (angle_sweeps < 0) throw std::invalid_argument("angle_sweeps must be nonnegative");
  if (encode_iters < 1) throw std::invalid_argument("encode_iters must be >= 1");
  if (is_clustered(variant) && clusters < 1)
    throw std::invalid_argument("clustered variants need clusters >= 1");
  if (cluster_similarity.size() > 0 &&
      (cluster_similarity.rows() != clusters || cluster_similarity.cols() != clusters))
    throw std::invalid_argument("cluster similarity matrix must be p x p");
  if (cluster_similarity.size() > 0 && cluster_similarity.minCoeff() < 0)
    throw std::invalid_argument("cluster similarity weights must be nonnegative");
}

Eigen::MatrixXd TrainConfig::resolved_similarity() const {
  if (cluster_similarity.size() > 0) return cluster_similarity;
  Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(clusters, clusters);
  if (clusters < 2) return kappa;
  for (int a = 0; a < clusters; ++a) {
    kappa(a, (a + 1) % clusters) = 1.0;
    kappa((a + 1) % clusters, a) = 1.0;
  }
  return kappa;
}

int assign_cluster(double theta, int p) {
  const double w = wrap_angle(theta);
  int a = static_cast<int>(std::floor(w / (kTwoPi / p)));
  if (a >= p) a = p - 1;
  if (a < 0) a = 0;
  return a;
}

double cluster_center(int a, int p) { return (2 * a + 1) * kPi / p; }

int FactorModel::p() const {
  switch (variant) {
    case Variant::svd_rot: return static_cast<int>(cluster_bases.size());
    case Variant::lfa2d: return static_cast<int>(bases_x.size());
    default: return 1;
  }
}

int FactorModel::joint_count() const {
  switch (variant) {
    case Variant::svd: return static_cast<int>(bases.rows()) / 2;
    case Variant::lfa3d: return static_cast<int>(bases.rows()) / 3;
    case Variant::svd_rot:
      return cluster_bases.empty() ? 0 : static_cast<int>(cluster_bases[0].rows()) / 2;
    case Variant::lfa2d: return static_cast<int>(bases_y.rows());
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXd FactorModel::bases_of_cluster(int a) const {
  if (a < 0 || a >= p()) throw std::invalid_argument("cluster index out of range: " + std::to_string(a));
  if (variant == Variant::svd_rot) return cluster_bases[static_cast<std::size_t>(a)];
  if (variant == Variant::lfa2d) {
    const int d = joint_count();
    Eigen::MatrixXd u(2 * d, rank);
    u.topRows(d) = bases_x[static_cast<std::size_t>(a)];
    u.bottomRows(d) = bases_y;
    return u;
  }
  throw std::invalid_argument("bases_of_cluster requires a clustered variant");
}

void FactorModel::validate() const {
  if (rank < 1) throw DataError("model rank must be >= 1");
  if (coeffs.rows() != rank) throw DataError("coefficient rows do not match rank");
  const int nn = n();
  switch (variant) {
    case Variant::svd:
      if (bases.cols() != rank) throw DataError("bases columns do not match rank");
      if (mean.size() != bases.rows()) throw DataError("mean size does not match bases");
      break;
    case Variant::lfa3d:
      if (bases.cols() != rank) throw DataError("bases columns do not match rank");
      if (bases.rows() % 3 != 0) throw DataError("lfa3d bases rows must be a multiple of 3");
      if (mean.size() != bases.rows()) throw DataError("mean size does not match bases");
      if (view_angles.size() != nn) throw DataError("view angle count does not match poses");
      break;
    case Variant::svd_rot:
      if (cluster_bases.empty()) throw DataError("svd-rot model has no cluster bases");
      for (const auto& u : cluster_bases)
        if (u.cols() != rank || u.rows() != cluster_bases[0].rows())
          throw DataError("inconsistent cluster bases shapes");
      if (static_cast<int>(cluster_means.size()) != p())
        throw DataError("cluster mean count does not match cluster count");
      if (static_cast<int>(cluster_of.size()) != nn)
        throw DataError("cluster assignment count does not match poses");
      break;
    case Variant::lfa2d:
      if (bases_x.empty()) throw DataError("lfa2d model has no x blocks");
      for (const auto& u : bases_x)
        if (u.cols() != rank || u.rows() != bases_y.rows())
          throw DataError("inconsistent lfa2d block shapes");
      if (bases_y.cols() != rank) throw DataError("shared y block columns do not match rank");
      if (static_cast<int>(cluster_means.size()) != p())
        throw DataError("cluster mean count does not match cluster count");
      if (static_cast<int>(cluster_of.size()) != nn)
        throw DataError("cluster assignment count does not match poses");
      break;
  }
}

}  // namespace movemes
