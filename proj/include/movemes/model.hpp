#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "movemes/types.hpp"

namespace movemes {

/// The four model families.
///   svd     - single 2-D latent factor model around a global mean.
///   svd_rot - independent 2-D model per view-angle cluster.
///   lfa2d   - per-cluster 2-D model with spatially coupled x blocks and a
///             single shared y block.
///   lfa3d   - one global 3-D model; poses are reconstructed by rotating
///             about the vertical axis and projecting.
enum class Variant { svd, svd_rot, lfa2d, lfa3d };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);
bool is_clustered(Variant v);

enum class AngleInit { random, coarse, ground_truth };
std::string to_string(AngleInit m);
AngleInit angle_init_from_string(const std::string& name);

/// Everything the trainer needs besides the data. Learning rates follow the
/// convention that U and V share one step size and the view angle gets its
/// own (the loss curvature w.r.t. the angle is much higher).
struct TrainConfig {
  int rank = 8;

  double lambda_bases = 1e-3;    // squared Frobenius penalty on the bases
  double lambda_coeffs = 1e-2;   // L1 penalty on coefficients (soft-thresholded)
  double lambda_spatial = 1e-2;  // lfa2d cross-cluster x-block coupling
  Eigen::MatrixXd cluster_similarity;  // p x p weights; empty -> ring adjacency

  int clusters = 4;  // p, used by svd_rot / lfa2d and by coarse angle init

  int epochs = 3;
  int iters_per_epoch = 10000;
  double lr_factors = 1e-4;
  double lr_angle = 1e-6;
  int angle_sweeps = 10;   // full passes over the angles after each epoch
  int encode_iters = 300;  // iteration budget when fitting a held-out pose

  std::uint64_t seed = 0;
  AngleInit angle_init = AngleInit::random;
  bool nonneg_coeffs = false;    // project V onto [0, 1] after each step
  bool mask_visibility = false;  // invisible joints contribute no error

  void validate(Variant variant) const;

  /// The p x p similarity weights with the default (ring adjacency:
  /// angularly neighbouring clusters get weight 1) filled in when unset.
  Eigen::MatrixXd resolved_similarity() const;
};

/// Uniform partition of [0, 2pi) into p buckets: bucket a covers
/// [2pi a/p, 2pi (a+1)/p) with center (2a+1) pi/p.
int assign_cluster(double theta, int p);
double cluster_center(int a, int p);

struct TracePoint {
  int epoch = 0;
  long iter = 0;
  double recon = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

/// A trained (or initialized) factor model. Storage depends on the variant:
///   svd     bases (2d x k), mean (2d)
///   lfa3d   bases (3d x k), mean (3d), view_angles (n)
///   svd_rot cluster_bases[p] (2d x k), cluster_means[p], cluster_of (n)
///   lfa2d   bases_x[p] (d x k), bases_y (d x k, shared by construction),
///           cluster_means[p], cluster_of (n)
/// Coefficients are k x n, one column per training pose.
struct FactorModel {
  Variant variant = Variant::svd;
  int rank = 0;

  Eigen::MatrixXd bases;
  std::vector<Eigen::MatrixXd> cluster_bases;
  std::vector<Eigen::MatrixXd> bases_x;
  Eigen::MatrixXd bases_y;

  Eigen::MatrixXd coeffs;
  Eigen::VectorXd view_angles;
  std::vector<int> cluster_of;

  Eigen::VectorXd mean;
  std::vector<Eigen::VectorXd> cluster_means;

  TrainConfig config;
  std::uint64_t skeleton_hash = 0;
  std::vector<TracePoint> trace;

  int n() const { return static_cast<int>(coeffs.cols()); }
  int p() const;
  int joint_count() const;

  /// Materializes the full 2d x k bases of a cluster (svd_rot / lfa2d).
  Eigen::MatrixXd bases_of_cluster(int a) const;

  void validate() const;
};

}  // namespace movemes
