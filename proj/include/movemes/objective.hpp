#pragma once

#include <Eigen/Core>

#include "movemes/model.hpp"
#include "movemes/types.hpp"

namespace movemes {

/// Loss decomposition. `reg_smooth` holds the differentiable penalties
/// (Frobenius + spatial coupling), `reg_l1` the coefficient L1 term.
struct ObjectiveValue {
  double recon = 0.0;
  double reg_smooth = 0.0;
  double reg_l1 = 0.0;

  double reg() const { return reg_smooth + reg_l1; }
  double total() const { return recon + reg_smooth + reg_l1; }
};

/// Reconstructs training pose j under the model's variant.
Pose2D reconstruct(const FactorModel& model, int j);

/// Reconstruction of an arbitrary coefficient vector at a given view angle
/// (cluster for the clustered variants is derived from the angle).
Eigen::VectorXd reconstruct_coords(const FactorModel& model,
                                   const Eigen::VectorXd& coeffs,
                                   double theta, int cluster);

/// Squared residual of pose j against its reconstruction, honouring the
/// visibility mask when the model was configured with one.
double instance_error(const FactorModel& model, const PoseSet& set, int j);

/// Full objective over the training set. The reconstruction sum runs as a
/// deterministic blocked parallel reduction; `objective_serial` is the plain
/// sequential reference kept for testing and benchmarks.
ObjectiveValue objective(const FactorModel& model, const PoseSet& set);
ObjectiveValue objective_serial(const FactorModel& model, const PoseSet& set);

/// The lfa2d cross-cluster x-block penalty
///   lambda_spatial * sum_{a,a'} kappa(a,a') |Ux(a) - Ux(a')|_F^2
/// (ordered pairs). The shared y block is a hard constraint satisfied by
/// construction and contributes nothing. Throws std::invalid_argument for
/// non-clustered variants.
double spatial_regularizer(const FactorModel& model);

struct EncodeResult {
  Eigen::VectorXd coeffs;
  double theta = 0.0;
  double rmse = 0.0;  // per-joint: sqrt(sum_i |joint residual_i|^2 / d)
};

/// Fits coefficients (and, for lfa3d, the view angle) of a single pose with
/// the bases frozen, by proximal gradient steps with the model's training
/// step sizes and `encode_iters` budget. Never fails to return: the best
/// iterate seen is kept. Valid for svd, lfa2d and lfa3d.
EncodeResult encode(const FactorModel& model, const Pose2D& pose,
                    double theta_init);

/// Best of `starts` encodes from view angles uniformly spread over [0, 2pi).
EncodeResult encode_multi_start(const FactorModel& model, const Pose2D& pose,
                                int starts);

/// Encodes every pose of a set; parallel over poses and bit-identical to the
/// serial reference for any thread count.
std::vector<EncodeResult> encode_batch(const FactorModel& model,
                                       const PoseSet& set, int starts);
std::vector<EncodeResult> encode_batch_serial(const FactorModel& model,
                                              const PoseSet& set, int starts);

/// Per-joint RMSE of a residual in block layout.
double residual_rmse(const Eigen::VectorXd& residual);

}  // namespace movemes
