#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "movemes/model.hpp"
#include "movemes/objective.hpp"
#include "movemes/types.hpp"

namespace movemes {

/// Proximal map of lambda |x|: sign(x) * max(|x| - lambda, 0).
double soft_threshold(double x, double lambda);

/// Gradient of one training instance's squared residual plus the smooth
/// regularizers (Frobenius and spatial terms; the L1 part is handled by
/// soft-thresholding, never differentiated). Block storage mirrors the
/// model: `bases` for the global variants, `cluster_bases` / `bases_x` +
/// `bases_y` for the clustered ones.
struct Gradients {
  Eigen::MatrixXd bases;
  std::vector<Eigen::MatrixXd> cluster_bases;
  std::vector<Eigen::MatrixXd> bases_x;
  Eigen::MatrixXd bases_y;
  Eigen::VectorXd coeffs;  // gradient w.r.t. v_j
  double theta = 0.0;      // nonzero only for lfa3d
};

Gradients grad(const FactorModel& model, const PoseSet& set, int j,
               bool include_reg = true);

/// In-place variant reusing the caller's storage; the trainer's inner loop.
void grad_into(const FactorModel& model, const PoseSet& set, int j,
               bool include_reg, Gradients& out);

/// Initial view angles.
///   random       - i.i.d. uniform [0, 2pi)
///   coarse       - ground-truth angle snapped to the center of its bucket
///                  among p uniform buckets
///   ground_truth - copied from the set
/// coarse/ground_truth require gt angles and throw DataError without them.
std::vector<double> init_angles(const PoseSet& set, AngleInit mode, int p,
                                std::uint64_t seed);

struct BasesInit {
  FactorModel model;  // bases, means, coefficients and angles filled in
};

/// Builds the starting model for a variant:
///   svd      rank-k truncated SVD of the mean-centered data
///   svd_rot / lfa2d   per-cluster entries i.i.d. uniform(-1, 1), zero
///            coefficients, per-cluster means
///   lfa3d    rank-k truncated SVD of mean-centered 3-D poses: `init3d`
///            (3d x n, e.g. an external estimator's output or synthetic
///            ground truth) when given, otherwise each 2-D pose lifted to
///            3-D by un-rotating with its initial angle.
/// Throws NumericalError when k exceeds the rank of the centered data.
FactorModel init_bases(const PoseSet& set, Variant variant,
                       const TrainConfig& config,
                       const Eigen::MatrixXd* init3d = nullptr);

/// One angle-phase pass: a single gradient step on every view angle with
/// U and V fixed. Updates are independent per pose, so the parallel kernel
/// is bit-identical to the serial reference for any thread count.
void angle_sweep(FactorModel& model, const PoseSet& set, double lr);
void angle_sweep_serial(FactorModel& model, const PoseSet& set, double lr);

/// Alternating stochastic training. Each epoch runs `iters_per_epoch`
/// sampled proximal gradient iterations on U and V, then (lfa3d only)
/// `angle_sweeps` full angle passes. Identical (set, config, seed) inputs
/// give bit-identical models. Aborts with NumericalError if the objective
/// exceeds 1e6 x its initial value.
FactorModel train(const PoseSet& set, const TrainConfig& config,
                  Variant variant, const Eigen::MatrixXd* init3d = nullptr,
                  const std::string& trace_csv_path = "");

/// Lifts 2-D poses to 3-D by un-rotating each with its initial angle
/// (a point consistent with the observation, at zero canonical depth).
Eigen::MatrixXd lift_poses(const PoseSet& set,
                           const std::vector<double>& angles);

}  // namespace movemes
