#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "movemes/model.hpp"
#include "movemes/types.hpp"

namespace movemes {

struct ClassifyResult {
  double mean_accuracy = 0.0;            // averaged over folds
  double chance_accuracy = 0.0;          // 1 / n_classes
  std::vector<std::string> classes;      // sorted label names
  Eigen::VectorXd per_class_accuracy;
  Eigen::MatrixXi confusion;             // rows true, cols predicted
  std::vector<double> fold_accuracies;
};

/// Activity classification from coefficient features: stratified k-fold
/// cross validation of a linear one-vs-rest classifier over the columns of
/// V, features standardized per fold on training statistics. A class with
/// fewer members than folds is a DataError naming it.
ClassifyResult classify_activities(const FactorModel& model,
                                   const std::vector<std::string>& labels,
                                   int folds, std::uint64_t seed);

struct ReorderResult {
  long sequences = 0;        // sequence-trials evaluated
  long exact_count = 0;
  double mean_errors = 0.0;  // out-of-position elements per sequence
  double mean_swaps = 0.0;   // adjacent transpositions to repair
  Eigen::VectorXd per_position_accuracy;
  long degenerate_count = 0;
};

/// Chronology recovery: each sequence's coefficient columns are shuffled,
/// centered, fit with a total-least-squares line (first principal
/// direction), and reordered by scalar projection; the line's orientation is
/// anchored so the true first element sorts toward the front. Requires a
/// global bases matrix (svd, lfa2d, lfa3d; svd_rot coefficients are not
/// comparable across clusters and are rejected).
ReorderResult reorder_sequences(const FactorModel& model,
                                const std::vector<std::vector<int>>& sequences,
                                int trials, std::uint64_t seed);

/// Minimum adjacent transpositions to sort a permutation of 0..m-1
/// (its inversion count). Throws std::invalid_argument otherwise.
int min_adjacent_swaps(const std::vector<int>& perm);

struct AngleMetrics {
  double rmse_degrees = 0.0;  // over differences wrapped into (-pi, pi]
  double cos_sim = 0.0;       // mean cos(learned - ground truth)
};

/// Compares learned view angles with ground truth (lfa3d).
AngleMetrics angle_recovery(const FactorModel& model,
                            const std::vector<double>& gt_angles);

struct GeneralizationRow {
  double fraction = 0.0;
  double train_rmse_mean = 0.0;
  double train_rmse_sd = 0.0;
  double test_rmse_mean = 0.0;
  double test_rmse_sd = 0.0;
};

/// Held-out reconstruction study: for each fraction and repeat, train on a
/// random subset and encode the remainder, reporting per-joint RMSE means
/// and standard deviations. Tasks are independent (per-task RNG streams)
/// and run in parallel. `init3d`, when supplied, is subset along with the
/// training poses.
std::vector<GeneralizationRow> generalization_curve(
    const PoseSet& set, const TrainConfig& config,
    const std::vector<double>& fractions, int repeats, std::uint64_t seed,
    const Eigen::MatrixXd* init3d = nullptr, int encode_starts = 4);

struct InterpolationFrame {
  double alpha = 0.0;
  Eigen::VectorXd coords3d;  // empty for 2-D variants
  Eigen::VectorXd coords2d;
};

/// Frames mean + alpha * basis for each alpha; for lfa3d both the 3-D frame
/// and its projection at `view_angle` are returned. Clustered variants use
/// the given cluster's bases and mean.
std::vector<InterpolationFrame> moveme_interpolation(
    const FactorModel& model, int basis_index,
    const std::vector<double>& alphas, double view_angle = 0.0,
    int cluster = 0);

/// Writes (pose_id, label, theta_degrees, v_1..v_k) rows as CSV for external
/// embedding tools.
void export_embedding_features(const FactorModel& model,
                               const std::vector<std::string>& ids,
                               const std::vector<std::string>& labels,
                               const std::string& path);

}  // namespace movemes
