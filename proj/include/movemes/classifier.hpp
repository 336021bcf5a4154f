#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace movemes {

/// One-vs-rest L2-regularized logistic classifier trained by full-batch
/// gradient descent with a Lipschitz step size: deterministic for fixed
/// inputs. Features are standardized with the statistics supplied at fit
/// time (callers standardize on training folds).
struct OvRClassifier {
  Eigen::MatrixXd weights;  // n_classes x n_features
  Eigen::VectorXd biases;   // n_classes
  Eigen::VectorXd feat_mean;
  Eigen::VectorXd feat_scale;
  int n_classes = 0;
};

OvRClassifier fit_ovr_logistic(const Eigen::MatrixXd& features,  // n x f
                               const std::vector<int>& labels,   // in [0, c)
                               int n_classes, double c_reg = 1.0,
                               int iters = 500);

int predict(const OvRClassifier& clf, const Eigen::VectorXd& feature);

}  // namespace movemes
