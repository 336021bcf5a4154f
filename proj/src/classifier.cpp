#include "movemes/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace movemes {

namespace {

// Largest eigenvalue of X^T X by power iteration with a fixed start.
double spectral_bound(const Eigen::MatrixXd& x) {
  if (x.cols() == 0 || x.rows() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd w = x.transpose() * (x * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = norm;
  }
  return lambda;
}

}  // namespace

OvRClassifier fit_ovr_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                               int n_classes, double c_reg, int iters) {
  const Eigen::Index n = features.rows();
  const Eigen::Index f = features.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("label count does not match feature rows");
  if (n_classes < 1) throw std::invalid_argument("need at least one class");

  OvRClassifier clf;
  clf.n_classes = n_classes;
  clf.feat_mean = features.colwise().mean();
  Eigen::MatrixXd centered = features.rowwise() - clf.feat_mean.transpose();
  clf.feat_scale = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index i = 0; i < f; ++i)
    if (clf.feat_scale(i) < 1e-12) clf.feat_scale(i) = 1.0;
  Eigen::MatrixXd x = centered.array().rowwise() / clf.feat_scale.transpose().array();

  clf.weights = Eigen::MatrixXd::Zero(n_classes, f);
  clf.biases = Eigen::VectorXd::Zero(n_classes);
  if (n_classes == 1) return clf;

  const double lambda = 1.0 / (c_reg * static_cast<double>(n));
  const double lipschitz = 0.25 * spectral_bound(x) / static_cast<double>(n) + lambda + 0.25;
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd y(n), z(n), s(n);
  for (int cls = 0; cls < n_classes; ++cls) {
    for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(f);
    double b = 0.0;
    for (int it = 0; it < iters; ++it) {
      z.noalias() = x * w;
      z.array() += b;
      // sigma(-y z), the per-sample weight of the logistic gradient
      s = (1.0 / (1.0 + (y.array() * z.array()).exp())).matrix();
      Eigen::VectorXd grad_w =
          -(x.transpose() * (y.array() * s.array()).matrix()) / static_cast<double>(n) +
          lambda * w;
      const double grad_b = -(y.array() * s.array()).mean();
      w -= step * grad_w;
      b -= step * grad_b;
    }
    clf.weights.row(cls) = w.transpose();
    clf.biases(cls) = b;
  }
  return clf;
}

int predict(const OvRClassifier& clf, const Eigen::VectorXd& feature) {
  if (clf.n_classes == 1) return 0;
  Eigen::VectorXd x =
      (feature - clf.feat_mean).cwiseQuotient(clf.feat_scale);
  Eigen::VectorXd scores = clf.weights * x + clf.biases;
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace movemes
