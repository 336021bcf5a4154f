#include "movemes/svd.hpp"

#include <Eigen/SVD>
#include <string>

#include "movemes/types.hpp"

namespace movemes {

namespace {

double rank_tolerance(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd,
                      const Eigen::MatrixXd& a) {
  const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return static_cast<double>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, int k) {
  if (k < 1) throw std::invalid_argument("truncated SVD rank must be >= 1");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double tol = rank_tolerance(svd, a);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  if (k > rank)
    throw NumericalError("requested rank " + std::to_string(k) +
                         " exceeds numerical rank " + std::to_string(rank) +
                         " of a " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " matrix");
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(k);
  out.singular = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  return out;
}

int numerical_rank(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double tol = rank_tolerance(svd, a);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++rank;
  return rank;
}

}  // namespace movemes
