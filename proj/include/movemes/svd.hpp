#pragma once

#include <Eigen/Core>

namespace movemes {

struct TruncatedSvd {
  Eigen::MatrixXd u;          // m x k, orthonormal columns
  Eigen::VectorXd singular;   // k, descending
  Eigen::MatrixXd v;          // n x k, orthonormal columns
};

/// Rank-k truncated SVD. Throws NumericalError when k exceeds the matrix's
/// numerical rank (relative tolerance max(m, n) * eps * sigma_max).
TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, int k);

/// Numerical rank under the same tolerance used by truncated_svd.
int numerical_rank(const Eigen::MatrixXd& a);

}  // namespace movemes
