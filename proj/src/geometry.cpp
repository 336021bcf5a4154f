#include "movemes/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace movemes {

Eigen::Matrix3d rotation_matrix(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d q;
  q << c, 0.0, s,
       0.0, 1.0, 0.0,
      -s, 0.0, c;
  return q;
}

Eigen::VectorXd project_vector(const Eigen::VectorXd& coords3d, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation angle must be finite");
  const auto len = coords3d.size();
  if (len <= 0 || len % 3 != 0)
    throw std::invalid_argument("3-D pose length must be a positive multiple of 3, got " +
                                std::to_string(len));
  const auto d = len / 3;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::VectorXd out(2 * d);
  // Rotation about the vertical axis followed by dropping z:
  // x' = c x + s z, y' = y.
  out.head(d) = c * coords3d.head(d) + s * coords3d.tail(d);
  out.segment(d, d) = coords3d.segment(d, d);
  return out;
}

Pose2D project_to_2d(const Pose3D& pose, double theta) {
  Pose2D out;
  out.coords = project_vector(pose.coords, theta);
  return out;
}

}  // namespace movemes
