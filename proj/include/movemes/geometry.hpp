#pragma once

#include <Eigen/Core>

#include "movemes/types.hpp"

namespace movemes {

/// Rotation about the vertical (y) axis:
///   [  cos t   0   sin t ]
///   [    0     1     0   ]
///   [ -sin t   0   cos t ]
/// Throws std::invalid_argument for non-finite angles.
Eigen::Matrix3d rotation_matrix(double theta);

/// Rotates a 3-D pose by `theta` about the vertical axis and drops the z
/// row, yielding the orthographic 2-D view. Block layout in, block layout
/// out; visibility of the result is all-visible.
Pose2D project_to_2d(const Pose3D& pose, double theta);

/// Same projection applied to a 3-D column vector in block layout;
/// the workhorse used by the model code.
Eigen::VectorXd project_vector(const Eigen::VectorXd& coords3d, double theta);

}  // namespace movemes
