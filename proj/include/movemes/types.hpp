#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace movemes {

/// Malformed input files, schema violations, inconsistent datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimization failures (divergent objective and the like).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint names plus a bone tree over them. Bones are (parent, child) index
/// pairs; the tree is rooted at joint 0 by convention. `torso_bones` marks
/// the bones whose mean length defines the pose scale (all bones if empty).
struct Skeleton {
  std::vector<std::string> joint_names;
  std::vector<std::pair<int, int>> bones;
  std::vector<int> torso_bones;

  int joint_count() const { return static_cast<int>(joint_names.size()); }

  /// Throws DataError unless: d >= 2 joints, exactly d-1 bones, all indices
  /// in range, and the bones form a single tree reachable from joint 0.
  void validate() const;

  /// Stable content hash over names and bone structure; recorded in model
  /// files so a model is never applied to a mismatched dataset.
  std::uint64_t hash() const;
};

/// A 2-D pose stored in block layout [x_1..x_d, y_1..y_d].
struct Pose2D {
  Eigen::VectorXd coords;
  std::vector<std::uint8_t> visibility;  // length d; empty means all visible

  int joint_count() const { return static_cast<int>(coords.size()) / 2; }
  bool visible(int joint) const {
    return visibility.empty() || visibility[static_cast<std::size_t>(joint)] != 0;
  }
};

/// A 3-D pose stored in block layout [x_1..x_d, y_1..y_d, z_1..z_d].
struct Pose3D {
  Eigen::VectorXd coords;

  int joint_count() const { return static_cast<int>(coords.size()) / 3; }
};

/// A dataset of n 2-D poses over a common skeleton. Coordinates are held
/// column-per-pose (2d x n); visibility is d x n with 1 = visible. Labels,
/// ground-truth view angles (radians, [0, 2pi)) and ids are optional or
/// sized n.
struct PoseSet {
  Skeleton skeleton;
  Eigen::MatrixXd coords;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> visibility;
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<double> gt_angles;
  Eigen::VectorXd mean_pose;

  int n() const { return static_cast<int>(coords.cols()); }
  int d() const { return skeleton.joint_count(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_gt_angles() const { return !gt_angles.empty(); }

  Pose2D pose(int j) const;
  void validate() const;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

/// Signed angular difference a - b wrapped into (-pi, pi].
double angle_difference(double a, double b);

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace movemes
