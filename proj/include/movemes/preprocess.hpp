#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "movemes/types.hpp"

namespace movemes {

/// One pose rejected during preprocessing, with the reason.
struct PoseError {
  std::string pose_id;
  std::string message;
};

struct NormalizeResult {
  PoseSet set;                    // surviving poses, rescaled
  std::vector<PoseError> errors;  // poses excluded (zero-length bones)
};

/// Elementwise mean over all poses. With `masked`, each coordinate averages
/// only the poses where its joint is visible; a joint visible nowhere is a
/// DataError naming it.
Eigen::VectorXd mean_pose(const PoseSet& set, bool masked = false);

/// Rescales every bone of every pose to the dataset-average length of that
/// bone, walking the bone tree from the root (joint 0), whose position is
/// preserved. Bone directions are unchanged. A pose with a zero-length bone
/// is excluded and reported rather than aborting the run.
NormalizeResult normalize_bone_lengths(const PoseSet& set);

/// Mean 2-D length of the skeleton's torso bones over the dataset (all
/// bones if none are marked). The reference unit for noise levels and
/// relative reconstruction errors.
double pose_scale(const PoseSet& set);

/// Per-bone mean lengths over the dataset, indexed like skeleton.bones.
Eigen::VectorXd mean_bone_lengths(const PoseSet& set);

}  // namespace movemes
