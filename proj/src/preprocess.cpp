#include "movemes/preprocess.hpp"

#include <cmath>
#include <vector>

namespace movemes {

Eigen::VectorXd mean_pose(const PoseSet& set, bool masked) {
  if (set.n() < 1) throw DataError("mean pose of an empty dataset");
  const int d = set.d();
  if (!masked || set.visibility.size() == 0) {
    return set.coords.rowwise().mean();
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2 * d);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(2 * d);
  for (int j = 0; j < set.n(); ++j) {
    for (int i = 0; i < d; ++i) {
      if (set.visibility(i, j)) {
        sum(i) += set.coords(i, j);
        sum(d + i) += set.coords(d + i, j);
        count(i) += 1.0;
        count(d + i) += 1.0;
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    if (count(i) == 0.0)
      throw DataError("joint '" + set.skeleton.joint_names[static_cast<std::size_t>(i)] +
                      "' is visible in no pose; masked mean undefined");
  }
  return sum.cwiseQuotient(count);
}

Eigen::VectorXd mean_bone_lengths(const PoseSet& set) {
  const int d = set.d();
  const int nbones = static_cast<int>(set.skeleton.bones.size());
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(nbones);
  for (int j = 0; j < set.n(); ++j) {
    for (int b = 0; b < nbones; ++b) {
      const auto [parent, child] = set.skeleton.bones[static_cast<std::size_t>(b)];
      const double dx = set.coords(child, j) - set.coords(parent, j);
      const double dy = set.coords(d + child, j) - set.coords(d + parent, j);
      sums(b) += std::hypot(dx, dy);
    }
  }
  return sums / static_cast<double>(set.n());
}

double pose_scale(const PoseSet& set) {
  const Eigen::VectorXd lengths = mean_bone_lengths(set);
  if (set.skeleton.torso_bones.empty()) return lengths.mean();
  double sum = 0.0;
  for (int b : set.skeleton.torso_bones) sum += lengths(b);
  return sum / static_cast<double>(set.skeleton.torso_bones.size());
}

NormalizeResult normalize_bone_lengths(const PoseSet& set) {
  set.validate();
  const int d = set.d();
  const int n = set.n();
  const Eigen::VectorXd target = mean_bone_lengths(set);

  // Children of each joint, in bone order; the tree is walked parent-first.
  std::vector<std::vector<int>> bones_at(static_cast<std::size_t>(d));
  for (int b = 0; b < static_cast<int>(set.skeleton.bones.size()); ++b)
    bones_at[static_cast<std::size_t>(set.skeleton.bones[static_cast<std::size_t>(b)].first)]
        .push_back(b);

  NormalizeResult result;
  result.set.skeleton = set.skeleton;
  std::vector<int> kept;
  Eigen::MatrixXd out(2 * d, n);

  std::vector<int> stack;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd pose = set.coords.col(j);
    bool ok = true;
    stack.assign(1, 0);
    while (!stack.empty() && ok) {
      const int joint = stack.back();
      stack.pop_back();
      for (int b : bones_at[static_cast<std::size_t>(joint)]) {
        const auto [parent, child] = set.skeleton.bones[static_cast<std::size_t>(b)];
        const double dx = set.coords(child, j) - set.coords(parent, j);
        const double dy = set.coords(d + child, j) - set.coords(d + parent, j);
        const double len = std::hypot(dx, dy);
        if (len == 0.0) {
          result.errors.push_back(
              {set.ids.empty() ? std::to_string(j) : set.ids[static_cast<std::size_t>(j)],
               "zero-length bone " + set.skeleton.joint_names[static_cast<std::size_t>(parent)] +
                   "->" + set.skeleton.joint_names[static_cast<std::size_t>(child)]});
          ok = false;
          break;
        }
        const double scale = target(b) / len;
        pose(child) = pose(parent) + dx * scale;
        pose(d + child) = pose(d + parent) + dy * scale;
        stack.push_back(child);
      }
    }
    if (ok) {
      out.col(static_cast<Eigen::Index>(kept.size())) = pose;
      kept.push_back(j);
    }
  }

  const int m = static_cast<int>(kept.size());
  result.set.coords = out.leftCols(m);
  if (set.visibility.size() > 0) {
    result.set.visibility.resize(d, m);
    for (int i = 0; i < m; ++i) result.set.visibility.col(i) = set.visibility.col(kept[static_cast<std::size_t>(i)]);
  }
  auto subset = [&kept](const auto& values, auto& out_values) {
    if (values.empty()) return;
    out_values.reserve(kept.size());
    for (int j : kept) out_values.push_back(values[static_cast<std::size_t>(j)]);
  };
  subset(set.ids, result.set.ids);
  subset(set.labels, result.set.labels);
  subset(set.gt_angles, result.set.gt_angles);
  if (m > 0) result.set.mean_pose = mean_pose(result.set);
  return result;
}

}  // namespace movemes
