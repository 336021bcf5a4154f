#include "movemes/types.hpp"

#include <cmath>
#include <queue>

namespace movemes {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void Skeleton::validate() const {
  const int d = joint_count();
  if (d < 2) throw DataError("skeleton needs at least 2 joints, has " + std::to_string(d));
  if (static_cast<int>(bones.size()) != d - 1)
    throw DataError("skeleton with " + std::to_string(d) + " joints needs " +
                    std::to_string(d - 1) + " bones, has " + std::to_string(bones.size()));
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(d));
  for (const auto& [parent, child] : bones) {
    if (parent < 0 || parent >= d || child < 0 || child >= d)
      throw DataError("bone index out of range: (" + std::to_string(parent) + ", " +
                      std::to_string(child) + ")");
    adj[static_cast<std::size_t>(parent)].push_back(child);
    adj[static_cast<std::size_t>(child)].push_back(parent);
  }
  // d-1 edges + full reachability from joint 0 <=> single tree.
  std::vector<char> seen(static_cast<std::size_t>(d), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        frontier.push(w);
      }
    }
  }
  if (reached != d) throw DataError("skeleton bones do not form a single connected tree");
  for (int b : torso_bones)
    if (b < 0 || b >= static_cast<int>(bones.size()))
      throw DataError("torso bone index out of range: " + std::to_string(b));
}

std::uint64_t Skeleton::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& name : joint_names) {
    h = fnv1a(h, name.data(), name.size());
    h = fnv1a(h, "\x1f", 1);
  }
  for (const auto& [parent, child] : bones) {
    std::int32_t pc[2] = {parent, child};
    h = fnv1a(h, pc, sizeof pc);
  }
  return h;
}

Pose2D PoseSet::pose(int j) const {
  if (j < 0 || j >= n()) throw std::invalid_argument("pose index out of range: " + std::to_string(j));
  Pose2D p;
  p.coords = coords.col(j);
  if (visibility.size() > 0) {
    p.visibility.resize(static_cast<std::size_t>(d()));
    for (int i = 0; i < d(); ++i) p.visibility[static_cast<std::size_t>(i)] = visibility(i, j);
  }
  return p;
}

void PoseSet::validate() const {
  skeleton.validate();
  const int dd = d();
  if (coords.rows() != 2 * dd)
    throw DataError("coordinate rows " + std::to_string(coords.rows()) +
                    " do not match skeleton (expected " + std::to_string(2 * dd) + ")");
  if (!coords.allFinite()) throw DataError("dataset contains non-finite coordinates");
  if (visibility.size() > 0 && (visibility.rows() != dd || visibility.cols() != coords.cols()))
    throw DataError("visibility mask shape mismatch");
  if (!labels.empty() && static_cast<int>(labels.size()) != n())
    throw DataError("label count does not match pose count");
  if (!gt_angles.empty() && static_cast<int>(gt_angles.size()) != n())
    throw DataError("ground-truth angle count does not match pose count");
  if (!ids.empty() && static_cast<int>(ids.size()) != n())
    throw DataError("id count does not match pose count");
}

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0) w += kTwoPi;
  // fmod can land exactly on 2pi after the correction.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double angle_difference(double a, double b) {
  double diff = std::remainder(a - b, kTwoPi);
  if (diff <= -kPi) diff = kPi;
  return diff;
}

}  // namespace movemes
