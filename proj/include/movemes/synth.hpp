#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "movemes/types.hpp"

namespace movemes {

/// Sparse coefficient law for one activity class: which bases it activates
/// and the magnitude range (within [0, 1]).
struct CoeffLaw {
  std::string class_name;
  std::vector<int> active;
  double lo = 0.3;
  double hi = 1.0;
};

struct AngleLaw {
  enum class Kind { uniform, per_class_arc };
  Kind kind = Kind::uniform;
  std::vector<double> centers;  // radians, one per class (per_class_arc)
  double halfwidth = 0.0;       // radians (per_class_arc)
};

struct SequenceSpec {
  int per_class = 0;
  int length = 4;
  double jitter = 0.4;  // fraction of the inter-step gap
  std::vector<std::string> classes;  // empty -> all classes
};

/// Generator description: ground-truth 3-D bases, mean pose, coefficient and
/// angle distributions, and the noise level (relative to the pose scale).
struct SynthSpec {
  Skeleton skeleton;
  int k_true = 4;
  Eigen::MatrixXd bases_true;   // 3d x k_true, unit Frobenius columns
  Eigen::VectorXd mean3d_true;  // 3d
  int n = 1000;
  int n_classes = 4;
  std::vector<CoeffLaw> coeff_laws;  // one per class
  AngleLaw angle_law;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::optional<SequenceSpec> sequences;

  void validate() const;
};

struct SequenceInfo {
  std::string class_name;
  std::vector<int> members;  // pose indices in true chronological order
  bool degenerate = false;   // zero-length coefficient line
};

/// Everything the generator knows and downstream metrics may verify against.
struct SynthTruth {
  Eigen::MatrixXd coeffs_true;   // k_true x n
  std::vector<double> theta_true;
  std::vector<std::string> labels;
  Eigen::MatrixXd poses3d_true;  // 3d x n, noiseless canonical poses
  std::vector<SequenceInfo> sequences;
  Eigen::MatrixXd bases_true;
  Eigen::VectorXd mean3d_true;
  int k_true = 0;
  std::uint64_t seed = 0;
};

struct SynthData {
  PoseSet set;
  SynthTruth truth;
};

/// Draws the dataset: per instance a class, sparse coefficients and a view
/// angle; the 3-D pose mean + U v is projected at that angle and 2-D noise
/// is added. Deterministic per seed and thread count (per-instance RNG
/// streams); `generate_serial` is the reference implementation.
SynthData generate(const SynthSpec& spec);
SynthData generate_serial(const SynthSpec& spec);

/// One ordered sequence of `length` poses whose true coefficients sit at
/// increasing positions along the class's coefficient line, each projected
/// at an independently drawn angle.
SynthData generate_sequence(const SynthSpec& spec, const std::string& cls,
                            int length);

/// The bundled 14-joint skeleton (neck-rooted, LSP-style joint set).
Skeleton default_skeleton();

/// Hand-designed localized movemes over the default skeleton (up to 6
/// columns: right kick, overhead reach, forward lean, right punch, and the
/// z-mirrored lean/punch pair), unit Frobenius norm each.
Eigen::MatrixXd default_bases(int k_true);
Eigen::VectorXd default_mean3d();
std::vector<std::string> default_class_names(int n_classes);

/// Fixture builder: default skeleton/bases/laws with the given size, class
/// count, noise and seed. k_true defaults to n_classes.
SynthSpec default_synth_spec(int n, int n_classes, double noise_sigma,
                             std::uint64_t seed, int k_true = -1);

}  // namespace movemes
