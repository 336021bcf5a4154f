#include "movemes/synth.hpp"

#include <cmath>

#include "movemes/geometry.hpp"
#include "movemes/parallel.hpp"
#include "movemes/preprocess.hpp"
#include "movemes/rng.hpp"

namespace movemes {

namespace {

constexpr std::uint64_t kStreamInstance = 0x696e7374ULL;
constexpr std::uint64_t kStreamSequence = 0x736571ULL;
constexpr std::uint64_t kStreamNoise = 0x6e6f697365ULL;

enum Joint {
  kNeck = 0, kHead, kLShoulder, kLElbow, kLWrist, kRShoulder, kRElbow, kRWrist,
  kLHip, kLKnee, kLAnkle, kRHip, kRKnee, kRAnkle, kJointCount
};

struct Placement {
  int joint;
  double x, y, z;
};

void add_displacements(Eigen::MatrixXd& bases, int col, std::initializer_list<Placement> list) {
  const int d = static_cast<int>(bases.rows()) / 3;
  for (const auto& p : list) {
    bases(p.joint, col) += p.x;
    bases(d + p.joint, col) += p.y;
    bases(2 * d + p.joint, col) += p.z;
  }
}

}  // namespace

Skeleton default_skeleton() {
  Skeleton s;
  s.joint_names = {"neck",       "head_top",  "l_shoulder", "l_elbow", "l_wrist",
                   "r_shoulder", "r_elbow",   "r_wrist",    "l_hip",   "l_knee",
                   "l_ankle",    "r_hip",     "r_knee",     "r_ankle"};
  s.bones = {{kNeck, kHead},    {kNeck, kLShoulder}, {kLShoulder, kLElbow},
             {kLElbow, kLWrist}, {kNeck, kRShoulder}, {kRShoulder, kRElbow},
             {kRElbow, kRWrist}, {kNeck, kLHip},      {kLHip, kLKnee},
             {kLKnee, kLAnkle},  {kNeck, kRHip},      {kRHip, kRKnee},
             {kRKnee, kRAnkle}};
  s.torso_bones = {7, 10};  // neck->l_hip, neck->r_hip
  return s;
}

Eigen::VectorXd default_mean3d() {
  const int d = kJointCount;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3 * d);
  auto place = [&](int joint, double x, double y) {
    mean(joint) = x;
    mean(d + joint) = y;
  };
  place(kNeck, 0.00, 1.45);
  place(kHead, 0.00, 1.72);
  place(kLShoulder, 0.20, 1.42);
  place(kLElbow, 0.28, 1.12);
  place(kLWrist, 0.30, 0.84);
  place(kRShoulder, -0.20, 1.42);
  place(kRElbow, -0.28, 1.12);
  place(kRWrist, -0.30, 0.84);
  place(kLHip, 0.11, 0.95);
  place(kLKnee, 0.13, 0.52);
  place(kLAnkle, 0.14, 0.08);
  place(kRHip, -0.11, 0.95);
  place(kRKnee, -0.13, 0.52);
  place(kRAnkle, -0.14, 0.08);
  return mean;
}

Eigen::MatrixXd default_bases(int k_true) {
  if (k_true < 1 || k_true > 6)
    throw std::invalid_argument("default bases provide 1..6 columns, requested " +
                                std::to_string(k_true));
  const int d = kJointCount;
  Eigen::MatrixXd bases = Eigen::MatrixXd::Zero(3 * d, 6);
  // Right kick: the right leg swings up and forward.
  add_displacements(bases, 0, {{kRKnee, 0.0, 0.12, 0.25}, {kRAnkle, 0.0, 0.30, 0.55}});
  // Overhead reach with both arms.
  add_displacements(bases, 1,
                    {{kLElbow, 0.0, 0.22, 0.0},
                     {kLWrist, -0.08, 0.46, 0.0},
                     {kRElbow, 0.0, 0.22, 0.0},
                     {kRWrist, 0.08, 0.46, 0.0}});
  // Forward lean of head and shoulders.
  add_displacements(bases, 2,
                    {{kNeck, 0.0, -0.04, 0.16},
                     {kHead, 0.0, -0.08, 0.30},
                     {kLShoulder, 0.0, 0.0, 0.14},
                     {kRShoulder, 0.0, 0.0, 0.14}});
  // Right punch: arm extends forward and rises a little.
  add_displacements(bases, 3,
                    {{kRShoulder, 0.0, 0.0, 0.08},
                     {kRElbow, 0.0, 0.10, 0.30},
                     {kRWrist, 0.0, 0.18, 0.58}});
  // Backward lean: the depth-mirror of the forward lean (same vertical
  // footprint, opposite z) - indistinguishable from it in a frontal view.
  add_displacements(bases, 4,
                    {{kNeck, 0.0, -0.04, -0.16},
                     {kHead, 0.0, -0.08, -0.30},
                     {kLShoulder, 0.0, 0.0, -0.14},
                     {kRShoulder, 0.0, 0.0, -0.14}});
  // Right pull: the depth-mirror of the punch.
  add_displacements(bases, 5,
                    {{kRShoulder, 0.0, 0.0, -0.08},
                     {kRElbow, 0.0, 0.10, -0.30},
                     {kRWrist, 0.0, 0.18, -0.58}});
  for (int c = 0; c < 6; ++c) bases.col(c).normalize();
  return bases.leftCols(k_true);
}

std::vector<std::string> default_class_names(int n_classes) {
  static const std::vector<std::string> names = {"kick_r",  "reach_up", "lean_fwd",
                                                 "punch_r", "lean_back", "pull_r"};
  if (n_classes < 1 || n_classes > static_cast<int>(names.size()))
    throw std::invalid_argument("default fixture supports 1..6 classes");
  return {names.begin(), names.begin() + n_classes};
}

SynthSpec default_synth_spec(int n, int n_classes, double noise_sigma, std::uint64_t seed,
                             int k_true) {
  if (k_true < 0) k_true = n_classes;
  SynthSpec spec;
  spec.skeleton = default_skeleton();
  spec.k_true = k_true;
  spec.bases_true = default_bases(k_true);
  spec.mean3d_true = default_mean3d();
  spec.n = n;
  spec.n_classes = n_classes;
  const auto names = default_class_names(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    CoeffLaw law;
    law.class_name = names[static_cast<std::size_t>(c)];
    law.active = {c % k_true};
    law.lo = 0.3;
    law.hi = 1.0;
    spec.coeff_laws.push_back(law);
  }
  spec.angle_law.kind = AngleLaw::Kind::uniform;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;
  return spec;
}

void SynthSpec::validate() const {
  skeleton.validate();
  const int d = skeleton.joint_count();
  if (n < 1) throw std::invalid_argument("synth spec needs n >= 1");
  if (k_true < 1) throw std::invalid_argument("synth spec needs k_true >= 1");
  if (bases_true.rows() != 3 * d || bases_true.cols() != k_true)
    throw std::invalid_argument("ground-truth bases must be 3d x k_true");
  if (mean3d_true.size() != 3 * d)
    throw std::invalid_argument("ground-truth mean must have 3d entries");
  if (noise_sigma < 0) throw std::invalid_argument("noise_sigma must be nonnegative");
  if (n_classes < 1 || static_cast<int>(coeff_laws.size()) != n_classes)
    throw std::invalid_argument("one coefficient law per class is required");
  for (int c = 0; c < k_true; ++c) {
    const double norm = bases_true.col(c).norm();
    if (std::abs(norm - 1.0) > 1e-6)
      throw std::invalid_argument("ground-truth basis column " + std::to_string(c) +
                                  " must have unit norm, has " + std::to_string(norm));
  }
  for (const auto& law : coeff_laws) {
    if (law.active.empty())
      throw std::invalid_argument("coefficient law for '" + law.class_name + "' activates no basis");
    for (int b : law.active)
      if (b < 0 || b >= k_true)
        throw std::invalid_argument("coefficient law for '" + law.class_name +
                                    "' references basis " + std::to_string(b));
    if (law.lo < 0.0 || law.hi > 1.0 || law.lo > law.hi)
      throw std::invalid_argument("coefficient magnitudes must satisfy 0 <= lo <= hi <= 1");
  }
  if (angle_law.kind == AngleLaw::Kind::per_class_arc &&
      static_cast<int>(angle_law.centers.size()) != n_classes)
    throw std::invalid_argument("per-class angle law needs one center per class");
  if (sequences) {
    if (sequences->length < 2) throw std::invalid_argument("sequences need length >= 2");
    if (sequences->per_class < 0) throw std::invalid_argument("sequences per class must be >= 0");
  }
}

namespace {

struct Instance {
  Eigen::VectorXd coeffs;
  double theta = 0.0;
  int class_index = 0;
};

double draw_angle(const SynthSpec& spec, int class_index, Rng& rng) {
  if (spec.angle_law.kind == AngleLaw::Kind::uniform) return rng.uniform(0.0, kTwoPi);
  const double center = spec.angle_law.centers[static_cast<std::size_t>(class_index)];
  const double hw = spec.angle_law.halfwidth;
  return wrap_angle(center + rng.uniform(-hw, hw));
}

Instance draw_instance(const SynthSpec& spec, std::uint64_t index) {
  Rng rng(derive_seed(spec.seed, kStreamInstance, index));
  Instance inst;
  inst.class_index = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.n_classes)));
  const CoeffLaw& law = spec.coeff_laws[static_cast<std::size_t>(inst.class_index)];
  inst.coeffs = Eigen::VectorXd::Zero(spec.k_true);
  for (int b : law.active) inst.coeffs(b) = rng.uniform(law.lo, law.hi);
  inst.theta = draw_angle(spec, inst.class_index, rng);
  return inst;
}

// Sequence poses sit at stratified positions t in (0, 1) along the class's
// coefficient line; each pose gets its own view angle.
std::vector<Instance> draw_sequence(const SynthSpec& spec, int class_index,
                                    std::uint64_t seq_index, int length, bool* degenerate) {
  Rng rng(derive_seed(spec.seed, kStreamSequence,
                      static_cast<std::uint64_t>(class_index) * 0x100000ULL + seq_index));
  const CoeffLaw& law = spec.coeff_laws[static_cast<std::size_t>(class_index)];
  const double jitter = spec.sequences ? spec.sequences->jitter : 0.4;
  if (degenerate != nullptr) *degenerate = (law.hi == law.lo);
  std::vector<Instance> out(static_cast<std::size_t>(length));
  for (int r = 0; r < length; ++r) {
    const double t =
        (static_cast<double>(r) + 0.5 + jitter * rng.uniform(-0.5, 0.5)) / length;
    Instance& inst = out[static_cast<std::size_t>(r)];
    inst.class_index = class_index;
    inst.coeffs = Eigen::VectorXd::Zero(spec.k_true);
    for (int b : law.active) inst.coeffs(b) = law.lo + t * (law.hi - law.lo);
    inst.theta = draw_angle(spec, class_index, rng);
  }
  return out;
}

SynthData assemble(const SynthSpec& spec, const std::vector<Instance>& instances,
                   const std::vector<SequenceInfo>& sequences, int base_count,
                   bool parallel) {
  const int d = spec.skeleton.joint_count();
  const int n = static_cast<int>(instances.size());

  SynthData data;
  data.set.skeleton = spec.skeleton;
  data.set.coords.resize(2 * d, n);
  data.set.ids.resize(static_cast<std::size_t>(n));
  data.set.labels.resize(static_cast<std::size_t>(n));
  data.set.gt_angles.resize(static_cast<std::size_t>(n));
  data.truth.coeffs_true.resize(spec.k_true, n);
  data.truth.theta_true.resize(static_cast<std::size_t>(n));
  data.truth.labels.resize(static_cast<std::size_t>(n));
  data.truth.poses3d_true.resize(3 * d, n);
  data.truth.sequences = sequences;
  data.truth.bases_true = spec.bases_true;
  data.truth.mean3d_true = spec.mean3d_true;
  data.truth.k_true = spec.k_true;
  data.truth.seed = spec.seed;

  auto fill = [&](std::ptrdiff_t j) {
    const Instance& inst = instances[static_cast<std::size_t>(j)];
    const Eigen::VectorXd pose3d = spec.mean3d_true + spec.bases_true * inst.coeffs;
    data.truth.poses3d_true.col(j) = pose3d;
    data.set.coords.col(j) = project_vector(pose3d, inst.theta);
    data.truth.coeffs_true.col(j) = inst.coeffs;
    data.truth.theta_true[static_cast<std::size_t>(j)] = inst.theta;
    const std::string& label =
        spec.coeff_laws[static_cast<std::size_t>(inst.class_index)].class_name;
    data.truth.labels[static_cast<std::size_t>(j)] = label;
    data.set.labels[static_cast<std::size_t>(j)] = label;
    data.set.gt_angles[static_cast<std::size_t>(j)] = inst.theta;
  };
  if (parallel)
    parallel_for(n, fill);
  else
    for (int j = 0; j < n; ++j) fill(j);

  for (int j = 0; j < base_count; ++j)
    data.set.ids[static_cast<std::size_t>(j)] = "p" + std::to_string(j);
  int next = base_count;
  for (std::size_t s = 0; s < sequences.size(); ++s)
    for (std::size_t r = 0; r < sequences[s].members.size(); ++r)
      data.set.ids[static_cast<std::size_t>(next++)] =
          "q" + std::to_string(s) + "-" + std::to_string(r);

  if (spec.noise_sigma > 0.0) {
    const double unit = pose_scale(data.set);
    const double sd = spec.noise_sigma * unit;
    auto add_noise = [&](std::ptrdiff_t j) {
      Rng rng(derive_seed(spec.seed, kStreamNoise, static_cast<std::uint64_t>(j)));
      for (int i = 0; i < 2 * d; ++i) data.set.coords(i, j) += sd * rng.normal();
    };
    if (parallel)
      parallel_for(n, add_noise);
    else
      for (int j = 0; j < n; ++j) add_noise(j);
  }

  data.set.mean_pose = mean_pose(data.set);
  return data;
}

SynthData generate_impl(const SynthSpec& spec, bool parallel) {
  spec.validate();
  std::vector<Instance> instances(static_cast<std::size_t>(spec.n));
  auto draw = [&](std::ptrdiff_t j) {
    instances[static_cast<std::size_t>(j)] = draw_instance(spec, static_cast<std::uint64_t>(j));
  };
  if (parallel)
    parallel_for(spec.n, draw);
  else
    for (int j = 0; j < spec.n; ++j) draw(j);

  std::vector<SequenceInfo> sequences;
  if (spec.sequences && spec.sequences->per_class > 0) {
    std::vector<std::string> classes = spec.sequences->classes;
    if (classes.empty())
      for (const auto& law : spec.coeff_laws) classes.push_back(law.class_name);
    for (const auto& cls : classes) {
      int ci = -1;
      for (int c = 0; c < spec.n_classes; ++c)
        if (spec.coeff_laws[static_cast<std::size_t>(c)].class_name == cls) ci = c;
      if (ci < 0) throw std::invalid_argument("sequence class '" + cls + "' is not a known class");
      for (int s = 0; s < spec.sequences->per_class; ++s) {
        SequenceInfo info;
        info.class_name = cls;
        bool degenerate = false;
        auto members = draw_sequence(spec, ci, static_cast<std::uint64_t>(s),
                                     spec.sequences->length, &degenerate);
        info.degenerate = degenerate;
        for (auto& inst : members) {
          info.members.push_back(static_cast<int>(instances.size()));
          instances.push_back(std::move(inst));
        }
        sequences.push_back(std::move(info));
      }
    }
  }
  return assemble(spec, instances, sequences, spec.n, parallel);
}

}  // namespace

SynthData generate(const SynthSpec& spec) { return generate_impl(spec, true); }

SynthData generate_serial(const SynthSpec& spec) { return generate_impl(spec, false); }

SynthData generate_sequence(const SynthSpec& spec, const std::string& cls, int length) {
  spec.validate();
  if (length < 2) throw std::invalid_argument("sequences need length >= 2");
  int ci = -1;
  for (int c = 0; c < spec.n_classes; ++c)
    if (spec.coeff_laws[static_cast<std::size_t>(c)].class_name == cls) ci = c;
  if (ci < 0) throw std::invalid_argument("unknown class '" + cls + "'");

  SequenceInfo info;
  info.class_name = cls;
  bool degenerate = false;
  std::vector<Instance> instances = draw_sequence(spec, ci, 0, length, &degenerate);
  info.degenerate = degenerate;
  for (int r = 0; r < length; ++r) info.members.push_back(r);
  return assemble(spec, instances, {info}, 0, false);
}

}  // namespace movemes
