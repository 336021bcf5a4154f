#include "movemes/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "movemes/preprocess.hpp"

namespace movemes {

using nlohmann::json;

namespace {

constexpr int kDatasetSchemaVersion = 1;
constexpr int kModelSchemaVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw DataError(what + ": expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols)
      throw DataError(what + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw DataError(what + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("parse error in " + path + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << j.dump(1, '\t') << '\n';
  if (!out) throw DataError("write failed: " + path);
}

json skeleton_to_json(const Skeleton& s) {
  json bones = json::array();
  for (const auto& [parent, child] : s.bones) bones.push_back(json::array({parent, child}));
  json out = {{"joint_names", s.joint_names}, {"bones", bones}};
  if (!s.torso_bones.empty()) out["torso_bones"] = s.torso_bones;
  return out;
}

Skeleton skeleton_from_json(const json& j) {
  Skeleton s;
  if (!j.contains("joint_names") || !j.contains("bones"))
    throw DataError("skeleton block needs joint_names and bones");
  s.joint_names = j.at("joint_names").get<std::vector<std::string>>();
  for (const auto& bone : j.at("bones")) {
    if (!bone.is_array() || bone.size() != 2) throw DataError("each bone must be a [parent, child] pair");
    s.bones.emplace_back(bone[0].get<int>(), bone[1].get<int>());
  }
  if (j.contains("torso_bones")) s.torso_bones = j.at("torso_bones").get<std::vector<int>>();
  s.validate();
  return s;
}

json config_to_json(const TrainConfig& c) {
  json out = {{"rank", c.rank},
              {"lambda_bases", c.lambda_bases},
              {"lambda_coeffs", c.lambda_coeffs},
              {"lambda_spatial", c.lambda_spatial},
              {"clusters", c.clusters},
              {"epochs", c.epochs},
              {"iters_per_epoch", c.iters_per_epoch},
              {"lr_factors", c.lr_factors},
              {"lr_angle", c.lr_angle},
              {"angle_sweeps", c.angle_sweeps},
              {"encode_iters", c.encode_iters},
              {"seed", c.seed},
              {"angle_init", to_string(c.angle_init)},
              {"nonneg_coeffs", c.nonneg_coeffs},
              {"mask_visibility", c.mask_visibility}};
  if (c.cluster_similarity.size() > 0) out["cluster_similarity"] = matrix_to_json(c.cluster_similarity);
  return out;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.rank = j.at("rank").get<int>();
  c.lambda_bases = j.at("lambda_bases").get<double>();
  c.lambda_coeffs = j.at("lambda_coeffs").get<double>();
  c.lambda_spatial = j.at("lambda_spatial").get<double>();
  c.clusters = j.at("clusters").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.iters_per_epoch = j.at("iters_per_epoch").get<int>();
  c.lr_factors = j.at("lr_factors").get<double>();
  c.lr_angle = j.at("lr_angle").get<double>();
  c.angle_sweeps = j.at("angle_sweeps").get<int>();
  c.encode_iters = j.at("encode_iters").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.angle_init = angle_init_from_string(j.at("angle_init").get<std::string>());
  c.nonneg_coeffs = j.at("nonneg_coeffs").get<bool>();
  c.mask_visibility = j.at("mask_visibility").get<bool>();
  if (j.contains("cluster_similarity"))
    c.cluster_similarity = matrix_from_json(j.at("cluster_similarity"), "cluster_similarity");
  return c;
}

}  // namespace

PoseSet load_dataset(const std::string& path, LoadReport* report) {
  const json j = load_json_file(path);
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kDatasetSchemaVersion)
    throw DataError(path + ": unsupported or missing dataset schema_version");
  if (!j.contains("skeleton") || !j.contains("poses"))
    throw DataError(path + ": dataset needs skeleton and poses blocks");

  PoseSet set;
  set.skeleton = skeleton_from_json(j.at("skeleton"));
  const int d = set.d();
  const auto& poses = j.at("poses");
  if (!poses.is_array() || poses.empty()) throw DataError(path + ": poses must be a non-empty array");
  const int n = static_cast<int>(poses.size());

  set.coords.resize(2 * d, n);
  set.visibility.resize(d, n);
  set.ids.reserve(static_cast<std::size_t>(n));
  std::set<std::string> seen_ids;
  bool any_label = false, all_angles = true, any_angle = false;
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  std::vector<double> angles(static_cast<std::size_t>(n), 0.0);

  for (int p = 0; p < n; ++p) {
    const auto& rec = poses[static_cast<std::size_t>(p)];
    const std::string where = path + ": poses[" + std::to_string(p) + "]";
    if (!rec.contains("id")) throw DataError(where + ": missing id");
    const std::string id = rec.at("id").get<std::string>();
    if (!seen_ids.insert(id).second) throw DataError(where + ": duplicate id '" + id + "'");
    set.ids.push_back(id);

    if (!rec.contains("joints")) throw DataError(where + " (id '" + id + "'): missing joints");
    const auto& joints = rec.at("joints");
    if (static_cast<int>(joints.size()) != d)
      throw DataError(where + " (id '" + id + "'): expected " + std::to_string(d) +
                      " joints, got " + std::to_string(joints.size()));
    for (int i = 0; i < d; ++i) {
      const auto& triple = joints[static_cast<std::size_t>(i)];
      if (!triple.is_array() || triple.size() != 3)
        throw DataError(where + " (id '" + id + "'): joint " + std::to_string(i) +
                        " must be an [x, y, visible] triple");
      set.coords(i, p) = triple[0].get<double>();
      set.coords(d + i, p) = triple[1].get<double>();
      set.visibility(i, p) = triple[2].get<double>() != 0.0 ? 1 : 0;
    }

    if (rec.contains("activity")) {
      labels[static_cast<std::size_t>(p)] = rec.at("activity").get<std::string>();
      any_label = true;
    }
    if (rec.contains("angle_gt_degrees")) {
      const double deg = rec.at("angle_gt_degrees").get<double>();
      if (!(deg >= 0.0 && deg < 360.0))
        throw DataError(where + " (id '" + id + "'): angle_gt_degrees must lie in [0, 360), got " +
                        std::to_string(deg));
      angles[static_cast<std::size_t>(p)] = deg * kPi / 180.0;
      any_angle = true;
    } else {
      all_angles = false;
    }
  }

  if (any_label) set.labels = std::move(labels);
  if (any_angle) {
    if (!all_angles)
      throw DataError(path + ": angle_gt_degrees must be present on all poses or on none");
    set.gt_angles = std::move(angles);
  }
  set.mean_pose = mean_pose(set);
  set.validate();
  if (report != nullptr) {
    report->poses_loaded = n;
    report->poses_excluded = 0;
  }
  return set;
}

void save_dataset(const PoseSet& set, const std::string& path) {
  set.validate();
  const int d = set.d();
  json poses = json::array();
  for (int p = 0; p < set.n(); ++p) {
    json rec;
    rec["id"] = set.ids.empty() ? "p" + std::to_string(p) : set.ids[static_cast<std::size_t>(p)];
    if (set.has_labels()) rec["activity"] = set.labels[static_cast<std::size_t>(p)];
    if (set.has_gt_angles())
      rec["angle_gt_degrees"] =
          wrap_angle(set.gt_angles[static_cast<std::size_t>(p)]) * 180.0 / kPi;
    json joints = json::array();
    for (int i = 0; i < d; ++i) {
      const int vis =
          set.visibility.size() > 0 ? static_cast<int>(set.visibility(i, p)) : 1;
      joints.push_back(json::array({set.coords(i, p), set.coords(d + i, p), vis}));
    }
    rec["joints"] = std::move(joints);
    poses.push_back(std::move(rec));
  }
  json out = {{"schema_version", kDatasetSchemaVersion},
              {"skeleton", skeleton_to_json(set.skeleton)},
              {"poses", std::move(poses)}};
  write_json_file(out, path);
}

void save_truth(const SynthTruth& truth, const std::string& path) {
  json sequences = json::array();
  for (const auto& s : truth.sequences)
    sequences.push_back({{"class", s.class_name},
                         {"members", s.members},
                         {"degenerate", s.degenerate}});
  std::vector<double> theta_deg;
  theta_deg.reserve(truth.theta_true.size());
  for (double t : truth.theta_true) theta_deg.push_back(wrap_angle(t) * 180.0 / kPi);
  json out = {{"schema_version", kDatasetSchemaVersion},
              {"k_true", truth.k_true},
              {"seed", truth.seed},
              {"labels", truth.labels},
              {"theta_true_degrees", theta_deg},
              {"coeffs_true", matrix_to_json(truth.coeffs_true)},
              {"bases_true", matrix_to_json(truth.bases_true)},
              {"mean3d_true", vector_to_json(truth.mean3d_true)},
              {"sequences", std::move(sequences)}};
  write_json_file(out, path);
}

SynthTruth load_truth(const std::string& path) {
  const json j = load_json_file(path);
  SynthTruth truth;
  truth.k_true = j.at("k_true").get<int>();
  truth.seed = j.at("seed").get<std::uint64_t>();
  truth.labels = j.at("labels").get<std::vector<std::string>>();
  for (double deg : j.at("theta_true_degrees").get<std::vector<double>>())
    truth.theta_true.push_back(deg * kPi / 180.0);
  truth.coeffs_true = matrix_from_json(j.at("coeffs_true"), "coeffs_true");
  truth.bases_true = matrix_from_json(j.at("bases_true"), "bases_true");
  truth.mean3d_true = vector_from_json(j.at("mean3d_true"), "mean3d_true");
  for (const auto& s : j.at("sequences")) {
    SequenceInfo info;
    info.class_name = s.at("class").get<std::string>();
    info.members = s.at("members").get<std::vector<int>>();
    info.degenerate = s.at("degenerate").get<bool>();
    truth.sequences.push_back(std::move(info));
  }
  return truth;
}

SynthSpec load_synth_spec(const std::string& path) {
  const json j = load_json_file(path);
  const int n = j.at("n").get<int>();
  const int n_classes = j.value("n_classes", 4);
  const double noise = j.value("noise_sigma", 0.0);
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  int k_true = j.value("k_true", -1);

  SynthSpec spec = default_synth_spec(n, n_classes, noise, seed, k_true);
  if (j.contains("skeleton") && j.at("skeleton").is_object())
    spec.skeleton = skeleton_from_json(j.at("skeleton"));
  if (j.contains("bases") && j.at("bases").is_array())
    spec.bases_true = matrix_from_json(j.at("bases"), "bases");
  if (j.contains("mean3d") && j.at("mean3d").is_array())
    spec.mean3d_true = vector_from_json(j.at("mean3d"), "mean3d");
  spec.k_true = static_cast<int>(spec.bases_true.cols());
  if (j.contains("coeff_laws") && j.at("coeff_laws").is_array()) {
    spec.coeff_laws.clear();
    for (const auto& rec : j.at("coeff_laws")) {
      CoeffLaw law;
      law.class_name = rec.at("class").get<std::string>();
      law.active = rec.at("active").get<std::vector<int>>();
      law.lo = rec.value("lo", 0.3);
      law.hi = rec.value("hi", 1.0);
      spec.coeff_laws.push_back(std::move(law));
    }
    spec.n_classes = static_cast<int>(spec.coeff_laws.size());
  }
  if (j.contains("angle_law")) {
    const auto& a = j.at("angle_law");
    const std::string kind = a.at("kind").get<std::string>();
    if (kind == "uniform") {
      spec.angle_law.kind = AngleLaw::Kind::uniform;
    } else if (kind == "per_class_arc") {
      spec.angle_law.kind = AngleLaw::Kind::per_class_arc;
      spec.angle_law.centers.clear();
      for (double deg : a.at("centers_degrees").get<std::vector<double>>())
        spec.angle_law.centers.push_back(deg * kPi / 180.0);
      spec.angle_law.halfwidth = a.at("halfwidth_degrees").get<double>() * kPi / 180.0;
    } else {
      throw DataError("unknown angle law kind '" + kind + "'");
    }
  }
  if (j.contains("sequences")) {
    const auto& s = j.at("sequences");
    SequenceSpec seq;
    seq.per_class = s.at("per_class").get<int>();
    seq.length = s.value("length", 4);
    seq.jitter = s.value("jitter", 0.4);
    if (s.contains("classes")) seq.classes = s.at("classes").get<std::vector<std::string>>();
    spec.sequences = seq;
  }
  spec.validate();
  return spec;
}

void save_synth_spec(const SynthSpec& spec, const std::string& path) {
  json out = {{"schema_version", kDatasetSchemaVersion},
              {"n", spec.n},
              {"n_classes", spec.n_classes},
              {"k_true", spec.k_true},
              {"noise_sigma", spec.noise_sigma},
              {"seed", spec.seed},
              {"skeleton", skeleton_to_json(spec.skeleton)},
              {"bases", matrix_to_json(spec.bases_true)},
              {"mean3d", vector_to_json(spec.mean3d_true)}};
  json laws = json::array();
  for (const auto& law : spec.coeff_laws)
    laws.push_back({{"class", law.class_name}, {"active", law.active}, {"lo", law.lo}, {"hi", law.hi}});
  out["coeff_laws"] = std::move(laws);
  if (spec.angle_law.kind == AngleLaw::Kind::uniform) {
    out["angle_law"] = {{"kind", "uniform"}};
  } else {
    std::vector<double> centers_deg;
    for (double c : spec.angle_law.centers) centers_deg.push_back(c * 180.0 / kPi);
    out["angle_law"] = {{"kind", "per_class_arc"},
                        {"centers_degrees", centers_deg},
                        {"halfwidth_degrees", spec.angle_law.halfwidth * 180.0 / kPi}};
  }
  if (spec.sequences) {
    out["sequences"] = {{"per_class", spec.sequences->per_class},
                        {"length", spec.sequences->length},
                        {"jitter", spec.sequences->jitter}};
    if (!spec.sequences->classes.empty()) out["sequences"]["classes"] = spec.sequences->classes;
  }
  write_json_file(out, path);
}

void save_model(const FactorModel& model, const std::string& path) {
  model.validate();
  json out = {{"schema_version", kModelSchemaVersion},
              {"kind", "movemes-model"},
              {"variant", to_string(model.variant)},
              {"rank", model.rank},
              {"n", model.n()},
              {"skeleton_hash", model.skeleton_hash},
              {"coeffs", matrix_to_json(model.coeffs)},
              {"config", config_to_json(model.config)}};
  switch (model.variant) {
    case Variant::svd:
      out["bases"] = matrix_to_json(model.bases);
      out["mean"] = vector_to_json(model.mean);
      break;
    case Variant::lfa3d: {
      out["bases"] = matrix_to_json(model.bases);
      out["mean"] = vector_to_json(model.mean);
      out["view_angles"] = vector_to_json(model.view_angles);
      break;
    }
    case Variant::svd_rot: {
      json blocks = json::array();
      for (const auto& u : model.cluster_bases) blocks.push_back(matrix_to_json(u));
      out["cluster_bases"] = std::move(blocks);
      json means = json::array();
      for (const auto& m : model.cluster_means) means.push_back(vector_to_json(m));
      out["cluster_means"] = std::move(means);
      out["cluster_of"] = model.cluster_of;
      break;
    }
    case Variant::lfa2d: {
      json blocks = json::array();
      for (const auto& u : model.bases_x) blocks.push_back(matrix_to_json(u));
      out["bases_x"] = std::move(blocks);
      out["bases_y"] = matrix_to_json(model.bases_y);
      json means = json::array();
      for (const auto& m : model.cluster_means) means.push_back(vector_to_json(m));
      out["cluster_means"] = std::move(means);
      out["cluster_of"] = model.cluster_of;
      break;
    }
  }
  json trace = json::array();
  for (const auto& t : model.trace)
    trace.push_back(json::array({t.epoch, t.iter, t.recon, t.reg, t.total}));
  out["trace"] = std::move(trace);
  write_json_file(out, path);
}

FactorModel load_model(const std::string& path) {
  const json j = load_json_file(path);
  if (!j.contains("kind") || j.at("kind").get<std::string>() != "movemes-model")
    throw DataError(path + ": not a model file");
  if (j.at("schema_version").get<int>() != kModelSchemaVersion)
    throw DataError(path + ": unsupported model schema_version " +
                    std::to_string(j.at("schema_version").get<int>()));
  FactorModel model;
  model.variant = variant_from_string(j.at("variant").get<std::string>());
  model.rank = j.at("rank").get<int>();
  model.skeleton_hash = j.at("skeleton_hash").get<std::uint64_t>();
  model.coeffs = matrix_from_json(j.at("coeffs"), "coeffs");
  model.config = config_from_json(j.at("config"));
  switch (model.variant) {
    case Variant::svd:
      model.bases = matrix_from_json(j.at("bases"), "bases");
      model.mean = vector_from_json(j.at("mean"), "mean");
      break;
    case Variant::lfa3d:
      model.bases = matrix_from_json(j.at("bases"), "bases");
      model.mean = vector_from_json(j.at("mean"), "mean");
      model.view_angles = vector_from_json(j.at("view_angles"), "view_angles");
      break;
    case Variant::svd_rot: {
      for (const auto& block : j.at("cluster_bases"))
        model.cluster_bases.push_back(matrix_from_json(block, "cluster_bases"));
      for (const auto& m : j.at("cluster_means"))
        model.cluster_means.push_back(vector_from_json(m, "cluster_means"));
      model.cluster_of = j.at("cluster_of").get<std::vector<int>>();
      break;
    }
    case Variant::lfa2d: {
      for (const auto& block : j.at("bases_x"))
        model.bases_x.push_back(matrix_from_json(block, "bases_x"));
      model.bases_y = matrix_from_json(j.at("bases_y"), "bases_y");
      for (const auto& m : j.at("cluster_means"))
        model.cluster_means.push_back(vector_from_json(m, "cluster_means"));
      model.cluster_of = j.at("cluster_of").get<std::vector<int>>();
      break;
    }
  }
  for (const auto& t : j.at("trace")) {
    TracePoint point;
    point.epoch = t[0].get<int>();
    point.iter = t[1].get<long>();
    point.recon = t[2].get<double>();
    point.reg = t[3].get<double>();
    point.total = t[4].get<double>();
    model.trace.push_back(point);
  }
  model.validate();
  return model;
}

PoseSet filter_activities(const PoseSet& set, const std::vector<std::string>& excluded,
                          LoadReport* report) {
  if (!set.has_labels()) throw DataError("cannot filter a dataset without activity labels");
  std::set<std::string> drop(excluded.begin(), excluded.end());
  std::set<std::string> present(set.labels.begin(), set.labels.end());
  for (const auto& name : drop)
    if (present.find(name) == present.end() && report != nullptr)
      report->warnings.push_back("activity '" + name + "' not present in the dataset");

  std::vector<int> keep;
  for (int j = 0; j < set.n(); ++j)
    if (drop.find(set.labels[static_cast<std::size_t>(j)]) == drop.end()) keep.push_back(j);

  PoseSet out;
  out.skeleton = set.skeleton;
  const int m = static_cast<int>(keep.size());
  out.coords.resize(set.coords.rows(), m);
  if (set.visibility.size() > 0) out.visibility.resize(set.d(), m);
  for (int i = 0; i < m; ++i) {
    out.coords.col(i) = set.coords.col(keep[static_cast<std::size_t>(i)]);
    if (set.visibility.size() > 0)
      out.visibility.col(i) = set.visibility.col(keep[static_cast<std::size_t>(i)]);
  }
  auto subset = [&keep](const auto& values, auto& out_values) {
    if (values.empty()) return;
    out_values.reserve(keep.size());
    for (int j : keep) out_values.push_back(values[static_cast<std::size_t>(j)]);
  };
  subset(set.ids, out.ids);
  subset(set.labels, out.labels);
  subset(set.gt_angles, out.gt_angles);
  if (report != nullptr) {
    report->poses_loaded = m;
    report->poses_excluded = set.n() - m;
  }
  if (m > 0) out.mean_pose = mean_pose(out);
  return out;
}

Eigen::MatrixXd load_init3d(const std::string& path, int expected_joints) {
  const json j = load_json_file(path);
  if (!j.contains("poses3d")) throw DataError(path + ": missing poses3d block");
  Eigen::MatrixXd rows = matrix_from_json(j.at("poses3d"), "poses3d");
  // stored one pose per row; used column-per-pose
  Eigen::MatrixXd out = rows.transpose();
  if (expected_joints > 0 && out.rows() != 3 * expected_joints)
    throw DataError(path + ": poses3d rows have " + std::to_string(rows.cols()) +
                    " values, expected " + std::to_string(3 * expected_joints));
  return out;
}

void save_init3d(const Eigen::MatrixXd& poses3d, const std::string& path) {
  json out = {{"schema_version", kDatasetSchemaVersion},
              {"poses3d", matrix_to_json(poses3d.transpose())}};
  write_json_file(out, path);
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[65536];
  while (in) {
    in.read(buffer, sizeof buffer);
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    impl_ = nullptr;
    throw DataError("cannot write file: " + path);
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) impl_->out << ',';
    impl_->out << cells[i];
  }
  impl_->out << '\n';
}

std::string CsvWriter::cell(double value) { return format_double(value); }
std::string CsvWriter::cell(long value) { return std::to_string(value); }

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace movemes
