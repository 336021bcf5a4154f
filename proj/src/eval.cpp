#include "movemes/eval.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "movemes/classifier.hpp"
#include "movemes/geometry.hpp"
#include "movemes/io.hpp"
#include "movemes/objective.hpp"
#include "movemes/optimizer.hpp"
#include "movemes/parallel.hpp"
#include "movemes/preprocess.hpp"
#include "movemes/rng.hpp"

namespace movemes {

namespace {

constexpr std::uint64_t kStreamFolds = 0x666f6c64ULL;
constexpr std::uint64_t kStreamShuffle = 0x73687566ULL;
constexpr std::uint64_t kStreamSplit = 0x73706c74ULL;

}  // namespace

ClassifyResult classify_activities(const FactorModel& model,
                                   const std::vector<std::string>& labels, int folds,
                                   std::uint64_t seed) {
  const int n = model.n();
  if (static_cast<int>(labels.size()) != n)
    throw DataError("label count does not match the model's pose count");
  if (folds < 2) throw std::invalid_argument("cross validation needs at least 2 folds");

  std::map<std::string, int> class_index;
  for (const auto& label : labels) class_index.emplace(label, 0);
  ClassifyResult result;
  for (auto& [name, idx] : class_index) {
    idx = static_cast<int>(result.classes.size());
    result.classes.push_back(name);
  }
  const int c = static_cast<int>(result.classes.size());
  result.chance_accuracy = 1.0 / static_cast<double>(c);

  std::vector<int> y(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> members(static_cast<std::size_t>(c));
  for (int j = 0; j < n; ++j) {
    y[static_cast<std::size_t>(j)] = class_index[labels[static_cast<std::size_t>(j)]];
    members[static_cast<std::size_t>(y[static_cast<std::size_t>(j)])].push_back(j);
  }
  for (int ci = 0; ci < c; ++ci)
    if (static_cast<int>(members[static_cast<std::size_t>(ci)].size()) < folds)
      throw DataError("class '" + result.classes[static_cast<std::size_t>(ci)] + "' has " +
                      std::to_string(members[static_cast<std::size_t>(ci)].size()) +
                      " members, fewer than " + std::to_string(folds) + " folds");

  // Stratified folds: shuffle each class and deal round-robin.
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int ci = 0; ci < c; ++ci) {
    auto ids = members[static_cast<std::size_t>(ci)];
    Rng rng(derive_seed(seed, kStreamFolds, static_cast<std::uint64_t>(ci)));
    rng.shuffle(ids);
    for (std::size_t m = 0; m < ids.size(); ++m)
      fold_of[static_cast<std::size_t>(ids[m])] = static_cast<int>(m % static_cast<std::size_t>(folds));
  }

  result.confusion = Eigen::MatrixXi::Zero(c, c);
  const Eigen::MatrixXd features = model.coeffs.transpose();  // n x k
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int j = 0; j < n; ++j)
      (fold_of[static_cast<std::size_t>(j)] == f ? test_rows : train_rows).push_back(j);
    Eigen::MatrixXd x_train(train_rows.size(), model.rank);
    std::vector<int> y_train(train_rows.size());
    for (std::size_t r = 0; r < train_rows.size(); ++r) {
      x_train.row(static_cast<Eigen::Index>(r)) = features.row(train_rows[r]);
      y_train[r] = y[static_cast<std::size_t>(train_rows[r])];
    }
    OvRClassifier clf = fit_ovr_logistic(x_train, y_train, c);
    int correct = 0;
    for (int j : test_rows) {
      const int pred = predict(clf, features.row(j).transpose());
      result.confusion(y[static_cast<std::size_t>(j)], pred) += 1;
      if (pred == y[static_cast<std::size_t>(j)]) ++correct;
    }
    result.fold_accuracies.push_back(static_cast<double>(correct) /
                                     static_cast<double>(test_rows.size()));
  }
  result.mean_accuracy =
      std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) /
      static_cast<double>(folds);
  result.per_class_accuracy.resize(c);
  for (int ci = 0; ci < c; ++ci) {
    const double row_sum = result.confusion.row(ci).sum();
    result.per_class_accuracy(ci) =
        row_sum > 0 ? result.confusion(ci, ci) / row_sum : 0.0;
  }
  return result;
}

int min_adjacent_swaps(const std::vector<int>& perm) {
  const int m = static_cast<int>(perm.size());
  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  for (int v : perm) {
    if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("input is not a permutation of 0..m-1");
    seen[static_cast<std::size_t>(v)] = 1;
  }
  // Inversion count via merge sort.
  std::vector<int> work(perm.begin(), perm.end());
  std::vector<int> buffer(work.size());
  long inversions = 0;
  for (int width = 1; width < m; width *= 2) {
    for (int lo = 0; lo < m; lo += 2 * width) {
      const int mid = std::min(lo + width, m);
      const int hi = std::min(lo + 2 * width, m);
      int i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (work[static_cast<std::size_t>(i)] <= work[static_cast<std::size_t>(j)]) {
          buffer[static_cast<std::size_t>(out++)] = work[static_cast<std::size_t>(i++)];
        } else {
          inversions += mid - i;
          buffer[static_cast<std::size_t>(out++)] = work[static_cast<std::size_t>(j++)];
        }
      }
      while (i < mid) buffer[static_cast<std::size_t>(out++)] = work[static_cast<std::size_t>(i++)];
      while (j < hi) buffer[static_cast<std::size_t>(out++)] = work[static_cast<std::size_t>(j++)];
    }
    work.swap(buffer);
  }
  return static_cast<int>(inversions);
}

namespace {

struct SequenceOutcome {
  bool degenerate = false;
  bool exact = false;
  int errors = 0;
  int swaps = 0;
  std::vector<char> position_correct;
};

// Shuffle, fit the total-least-squares line through the centered coefficient
// rows, order by projection, and anchor the orientation with the known first
// element.
SequenceOutcome reorder_one(const FactorModel& model, const std::vector<int>& sequence,
                            std::uint64_t seed) {
  const int m = static_cast<int>(sequence.size());
  SequenceOutcome out;
  out.position_correct.assign(static_cast<std::size_t>(m), 0);

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  Eigen::MatrixXd block(m, model.rank);
  for (int r = 0; r < m; ++r)
    block.row(r) = model.coeffs.col(sequence[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])]).transpose();
  Eigen::RowVectorXd center = block.colwise().mean();
  block.rowwise() -= center;

  if (block.cwiseAbs().maxCoeff() < 1e-12) {
    out.degenerate = true;
    out.errors = m;
    out.swaps = m * (m - 1) / 2;
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinV);
  const Eigen::VectorXd direction = svd.matrixV().col(0);
  const Eigen::VectorXd projection = block * direction;

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return projection(a) < projection(b); });

  // recovered[pos] = true chronological index of the element placed there
  std::vector<int> recovered(static_cast<std::size_t>(m));
  for (int pos = 0; pos < m; ++pos)
    recovered[static_cast<std::size_t>(pos)] =
        perm[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];

  int first_pos = 0;
  for (int pos = 0; pos < m; ++pos)
    if (recovered[static_cast<std::size_t>(pos)] == 0) first_pos = pos;
  if (2 * first_pos > m - 1) std::reverse(recovered.begin(), recovered.end());

  for (int pos = 0; pos < m; ++pos) {
    const bool hit = recovered[static_cast<std::size_t>(pos)] == pos;
    out.position_correct[static_cast<std::size_t>(pos)] = hit ? 1 : 0;
    if (!hit) ++out.errors;
  }
  out.swaps = min_adjacent_swaps(recovered);
  out.exact = out.errors == 0;
  return out;
}

}  // namespace

ReorderResult reorder_sequences(const FactorModel& model,
                                const std::vector<std::vector<int>>& sequences, int trials,
                                std::uint64_t seed) {
  if (model.variant == Variant::svd_rot)
    throw std::invalid_argument(
        "sequence reordering needs globally comparable coefficients; the clustered "
        "svd-rot baseline learns no global bases");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  int max_len = 0;
  for (const auto& s : sequences) {
    if (static_cast<int>(s.size()) < 2)
      throw std::invalid_argument("sequences need at least 2 members");
    for (int idx : s)
      if (idx < 0 || idx >= model.n())
        throw std::invalid_argument("sequence member " + std::to_string(idx) + " out of range");
    max_len = std::max(max_len, static_cast<int>(s.size()));
  }

  const long total = static_cast<long>(sequences.size()) * trials;
  std::vector<SequenceOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, [&](std::ptrdiff_t t) {
    const std::size_t si = static_cast<std::size_t>(t) / static_cast<std::size_t>(trials);
    const std::uint64_t trial = static_cast<std::uint64_t>(t) % static_cast<std::uint64_t>(trials);
    outcomes[static_cast<std::size_t>(t)] = reorder_one(
        model, sequences[si],
        derive_seed(seed, kStreamShuffle, static_cast<std::uint64_t>(si) * 1000003ULL + trial));
  });

  ReorderResult result;
  result.sequences = total;
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(max_len);
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(max_len);
  double errors = 0.0, swaps = 0.0;
  for (const auto& o : outcomes) {
    if (o.degenerate) ++result.degenerate_count;
    if (o.exact) ++result.exact_count;
    errors += o.errors;
    swaps += o.swaps;
    for (std::size_t pos = 0; pos < o.position_correct.size(); ++pos) {
      denom(static_cast<Eigen::Index>(pos)) += 1.0;
      hits(static_cast<Eigen::Index>(pos)) += o.position_correct[pos];
    }
  }
  result.mean_errors = errors / static_cast<double>(total);
  result.mean_swaps = swaps / static_cast<double>(total);
  result.per_position_accuracy =
      (denom.array() > 0).select(hits.array() / denom.array(), 0.0).matrix();
  return result;
}

AngleMetrics angle_recovery(const FactorModel& model, const std::vector<double>& gt_angles) {
  if (model.variant != Variant::lfa3d)
    throw std::invalid_argument("angle recovery applies to lfa3d models");
  if (gt_angles.empty()) throw DataError("angle recovery requires ground-truth angles");
  if (static_cast<int>(gt_angles.size()) != model.n())
    throw DataError("ground-truth angle count does not match the model");
  double sq = 0.0, cos_sum = 0.0;
  for (int j = 0; j < model.n(); ++j) {
    const double diff =
        angle_difference(model.view_angles(j), gt_angles[static_cast<std::size_t>(j)]);
    sq += diff * diff;
    cos_sum += std::cos(diff);
  }
  AngleMetrics metrics;
  metrics.rmse_degrees = std::sqrt(sq / model.n()) * 180.0 / kPi;
  metrics.cos_sim = cos_sum / model.n();
  return metrics;
}

namespace {

double pooled_rmse(const std::vector<double>& per_pose_rmse) {
  double sq = 0.0;
  for (double r : per_pose_rmse) sq += r * r;
  return std::sqrt(sq / static_cast<double>(per_pose_rmse.size()));
}

}  // namespace

std::vector<GeneralizationRow> generalization_curve(const PoseSet& set,
                                                    const TrainConfig& config,
                                                    const std::vector<double>& fractions,
                                                    int repeats, std::uint64_t seed,
                                                    const Eigen::MatrixXd* init3d,
                                                    int encode_starts) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  for (double f : fractions)
    if (!(f > 0.0 && f < 1.0))
      throw std::invalid_argument("training fractions must lie in (0, 1)");
  const int n = set.n();
  const int d = set.d();

  struct Task {
    double train_rmse = 0.0;
    double test_rmse = 0.0;
  };
  const long total = static_cast<long>(fractions.size()) * repeats;
  std::vector<Task> tasks(static_cast<std::size_t>(total));

  // Tasks are independent; inner kernels run serially inside the task loop.
  parallel_for(total, [&](std::ptrdiff_t t) {
    const std::size_t fi = static_cast<std::size_t>(t) / static_cast<std::size_t>(repeats);
    const double fraction = fractions[fi];

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, kStreamSplit, static_cast<std::uint64_t>(t)));
    rng.shuffle(order);
    int train_count = static_cast<int>(std::lround(fraction * n));
    train_count = std::max(1, std::min(train_count, n - 1));

    PoseSet train_set;
    train_set.skeleton = set.skeleton;
    train_set.coords.resize(2 * d, train_count);
    Eigen::MatrixXd train_init3d;
    if (init3d != nullptr) train_init3d.resize(3 * d, train_count);
    if (!set.gt_angles.empty()) train_set.gt_angles.resize(static_cast<std::size_t>(train_count));
    for (int i = 0; i < train_count; ++i) {
      const int src = order[static_cast<std::size_t>(i)];
      train_set.coords.col(i) = set.coords.col(src);
      if (init3d != nullptr) train_init3d.col(i) = init3d->col(src);
      if (!set.gt_angles.empty())
        train_set.gt_angles[static_cast<std::size_t>(i)] =
            set.gt_angles[static_cast<std::size_t>(src)];
    }
    train_set.mean_pose = mean_pose(train_set);

    TrainConfig task_config = config;
    task_config.seed = derive_seed(seed, kStreamSplit ^ 0x5452ULL, static_cast<std::uint64_t>(t));
    FactorModel model = train(train_set, task_config, Variant::lfa3d,
                              init3d != nullptr ? &train_init3d : nullptr);

    std::vector<double> train_errors(static_cast<std::size_t>(train_count));
    for (int i = 0; i < train_count; ++i) {
      const Eigen::VectorXd residual = train_set.coords.col(i) - reconstruct(model, i).coords;
      train_errors[static_cast<std::size_t>(i)] = residual_rmse(residual);
    }
    std::vector<double> test_errors;
    test_errors.reserve(static_cast<std::size_t>(n - train_count));
    for (int i = train_count; i < n; ++i) {
      Pose2D pose = set.pose(order[static_cast<std::size_t>(i)]);
      test_errors.push_back(encode_multi_start(model, pose, encode_starts).rmse);
    }
    tasks[static_cast<std::size_t>(t)] = {pooled_rmse(train_errors), pooled_rmse(test_errors)};
  });

  std::vector<GeneralizationRow> rows;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    GeneralizationRow row;
    row.fraction = fractions[fi];
    double train_sum = 0.0, test_sum = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
      const Task& task = tasks[fi * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(rep)];
      train_sum += task.train_rmse;
      test_sum += task.test_rmse;
    }
    row.train_rmse_mean = train_sum / repeats;
    row.test_rmse_mean = test_sum / repeats;
    if (repeats > 1) {
      double train_var = 0.0, test_var = 0.0;
      for (int rep = 0; rep < repeats; ++rep) {
        const Task& task = tasks[fi * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(rep)];
        train_var += (task.train_rmse - row.train_rmse_mean) * (task.train_rmse - row.train_rmse_mean);
        test_var += (task.test_rmse - row.test_rmse_mean) * (task.test_rmse - row.test_rmse_mean);
      }
      row.train_rmse_sd = std::sqrt(train_var / (repeats - 1));
      row.test_rmse_sd = std::sqrt(test_var / (repeats - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<InterpolationFrame> moveme_interpolation(const FactorModel& model, int basis_index,
                                                     const std::vector<double>& alphas,
                                                     double view_angle, int cluster) {
  if (basis_index < 0 || basis_index >= model.rank)
    throw std::invalid_argument("basis index out of range: " + std::to_string(basis_index));
  std::vector<InterpolationFrame> frames;
  frames.reserve(alphas.size());
  for (double alpha : alphas) {
    InterpolationFrame frame;
    frame.alpha = alpha;
    switch (model.variant) {
      case Variant::svd:
        frame.coords2d = model.mean + alpha * model.bases.col(basis_index);
        break;
      case Variant::svd_rot:
      case Variant::lfa2d: {
        const Eigen::MatrixXd u = model.bases_of_cluster(cluster);
        frame.coords2d = model.cluster_means[static_cast<std::size_t>(cluster)] +
                         alpha * u.col(basis_index);
        break;
      }
      case Variant::lfa3d:
        frame.coords3d = model.mean + alpha * model.bases.col(basis_index);
        frame.coords2d = project_vector(frame.coords3d, view_angle);
        break;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void export_embedding_features(const FactorModel& model, const std::vector<std::string>& ids,
                               const std::vector<std::string>& labels, const std::string& path) {
  const int n = model.n();
  CsvWriter csv(path);
  std::vector<std::string> header = {"pose_id", "label", "theta_degrees"};
  for (int i = 1; i <= model.rank; ++i) header.push_back("v" + std::to_string(i));
  csv.write_row(header);
  for (int j = 0; j < n; ++j) {
    std::vector<std::string> row;
    row.push_back(ids.empty() ? "p" + std::to_string(j) : ids[static_cast<std::size_t>(j)]);
    row.push_back(labels.empty() ? "" : labels[static_cast<std::size_t>(j)]);
    double theta = 0.0;
    if (model.variant == Variant::lfa3d)
      theta = model.view_angles(j);
    else if (is_clustered(model.variant))
      theta = cluster_center(model.cluster_of[static_cast<std::size_t>(j)], model.p());
    row.push_back(CsvWriter::cell(theta * 180.0 / kPi));
    for (int i = 0; i < model.rank; ++i) row.push_back(CsvWriter::cell(model.coeffs(i, j)));
    csv.write_row(row);
  }
}

}  // namespace movemes
