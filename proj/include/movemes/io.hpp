#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "movemes/model.hpp"
#include "movemes/synth.hpp"
#include "movemes/types.hpp"

namespace movemes {

struct LoadReport {
  int poses_loaded = 0;
  int poses_excluded = 0;
  std::vector<std::string> warnings;
};

/// Dataset files are JSON: a skeleton block plus one record per pose with
/// id, optional activity and ground-truth angle (degrees in files, radians
/// in memory), and d [x, y, visible] joint triples.
PoseSet load_dataset(const std::string& path, LoadReport* report = nullptr);
void save_dataset(const PoseSet& set, const std::string& path);

void save_truth(const SynthTruth& truth, const std::string& path);
SynthTruth load_truth(const std::string& path);

SynthSpec load_synth_spec(const std::string& path);
void save_synth_spec(const SynthSpec& spec, const std::string& path);

/// Model round-trips are exact: numeric fields are serialized with
/// shortest-round-trip encoding, and lfa2d's shared y block is stored once.
void save_model(const FactorModel& model, const std::string& path);
FactorModel load_model(const std::string& path);

/// Drops the listed activities; unknown names warn rather than fail. The
/// mean pose is recomputed.
PoseSet filter_activities(const PoseSet& set,
                          const std::vector<std::string>& excluded,
                          LoadReport* report = nullptr);

/// Loads a 3-D initialization file ({"poses3d": [[...], ...]}, 3d per row)
/// into a 3d x n matrix.
Eigen::MatrixXd load_init3d(const std::string& path, int expected_joints);
void save_init3d(const Eigen::MatrixXd& poses3d, const std::string& path);

/// FNV-1a content hash of a file.
std::uint64_t file_hash(const std::string& path);

/// Shortest-round-trip decimal text for a double.
std::string format_double(double value);

/// Minimal CSV writer: quoted headers are unnecessary here, values are
/// either plain strings or round-trip-formatted numbers.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  void write_row(const std::vector<std::string>& cells);
  static std::string cell(double value);
  static std::string cell(long value);

 private:
  struct Impl;
  Impl* impl_;
};

std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace movemes
