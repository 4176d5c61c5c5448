// Copyright 2026 The geneo-select Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GENEO_EXPERIMENT_H_
#define GENEO_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geneo/grid.h"
#include "geneo/ingest.h"
#include "geneo/operator.h"
#include "geneo/select.h"
#include "json.hpp"

namespace geneo {

inline constexpr char kVersionTag[] = "geneo-select 1.0.0";

// Selection experiment settings. Defaults: m = 2, r in {10, 20}, tolerance
// 1e-6, 3000 energy evaluations, 100 evaluation operators, seeds 1..5,
// k = h = (1, 2).
struct ExperimentConfig {
  int n = 28;
  int m = 2;
  std::vector<int> r_values = {10, 20};
  std::vector<int> k = {1, 2};
  std::vector<int> h = {1, 2};
  BoundaryRule boundary = BoundaryRule::kMidpoint;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double tol = 1e-6;
  int max_evals = 3000;
  int eval_count = 100;
  // Run (r, seed) pairs on worker threads; results are merged in order.
  bool parallel = true;
};

// Throws std::invalid_argument on any out-of-range field.
void Validate(const ExperimentConfig& config);
nlohmann::json ToJson(const ExperimentConfig& config);

// Where the signal distribution came from.
struct DatasetSpec {
  // Synthetic glyphs instead of IDX files.
  bool synthetic = true;
  std::uint64_t synth_seed = 7;
  std::string images_path;
  std::string labels_path;
  LetterPolicy policy;
  int label_base = 1;
  // Empty means uniform weights.
  std::string frequency_path;
  // Use synthetic glyphs (with a notice) when the IDX files fail to load.
  bool fallback_to_synthetic = false;
};

struct LoadedDataset {
  WeightedSignalSpace space;
  // Resolved description for reports.
  nlohmann::json description;
  std::vector<std::string> notices;
};

// Throws IoError or std::invalid_argument when loading fails without
// fallback.
LoadedDataset LoadDataset(const DatasetSpec& spec, int n);

// EMNIST letters training files (raw or .gz) under `dir`, if both exist.
std::optional<DatasetSpec> FindEmnist(const std::string& dir);

struct RunRecord {
  int r = 0;
  std::uint64_t seed = 0;
  Configuration initial;
  double initial_energy = 0.0;
  SelectionResult result;
  std::vector<Eigen::VectorXd> evaluation;
  std::vector<double> etas;
  double mean_eta = 0.0;
  // Logged next to the mean: the mean of ratios is dominated by evaluation
  // points that land near a baseline point.
  double median_eta = 0.0;
  // sum of nearest optimized distances / sum of nearest baseline distances.
  double ratio_of_means = 0.0;
};

struct RSummary {
  int r = 0;
  double grand_mean_eta = 0.0;
  double max_seed_mean_eta = 0.0;
  double mean_median_eta = 0.0;
  double mean_ratio_of_means = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  nlohmann::json dataset;
  std::vector<std::string> notices;
  GramMatrix q = GramMatrix::Identity(1);
  std::vector<RunRecord> runs;
  std::vector<RSummary> summaries;
};

// Runs one (r, seed) with a precomputed Gram matrix. The initial
// configuration and the evaluation set use independent streams derived
// from (seed, r).
RunRecord RunSelection(const GramMatrix& q, int r, std::uint64_t seed,
                       const ExperimentConfig& config);

ExperimentReport RunExperiment(const LoadedDataset& dataset,
                               const ExperimentConfig& config);

nlohmann::json ToJson(const ExperimentReport& report);
// r,seed,final_energy,evals,mean_eta plus termination details.
std::string SummaryCsv(const ExperimentReport& report);
// Angles of the initial and optimized points for m = 2.
std::string AnglesCsv(const ExperimentReport& report);
// Two panels (random start, optimized) on the unit circle for one m = 2 run.
std::string CircleSvg(const RunRecord& run);

}  // namespace geneo

#endif  // GENEO_EXPERIMENT_H_
