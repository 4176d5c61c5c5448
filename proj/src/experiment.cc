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

#include "geneo/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <numbers>
#include <stdexcept>

#include "geneo/errors.h"

namespace geneo {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t StreamSeed(std::uint64_t seed, int r, int stream) {
  return SplitMix64(SplitMix64(seed) ^ (static_cast<std::uint64_t>(r) << 8) ^
                    static_cast<std::uint64_t>(stream));
}

nlohmann::json Points(const std::vector<Eigen::VectorXd>& points) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : points) {
    out.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  return out;
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

void Validate(const ExperimentConfig& config) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument(what);
  };
  if (config.n < 2) fail("n must be at least 2");
  if (config.m < 1) fail("m must be at least 1");
  if (config.r_values.empty()) fail("at least one r value is required");
  for (int r : config.r_values) {
    if (r < 1) fail("r must be at least 1, got " + std::to_string(r));
  }
  if (static_cast<int>(config.k.size()) != config.m ||
      static_cast<int>(config.h.size()) != config.m) {
    fail("k and h must each have m = " + std::to_string(config.m) + " entries");
  }
  for (std::size_t t = 0; t < config.k.size(); ++t) {
    if (config.k[t] < 1 || config.h[t] < 1) fail("k and h entries must be >= 1");
  }
  if (config.seeds.empty()) fail("at least one seed is required");
  if (!(config.tol > 0.0)) fail("tolerance must be positive");
  if (config.max_evals < 1) fail("max evaluations must be at least 1");
  if (config.eval_count < 1) fail("evaluation set size must be at least 1");
}

nlohmann::json ToJson(const ExperimentConfig& config) {
  return {{"n", config.n},
          {"m", config.m},
          {"r", config.r_values},
          {"k", config.k},
          {"h", config.h},
          {"boundary", ToString(config.boundary)},
          {"seeds", config.seeds},
          {"tol", config.tol},
          {"max_evals", config.max_evals},
          {"eval_count", config.eval_count}};
}

std::optional<DatasetSpec> FindEmnist(const std::string& dir) {
  namespace fs = std::filesystem;
  if (dir.empty()) return std::nullopt;
  auto pick = [&](const std::string& stem) -> std::string {
    for (const char* suffix : {"", ".gz"}) {
      const fs::path p = fs::path(dir) / (stem + suffix);
      if (fs::exists(p)) return p.string();
    }
    return "";
  };
  DatasetSpec spec;
  spec.synthetic = false;
  spec.images_path = pick("emnist-letters-train-images-idx3-ubyte");
  spec.labels_path = pick("emnist-letters-train-labels-idx1-ubyte");
  if (spec.images_path.empty() || spec.labels_path.empty()) return std::nullopt;
  return spec;
}

LoadedDataset LoadDataset(const DatasetSpec& spec, int n) {
  std::vector<std::string> notices;
  nlohmann::json description;
  std::vector<Signal> signals;
  bool synthetic = spec.synthetic;
  if (!synthetic) {
    try {
      const IdxImageSet images = ParseIdx(ReadFileBytes(spec.images_path));
      const IdxLabelSet labels = ParseIdxLabels(ReadFileBytes(spec.labels_path));
      LetterOptions options;
      options.n = n;
      options.label_base = spec.label_base;
      signals = LoadLetters(images, labels, spec.policy, options);
      description = {{"source", "idx"},
                     {"images", spec.images_path},
                     {"labels", spec.labels_path},
                     {"policy", Describe(spec.policy)},
                     {"transposed", true}};
    } catch (const std::exception& e) {
      if (!spec.fallback_to_synthetic) throw;
      notices.push_back(std::string("dataset load failed (") + e.what() +
                        "); using synthetic glyphs");
      synthetic = true;
    }
  }
  if (synthetic) {
    signals = SynthGlyphs(n, spec.synth_seed);
    description = {{"source", "synthetic"}, {"synth_seed", spec.synth_seed}};
  }
  FrequencyTable table = UniformFrequencies();
  description["weights"] = "uniform";
  if (!spec.frequency_path.empty()) {
    table = LoadFrequencies(spec.frequency_path);
    description["weights"] = spec.frequency_path;
    if (!table.notice.empty()) notices.push_back(table.notice);
  }
  WeightedSignalSpace space = MakeSpace(std::move(signals), table.Weights());
  return {std::move(space), std::move(description), std::move(notices)};
}

RunRecord RunSelection(const GramMatrix& q, int r, std::uint64_t seed,
                       const ExperimentConfig& config) {
  RunRecord run;
  run.r = r;
  run.seed = seed;
  Rng init_rng(StreamSeed(seed, r, 0));
  Rng eval_rng(StreamSeed(seed, r, 1));
  run.initial = RandomConfiguration(r, config.m, init_rng, q);
  run.initial_energy = Energy(run.initial, q);
  OptimizerOptions options;
  options.tol = config.tol;
  options.max_evals = config.max_evals;
  run.result = Optimize(run.initial, q, options);
  run.result.seed = seed;
  double total = 0.0;
  double optimized_sum = 0.0;
  double baseline_sum = 0.0;
  for (int e = 0; e < config.eval_count; ++e) {
    run.evaluation.push_back(SampleSphere(config.m, eval_rng));
    const double eta =
        Eta(run.evaluation.back(), run.result.final, run.initial, q);
    const NearestDistances d =
        Nearest(run.evaluation.back(), run.result.final, run.initial, q);
    optimized_sum += d.optimized;
    baseline_sum += d.baseline;
    run.etas.push_back(eta);
    total += eta;
  }
  run.mean_eta = total / config.eval_count;
  run.ratio_of_means = optimized_sum / baseline_sum;
  std::vector<double> sorted = run.etas;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  run.median_eta = sorted.size() % 2 == 1
                       ? sorted[mid]
                       : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return run;
}

ExperimentReport RunExperiment(const LoadedDataset& dataset,
                               const ExperimentConfig& config) {
  Validate(config);
  if (dataset.space.grid().n() != config.n) {
    throw std::invalid_argument("dataset grid does not match configured n");
  }
  ExperimentReport report;
  report.config = config;
  report.dataset = dataset.description;
  report.notices = dataset.notices;
  const ShiftGenerators generators(TorusGrid(config.n), config.k, config.h,
                                   config.boundary);
  report.q = ComputeGramMatrix(generators, dataset.space);

  std::vector<std::pair<int, std::uint64_t>> jobs;
  for (int r : config.r_values) {
    for (std::uint64_t seed : config.seeds) jobs.emplace_back(r, seed);
  }
  if (config.parallel) {
    std::vector<std::future<RunRecord>> pending;
    for (const auto& [r, seed] : jobs) {
      pending.push_back(std::async(std::launch::async, RunSelection,
                                   std::cref(report.q), r, seed,
                                   std::cref(config)));
    }
    for (auto& f : pending) report.runs.push_back(f.get());
  } else {
    for (const auto& [r, seed] : jobs) {
      report.runs.push_back(RunSelection(report.q, r, seed, config));
    }
  }
  for (int r : config.r_values) {
    RSummary summary{r, 0.0, 0.0, 0.0, 0.0};
    int count = 0;
    for (const RunRecord& run : report.runs) {
      if (run.r != r) continue;
      summary.grand_mean_eta += run.mean_eta;
      summary.mean_median_eta += run.median_eta;
      summary.mean_ratio_of_means += run.ratio_of_means;
      summary.max_seed_mean_eta = std::max(summary.max_seed_mean_eta, run.mean_eta);
      ++count;
    }
    summary.grand_mean_eta /= count;
    summary.mean_median_eta /= count;
    summary.mean_ratio_of_means /= count;
    report.summaries.push_back(summary);
  }
  return report;
}

nlohmann::json ToJson(const ExperimentReport& report) {
  nlohmann::json gram = nlohmann::json::array();
  for (int a = 0; a < report.q.m(); ++a) {
    std::vector<double> row(report.q.m());
    for (int b = 0; b < report.q.m(); ++b) row[b] = report.q.matrix()(a, b);
    gram.push_back(row);
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& run : report.runs) {
    runs.push_back({{"r", run.r},
                    {"seed", run.seed},
                    {"initial", Points(run.initial.points)},
                    {"final", Points(run.result.final.points)},
                    {"initial_energy", run.initial_energy},
                    {"final_energy", run.result.energy_trace.back()},
                    {"energy_trace", run.result.energy_trace},
                    {"grad_norm", run.result.grad_norm},
                    {"evals", run.result.evals},
                    {"iterations", run.result.iterations},
                    {"termination", ToString(run.result.termination)},
                    {"evaluation_set", Points(run.evaluation)},
                    {"etas", run.etas},
                    {"mean_eta", run.mean_eta},
                    {"median_eta", run.median_eta},
                    {"ratio_of_means", run.ratio_of_means}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const RSummary& s : report.summaries) {
    summary.push_back({{"r", s.r},
                       {"grand_mean_eta", s.grand_mean_eta},
                       {"max_seed_mean_eta", s.max_seed_mean_eta},
                       {"mean_median_eta", s.mean_median_eta},
                       {"mean_ratio_of_means", s.mean_ratio_of_means}});
  }
  return {{"version", kVersionTag},
          {"config", ToJson(report.config)},
          {"dataset", report.dataset},
          {"notices", report.notices},
          {"gram", gram},
          {"runs", runs},
          {"summary", summary}};
}

std::string SummaryCsv(const ExperimentReport& report) {
  std::string out =
      "r,seed,final_energy,evals,mean_eta,termination,grad_norm,median_eta,"
      "ratio_of_means\n";
  for (const RunRecord& run : report.runs) {
    out += std::to_string(run.r) + "," + std::to_string(run.seed) + "," +
           Fmt("%.17g", run.result.energy_trace.back()) + "," +
           std::to_string(run.result.evals) + "," + Fmt("%.17g", run.mean_eta) +
           "," + ToString(run.result.termination) + "," +
           Fmt("%.17g", run.result.grad_norm) + "," +
           Fmt("%.17g", run.median_eta) + "," +
           Fmt("%.17g", run.ratio_of_means) + "\n";
  }
  return out;
}

std::string AnglesCsv(const ExperimentReport& report) {
  std::string out = "r,seed,set,index,angle\n";
  for (const RunRecord& run : report.runs) {
    auto emit = [&](const char* set, const Configuration& cfg) {
      for (int i = 0; i < cfg.r(); ++i) {
        const auto& p = cfg.points[i];
        const double angle = p.size() >= 2 ? std::atan2(p[1], p[0]) : 0.0;
        out += std::to_string(run.r) + "," + std::to_string(run.seed) + "," +
               set + "," + std::to_string(i) + "," + Fmt("%.17g", angle) + "\n";
      }
    };
    emit("initial", run.initial);
    emit("optimized", run.result.final);
  }
  return out;
}

std::string CircleSvg(const RunRecord& run) {
  constexpr double kPanel = 320.0;
  constexpr double kRadius = 120.0;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"340\" "
      "viewBox=\"0 0 640 340\">\n"
      "<rect width=\"640\" height=\"340\" fill=\"white\"/>\n";
  auto panel = [&](double offset, const Configuration& cfg,
                   const std::string& title) {
    const double cx = offset + kPanel / 2.0;
    const double cy = 180.0;
    svg += "<text x=\"" + Fmt("%.1f", cx) +
           "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
           "text-anchor=\"middle\">" +
           title + "</text>\n";
    svg += "<circle cx=\"" + Fmt("%.1f", cx) + "\" cy=\"" + Fmt("%.1f", cy) +
           "\" r=\"" + Fmt("%.1f", kRadius) +
           "\" fill=\"none\" stroke=\"blue\" stroke-width=\"2\"/>\n";
    for (int i = 0; i < cfg.r(); ++i) {
      const auto& p = cfg.points[i];
      if (p.size() < 2) continue;
      svg += "<circle cx=\"" + Fmt("%.3f", cx + kRadius * p[0]) + "\" cy=\"" +
             Fmt("%.3f", cy - kRadius * p[1]) +
             "\" r=\"5\" fill=\"red\"><title>" + std::to_string(i) +
             "</title></circle>\n";
    }
  };
  const std::string suffix =
      " (r=" + std::to_string(run.r) + ", seed=" + std::to_string(run.seed) + ")";
  panel(0.0, run.initial, "random start" + suffix);
  panel(kPanel, run.result.final, "optimized" + suffix);
  svg += "</svg>\n";
  return svg;
}

}  // namespace geneo
