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

#include "geneo/cli.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "geneo/errors.h"
#include "geneo/experiment.h"
#include "geneo/group.h"
#include "geneo/ingest.h"
#include "geneo/metrics.h"
#include "geneo/rng.h"
#include "geneo/verify.h"
#include "json.hpp"

#ifndef GENEO_DEFAULT_FREQUENCIES
#define GENEO_DEFAULT_FREQUENCIES ""
#endif

namespace geneo {
namespace {

namespace fs = std::filesystem;

// Everything the subcommands accept. Unused fields are ignored.
struct RunOptions {
  ExperimentConfig config;
  bool synthetic = false;
  std::uint64_t synth_seed = 7;
  std::string images;
  std::string labels;
  std::string data_dir;
  std::string frequencies;
  bool uniform = false;
  std::string policy = "first";
  int label_base = 1;
  bool fallback_synthetic = false;
  std::string manifest;
  std::string out;
  std::string boundary = "midpoint";
  std::vector<double> eps;
  std::string over = "sites";
  int samples = 500;
  bool group_full = false;
  int group_sample = 32;
  double inject_scale = 1.0;
  std::uint64_t seed = 1;
};

LetterPolicy ParsePolicy(const std::string& text) {
  LetterPolicy policy;
  if (text == "first") return policy;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "seeded" && !rest.empty()) {
    policy.kind = LetterPolicy::Kind::kSeeded;
    policy.seed = std::stoull(rest);
    return policy;
  }
  if (kind == "indices" && !rest.empty()) {
    policy.kind = LetterPolicy::Kind::kIndices;
    std::stringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) policy.indices.push_back(std::stoull(item));
    if (policy.indices.size() != 26) {
      throw std::invalid_argument("--policy indices needs 26 entries, got " +
                                  std::to_string(policy.indices.size()));
    }
    return policy;
  }
  throw std::invalid_argument("--policy must be first, seeded:<seed> or indices:<i,...>, got '" +
                              text + "'");
}

LoadedDataset ResolveDataset(const RunOptions& opts, int n, std::ostream& err) {
  if (!opts.manifest.empty()) {
    WeightedSignalSpace space = LoadManifest(opts.manifest);
    if (space.grid().n() != n) {
      throw std::invalid_argument("manifest grid is " + std::to_string(space.grid().n()) +
                                  "x" + std::to_string(space.grid().n()) + ", --n is " +
                                  std::to_string(n));
    }
    return {std::move(space), {{"source", "manifest"}, {"manifest", opts.manifest}}, {}};
  }
  DatasetSpec spec;
  spec.synth_seed = opts.synth_seed;
  spec.label_base = opts.label_base;
  spec.policy = ParsePolicy(opts.policy);
  spec.fallback_to_synthetic = opts.fallback_synthetic;
  std::vector<std::string> notices;
  if (!opts.images.empty() || !opts.labels.empty()) {
    if (opts.images.empty() || opts.labels.empty()) {
      throw std::invalid_argument("--images and --labels must be given together");
    }
    spec.synthetic = false;
    spec.images_path = opts.images;
    spec.labels_path = opts.labels;
  } else if (!opts.synthetic && !opts.data_dir.empty()) {
    const std::optional<DatasetSpec> found = FindEmnist(opts.data_dir);
    if (found) {
      spec.synthetic = false;
      spec.images_path = found->images_path;
      spec.labels_path = found->labels_path;
    } else if (opts.fallback_synthetic) {
      notices.push_back("no EMNIST letters files under " + opts.data_dir +
                        "; using synthetic glyphs");
    } else {
      throw IoError("no EMNIST letters training files under " + opts.data_dir);
    }
  } else if (!opts.synthetic) {
    notices.push_back("no dataset given; using synthetic glyphs");
  }
  if (!opts.frequencies.empty()) {
    spec.frequency_path = opts.frequencies;
  } else if (!spec.synthetic && !opts.uniform) {
    spec.frequency_path = GENEO_DEFAULT_FREQUENCIES;
  }
  if (opts.uniform) spec.frequency_path.clear();

  // Glyph strokes need room; tiny grids get random signals.
  LoadedDataset dataset =
      spec.synthetic && n < 8
          ? LoadedDataset{DefaultVerifySpace(n, opts.synth_seed),
                          {{"source", "random"},
                           {"synth_seed", opts.synth_seed},
                           {"weights", "uniform"}},
                          {}}
          : LoadDataset(spec, n);
  dataset.notices.insert(dataset.notices.begin(), notices.begin(), notices.end());
  for (const std::string& notice : dataset.notices) err << "notice: " << notice << "\n";
  return dataset;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

int CmdSelect(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = opts.config;
  config.boundary = ParseBoundaryRule(opts.boundary);
  Validate(config);
  const LoadedDataset dataset = ResolveDataset(opts, config.n, err);
  const ExperimentReport report = RunExperiment(dataset, config);
  for (const RSummary& s : report.summaries) {
    out << "r=" << s.r << " grand_mean_eta=" << s.grand_mean_eta
        << " max_seed_mean_eta=" << s.max_seed_mean_eta
        << " mean_median_eta=" << s.mean_median_eta
        << " mean_ratio_of_means=" << s.mean_ratio_of_means << "\n";
  }
  if (!opts.out.empty()) {
    EnsureDir(opts.out);
    WriteFileAtomic(JoinPath(opts.out, "report.json"), ToJson(report).dump(2) + "\n");
    WriteFileAtomic(JoinPath(opts.out, "summary.csv"), SummaryCsv(report));
    if (config.m == 2) {
      WriteFileAtomic(JoinPath(opts.out, "angles.csv"), AnglesCsv(report));
      for (const RunRecord& run : report.runs) {
        WriteFileAtomic(JoinPath(opts.out, "circle_r" + std::to_string(run.r) + "_seed" +
                                               std::to_string(run.seed) + ".svg"),
                        CircleSvg(run));
      }
    }
    out << "wrote " << opts.out << "\n";
  }
  return kExitOk;
}

int CmdVerify(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  VerifyOptions v;
  v.n = opts.config.n;
  v.m = static_cast<int>(opts.config.k.size());
  v.k = opts.config.k;
  v.h = opts.config.h;
  v.boundary = ParseBoundaryRule(opts.boundary);
  v.seed = opts.seed;
  v.inject_scale = opts.inject_scale;
  v.group_full = opts.group_full;
  if (v.k.size() != v.h.size() || v.k.empty()) {
    throw std::invalid_argument("--k and --h must have the same nonzero length");
  }
  if (v.group_full && 8LL * v.n * v.n > 2000) {
    throw std::invalid_argument("--group-full is limited to n <= 15");
  }
  const LoadedDataset dataset = ResolveDataset(opts, v.n, err);
  const std::vector<PropertyResult> results = RunVerification(dataset.space, v);
  nlohmann::json report = {{"version", kVersionTag},
                           {"n", v.n},
                           {"k", v.k},
                           {"h", v.h},
                           {"boundary", ToString(v.boundary)},
                           {"seed", v.seed},
                           {"inject_scale", v.inject_scale},
                           {"group_full", v.group_full},
                           {"dataset", dataset.description},
                           {"properties", nlohmann::json::array()}};
  for (const PropertyResult& r : results) {
    const char* status = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
    char worst[32];
    std::snprintf(worst, sizeof(worst), "%.3e", r.worst);
    out << status << " " << r.name << " worst=" << worst;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    report["properties"].push_back({{"name", r.name},
                                    {"passed", r.passed},
                                    {"informational", r.informational},
                                    {"worst", r.worst},
                                    {"detail", r.detail}});
  }
  const bool ok = AllPassed(results);
  report["passed"] = ok;
  if (!opts.out.empty()) {
    EnsureDir(opts.out);
    WriteFileAtomic(JoinPath(opts.out, "verify.json"), report.dump(2) + "\n");
  }
  return ok ? kExitOk : kExitVerificationFailed;
}

// Distance table over the requested objects: sites, group elements or a
// sample of the operator family.
PseudoMetricTable BuildOverTable(const RunOptions& opts, const WeightedSignalSpace& space,
                                 bool use_dmax) {
  const TorusGrid& grid = space.grid();
  if (opts.over == "sites") return use_dmax ? DMaxXTable(space) : DeltaXTable(space);
  if (opts.over == "group") {
    std::vector<GridIsometry> elements;
    if (opts.group_full) {
      elements = EnumerateGroup(grid, 4096);
    } else {
      Rng rng(opts.seed);
      elements.push_back(GridIsometry::Identity(grid));
      while (static_cast<int>(elements.size()) < opts.group_sample) {
        elements.push_back(GridIsometry::FromDescriptor(
            grid, {static_cast<int>(rng.Below(grid.n())),
                   static_cast<int>(rng.Below(grid.n())), rng.Below(2) == 1,
                   rng.Below(2) == 1, rng.Below(2) == 1}));
      }
    }
    return use_dmax ? DMaxGTable(space, elements) : DeltaGTable(space, elements);
  }
  if (opts.over == "family") {
    const ShiftGenerators generators(grid, opts.config.k, opts.config.h,
                                     ParseBoundaryRule(opts.boundary));
    const GramMatrix q = ComputeGramMatrix(generators, space);
    Rng rng(opts.seed);
    std::vector<Eigen::VectorXd> u;
    std::vector<std::string> labels;
    for (int s = 0; s < opts.samples; ++s) {
      u.push_back(SampleSphere(generators.m(), rng));
      labels.push_back("u" + std::to_string(s));
    }
    return BuildTable(labels, [&](std::size_t a, std::size_t b) {
      return std::sqrt(std::max(0.0, q.Distance2(u[a], u[b])));
    });
  }
  throw std::invalid_argument("--over must be sites, group or family, got '" + opts.over +
                              "'");
}

int CmdMetrics(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const LoadedDataset dataset = ResolveDataset(opts, opts.config.n, err);
  const bool sites = opts.over == "sites";
  if (!sites && opts.over != "group") {
    throw std::invalid_argument("metrics --over must be sites or group");
  }
  const PseudoMetricTable delta = BuildOverTable(opts, dataset.space, false);
  const PseudoMetricTable dmax = BuildOverTable(opts, dataset.space, true);
  const double beta = sites ? 1.0 : GetEquivalenceConstants(dataset.space.grid()).beta;
  double worst = -1e300;
  for (std::size_t i = 0; i < delta.data().size(); ++i) {
    worst = std::max(worst, delta.data()[i] - beta * dmax.data()[i]);
  }
  const std::string prefix = sites ? "x" : "g";
  const PseudoMetricReport r1 = CheckPseudometric(delta);
  const PseudoMetricReport r2 = CheckPseudometric(dmax);
  out << "delta_" << prefix << ": " << delta.size() << " points, diameter "
      << delta.Diameter() << ", axioms " << (r1.ok ? "ok" : "VIOLATED") << "\n";
  out << "dmax_" << prefix << ": " << dmax.size() << " points, diameter " << dmax.Diameter()
      << ", axioms " << (r2.ok ? "ok" : "VIOLATED") << "\n";
  out << "max(delta - " << (sites ? "" : "n*") << "dmax) = " << worst << "\n";
  if (!opts.out.empty()) {
    EnsureDir(opts.out);
    WriteFileAtomic(JoinPath(opts.out, "delta_" + prefix + ".csv"), TableToCsv(delta));
    WriteFileAtomic(JoinPath(opts.out, "dmax_" + prefix + ".csv"), TableToCsv(dmax));
    WriteFileAtomic(JoinPath(opts.out, "delta_" + prefix + ".json"),
                    TableToJson(delta).dump() + "\n");
    WriteFileAtomic(JoinPath(opts.out, "dmax_" + prefix + ".json"),
                    TableToJson(dmax).dump() + "\n");
  } else {
    out << TableToCsv(delta);
  }
  return r1.ok && r2.ok && worst <= 0.0 ? kExitOk : kExitVerificationFailed;
}

int CmdNet(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.eps.empty()) throw std::invalid_argument("net needs --eps");
  const LoadedDataset dataset = ResolveDataset(opts, opts.config.n, err);
  const PseudoMetricTable table = BuildOverTable(opts, dataset.space, false);
  nlohmann::json report = {{"version", kVersionTag},
                           {"over", opts.over},
                           {"points", table.size()},
                           {"diameter", table.Diameter()},
                           {"nets", nlohmann::json::array()}};
  for (double eps : opts.eps) {
    const EpsilonNet net = GreedyEpsilonNet(table, eps);
    out << "eps=" << eps << " size=" << net.labels.size()
        << " cover_radius=" << net.cover_radius << "\n";
    for (const std::string& label : net.labels) out << "  " << label << "\n";
    report["nets"].push_back(
        {{"eps", eps}, {"labels", net.labels}, {"cover_radius", net.cover_radius}});
  }
  if (!opts.out.empty()) {
    EnsureDir(opts.out);
    WriteFileAtomic(JoinPath(opts.out, "net.json"), report.dump(2) + "\n");
  }
  return kExitOk;
}

int CmdIngestCheck(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::string images = opts.images;
  std::string labels = opts.labels;
  if (images.empty() && labels.empty()) {
    if (opts.data_dir.empty()) {
      throw std::invalid_argument("ingest-check needs --images/--labels or --data-dir");
    }
    const std::optional<DatasetSpec> found = FindEmnist(opts.data_dir);
    if (!found) throw IoError("no EMNIST letters training files under " + opts.data_dir);
    images = found->images_path;
    labels = found->labels_path;
  }
  if (!images.empty()) {
    const IdxImageSet set = ParseIdx(ReadFileBytes(images));
    out << "images: " << set.count << " x " << set.rows << "x" << set.cols << "\n";
    if (!labels.empty()) {
      const IdxLabelSet label_set = ParseIdxLabels(ReadFileBytes(labels));
      out << "labels: " << label_set.labels.size() << "\n";
      LetterOptions options;
      options.n = static_cast<int>(set.rows);
      options.label_base = opts.label_base;
      const std::vector<Signal> letters =
          LoadLetters(set, label_set, ParsePolicy(opts.policy), options);
      out << "letters: " << letters.size() << " (" << opts.policy << ")\n";
    }
  } else if (!labels.empty()) {
    out << "labels: " << ParseIdxLabels(ReadFileBytes(labels)).labels.size() << "\n";
  }
  if (!opts.frequencies.empty()) {
    const FrequencyTable table = LoadFrequencies(opts.frequencies);
    out << "frequencies: " << table.entries.size() << " letters, input sum "
        << table.input_sum << "\n";
    if (!table.notice.empty()) err << "notice: " << table.notice << "\n";
  }
  return kExitOk;
}

}  // namespace

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + tmp + " for writing");
    file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    file.flush();
    if (!file) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GENEO selection and verification tool", "geneo"};
  // -h is taken by the column shifts.
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersionTag));
  RunOptions opts;
  if (const char* env = std::getenv("GENEO_DATA_DIR")) opts.data_dir = env;

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--n", opts.config.n, "grid side length")->check(CLI::Range(2, 4096));
    sub->add_option("--k", opts.config.k, "row shift per generator")->delimiter(',');
    sub->add_option("--h", opts.config.h, "column shift per generator")->delimiter(',');
    sub->add_option("--boundary", opts.boundary, "midpoint or half-open")
        ->check(CLI::IsMember({"midpoint", "half-open"}));
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_flag("--synthetic", opts.synthetic, "use synthetic glyphs");
    sub->add_option("--synth-seed", opts.synth_seed, "seed for synthetic signals");
    sub->add_option("--images", opts.images, "IDX image file");
    sub->add_option("--labels", opts.labels, "IDX label file");
    sub->add_option("--data-dir", opts.data_dir,
                    "directory holding EMNIST letters files (default $GENEO_DATA_DIR)");
    sub->add_option("--frequencies", opts.frequencies, "letter frequency file");
    sub->add_flag("--uniform", opts.uniform, "uniform letter weights");
    sub->add_option("--policy", opts.policy, "first | seeded:<seed> | indices:<i,...>");
    sub->add_option("--label-base", opts.label_base, "label value of 'a'");
    sub->add_flag("--fallback-synthetic", opts.fallback_synthetic,
                  "use synthetic glyphs if the dataset is missing");
    sub->add_option("--manifest", opts.manifest, "JSON manifest of signals and weights");
    sub->add_option("--out", opts.out, "output directory");
  };

  CLI::App* select = app.add_subcommand("select", "run the selection experiment");
  add_grid(select);
  add_data(select);
  select->add_option("--m", opts.config.m, "number of generators")->check(CLI::Range(1, 64));
  select->add_option("--r", opts.config.r_values, "selection sizes")->delimiter(',');
  select->add_option("--seeds", opts.config.seeds, "run seeds")->delimiter(',');
  select->add_option("--tol", opts.config.tol, "Riemannian gradient tolerance");
  select->add_option("--max-evals", opts.config.max_evals, "energy evaluation cap");
  select->add_option("--eval-count", opts.config.eval_count, "evaluation operators per run");

  CLI::App* verify = app.add_subcommand("verify", "check GENEO and metric properties");
  add_grid(verify);
  add_data(verify);
  verify->add_option("--seed", opts.seed, "sampling seed");
  verify->add_flag("--group-full", opts.group_full, "exhaustive group checks (small n)");
  verify->add_option("--inject-scale", opts.inject_scale,
                     "scale tested operators (fault injection)");

  CLI::App* metrics = app.add_subcommand("metrics", "emit pseudo-metric tables");
  add_grid(metrics);
  add_data(metrics);
  metrics->add_option("--over", opts.over, "sites or group")
      ->check(CLI::IsMember({"sites", "group"}));
  metrics->add_flag("--group-full", opts.group_full, "use the whole group");
  metrics->add_option("--group-sample", opts.group_sample, "sampled group elements")
      ->check(CLI::Range(1, 100000));
  metrics->add_option("--seed", opts.seed, "sampling seed");

  CLI::App* net = app.add_subcommand("net", "greedy epsilon-net");
  add_grid(net);
  add_data(net);
  net->add_option("--eps", opts.eps, "cover radii")->delimiter(',')->required();
  net->add_option("--over", opts.over, "sites, group or family")
      ->check(CLI::IsMember({"sites", "group", "family"}));
  net->add_flag("--group-full", opts.group_full, "use the whole group");
  net->add_option("--group-sample", opts.group_sample, "sampled group elements")
      ->check(CLI::Range(1, 100000));
  net->add_option("--samples", opts.samples, "sampled family members")
      ->check(CLI::Range(1, 100000));
  net->add_option("--seed", opts.seed, "sampling seed");

  CLI::App* ingest = app.add_subcommand("ingest-check", "parse and summarize input files");
  ingest->add_option("--images", opts.images, "IDX image file");
  ingest->add_option("--labels", opts.labels, "IDX label file");
  ingest->add_option("--data-dir", opts.data_dir, "directory holding EMNIST letters files");
  ingest->add_option("--frequencies", opts.frequencies, "letter frequency file");
  ingest->add_option("--policy", opts.policy, "first | seeded:<seed> | indices:<i,...>");
  ingest->add_option("--label-base", opts.label_base, "label value of 'a'");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersionTag << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*select) return CmdSelect(opts, out, err);
    if (*verify) return CmdVerify(opts, out, err);
    if (*metrics) return CmdMetrics(opts, out, err);
    if (*net) return CmdNet(opts, out, err);
    if (*ingest) return CmdIngestCheck(opts, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CollisionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerificationFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace geneo
