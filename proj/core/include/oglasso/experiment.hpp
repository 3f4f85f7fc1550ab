#pragma once

#include <map>
#include <string>
#include <vector>

#include "oglasso/data_io.hpp"
#include "oglasso/lambda_min.hpp"
#include "oglasso/metrics.hpp"
#include "oglasso/outer.hpp"

namespace oglasso {

/// One solve: data source, grouping, weights, solver options, output paths.
struct ExperimentConfig {
  std::string name;          // instance id; derived from the fields if empty
  std::string dataset_path;  // empty selects the synthetic generator
  ScaleMode scale = ScaleMode::none;

  int synthetic_n = 100;
  int synthetic_N = 400;
  double synthetic_density = 0.1;
  unsigned seed = 1;

  double ratio = 0.1;
  int grpsize = 10;
  double lambda = 0.0;       // absolute Lambda; takes precedence when > 0
  double lambda_frac = 0.1;  // otherwise Lambda = lambda_frac * Lambda_min

  OuterConfig solver;
  int timing_repeats = 1;  // identical solves whose wall times are averaged

  std::string out_dir;  // empty skips file output

  void validate() const;
  std::string instance_id() const;
};

/// Planted-model binary classification instance: sparse uniform features,
/// labels from a sparse ground-truth weight vector plus label noise.
Dataset synthetic_logistic_dataset(int n, int N, double density, unsigned seed);

/// Flat key = value file; '#' starts a comment. Unknown keys are an error.
std::map<std::string, std::string> parse_flat_config(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

struct RunOutputs {
  RunRecord record;
  double lambda_used = 0.0;
  int groups_zero = 0;
  int groups_nonzero = 0;
  std::string instance;
  std::string csv_path;      // written files; empty when out_dir is empty
  std::string summary_path;
  std::string groups_path;
};

/// Load or generate the data, build groups and weights (searching for
/// Lambda_min when lambda_frac is used), run the solver, and write the CSV
/// trace plus JSON summary (write-then-rename).
RunOutputs run_single(const ExperimentConfig& cfg);

struct GridConfig {
  std::vector<std::string> datasets;  // paths, or "synthetic" for the generator
  ScaleMode scale = ScaleMode::none;
  std::vector<double> ratios{0.1, 0.2, 0.3};
  std::vector<int> grpsizes{10, 100};
  std::vector<double> lambda_fracs{0.1, 0.01};
  std::vector<OptionKind> options{OptionKind::option1, OptionKind::option2,
                                  OptionKind::option3};
  ExperimentConfig base;  // solver settings and synthetic parameters
  std::string out_dir;
  int workers = 0;         // 0 = hardware concurrency
  int timing_repeats = 3;  // benchmark protocol: average times over 3 runs
};

struct RunSummary {
  std::string instance;
  std::string option;
  RunStatus status = RunStatus::iter_limit;
  double F_final = 0.0;
  int groups_zero = 0;
  int groups_nonzero = 0;
  int iters = 0;
  double time_s = 0.0;
};

struct GridResult {
  std::vector<RunSummary> runs;  // sorted by (instance, option)
  /// Termination-status counts per option, as an aligned text table.
  std::string status_table_text() const;
  std::string status_table_csv() const;
};

/// Cartesian product of datasets x (ratio, grpsize, lambda_frac) x options,
/// executed on a worker pool; Lambda_min is computed once per
/// (dataset, ratio, grpsize) and shared.
GridResult run_grid(const GridConfig& cfg);

/// Read every *.summary.json under dir.
std::vector<RunSummary> load_summaries(const std::string& dir);

struct ComparisonReport {
  CompareCounts sparsity;
  CompareCounts objective;
  ProfileResult profile;
  int instances_compared = 0;
  std::string text(const std::string& name_i, const std::string& name_j) const;
};

/// Match runs by instance id and compare sparsity, objective (1e-6 rule),
/// and timing profile.
ComparisonReport compare_runs(const std::vector<RunSummary>& runs_i,
                              const std::vector<RunSummary>& runs_j);

void write_profile_csv(std::ostream& os, const ProfileResult& profile);

/// {"comparison": ..., "sparsity": {better, same, worse}, "objective": ...,
/// "profile_area": {...}} with the 1e-6 same-objective rule already applied.
std::string comparison_json(const ComparisonReport& report,
                            const std::string& name_i,
                            const std::string& name_j);

}  // namespace oglasso
