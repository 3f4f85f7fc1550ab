// Command line front end: solve single instances, run benchmark grids,
// compare option variants, search for Lambda_min, and emit performance
// profiles. Configuration comes from a flat key = value file plus flags
// (flags win). Dataset paths that do not resolve directly are also tried
// under $OGLASSO_DATA_DIR.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oglasso/experiment.hpp"
#include "oglasso/lambda_min.hpp"

using namespace oglasso;
namespace fs = std::filesystem;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

constexpr const char* kConfigKeys[] = {
    "name",       "dataset",     "scale",          "synthetic_n",
    "synthetic_N", "synthetic_density", "seed",    "ratio",
    "grpsize",    "lambda",      "lambda_frac",    "option",
    "subsolver",  "gamma1",      "gamma2",         "C",
    "xi",         "eta",         "zeta",           "alpha0",
    "iota",       "alpha_mode",  "eps_tol",        "max_iters",
    "max_time_s", "inner_max_iters", "eps_schedule", "psi",
    "omega",      "mu_f",        "timing_repeats", "out_dir"};

void add_config_flags(CLI::App* cmd, Overrides& overrides) {
  for (const char* key : kConfigKeys) {
    std::string flag = "--" + std::string(key);
    for (auto& c : flag)
      if (c == '_') c = '-';
    cmd->add_option_function<std::string>(
        flag,
        [key, &overrides](const std::string& value) {
          overrides.emplace_back(key, value);
        },
        "config key " + std::string(key));
  }
}

ExperimentConfig build_config(const std::string& config_file,
                              const Overrides& overrides) {
  ExperimentConfig cfg;
  if (!config_file.empty())
    for (const auto& [k, v] : parse_flat_config(config_file))
      apply_config_entry(cfg, k, v);
  for (const auto& [k, v] : overrides) apply_config_entry(cfg, k, v);

  if (!cfg.dataset_path.empty() && !fs::exists(cfg.dataset_path)) {
    if (const char* dir = std::getenv("OGLASSO_DATA_DIR")) {
      const fs::path candidate = fs::path(dir) / cfg.dataset_path;
      if (fs::exists(candidate)) cfg.dataset_path = candidate.string();
    }
  }
  return cfg;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_solve(const std::string& config_file, const Overrides& overrides) {
  ExperimentConfig cfg = build_config(config_file, overrides);
  const RunOutputs out = run_single(cfg);
  std::cout << "instance: " << out.instance << "\n"
            << "status: " << to_string(out.record.status) << "\n"
            << "F_final: " << out.record.F_final << "\n"
            << "lambda: " << out.lambda_used << "\n"
            << "groups_zero: " << out.groups_zero << "\n"
            << "groups_nonzero: " << out.groups_nonzero << "\n"
            << "iters: " << out.record.iters << "\n"
            << "time_s: " << out.record.time_s << "\n";
  if (!out.summary_path.empty())
    std::cout << "summary: " << out.summary_path << "\n";
  return out.record.status == RunStatus::solved ? 0 : 2;
}

int run_grid_cmd(const std::string& config_file, const Overrides& overrides,
                 const std::string& datasets_csv, const std::string& ratios_csv,
                 const std::string& grpsizes_csv, const std::string& fracs_csv,
                 const std::string& options_csv, int workers, int repeats,
                 const std::string& out_dir) {
  GridConfig grid;
  grid.base = build_config(config_file, overrides);
  grid.scale = grid.base.scale;
  grid.out_dir = out_dir.empty() ? grid.base.out_dir : out_dir;
  grid.workers = workers;
  grid.timing_repeats = repeats;

  if (!datasets_csv.empty()) {
    grid.datasets.clear();
    for (auto& d : split_list(datasets_csv)) {
      if (d != "synthetic" && !fs::exists(d)) {
        if (const char* dir = std::getenv("OGLASSO_DATA_DIR")) {
          const fs::path candidate = fs::path(dir) / d;
          if (fs::exists(candidate)) d = candidate.string();
        }
      }
      grid.datasets.push_back(d);
    }
  } else {
    grid.datasets = {grid.base.dataset_path.empty() ? "synthetic"
                                                    : grid.base.dataset_path};
  }
  if (!ratios_csv.empty()) {
    grid.ratios.clear();
    for (const auto& r : split_list(ratios_csv)) grid.ratios.push_back(std::stod(r));
  }
  if (!grpsizes_csv.empty()) {
    grid.grpsizes.clear();
    for (const auto& g : split_list(grpsizes_csv))
      grid.grpsizes.push_back(std::stoi(g));
  }
  if (!fracs_csv.empty()) {
    grid.lambda_fracs.clear();
    for (const auto& f : split_list(fracs_csv))
      grid.lambda_fracs.push_back(std::stod(f));
  }
  if (!options_csv.empty()) {
    grid.options.clear();
    for (const auto& o : split_list(options_csv)) {
      if (o == "option1" || o == "1") grid.options.push_back(OptionKind::option1);
      else if (o == "option2" || o == "2") grid.options.push_back(OptionKind::option2);
      else if (o == "option3" || o == "3") grid.options.push_back(OptionKind::option3);
      else throw std::invalid_argument("unknown option '" + o + "'");
    }
  }

  const GridResult res = run_grid(grid);
  std::cout << res.status_table_text();
  if (!grid.out_dir.empty()) {
    std::ofstream csv(fs::path(grid.out_dir) / "status_table.csv");
    csv << res.status_table_csv();
    std::cout << "records written to " << grid.out_dir << "\n";
  }
  int unsolved = 0;
  for (const auto& r : res.runs) unsolved += r.status != RunStatus::solved;
  return unsolved == 0 ? 0 : 2;
}

int run_compare(const std::string& dir_a, const std::string& dir_b,
                const std::string& name_a, const std::string& name_b,
                const std::string& out_dir) {
  const auto runs_a = load_summaries(dir_a);
  const auto runs_b = load_summaries(dir_b);
  const ComparisonReport rep = compare_runs(runs_a, runs_b);
  std::cout << rep.text(name_a, name_b);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "profile.csv");
    write_profile_csv(csv, rep.profile);
    std::ofstream js(fs::path(out_dir) / "comparison.json");
    js << comparison_json(rep, name_a, name_b);
    std::cout << "profile and summary written to " << out_dir << "\n";
  }
  return 0;
}

int run_lambda_min(const std::string& config_file, const Overrides& overrides) {
  ExperimentConfig cfg = build_config(config_file, overrides);
  cfg.validate();

  auto data = std::make_shared<Dataset>(
      cfg.dataset_path.empty()
          ? synthetic_logistic_dataset(cfg.synthetic_n, cfg.synthetic_N,
                                       cfg.synthetic_density, cfg.seed)
          : make_dataset(load_libsvm(cfg.dataset_path), cfg.scale));
  const LogisticLoss loss(data);
  const auto skeleton = GroupStructure::chain(loss.dim(), cfg.ratio, cfg.grpsize);

  LambdaMinOptions opts;
  opts.solver = cfg.solver;
  const LambdaMinResult res = find_lambda_min(loss, skeleton, opts);
  std::cout << "lambda_min: " << res.lambda_min << "\n"
            << "bracket: [" << res.bracket_lo << ", " << res.bracket_hi << "]\n"
            << "solves: " << res.solves << "\n"
            << "converged: " << (res.converged ? "yes" : "no") << "\n";
  return res.converged ? 0 : 2;
}

int run_profile(const std::string& dir_a, const std::string& dir_b,
                const std::string& out_file) {
  const auto runs_a = load_summaries(dir_a);
  const auto runs_b = load_summaries(dir_b);
  const ComparisonReport rep = compare_runs(runs_a, runs_b);
  if (out_file.empty()) {
    write_profile_csv(std::cout, rep.profile);
  } else {
    std::ofstream out(out_file);
    write_profile_csv(out, rep.profile);
  }
  std::cerr << "areas: " << rep.profile.area_i << " vs " << rep.profile.area_j
            << " over " << rep.instances_compared << " instances\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overlapping group-lasso proximal-gradient solver"};
  app.require_subcommand(1);

  std::string config_file;
  Overrides overrides;

  auto* solve_cmd = app.add_subcommand("solve", "solve one problem instance");
  solve_cmd->add_option("--config", config_file, "flat key = value config file");
  add_config_flags(solve_cmd, overrides);

  auto* grid_cmd =
      app.add_subcommand("grid", "run a cartesian grid of instances");
  std::string datasets_csv, ratios_csv, grpsizes_csv, fracs_csv, options_csv;
  std::string grid_out;
  int workers = 0;
  int repeats = 3;
  grid_cmd->add_option("--config", config_file, "flat key = value config file");
  grid_cmd->add_option("--datasets", datasets_csv,
                       "comma list of dataset paths or 'synthetic'");
  grid_cmd->add_option("--ratios", ratios_csv, "comma list of overlap ratios");
  grid_cmd->add_option("--grpsizes", grpsizes_csv, "comma list of group sizes");
  grid_cmd->add_option("--lambda-fracs", fracs_csv,
                       "comma list of fractions of lambda_min");
  grid_cmd->add_option("--options", options_csv,
                       "comma list of termination options");
  grid_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
  grid_cmd->add_option("--repeats", repeats,
                       "timing repeats per instance (averaged)");
  grid_cmd->add_option("--out", grid_out, "output directory for records");
  add_config_flags(grid_cmd, overrides);

  auto* compare_cmd = app.add_subcommand(
      "compare", "compare two record directories (sparsity, objective, time)");
  std::string dir_a, dir_b, name_a = "A", name_b = "B", compare_out;
  compare_cmd->add_option("--a", dir_a, "first record directory")->required();
  compare_cmd->add_option("--b", dir_b, "second record directory")->required();
  compare_cmd->add_option("--name-a", name_a, "label for the first solver");
  compare_cmd->add_option("--name-b", name_b, "label for the second solver");
  compare_cmd->add_option("--out", compare_out,
                          "directory for profile.csv and comparison.json");

  auto* lm_cmd = app.add_subcommand(
      "lambda-min", "search for the smallest Lambda giving the zero solution");
  lm_cmd->add_option("--config", config_file, "flat key = value config file");
  add_config_flags(lm_cmd, overrides);

  auto* profile_cmd = app.add_subcommand(
      "profile", "emit performance-profile bars for two record directories");
  std::string profile_out;
  profile_cmd->add_option("--a", dir_a, "first record directory")->required();
  profile_cmd->add_option("--b", dir_b, "second record directory")->required();
  profile_cmd->add_option("--out", profile_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(config_file, overrides);
    if (grid_cmd->parsed())
      return run_grid_cmd(config_file, overrides, datasets_csv, ratios_csv,
                          grpsizes_csv, fracs_csv, options_csv, workers,
                          repeats, grid_out);
    if (compare_cmd->parsed())
      return run_compare(dir_a, dir_b, name_a, name_b, compare_out);
    if (lm_cmd->parsed()) return run_lambda_min(config_file, overrides);
    if (profile_cmd->parsed()) return run_profile(dir_a, dir_b, profile_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
