#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oglasso/experiment.hpp"

using namespace oglasso;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_synthetic() {
  ExperimentConfig cfg;
  cfg.synthetic_n = 30;
  cfg.synthetic_N = 60;
  cfg.synthetic_density = 0.3;
  cfg.seed = 7;
  cfg.ratio = 0.2;
  cfg.grpsize = 5;
  cfg.lambda_frac = 0.1;
  cfg.solver.eps_tol = 1e-4;
  cfg.solver.max_iters = 2000;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("config validation") {
  auto cfg = tiny_synthetic();
  CHECK_NOTHROW(cfg.validate());
  cfg.solver.gamma2 = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_synthetic();
  cfg.ratio = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("flat config files parse and apply") {
  TempDir dir("oglasso_test_cfg");
  const auto path = (dir.path / "exp.cfg").string();
  {
    std::ofstream out(path);
    out << "# sample experiment\n"
        << "dataset = synthetic\n"
        << "ratio = 0.25\n"
        << "grpsize = 4\n"
        << "option = option2\n"
        << "gamma2 = 0.4\n"
        << "eps_schedule = strategy2\n"
        << "omega = 0.6\n";
  }
  ExperimentConfig cfg;
  for (const auto& [k, v] : parse_flat_config(path)) apply_config_entry(cfg, k, v);
  CHECK(cfg.dataset_path.empty());
  CHECK(cfg.ratio == doctest::Approx(0.25));
  CHECK(cfg.grpsize == 4);
  CHECK(cfg.solver.option == OptionKind::option2);
  CHECK(cfg.solver.gamma2 == doctest::Approx(0.4));
  CHECK(cfg.solver.schedule.kind == ScheduleKind::strategy2);
  CHECK(cfg.solver.schedule.omega == doctest::Approx(0.6));

  CHECK_THROWS(apply_config_entry(cfg, "no_such_key", "1"));
}

TEST_CASE("a large lambda fraction solves to zero immediately") {
  auto cfg = tiny_synthetic();
  cfg.lambda_frac = 10.0;
  const auto out = run_single(cfg);
  CHECK(out.record.status == RunStatus::solved);
  CHECK(out.record.iters <= 5);
  CHECK(out.groups_nonzero == 0);
  CHECK(out.record.x_final.isZero());
}

TEST_CASE("run_single writes trace, summary, and group files") {
  TempDir dir("oglasso_test_run");
  auto cfg = tiny_synthetic();
  cfg.out_dir = dir.path.string();
  const auto out = run_single(cfg);

  REQUIRE(fs::exists(out.csv_path));
  REQUIRE(fs::exists(out.summary_path));
  REQUIRE(fs::exists(out.groups_path));
  CHECK_FALSE(fs::exists(out.csv_path + ".tmp"));

  std::ifstream csv(out.csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "k,F,chi_proxy,eps_k,delta_k,alpha_k,backtracks,inner_iters,"
        "support_size,wall_time_s,note");

  const auto summaries = load_summaries(dir.path.string());
  REQUIRE(summaries.size() == 1);
  CHECK(summaries[0].instance == out.instance);
  CHECK(summaries[0].F_final == doctest::Approx(out.record.F_final));
  CHECK(summaries[0].groups_zero == out.groups_zero);
}

TEST_CASE("identical config and seed reproduce the record exactly") {
  auto cfg = tiny_synthetic();
  const auto a = run_single(cfg);
  const auto b = run_single(cfg);
  REQUIRE(a.record.rows.size() == b.record.rows.size());
  CHECK(a.record.F_final == b.record.F_final);  // bitwise
  CHECK((a.record.x_final - b.record.x_final).norm() == 0.0);
  for (size_t i = 0; i < a.record.rows.size(); ++i) {
    CHECK(a.record.rows[i].F == b.record.rows[i].F);
    CHECK(a.record.rows[i].chi_proxy == b.record.rows[i].chi_proxy);
    CHECK(a.record.rows[i].eps_k == b.record.rows[i].eps_k);
    CHECK(a.record.rows[i].inner_iters == b.record.rows[i].inner_iters);
  }

  auto other = cfg;
  other.seed = 8;
  const auto c = run_single(other);
  CHECK(c.record.F_final != a.record.F_final);  // seed changes the instance
}

TEST_CASE("PGA subsolver reaches the same objective but returns dense iterates") {
  auto cfg = tiny_synthetic();
  cfg.lambda = 0.0095;  // below Lambda_min for this instance: sparse, nonzero
  cfg.solver.eps_tol = 1e-6;
  cfg.solver.alpha_mode = AlphaMode::practical;
  cfg.solver.max_iters = 20000;
  const auto enh = run_single(cfg);
  cfg.solver.subsolver = SubsolverKind::pga;
  const auto pga = run_single(cfg);

  REQUIRE(enh.record.status == RunStatus::solved);
  CHECK(std::abs(enh.record.F_final - pga.record.F_final) <= 1e-6);
  CHECK(enh.groups_zero > 0);
  CHECK(enh.groups_nonzero > 0);
  CHECK(pga.groups_zero == 0);
}

TEST_CASE("run_single reads LIBSVM files from disk") {
  TempDir dir("oglasso_test_file");
  const auto data_path = (dir.path / "toy.libsvm").string();
  {
    std::ofstream out(data_path);
    std::mt19937 rng(5);
    for (int i = 0; i < 80; ++i) {
      out << (rng() % 2 ? "+1" : "-1");
      for (int j = 1; j <= 25; ++j)
        if (rng() % 3 == 0)
          out << ' ' << j << ':'
              << std::uniform_real_distribution<double>(-2, 2)(rng);
      out << '\n';
    }
  }
  ExperimentConfig cfg;
  cfg.dataset_path = data_path;
  cfg.scale = ScaleMode::maxabs;
  cfg.ratio = 0.2;
  cfg.grpsize = 5;
  cfg.lambda = 0.02;
  cfg.solver.alpha_mode = AlphaMode::practical;
  cfg.solver.eps_tol = 1e-5;
  const auto out = run_single(cfg);
  CHECK(out.record.status == RunStatus::solved);
  CHECK(out.lambda_used == doctest::Approx(0.02));
  CHECK(out.groups_zero + out.groups_nonzero == 6);  // chain over n=25
}

TEST_CASE("run_grid enumerates the cartesian product") {
  TempDir dir("oglasso_test_grid");
  GridConfig grid;
  grid.datasets = {"synthetic"};
  grid.ratios = {0.2, 0.4};
  grid.grpsizes = {5};
  grid.lambda_fracs = {0.5};
  grid.options = {OptionKind::option1, OptionKind::option2, OptionKind::option3};
  grid.base = tiny_synthetic();
  grid.out_dir = dir.path.string();
  grid.workers = 2;

  const auto res = run_grid(grid);
  CHECK(res.runs.size() == 2 * 1 * 1 * 3);

  // the adaptive options must certify; the absolute option may run out of
  // its desk-scale iteration budget
  for (const auto& r : res.runs)
    if (r.option != "option3") CHECK(r.status == RunStatus::solved);

  const auto table = res.status_table_text();
  CHECK(table.find("option1") != std::string::npos);
  CHECK(table.find("option3") != std::string::npos);

  // row sums over the status table equal the instance count
  int sum = 0;
  std::istringstream csv(res.status_table_csv());
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    while (std::getline(row, cell, ',')) sum += std::stoi(cell);
  }
  CHECK(sum == static_cast<int>(res.runs.size()));
}

TEST_CASE("grid results do not depend on the worker count") {
  GridConfig grid;
  grid.datasets = {"synthetic"};
  grid.ratios = {0.2, 0.4};
  grid.grpsizes = {5};
  grid.lambda_fracs = {0.3, 0.6};
  grid.options = {OptionKind::option1, OptionKind::option2};
  grid.base = tiny_synthetic();
  grid.timing_repeats = 1;

  grid.workers = 1;
  const auto serial = run_grid(grid);
  grid.workers = 3;
  const auto parallel = run_grid(grid);
  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].instance == parallel.runs[i].instance);
    CHECK(serial.runs[i].F_final == parallel.runs[i].F_final);  // bitwise
    CHECK(serial.runs[i].groups_zero == parallel.runs[i].groups_zero);
    CHECK(serial.runs[i].iters == parallel.runs[i].iters);
  }
}

TEST_CASE("grid counts iteration-limited runs") {
  GridConfig grid;
  grid.datasets = {"synthetic"};
  grid.ratios = {0.2};
  grid.grpsizes = {5};
  grid.lambda_fracs = {0.01};
  grid.options = {OptionKind::option1};
  grid.base = tiny_synthetic();
  grid.base.solver.max_iters = 2;  // deliberately starved
  grid.base.solver.eps_tol = 1e-12;
  grid.workers = 1;

  const auto res = run_grid(grid);
  REQUIRE(res.runs.size() == 1);
  CHECK(res.runs[0].status == RunStatus::iter_limit);
  CHECK(res.status_table_csv().find("option1,0,1,0,0") != std::string::npos);
}

TEST_CASE("a full-size instance solves comfortably within the time budget") {
  // same shape as the largest bundled-benchmark configuration:
  // 32561 points, 123 features, chain groups of 10 with overlap 1
  ExperimentConfig cfg;
  cfg.synthetic_n = 123;
  cfg.synthetic_N = 32561;
  cfg.synthetic_density = 0.11;
  cfg.seed = 42;
  cfg.ratio = 0.1;
  cfg.grpsize = 10;
  cfg.lambda = 0.013;
  cfg.solver.alpha_mode = AlphaMode::practical;
  cfg.solver.eps_tol = 1e-5;
  cfg.solver.max_time_s = 60.0;

  const auto out = run_single(cfg);
  CHECK(out.record.status == RunStatus::solved);
  CHECK(out.groups_zero + out.groups_nonzero == 14);
  CHECK(out.record.time_s < 60.0);
}

TEST_CASE("comparison report and profile output") {
  auto mk = [](const std::string& inst, const std::string& opt, double F,
               int zeros, double t, RunStatus st) {
    RunSummary s;
    s.instance = inst + "_" + opt;
    s.option = opt;
    s.F_final = F;
    s.groups_zero = zeros;
    s.groups_nonzero = 10 - zeros;
    s.time_s = t;
    s.status = st;
    return s;
  };

  std::vector<RunSummary> a{
      mk("p1", "option1", 0.50, 5, 1.0, RunStatus::solved),
      mk("p2", "option1", 0.40, 4, 2.0, RunStatus::solved),
      mk("p3", "option1", 0.30, 3, 1.0, RunStatus::solved)};
  std::vector<RunSummary> b{
      mk("p1", "option3", 0.50, 5, 2.0, RunStatus::solved),
      mk("p2", "option3", 0.40 - 5e-6, 4, 2.0, RunStatus::solved),
      mk("p3", "option3", 0.30, 2, 4.0, RunStatus::solved)};

  const auto rep = compare_runs(a, b);
  CHECK(rep.instances_compared == 3);
  CHECK(rep.sparsity.better == 1);
  CHECK(rep.sparsity.same == 2);
  CHECK(rep.objective.worse == 1);
  CHECK(rep.objective.same == 2);
  CHECK(rep.profile.area_i == doctest::Approx(3.0));  // log2 ratios 1, 0, 2

  std::ostringstream csv;
  write_profile_csv(csv, rep.profile);
  CHECK(csv.str().find("p1,1") != std::string::npos);

  const auto identical = compare_runs(a, a);
  CHECK(identical.sparsity.same == 3);
  CHECK(identical.objective.same == 3);
}

TEST_SUITE_END();
