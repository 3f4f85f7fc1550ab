#include "oglasso/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

namespace oglasso {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string option_name(OptionKind o) {
  switch (o) {
    case OptionKind::option1: return "option1";
    case OptionKind::option2: return "option2";
    case OptionKind::option3: return "option3";
  }
  return "option1";
}

OptionKind option_from_string(const std::string& s) {
  if (s == "option1" || s == "1") return OptionKind::option1;
  if (s == "option2" || s == "2") return OptionKind::option2;
  if (s == "option3" || s == "3") return OptionKind::option3;
  throw std::invalid_argument("unknown option '" + s + "'");
}

RunStatus status_from_string(const std::string& s) {
  if (s == "solved") return RunStatus::solved;
  if (s == "iter_limit") return RunStatus::iter_limit;
  if (s == "time_limit") return RunStatus::time_limit;
  if (s == "numerical_difficulties") return RunStatus::numerical_difficulties;
  throw std::invalid_argument("unknown status '" + s + "'");
}

std::string dataset_stem(const std::string& path) {
  if (path.empty()) return "synthetic";
  std::string stem = fs::path(path).filename().string();
  if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, ".gz") == 0)
    stem.resize(stem.size() - 3);
  return stem;
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

json config_to_json(const ExperimentConfig& cfg, double lambda_used) {
  json j;
  j["dataset"] = cfg.dataset_path.empty() ? "synthetic" : cfg.dataset_path;
  j["scale"] = to_string(cfg.scale);
  if (cfg.dataset_path.empty()) {
    j["synthetic_n"] = cfg.synthetic_n;
    j["synthetic_N"] = cfg.synthetic_N;
    j["synthetic_density"] = cfg.synthetic_density;
  }
  j["seed"] = cfg.seed;
  j["ratio"] = cfg.ratio;
  j["grpsize"] = cfg.grpsize;
  j["lambda"] = lambda_used;
  j["lambda_frac"] = cfg.lambda > 0.0 ? 0.0 : cfg.lambda_frac;
  j["option"] = option_name(cfg.solver.option);
  j["subsolver"] = cfg.solver.subsolver == SubsolverKind::enhanced ? "enhanced" : "pga";
  j["gamma1"] = cfg.solver.gamma1;
  j["gamma2"] = cfg.solver.gamma2;
  j["C"] = cfg.solver.C;
  j["xi"] = cfg.solver.xi;
  j["eta"] = cfg.solver.eta;
  j["zeta"] = cfg.solver.zeta;
  j["alpha0"] = cfg.solver.alpha0;
  j["iota"] = cfg.solver.iota;
  j["alpha_mode"] =
      cfg.solver.alpha_mode == AlphaMode::faithful ? "faithful" : "practical";
  j["eps_tol"] = cfg.solver.eps_tol;
  j["max_iters"] = cfg.solver.max_iters;
  j["max_time_s"] = cfg.solver.max_time_s;
  j["inner_max_iters"] = cfg.solver.inner.max_iters;
  switch (cfg.solver.schedule.kind) {
    case ScheduleKind::none: j["eps_schedule"] = "none"; break;
    case ScheduleKind::strategy1:
      j["eps_schedule"] = "strategy1";
      j["psi"] = cfg.solver.schedule.psi;
      break;
    case ScheduleKind::strategy2:
      j["eps_schedule"] = "strategy2";
      j["omega"] = cfg.solver.schedule.omega;
      break;
  }
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  solver.validate();
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("config: ratio must lie in (0,1)");
  if (grpsize < 1) throw std::invalid_argument("config: grpsize must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  if (lambda == 0.0 && !(lambda_frac > 0.0))
    throw std::invalid_argument("config: lambda_frac must be positive");
  if (timing_repeats < 1)
    throw std::invalid_argument("config: timing_repeats must be >= 1");
  if (dataset_path.empty()) {
    if (synthetic_n < 2 || synthetic_N < 2)
      throw std::invalid_argument("config: synthetic dimensions too small");
    if (!(synthetic_density > 0.0 && synthetic_density <= 1.0))
      throw std::invalid_argument("config: synthetic_density must lie in (0,1]");
  }
}

std::string ExperimentConfig::instance_id() const {
  if (!name.empty()) return name;
  std::ostringstream id;
  id << dataset_stem(dataset_path) << "_r" << ratio << "_g" << grpsize;
  if (lambda > 0.0)
    id << "_lam" << lambda;
  else
    id << "_f" << lambda_frac;
  id << "_" << option_name(solver.option);
  if (solver.subsolver == SubsolverKind::pga) id << "_pga";
  return id.str();
}

Dataset synthetic_logistic_dataset(int n, int N, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::normal_distribution<double> noise(0.0, 0.1);

  // Planted weights on the first quarter of the coordinates.
  Vec w = Vec::Zero(n);
  for (int c = 0; c < std::max(1, n / 4); ++c) w[c] = unif(rng);

  std::vector<Eigen::Triplet<double>> trips;
  Vec labels(N);
  for (int i = 0; i < N; ++i) {
    double dot = 0.0;
    bool any = false;
    for (int c = 0; c < n; ++c) {
      if (!keep(rng)) continue;
      const double v = unif(rng);
      trips.emplace_back(i, c, v);
      dot += v * w[c];
      any = true;
    }
    if (!any) {  // keep every row nonempty
      const double v = unif(rng);
      trips.emplace_back(i, i % n, v);
      dot += v * w[i % n];
    }
    labels[i] = dot + noise(rng) >= 0.0 ? 1.0 : -1.0;
  }

  Dataset ds;
  ds.labels = std::move(labels);
  ds.features.resize(N, n);
  ds.features.setFromTriplets(trips.begin(), trips.end());
  ds.features.makeCompressed();
  return ds;
}

std::map<std::string, std::string> parse_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    kv[key] = value;
  }
  return kv;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto as_double = [&] { return std::stod(value); };
  auto as_int = [&] { return std::stoi(value); };
  if (key == "name") cfg.name = value;
  else if (key == "dataset") cfg.dataset_path = value == "synthetic" ? "" : value;
  else if (key == "scale") cfg.scale = scale_mode_from_string(value);
  else if (key == "synthetic_n") cfg.synthetic_n = as_int();
  else if (key == "synthetic_N") cfg.synthetic_N = as_int();
  else if (key == "synthetic_density") cfg.synthetic_density = as_double();
  else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(value));
  else if (key == "ratio") cfg.ratio = as_double();
  else if (key == "grpsize") cfg.grpsize = as_int();
  else if (key == "lambda") cfg.lambda = as_double();
  else if (key == "lambda_frac") cfg.lambda_frac = as_double();
  else if (key == "option") cfg.solver.option = option_from_string(value);
  else if (key == "subsolver")
    cfg.solver.subsolver = value == "pga" ? SubsolverKind::pga : SubsolverKind::enhanced;
  else if (key == "gamma1") cfg.solver.gamma1 = as_double();
  else if (key == "gamma2") cfg.solver.gamma2 = as_double();
  else if (key == "C") cfg.solver.C = as_double();
  else if (key == "xi") cfg.solver.xi = as_double();
  else if (key == "eta") cfg.solver.eta = as_double();
  else if (key == "zeta") cfg.solver.zeta = as_double();
  else if (key == "alpha0") cfg.solver.alpha0 = as_double();
  else if (key == "iota") cfg.solver.iota = as_double();
  else if (key == "alpha_mode")
    cfg.solver.alpha_mode = value == "practical" ? AlphaMode::practical : AlphaMode::faithful;
  else if (key == "eps_tol") cfg.solver.eps_tol = as_double();
  else if (key == "max_iters") cfg.solver.max_iters = as_int();
  else if (key == "max_time_s") cfg.solver.max_time_s = as_double();
  else if (key == "inner_max_iters") cfg.solver.inner.max_iters = as_int();
  else if (key == "eps_schedule") {
    if (value == "none") cfg.solver.schedule.kind = ScheduleKind::none;
    else if (value == "strategy1") cfg.solver.schedule.kind = ScheduleKind::strategy1;
    else if (value == "strategy2") cfg.solver.schedule.kind = ScheduleKind::strategy2;
    else throw std::invalid_argument("unknown eps_schedule '" + value + "'");
  }
  else if (key == "psi") cfg.solver.schedule.psi = as_double();
  else if (key == "omega") cfg.solver.schedule.omega = as_double();
  else if (key == "mu_f") cfg.solver.mu_f = as_double();
  else if (key == "timing_repeats") cfg.timing_repeats = as_int();
  else if (key == "out_dir") cfg.out_dir = value;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

RunOutputs run_single(const ExperimentConfig& cfg) {
  cfg.validate();

  auto data = std::make_shared<Dataset>(
      cfg.dataset_path.empty()
          ? synthetic_logistic_dataset(cfg.synthetic_n, cfg.synthetic_N,
                                       cfg.synthetic_density, cfg.seed)
          : make_dataset(load_libsvm(cfg.dataset_path), cfg.scale));
  const LogisticLoss loss(data);

  const GroupStructure skeleton =
      GroupStructure::chain(loss.dim(), cfg.ratio, cfg.grpsize);

  double lambda_used = cfg.lambda;
  if (lambda_used <= 0.0) {
    LambdaMinOptions lopts;
    lopts.solver = cfg.solver;
    lopts.solver.eps_tol = std::max(cfg.solver.eps_tol, 1e-6);
    lopts.solver.max_time_s = cfg.solver.max_time_s;
    lambda_used = cfg.lambda_frac * find_lambda_min(loss, skeleton, lopts).lambda_min;
  }

  const GroupStructure gs = skeleton.with_weights(lambda_used);
  SolveResult out = solve(loss, gs, cfg.solver);
  if (cfg.timing_repeats > 1) {
    double total = out.record.time_s;
    for (int r = 1; r < cfg.timing_repeats; ++r)
      total += solve(loss, gs, cfg.solver).record.time_s;
    out.record.time_s = total / cfg.timing_repeats;
  }

  RunOutputs ro;
  ro.lambda_used = lambda_used;
  ro.instance = cfg.instance_id();
  const auto support = support_of(out.x, gs);
  ro.groups_zero = gs.num_groups() - static_cast<int>(support.size());
  ro.groups_nonzero = static_cast<int>(support.size());

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const std::string base = (fs::path(cfg.out_dir) / ro.instance).string();

    std::ostringstream csv;
    out.record.write_csv(csv);
    ro.csv_path = base + ".trace.csv";
    write_file_atomically(ro.csv_path, csv.str());

    json summary;
    summary["instance"] = ro.instance;
    summary["status"] = to_string(out.record.status);
    summary["F_final"] = out.record.F_final;
    summary["groups_zero"] = ro.groups_zero;
    summary["groups_nonzero"] = ro.groups_nonzero;
    summary["iters"] = out.record.iters;
    summary["time_s"] = out.record.time_s;
    summary["config"] = config_to_json(cfg, lambda_used);
    ro.summary_path = base + ".summary.json";
    write_file_atomically(ro.summary_path, summary.dump(2) + "\n");

    ro.groups_path = base + ".groups.json";
    write_file_atomically(ro.groups_path, gs.to_json_string() + "\n");
  }

  ro.record = std::move(out.record);
  return ro;
}

GridResult run_grid(const GridConfig& cfg) {
  struct Task {
    ExperimentConfig exp;
    std::string lm_key;  // Lambda_min cache key; empty when lambda is absolute
  };
  std::vector<Task> tasks;
  for (const auto& ds : cfg.datasets)
    for (double ratio : cfg.ratios)
      for (int grpsize : cfg.grpsizes)
        for (double frac : cfg.lambda_fracs)
          for (OptionKind opt : cfg.options) {
            ExperimentConfig e = cfg.base;
            e.name.clear();
            e.dataset_path = ds == "synthetic" ? "" : ds;
            e.scale = cfg.scale;
            e.ratio = ratio;
            e.grpsize = grpsize;
            e.lambda = 0.0;
            e.lambda_frac = frac;
            e.solver.option = opt;
            e.out_dir = cfg.out_dir;
            e.timing_repeats = cfg.timing_repeats;
            std::ostringstream key;
            key << ds << '|' << ratio << '|' << grpsize;
            tasks.push_back({std::move(e), key.str()});
          }

  std::mutex lm_mutex;
  std::map<std::string, double> lm_cache;  // Lambda_min per (dataset, grouping)

  std::vector<RunSummary> results(tasks.size());
  std::atomic<size_t> next{0};
  const int workers = cfg.workers > 0
                          ? cfg.workers
                          : std::max(1u, std::thread::hardware_concurrency());

  auto run_task = [&](size_t idx) {
    Task& task = tasks[idx];
    {
      // Resolve Lambda_min once per grouping so workers share the search.
      std::unique_lock lock(lm_mutex);
      auto it = lm_cache.find(task.lm_key);
      if (it == lm_cache.end()) {
        lock.unlock();
        // A fixed canonical solver keeps Lambda_min independent of which
        // option's task arrives first.
        ExperimentConfig probe = task.exp;
        probe.out_dir.clear();
        probe.lambda = 0.0;
        probe.lambda_frac = 1.0;
        probe.timing_repeats = 1;
        probe.solver = cfg.base.solver;
        probe.solver.option = OptionKind::option1;
        const double lm = run_single(probe).lambda_used;
        lock.lock();
        it = lm_cache.emplace(task.lm_key, lm).first;
      }
      task.exp.lambda = task.exp.lambda_frac * it->second;
    }
    const RunOutputs out = run_single(task.exp);
    RunSummary s;
    s.instance = out.instance;
    s.option = option_name(task.exp.solver.option);
    s.status = out.record.status;
    s.F_final = out.record.F_final;
    s.groups_zero = out.groups_zero;
    s.groups_nonzero = out.groups_nonzero;
    s.iters = out.record.iters;
    s.time_s = out.record.time_s;
    results[idx] = std::move(s);
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t idx = next.fetch_add(1); idx < tasks.size();
           idx = next.fetch_add(1))
        run_task(idx);
    });
  for (auto& t : pool) t.join();

  GridResult gr;
  gr.runs = std::move(results);
  std::sort(gr.runs.begin(), gr.runs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.instance, a.option) < std::tie(b.instance, b.option);
  });
  return gr;
}

namespace {

std::map<std::string, std::array<int, 4>> status_counts(
    const std::vector<RunSummary>& runs) {
  std::map<std::string, std::array<int, 4>> counts;
  for (const auto& r : runs) {
    auto& row = counts[r.option];
    switch (r.status) {
      case RunStatus::solved: ++row[0]; break;
      case RunStatus::iter_limit: ++row[1]; break;
      case RunStatus::time_limit: ++row[2]; break;
      case RunStatus::numerical_difficulties: ++row[3]; break;
    }
  }
  return counts;
}

}  // namespace

std::string GridResult::status_table_text() const {
  const auto counts = status_counts(runs);
  std::ostringstream os;
  os << "option    solved  iter_limit  time_limit  numerical_difficulties\n";
  for (const auto& [opt, row] : counts) {
    os << opt;
    for (size_t c = opt.size(); c < 10; ++c) os << ' ';
    char buf[80];
    std::snprintf(buf, sizeof buf, "%6d  %10d  %10d  %22d\n", row[0], row[1],
                  row[2], row[3]);
    os << buf;
  }
  return os.str();
}

std::string GridResult::status_table_csv() const {
  const auto counts = status_counts(runs);
  std::ostringstream os;
  os << "option,solved,iter_limit,time_limit,numerical_difficulties\n";
  for (const auto& [opt, row] : counts)
    os << opt << ',' << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3]
       << '\n';
  return os.str();
}

std::vector<RunSummary> load_summaries(const std::string& dir) {
  std::vector<RunSummary> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 13 ||
        name.compare(name.size() - 13, 13, ".summary.json") != 0)
      continue;
    std::ifstream in(entry.path());
    json j;
    in >> j;
    RunSummary s;
    s.instance = j.at("instance").get<std::string>();
    s.option = j.at("config").at("option").get<std::string>();
    s.status = status_from_string(j.at("status").get<std::string>());
    s.F_final = j.at("F_final").get<double>();
    s.groups_zero = j.at("groups_zero").get<int>();
    s.groups_nonzero = j.at("groups_nonzero").get<int>();
    s.iters = j.at("iters").get<int>();
    s.time_s = j.at("time_s").get<double>();
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.instance < b.instance; });
  return out;
}

namespace {

// Strip the trailing _optionN[_pga] tag so runs of different options on the
// same instance can be matched.
std::string instance_key(const std::string& id) {
  static const std::string tags[] = {"_option1", "_option2", "_option3"};
  for (const auto& tag : tags) {
    const auto pos = id.rfind(tag);
    if (pos != std::string::npos) return id.substr(0, pos);
  }
  return id;
}

}  // namespace

ComparisonReport compare_runs(const std::vector<RunSummary>& runs_i,
                              const std::vector<RunSummary>& runs_j) {
  std::map<std::string, const RunSummary*> by_key;
  for (const auto& r : runs_j) by_key[instance_key(r.instance)] = &r;

  std::vector<double> F_i, F_j, t_i, t_j;
  std::vector<int> z_i, z_j;
  std::vector<bool> ok_i, ok_j;
  std::vector<std::string> ids;
  for (const auto& r : runs_i) {
    const auto it = by_key.find(instance_key(r.instance));
    if (it == by_key.end()) continue;
    const RunSummary& s = *it->second;
    ids.push_back(instance_key(r.instance));
    F_i.push_back(r.F_final);
    F_j.push_back(s.F_final);
    z_i.push_back(r.groups_zero);
    z_j.push_back(s.groups_zero);
    t_i.push_back(r.time_s);
    t_j.push_back(s.time_s);
    ok_i.push_back(r.status == RunStatus::solved);
    ok_j.push_back(s.status == RunStatus::solved);
  }

  ComparisonReport rep;
  rep.instances_compared = static_cast<int>(ids.size());
  rep.sparsity = compare_sparsity(z_i, z_j);
  rep.objective = compare_objectives(F_i, F_j);
  rep.profile = performance_profile(t_i, t_j, ok_i, ok_j, ids);
  return rep;
}

std::string ComparisonReport::text(const std::string& name_i,
                                   const std::string& name_j) const {
  std::ostringstream os;
  os << name_i << " versus " << name_j << " (" << instances_compared
     << " instances)\n";
  os << "                better  same  worse\n";
  char buf[80];
  std::snprintf(buf, sizeof buf, "sparsity        %6d %5d %6d\n",
                sparsity.better, sparsity.same, sparsity.worse);
  os << buf;
  std::snprintf(buf, sizeof buf, "objective value %6d %5d %6d\n",
                objective.better, objective.same, objective.worse);
  os << buf;
  os << "profile area " << name_i << ": " << profile.area_i << ", " << name_j
     << ": " << profile.area_j << "\n";
  return os.str();
}

std::string comparison_json(const ComparisonReport& report,
                            const std::string& name_i,
                            const std::string& name_j) {
  json j;
  j["comparison"] = name_i + " versus " + name_j;
  j["instances"] = report.instances_compared;
  j["sparsity"] = {{"better", report.sparsity.better},
                   {"same", report.sparsity.same},
                   {"worse", report.sparsity.worse}};
  j["objective"] = {{"better", report.objective.better},
                    {"same", report.objective.same},
                    {"worse", report.objective.worse}};
  j["profile_area"] = {{name_i, report.profile.area_i},
                       {name_j, report.profile.area_j}};
  return j.dump(2) + "\n";
}

void write_profile_csv(std::ostream& os, const ProfileResult& profile) {
  os << "instance,height,failure\n";
  os.precision(17);
  for (const auto& bar : profile.bars)
    os << bar.instance << ',' << bar.height << ',' << (bar.failure ? 1 : 0)
       << '\n';
}

}  // namespace oglasso
