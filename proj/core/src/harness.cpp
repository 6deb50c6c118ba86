#include "dpcp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "dpcp/continuous.hpp"
#include "dpcp/error.hpp"

namespace dpcp {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::PhaseTransition: return "phase_transition";
    case ExperimentKind::CodimSweep: return "codim_sweep";
    case ExperimentKind::OutlierPursuit: return "outlier_pursuit";
    case ExperimentKind::ContinuousCheck: return "continuous_check";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Psgm: return "psgm";
    case Method::RsgmC: return "rsgm_c";
    case Method::RsgmCprime: return "rsgm_cprime";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::PhaseTransition, ExperimentKind::CodimSweep, ExperimentKind::OutlierPursuit,
                 ExperimentKind::ContinuousCheck})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::InvalidConfig, "unknown experiment kind '" + name + "'");
}

Method method_from_string(const std::string& name) {
  for (auto m : {Method::Psgm, Method::RsgmC, Method::RsgmCprime})
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::InvalidConfig, "unknown method '" + name + "'");
}

std::pair<DataMatrix, SubspaceModel> make_hsi_proxy(const ProxyParams& params, Seed seed) {
  if (params.d < 1 || params.d >= params.D) throw Error(ErrorKind::InvalidDimension, "proxy needs 1 <= d < D");
  if (params.n < 1) throw Error(ErrorKind::EmptyDataset, "proxy needs at least one column");
  if (static_cast<int>(params.spectrum.size()) < params.d)
    throw Error(ErrorKind::InvalidConfig, "proxy spectrum needs d entries");
  SubspaceModel model = sample_haar_subspace(params.D, params.d, derive_seed(seed, {0}));
  Rng rng(derive_seed(seed, {1}));
  Eigen::MatrixXd coeffs = rng.normal_matrix(params.d, params.n);
  for (int i = 0; i < params.d; ++i) coeffs.row(i) *= params.spectrum[static_cast<std::size_t>(i)];
  Eigen::MatrixXd Z = model.basis_s() * coeffs;
  const Eigen::MatrixXd noise = rng.normal_matrix(params.D, params.n);
  const double scale = params.noise / std::sqrt(static_cast<double>(params.D));
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    Z.col(j) += scale * Z.col(j).norm() * noise.col(j);
    Z.col(j).normalize();
  }
  std::vector<Label> labels(static_cast<std::size_t>(params.n), Label::Inlier);
  return {DataMatrix(std::move(Z), std::move(labels), true), std::move(model)};
}

// --- configuration -------------------------------------------------------------

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, what);
}

void require_ratios(const std::vector<double>& ratios, bool allow_zero) {
  require(!ratios.empty(), "ratio list is empty");
  for (double r : ratios)
    require((allow_zero ? r >= 0.0 : r > 0.0) && r < 1.0,
            "outlier ratio " + format_double(r) + (allow_zero ? " outside [0, 1)" : " outside (0, 1)"));
}

}  // namespace

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials must be >= 1");
  require(c_prime >= 1, "c' must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(max_iters >= 1 && rsgm_iters >= 0, "iteration limits must be positive");
  require(!methods.empty(), "no methods selected");
  schedule.validate();
  switch (kind) {
    case ExperimentKind::PhaseTransition:
      require(d >= 1 && d < D, "need 1 <= d < D");
      require(c_prime <= D, "c' must be <= D");
      require(c_prime >= D - d, "c' must be >= c = D - d");
      require(!N_values.empty() && !M_values.empty(), "the (N, M) grid is empty");
      for (long long n : N_values) require(n >= 1, "N = " + std::to_string(n) + " leaves no inliers to recover");
      for (long long m : M_values) require(m >= 0, "M must be >= 0");
      break;
    case ExperimentKind::CodimSweep:
      require(N >= 1, "N must be >= 1");
      require(!codims.empty(), "codimension range is empty");
      for (int c : codims) {
        require(c >= 1 && c < D, "codimension " + std::to_string(c) + " outside [1, D)");
        require(c_prime >= c, "c' = " + std::to_string(c_prime) + " is below c = " + std::to_string(c));
      }
      require(c_prime <= D, "c' must be <= D");
      require_ratios(ratios, false);
      break;
    case ExperimentKind::OutlierPursuit:
      require_ratios(ratios, true);
      require(proxy.d >= 1 && proxy.d < proxy.D, "proxy needs 1 <= d < D");
      require(c_prime <= proxy.D && rsgm_c >= 1 && rsgm_c <= proxy.D, "c' and rsgm_c must not exceed the proxy D");
      break;
    case ExperimentKind::ContinuousCheck:
      require(d >= 1 && d < D, "need 1 <= d < D");
      require(c_prime >= D - d, "c' must be >= c = D - d");
      require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
      break;
  }
}

namespace {

nlohmann::json schedule_to_json(const StepSchedule& s) {
  const char* kind = s.kind == ScheduleKind::Constant ? "const" : s.kind == ScheduleKind::Mbls ? "mbls" : "pgd";
  nlohmann::json mu0 = s.mu0.empty() ? nlohmann::json("auto") : nlohmann::json(s.mu0);
  return {{"kind", kind}, {"mu0", mu0}, {"beta", s.beta}, {"K0", s.K0}, {"K_star", s.K_star},
          {"alpha", s.alpha}, {"shrink", s.shrink}, {"grow", s.grow}, {"max_backtracks", s.max_backtracks}};
}

StepSchedule schedule_from_json(const nlohmann::json& j) {
  StepSchedule s;
  const std::string kind = j.value("kind", std::string("mbls"));
  if (kind == "const")
    s.kind = ScheduleKind::Constant;
  else if (kind == "pgd")
    s.kind = ScheduleKind::PiecewiseGeometric;
  else if (kind == "mbls")
    s.kind = ScheduleKind::Mbls;
  else
    throw Error(ErrorKind::InvalidConfig, "unknown schedule '" + kind + "'");
  if (j.contains("mu0")) {
    const auto& m = j.at("mu0");
    if (m.is_number())
      s.mu0 = {m.get<double>()};
    else if (m.is_array())
      s.mu0 = m.get<std::vector<double>>();
    else if (!(m.is_string() && m.get<std::string>() == "auto"))
      throw Error(ErrorKind::InvalidConfig, "mu0 must be 'auto', a number or a list");
  }
  if (s.kind == ScheduleKind::Constant && s.mu0.empty())
    throw Error(ErrorKind::InvalidConfig, "a constant schedule needs mu0");
  s.beta = j.value("beta", s.beta);
  s.K0 = j.value("K0", s.K0);
  s.K_star = j.value("K_star", s.K_star);
  s.alpha = j.value("alpha", s.alpha);
  s.shrink = j.value("shrink", s.shrink);
  s.grow = j.value("grow", s.grow);
  s.max_backtracks = j.value("max_backtracks", s.max_backtracks);
  return s;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.kind = experiment_kind_from_string(j.at("experiment").get<std::string>());
    c.D = j.value("D", c.D);
    c.d = j.value("d", c.d);
    if (j.contains("c")) c.d = c.D - j.at("c").get<int>();
    c.c_prime = j.value("c_prime", c.c_prime);
    c.trials = j.value("trials", c.trials);
    c.N_values = j.value("N_values", c.N_values);
    c.M_values = j.value("M_values", c.M_values);
    c.N = j.value("N", c.N);
    c.codims = j.value("codims", c.codims);
    c.ratios = j.value("ratios", c.ratios);
    c.p = j.value("p", c.p);
    c.rsgm_c = j.value("rsgm_c", c.rsgm_c);
    if (j.contains("proxy")) {
      const auto& p = j.at("proxy");
      c.proxy.D = p.value("D", c.proxy.D);
      c.proxy.d = p.value("d", c.proxy.d);
      c.proxy.n = p.value("n", c.proxy.n);
      c.proxy.spectrum = p.value("spectrum", c.proxy.spectrum);
      c.proxy.noise = p.value("noise", c.proxy.noise);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
    } else if (c.kind == ExperimentKind::CodimSweep) {
      c.methods = {Method::Psgm};
    }
    if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"));
    c.max_iters = j.value("max_iters", c.max_iters);
    c.stop_tol = j.value("stop_tol", c.stop_tol);
    if (j.contains("rsgm")) {
      const auto& r = j.at("rsgm");
      if (r.contains("mu0") && r.at("mu0").is_number()) c.rsgm.mu0 = r.at("mu0").get<double>();
      c.rsgm.beta = r.value("beta", c.rsgm.beta);
      c.rsgm.K0 = r.value("K0", c.rsgm.K0);
      c.rsgm.K_star = r.value("K_star", c.rsgm.K_star);
      c.rsgm_iters = r.value("max_iters", c.rsgm_iters);
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.record_timing = j.value("record_timing", c.record_timing);
    c.output = j.value("output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  return {{"experiment", to_string(c.kind)},
          {"D", c.D},
          {"d", c.d},
          {"c_prime", c.c_prime},
          {"trials", c.trials},
          {"N_values", c.N_values},
          {"M_values", c.M_values},
          {"N", c.N},
          {"codims", c.codims},
          {"ratios", c.ratios},
          {"p", c.p},
          {"rsgm_c", c.rsgm_c},
          {"proxy",
           {{"D", c.proxy.D}, {"d", c.proxy.d}, {"n", c.proxy.n}, {"spectrum", c.proxy.spectrum}, {"noise", c.proxy.noise}}},
          {"methods", methods},
          {"schedule", schedule_to_json(c.schedule)},
          {"max_iters", c.max_iters},
          {"stop_tol", c.stop_tol},
          {"rsgm",
           {{"mu0", c.rsgm.mu0 ? nlohmann::json(*c.rsgm.mu0) : nlohmann::json("auto")},
            {"beta", c.rsgm.beta},
            {"K0", c.rsgm.K0},
            {"K_star", c.rsgm.K_star},
            {"max_iters", c.rsgm_iters}}},
          {"seed", c.seed},
          {"workers", c.workers},
          {"record_timing", c.record_timing},
          {"output", c.output}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

// --- rows ------------------------------------------------------------------------

namespace {

std::optional<double> lookup(const NamedValues& values, const std::string& key) {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  return std::nullopt;
}

bool same_report(const RecoveryReport& a, const RecoveryReport& b) {
  return a.estimated_codim == b.estimated_codim && a.singular_values.size() == b.singular_values.size() &&
         a.singular_values == b.singular_values && a.procrustes_distance == b.procrustes_distance &&
         a.projection_distance == b.projection_distance && a.max_principal_angle == b.max_principal_angle &&
         a.outlier_f1 == b.outlier_f1 && a.precision == b.precision && a.recall == b.recall;
}

}  // namespace

std::optional<double> ResultRow::extra_value(const std::string& key) const { return lookup(extra, key); }
std::optional<double> ResultRow::cell_value(const std::string& key) const { return lookup(cell, key); }

bool operator==(const ResultRow& a, const ResultRow& b) {
  return a.experiment == b.experiment && a.cell == b.cell && a.method == b.method && a.trial == b.trial &&
         a.seed == b.seed && same_report(a.report, b.report) && a.extra == b.extra && a.wall_time == b.wall_time &&
         a.tag == b.tag && a.error == b.error;
}

void ResultTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.experiment != b.experiment) return a.experiment < b.experiment;
    if (a.cell != b.cell) return a.cell < b.cell;
    if (a.method != b.method) return a.method < b.method;
    return a.trial < b.trial;
  });
}

long long outliers_for_ratio(long long N, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidRatio, "ratio must lie in [0, 1)");
  return std::llround(r * static_cast<double>(N) / (1.0 - r));
}

// --- execution -------------------------------------------------------------------

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::uint64_t kind_key(ExperimentKind k) { return static_cast<std::uint64_t>(k) + 1; }

Seed method_seed(Seed data_seed, Method m) { return derive_seed(data_seed, {100 + static_cast<std::uint64_t>(m)}); }

struct Job {
  ResultRow row;  // identification fields filled in
  std::function<void(ResultRow&)> body;
};

ResultTable run_jobs(std::vector<Job> jobs, const ExperimentConfig& config, const ProgressFn& progress) {
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      ResultRow& row = jobs[i].row;
      const auto start = std::chrono::steady_clock::now();
      try {
        jobs[i].body(row);
      } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        row.error = msg;
      }
      if (config.record_timing)
        row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (progress) {
        std::lock_guard lock(mutex);
        progress(row);
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), jobs.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  ResultTable table;
  for (auto& job : jobs) table.rows.push_back(std::move(job.row));
  table.sort();
  return table;
}

int count_far_columns(const Eigen::MatrixXd& B, const SubspaceModel& truth) {
  const double limit = 10.0 * std::numbers::pi / 180.0;
  int n = 0;
  for (double a : principal_angles(B, truth, AngleTarget::Sperp)) n += a > limit;
  return n;
}

SolverConfig psgm_config(const ExperimentConfig& config, Seed seed) {
  SolverConfig s;
  s.c_prime = config.c_prime;
  s.max_iters = config.max_iters;
  s.stop_tol = config.stop_tol;
  s.schedule = config.schedule;
  s.seed = seed;
  return s;
}

// Solves with one method and fills the report and diagnostics of `row`.
void solve_into(ResultRow& row, Method method, const DataMatrix& data, const SubspaceModel* truth, int c_prime,
                int c_small, const ExperimentConfig& config, Seed seed) {
  Eigen::MatrixXd B;
  ReportOptions options;
  if (method == Method::Psgm) {
    SolverConfig cfg = psgm_config(config, seed);
    cfg.c_prime = c_prime;
    const DualBasis dual = psgm_multi(data, cfg);
    B = dual.B;
    int iters = 0, converged = 0;
    for (const auto& inst : dual.instances) {
      iters = std::max(iters, inst.iterations);
      converged += inst.converged;
    }
    row.extra.emplace_back("max_iterations", iters);
    row.extra.emplace_back("converged_instances", converged);
    row.extra.emplace_back("c_given", c_prime);
  } else {
    const int c = method == Method::RsgmC ? c_small : c_prime;
    const OrthoBasis ortho = rsgm_run(data, c, config.rsgm, config.rsgm_iters);
    B = ortho.B;
    options.codim = static_cast<int>(B.cols());
    row.extra.emplace_back("max_iterations", ortho.iterations);
    row.extra.emplace_back("c_given", c);
  }
  row.report = make_report(B, &data, truth, options);
  row.report.orthonormalized_complement.resize(0, 0);
  if (truth) row.extra.emplace_back("far_columns", count_far_columns(B, *truth));
}

ResultRow base_row(const ExperimentConfig& config, NamedValues cell, const std::string& method, int trial, Seed seed) {
  ResultRow row;
  row.experiment = to_string(config.kind);
  row.cell = std::move(cell);
  row.method = method;
  row.trial = trial;
  row.seed = seed;
  return row;
}

}  // namespace

ResultTable run_phase_transition(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  if (config.kind != ExperimentKind::PhaseTransition) throw Error(ErrorKind::InvalidConfig, "not a phase transition config");
  std::vector<Job> jobs;
  const int c = config.D - config.d;
  for (long long N : config.N_values) {
    for (long long M : config.M_values) {
      for (int t = 0; t < config.trials; ++t) {
        const Seed data_seed = derive_seed(config.seed, {kind_key(config.kind), static_cast<std::uint64_t>(N),
                                                         static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(t)});
        for (Method m : config.methods) {
          Job job{base_row(config, {{"N", static_cast<double>(N)}, {"M", static_cast<double>(M)}}, to_string(m), t, data_seed),
                  {}};
          job.body = [&config, N, M, m, c, data_seed](ResultRow& row) {
            const SubspaceModel truth = sample_haar_subspace(config.D, config.d, derive_seed(data_seed, {0}));
            const DataMatrix data = generate_dataset(truth, N, M, derive_seed(data_seed, {1}));
            solve_into(row, m, data, &truth, config.c_prime, c, config, method_seed(data_seed, m));
          };
          jobs.push_back(std::move(job));
        }
      }
    }
  }
  return run_jobs(std::move(jobs), config, progress);
}

ResultTable run_codim_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  if (config.kind != ExperimentKind::CodimSweep) throw Error(ErrorKind::InvalidConfig, "not a codimension sweep config");
  std::vector<Job> jobs;
  for (int c : config.codims) {
    for (double r : config.ratios) {
      const long long M = outliers_for_ratio(config.N, r);
      for (int t = 0; t < config.trials; ++t) {
        const Seed data_seed = derive_seed(config.seed, {kind_key(config.kind), static_cast<std::uint64_t>(c), bits(r),
                                                         static_cast<std::uint64_t>(t)});
        for (Method m : config.methods) {
          Job job{base_row(config, {{"c", c}, {"r", r}}, to_string(m), t, data_seed), {}};
          job.body = [&config, c, M, m, data_seed](ResultRow& row) {
            const SubspaceModel truth = sample_haar_subspace(config.D, config.D - c, derive_seed(data_seed, {0}));
            const DataMatrix data = generate_dataset(truth, config.N, M, derive_seed(data_seed, {1}));
            solve_into(row, m, data, &truth, config.c_prime, c, config, method_seed(data_seed, m));
            row.extra.emplace_back("M", static_cast<double>(M));
            row.extra.emplace_back("exact", row.report.estimated_codim == c ? 1.0 : 0.0);
            row.extra.emplace_back("abs_error", std::abs(row.report.estimated_codim - c));
          };
          jobs.push_back(std::move(job));
        }
      }
    }
  }
  return run_jobs(std::move(jobs), config, progress);
}

ResultTable run_outlier_pursuit(const ExperimentConfig& config, const DataMatrix* matrix, const ProgressFn& progress) {
  config.validate();
  if (config.kind != ExperimentKind::OutlierPursuit) throw Error(ErrorKind::InvalidConfig, "not an outlier pursuit config");
  const Eigen::Index D = matrix ? matrix->ambient_dim() : config.proxy.D;
  if (config.c_prime > D || config.rsgm_c > D) throw Error(ErrorKind::InvalidConfig, "c' and rsgm_c must not exceed D");
  std::vector<Job> jobs;
  for (double r : config.ratios) {
    for (int t = 0; t < config.trials; ++t) {
      const Seed proxy_seed = derive_seed(config.seed, {kind_key(config.kind), 0, static_cast<std::uint64_t>(t)});
      const Seed data_seed = derive_seed(config.seed, {kind_key(config.kind), 1, bits(r), static_cast<std::uint64_t>(t)});
      for (Method m : config.methods) {
        Job job{base_row(config, {{"r", r}}, to_string(m), t, data_seed), {}};
        job.body = [&config, matrix, r, m, proxy_seed, data_seed](ResultRow& row) {
          std::optional<SubspaceModel> truth;
          std::optional<DataMatrix> proxy_data;
          if (!matrix) {
            auto proxy = make_hsi_proxy(config.proxy, proxy_seed);
            proxy_data.emplace(std::move(proxy.first));
            truth.emplace(std::move(proxy.second));
          }
          const DataMatrix data = corrupt_with_outliers(matrix ? *matrix : *proxy_data, r, data_seed);
          solve_into(row, m, data, truth ? &*truth : nullptr, config.c_prime, config.rsgm_c, config,
                     method_seed(data_seed, m));
        };
        jobs.push_back(std::move(job));
      }
    }
  }
  return run_jobs(std::move(jobs), config, progress);
}

ResultTable run_continuous_check(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  if (config.kind != ExperimentKind::ContinuousCheck) throw Error(ErrorKind::InvalidConfig, "not a continuous check config");
  std::vector<Job> jobs;
  for (int t = 0; t < config.trials; ++t) {
    const Seed seed = derive_seed(config.seed, {kind_key(config.kind), bits(config.p), static_cast<std::uint64_t>(t)});
    Job job{base_row(config, {{"p", config.p}}, "continuous", t, seed), {}};
    job.body = [&config, seed](ResultRow& row) {
      const SubspaceModel truth = sample_haar_subspace(config.D, config.d, derive_seed(seed, {0}));
      Rng rng(derive_seed(seed, {1}));
      Eigen::MatrixXd B0(config.D, config.c_prime);
      for (int i = 0; i < config.c_prime; ++i) B0.col(i) = rng.unit_vector(config.D);
      const ContinuousProblem problem(truth, config.p);
      Eigen::MatrixXd limits(config.D, config.c_prime);
      for (int i = 0; i < config.c_prime; ++i) limits.col(i) = continuous_psgm_run(problem, B0.col(i)).b;
      if (config.p == 1.0) {
        row.tag = "span-check-skipped";
        row.report = make_report(limits, nullptr, nullptr);
        row.report.orthonormalized_complement.resize(0, 0);
        return;
      }
      double worst = 0.0;
      for (int i = 0; i < config.c_prime; ++i) {
        const Eigen::VectorXd fp = continuous_fixed_point(truth, B0.col(i));
        worst = std::max(worst, 2.0 * std::asin(std::min(1.0, 0.5 * (limits.col(i) - fp).norm())));
      }
      row.report = make_report(limits, nullptr, &truth);
      row.report.orthonormalized_complement.resize(0, 0);
      const bool spans = row.report.estimated_codim == truth.codim() && row.report.projection_distance.value_or(1.0) < 1e-8;
      row.extra.emplace_back("fixed_point_error", worst);
      row.extra.emplace_back("spans_complement", spans ? 1.0 : 0.0);
    };
    jobs.push_back(std::move(job));
  }
  return run_jobs(std::move(jobs), config, progress);
}

ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  switch (config.kind) {
    case ExperimentKind::PhaseTransition: return run_phase_transition(config, progress);
    case ExperimentKind::CodimSweep: return run_codim_sweep(config, progress);
    case ExperimentKind::OutlierPursuit: return run_outlier_pursuit(config, nullptr, progress);
    case ExperimentKind::ContinuousCheck: return run_continuous_check(config, progress);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown experiment kind");
}

std::vector<CodimSummary> summarize_codim(const ResultTable& table) {
  std::vector<CodimSummary> out;
  for (const ResultRow& row : table.rows) {
    if (row.experiment != "codim_sweep" || row.method != "psgm") continue;
    const int c = static_cast<int>(row.cell_value("c").value_or(0.0));
    const double r = row.cell_value("r").value_or(0.0);
    auto it = std::find_if(out.begin(), out.end(), [&](const CodimSummary& s) { return s.c == c && s.r == r; });
    if (it == out.end()) {
      out.push_back({c, r, 0, 0.0, 0.0});
      it = std::prev(out.end());
    }
    ++it->trials;
    const bool ok = row.error.empty();
    it->exact_fraction += ok && row.report.estimated_codim == c;
    it->within2_fraction += ok && std::abs(row.report.estimated_codim - c) <= 2;
  }
  for (auto& s : out) {
    s.exact_fraction /= s.trials;
    s.within2_fraction /= s.trials;
  }
  return out;
}

}  // namespace dpcp
