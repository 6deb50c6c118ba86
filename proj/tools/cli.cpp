#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "dpcp/dpcp.hpp"

namespace dpcp::cli {

namespace {

struct SeedOption {
  std::optional<Seed> value;

  Seed resolve(std::ostream& out) const {
    const Seed seed = value ? *value : (static_cast<Seed>(std::random_device{}()) << 32) ^ std::random_device{}();
    out << "seed=" << seed << '\n';
    return seed;
  }
};

void add_seed(CLI::App* cmd, SeedOption& seed) {
  cmd->add_option("--seed", seed.value, "Master seed (generated and printed when omitted)");
}

CsvOptions csv_options(const std::string& orientation) {
  CsvOptions o;
  o.orientation = orientation == "dims" ? CsvOrientation::RowsAreDimensions : CsvOrientation::RowsArePoints;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

std::optional<double> parse_mu0(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--mu0", "expected 'auto' or a number, got '" + text + "'");
}

SubspaceModel load_truth(const std::string& path) { return SubspaceModel::from_complement(load_matrix_csv(path)); }

// --- gen ------------------------------------------------------------------------

struct GenArgs {
  int D = 200;
  int d = 195;
  long long N = 1500;
  long long M = 1500;
  SeedOption seed;
  std::string out;
  std::string truth;
  std::string orientation = "points";
};

void run_gen(const GenArgs& a, std::ostream& out) {
  const Seed seed = a.seed.resolve(out);
  const SubspaceModel model = sample_haar_subspace(a.D, a.d, derive_seed(seed, {0}));
  const DataMatrix data = generate_dataset(model, a.N, a.M, derive_seed(seed, {1}));
  save_csv(data, a.out, csv_options(a.orientation));
  if (!a.truth.empty()) save_matrix_csv(model.basis_sperp(), a.truth);
  out << "wrote " << a.out << " (" << data.size() << " columns, D=" << data.ambient_dim() << ")\n";
}

// --- solve ----------------------------------------------------------------------

struct SolveArgs {
  std::string in;
  int c_prime = 10;
  std::string schedule = "pgd";
  std::string mu0 = "auto";
  double beta = 0.5;
  int K0 = 10;
  int K_star = 5;
  int max_iters = 2000;
  double stop_tol = 1e-8;
  int workers = 1;
  SeedOption seed;
  std::string out = "dual_basis.csv";
  std::string report = "report.json";
  std::string trace;
  std::string truth;
  std::string rank = "gap";
  double tau = 0.05;
  std::string orientation = "points";
};

RankStrategy rank_strategy(const std::string& name, double tau) {
  return name == "threshold" ? RankStrategy::threshold(tau) : RankStrategy::gap();
}

void print_report(const RecoveryReport& r, std::ostream& out) {
  out << "estimated_codim=" << r.estimated_codim << '\n';
  if (r.projection_distance) out << "projection_distance=" << format_double(*r.projection_distance) << '\n';
  if (r.outlier_f1) out << "outlier_f1=" << format_double(*r.outlier_f1) << '\n';
}

void write_report(const RecoveryReport& r, const std::string& path) { write_text(path, to_json(r).dump(2) + "\n"); }

void run_solve(const SolveArgs& a, std::ostream& out) {
  const Seed seed = a.seed.resolve(out);
  const DataMatrix data = load_csv(a.in, csv_options(a.orientation));
  SolverConfig cfg;
  cfg.c_prime = a.c_prime;
  cfg.max_iters = a.max_iters;
  cfg.stop_tol = a.stop_tol;
  cfg.seed = seed;
  cfg.workers = a.workers;
  const std::optional<double> mu0 = parse_mu0(a.mu0);
  if (a.schedule == "const") {
    if (!mu0) {
      cfg.schedule.kind = ScheduleKind::Constant;
    } else {
      cfg.schedule = StepSchedule::constant(*mu0);
    }
  } else if (a.schedule == "mbls") {
    cfg.schedule = StepSchedule::mbls();
  } else {
    cfg.schedule.kind = ScheduleKind::PiecewiseGeometric;
  }
  if (mu0) cfg.schedule.mu0 = {*mu0};
  cfg.schedule.beta = a.beta;
  cfg.schedule.K0 = a.K0;
  cfg.schedule.K_star = a.K_star;
  std::optional<SubspaceModel> truth;
  if (!a.truth.empty()) {
    truth.emplace(load_truth(a.truth));
    cfg.truth_complement = truth->basis_sperp();
  }
  const DualBasis dual = psgm_multi(data, cfg);
  ReportOptions options;
  options.rank = rank_strategy(a.rank, a.tau);
  const RecoveryReport report = make_report(dual.B, &data, truth ? &*truth : nullptr, options);
  save_matrix_csv(dual.B, a.out);
  write_report(report, a.report);
  if (!a.trace.empty()) save_trace_csv(dual.traces(), a.trace);
  print_report(report, out);
}

// --- rsgm -----------------------------------------------------------------------

struct RsgmArgs {
  std::string in;
  int c_prime = 10;
  std::string mu0 = "auto";
  double beta = 0.5;
  int K0 = 30;
  int K_star = 10;
  int max_iters = 300;
  std::string out = "rsgm_basis.csv";
  std::string report = "rsgm_report.json";
  std::string trace;
  std::string truth;
  std::string orientation = "points";
};

void run_rsgm(const RsgmArgs& a, std::ostream& out) {
  out << "seed=none (deterministic spectral initialization)\n";
  const DataMatrix data = load_csv(a.in, csv_options(a.orientation));
  RsgmSchedule s;
  s.mu0 = parse_mu0(a.mu0);
  s.beta = a.beta;
  s.K0 = a.K0;
  s.K_star = a.K_star;
  const OrthoBasis basis = rsgm_run(data, a.c_prime, s, a.max_iters);
  std::optional<SubspaceModel> truth;
  if (!a.truth.empty()) truth.emplace(load_truth(a.truth));
  ReportOptions options;
  options.codim = static_cast<int>(basis.B.cols());
  const RecoveryReport report = make_report(basis.B, &data, truth ? &*truth : nullptr, options);
  save_matrix_csv(basis.B, a.out);
  nlohmann::json j = to_json(report);
  j["initialization"] = basis.init;
  write_text(a.report, j.dump(2) + "\n");
  if (!a.trace.empty()) save_trace_csv({basis.trace}, a.trace);
  print_report(report, out);
}

// --- geometry -------------------------------------------------------------------

struct GeometryArgs {
  std::string in;
  std::string truth;
  int samples = 2000;
  int restarts = 8;
  double tol = 1e-10;
  SeedOption seed;
  std::string out;
  std::string orientation = "points";
};

void run_geometry(const GeometryArgs& a, std::ostream& out) {
  EstimatorOptions o;
  o.seed = a.seed.resolve(out);
  o.n_samples = a.samples;
  o.n_restarts = a.restarts;
  o.tol = a.tol;
  const DataMatrix data = load_csv(a.in, csv_options(a.orientation));
  const GeometryStats stats = estimate_geometry_stats(data, load_truth(a.truth), o);
  if (!a.out.empty()) write_text(a.out, to_json(stats).dump(2) + "\n");
  out << to_key_value(stats);
}

// --- theory ---------------------------------------------------------------------

struct TheoryArgs {
  std::string stats;
  std::string in;
  std::string truth;
  int c_prime = 10;
  std::optional<int> D;
  std::optional<double> N;
  std::optional<double> M;
  double theta0 = 0.5;
  std::optional<double> mu0;
  std::optional<double> beta;
  std::optional<int> K0;
  int K_star = 5;
  TheoryConstants constants;
  SeedOption seed;
  std::string out;
  std::string orientation = "points";
};

int run_theory(const TheoryArgs& a, std::ostream& out) {
  GeometryStats stats;
  if (!a.stats.empty()) {
    out << "seed=none (statistics supplied)\n";
    stats = geometry_stats_from_json(read_json(a.stats));
  } else {
    if (a.in.empty() || a.truth.empty())
      throw CLI::ValidationError("theory", "give --stats, or --in together with --truth");
    EstimatorOptions o;
    o.seed = a.seed.resolve(out);
    stats = estimate_geometry_stats(load_csv(a.in, csv_options(a.orientation)), load_truth(a.truth), o);
  }
  const auto& meta = stats.estimation_meta;
  const double N = a.N.value_or(static_cast<double>(meta.n_inliers));
  const double M = a.M.value_or(static_cast<double>(meta.n_outliers));
  const int D = a.D.value_or(static_cast<int>(meta.ambient_dim));
  if (D < 1) throw CLI::ValidationError("--D", "ambient dimension unknown; pass --D");

  ScheduleParams sched;
  sched.K_star = a.K_star;
  sched.mu0 = {a.mu0 ? *a.mu0 : mu_prime(stats, N, M)};
  const double beta_max = beta_upper_bound(sched.mu0.front(), stats, N, M, a.K_star);
  sched.beta = a.beta.value_or(std::min(0.5 * beta_max, 0.99));
  if (a.K0) {
    sched.K0 = *a.K0;
  } else {
    try {
      sched.K0 = std::max(1, static_cast<int>(std::ceil(k_diamond(sched.mu0.front(), a.theta0, stats, N, M))));
    } catch (const Error&) {
      sched.K0 = 1;
    }
  }
  TheoryReport report;
  try {
    report = evaluate_theory(stats, N, M, D, a.c_prime, a.theta0, sched, a.constants);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DivergentSeries) throw;
    out << "condition_holds=false\nreason=" << e.what() << '\n';
    return kConditionFailed;
  }
  if (!a.out.empty()) write_text(a.out, to_json(report).dump(2) + "\n");
  out << "schedule.mu0=" << format_double(sched.mu0.front()) << "\nschedule.beta=" << format_double(sched.beta)
      << "\nschedule.K0=" << sched.K0 << "\nschedule.K_star=" << sched.K_star << '\n';
  out << to_key_value(report);
  return report.condition_holds ? kOk : kConditionFailed;
}

// --- harness subcommands --------------------------------------------------------

struct HarnessArgs {
  std::string config;
  SeedOption seed;
  std::optional<int> workers;
  std::optional<int> trials;
  std::optional<int> D;
  std::optional<int> d;
  std::optional<int> c_prime;
  std::optional<double> p;
  std::vector<long long> N_values;
  std::vector<long long> M_values;
  std::optional<long long> N;
  std::vector<int> codims;
  std::vector<double> ratios;
  std::optional<int> rsgm_c;
  std::string schedule;
  std::string in;
  std::string orientation = "points";
  std::string out = "results.csv";
  std::string plotdata;
};

void add_harness_common(CLI::App* cmd, HarnessArgs& a) {
  cmd->add_option("--config", a.config, "Experiment config JSON (flags below override it)");
  add_seed(cmd, a.seed);
  cmd->add_option("--workers", a.workers, "Cells run in parallel (default 1)")->check(CLI::PositiveNumber);
  cmd->add_option("--trials", a.trials, "Trials per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--cprime", a.c_prime, "Number of instances c'");
  cmd->add_option("--schedule", a.schedule, "PSGM step rule: const, pgd or mbls (default mbls)")
      ->check(CLI::IsMember({"const", "pgd", "mbls"}));
  cmd->add_option("--out", a.out, "Result table (.csv or .json)");
  cmd->add_option("--plotdata", a.plotdata, "Also write aggregated tab-separated plot data here");
}

ExperimentConfig harness_config(const HarnessArgs& a, ExperimentKind kind, std::ostream& out) {
  ExperimentConfig c;
  if (!a.config.empty()) {
    nlohmann::json j = read_json(a.config);
    if (!j.contains("experiment")) j["experiment"] = to_string(kind);
    c = experiment_config_from_json(j);
    if (c.kind != kind) throw Error(ErrorKind::InvalidConfig, "config is for " + to_string(c.kind));
  } else {
    c.kind = kind;
    if (kind == ExperimentKind::CodimSweep) {
      c.methods = {Method::Psgm};
      c.c_prime = 30;
    }
    if (kind == ExperimentKind::OutlierPursuit) c.ratios = {0.8, 0.9};
    if (kind == ExperimentKind::ContinuousCheck) {
      c.D = 20;
      c.d = 15;
      c.c_prime = 8;
      c.trials = 50;
    }
  }
  if (a.seed.value || a.config.empty()) c.seed = a.seed.resolve(out);
  else out << "seed=" << c.seed << '\n';
  if (a.workers) c.workers = *a.workers;
  if (a.trials) c.trials = *a.trials;
  if (a.D) c.D = *a.D;
  if (a.d) c.d = *a.d;
  if (a.c_prime) c.c_prime = *a.c_prime;
  if (a.p) c.p = *a.p;
  if (!a.N_values.empty()) c.N_values = a.N_values;
  if (!a.M_values.empty()) c.M_values = a.M_values;
  if (a.N) c.N = *a.N;
  if (!a.codims.empty()) c.codims = a.codims;
  if (!a.ratios.empty()) c.ratios = a.ratios;
  if (a.rsgm_c) c.rsgm_c = *a.rsgm_c;
  if (a.schedule == "pgd") c.schedule = StepSchedule::piecewise_geometric(ScheduleParams{});
  if (a.schedule == "mbls") c.schedule = StepSchedule::mbls();
  if (a.schedule == "const") throw CLI::ValidationError("--schedule", "const needs a step; set it in --config");
  c.output = a.out;
  c.validate();
  return c;
}

void run_harness(const HarnessArgs& a, ExperimentKind kind, std::ostream& out) {
  const ExperimentConfig config = harness_config(a, kind, out);
  auto progress = [&out](const ResultRow& row) {
    out << row.experiment << ' ' << row.method << " trial=" << row.trial;
    for (const auto& [k, v] : row.cell) out << ' ' << k << '=' << format_double(v);
    out << " codim=" << row.report.estimated_codim;
    if (row.report.projection_distance) out << " dist=" << format_double(*row.report.projection_distance);
    if (row.report.outlier_f1) out << " f1=" << format_double(*row.report.outlier_f1);
    if (!row.error.empty()) out << " error=" << row.error;
    out << '\n';
  };
  ResultTable table;
  if (kind == ExperimentKind::OutlierPursuit && !a.in.empty()) {
    const DataMatrix matrix = normalize_columns(load_csv(a.in, csv_options(a.orientation)));
    table = run_outlier_pursuit(config, &matrix, progress);
  } else {
    table = run_experiment(config, progress);
  }
  persist(table, config.output);
  if (!a.plotdata.empty()) write_plotdata(table, a.plotdata);
  if (kind == ExperimentKind::CodimSweep) {
    for (const auto& s : summarize_codim(table))
      out << "c=" << s.c << " r=" << format_double(s.r) << " exact=" << format_double(s.exact_fraction)
          << " within2=" << format_double(s.within2_fraction) << '\n';
  }
  out << "wrote " << config.output << " (" << table.rows.size() << " rows)\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual principal component pursuit toolkit", "dpcp"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic inlier/outlier dataset");
  g->add_option("--D", gen.D, "Ambient dimension")->check(CLI::PositiveNumber);
  g->add_option("--d", gen.d, "Inlier subspace dimension")->check(CLI::PositiveNumber);
  g->add_option("--N", gen.N, "Number of inliers")->check(CLI::NonNegativeNumber);
  g->add_option("--M", gen.M, "Number of outliers")->check(CLI::NonNegativeNumber);
  add_seed(g, gen.seed);
  g->add_option("--out", gen.out, "Output data CSV")->required();
  g->add_option("--truth", gen.truth, "Also write the true complement basis (D x c CSV)");
  g->add_option("--orientation", gen.orientation, "CSV rows are points or dims")->check(CLI::IsMember({"points", "dims"}));

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run DPCP-PSGM with c' random instances");
  s->add_option("--in", solve.in, "Data CSV")->required()->check(CLI::ExistingFile);
  s->add_option("--cprime", solve.c_prime, "Number of instances c'")->check(CLI::PositiveNumber);
  s->add_option("--schedule", solve.schedule, "Step rule: const, pgd or mbls")->check(CLI::IsMember({"const", "pgd", "mbls"}));
  s->add_option("--mu0", solve.mu0, "Initial step: auto or a number");
  s->add_option("--beta", solve.beta, "pgd decay factor");
  s->add_option("--K0", solve.K0, "pgd constant-phase length");
  s->add_option("--Kstar", solve.K_star, "pgd decay period");
  s->add_option("--max-iters", solve.max_iters, "Iteration cap per instance");
  s->add_option("--stop-tol", solve.stop_tol, "Stop when successive iterates move less (radians)");
  s->add_option("--workers", solve.workers, "Threads for independent instances")->check(CLI::PositiveNumber);
  add_seed(s, solve.seed);
  s->add_option("--out", solve.out, "Dual basis CSV (D x c')");
  s->add_option("--report", solve.report, "Recovery report JSON");
  s->add_option("--trace", solve.trace, "Convergence trace CSV");
  s->add_option("--truth", solve.truth, "True complement basis CSV (enables distances)");
  s->add_option("--rank", solve.rank, "Rank rule: gap or threshold")->check(CLI::IsMember({"gap", "threshold"}));
  s->add_option("--tau", solve.tau, "Relative threshold for --rank threshold");
  s->add_option("--orientation", solve.orientation, "CSV rows are points or dims")->check(CLI::IsMember({"points", "dims"}));

  RsgmArgs rsgm;
  auto* r = app.add_subcommand("rsgm", "Run the orthogonality-constrained baseline");
  r->add_option("--in", rsgm.in, "Data CSV")->required()->check(CLI::ExistingFile);
  r->add_option("--cprime", rsgm.c_prime, "Number of orthonormal columns")->check(CLI::PositiveNumber);
  r->add_option("--mu0", rsgm.mu0, "Initial step: auto or a number");
  r->add_option("--beta", rsgm.beta, "Decay factor");
  r->add_option("--K0", rsgm.K0, "Constant-phase length");
  r->add_option("--Kstar", rsgm.K_star, "Decay period");
  r->add_option("--max-iters", rsgm.max_iters, "Iteration count");
  r->add_option("--out", rsgm.out, "Basis CSV");
  r->add_option("--report", rsgm.report, "Recovery report JSON");
  r->add_option("--trace", rsgm.trace, "Convergence trace CSV");
  r->add_option("--truth", rsgm.truth, "True complement basis CSV (enables distances)");
  r->add_option("--orientation", rsgm.orientation, "CSV rows are points or dims")->check(CLI::IsMember({"points", "dims"}));

  GeometryArgs geo;
  auto* ge = app.add_subcommand("geometry", "Estimate the geometric statistics of labeled data");
  ge->add_option("--in", geo.in, "Labeled data CSV")->required()->check(CLI::ExistingFile);
  ge->add_option("--truth", geo.truth, "True complement basis CSV")->required()->check(CLI::ExistingFile);
  ge->add_option("--samples", geo.samples, "Random probes per statistic")->check(CLI::PositiveNumber);
  ge->add_option("--restarts", geo.restarts, "Refined probes per statistic")->check(CLI::NonNegativeNumber);
  ge->add_option("--tol", geo.tol, "Refinement step tolerance");
  add_seed(ge, geo.seed);
  ge->add_option("--out", geo.out, "Statistics JSON");
  ge->add_option("--orientation", geo.orientation, "CSV rows are points or dims")->check(CLI::IsMember({"points", "dims"}));

  TheoryArgs th;
  auto* t = app.add_subcommand("theory", "Evaluate the recovery conditions (exit 3 when they fail)");
  t->add_option("--stats", th.stats, "Statistics JSON (from `geometry`)");
  t->add_option("--in", th.in, "Labeled data CSV to estimate statistics from");
  t->add_option("--truth", th.truth, "True complement basis CSV (with --in)");
  t->add_option("--cprime", th.c_prime, "Number of instances c'")->check(CLI::PositiveNumber);
  t->add_option("--D", th.D, "Ambient dimension (default: from the statistics)");
  t->add_option("--N", th.N, "Inlier count (default: from the statistics)");
  t->add_option("--M", th.M, "Outlier count (default: from the statistics)");
  t->add_option("--theta0", th.theta0, "Initial angle from S-perp (radians)");
  t->add_option("--mu0", th.mu0, "Initial step (default: mu')");
  t->add_option("--beta", th.beta, "Decay factor (default: half the admissible bound)");
  t->add_option("--K0", th.K0, "Constant-phase length (default: ceil of K-diamond)");
  t->add_option("--Kstar", th.K_star, "Decay period");
  t->add_option("--C1", th.constants.C1, "Absolute constant C1");
  t->add_option("--C2", th.constants.C2, "Absolute constant C2");
  t->add_option("--epsilon", th.constants.epsilon, "Deviation parameter epsilon");
  add_seed(t, th.seed);
  t->add_option("--out", th.out, "Theory report JSON");
  t->add_option("--orientation", th.orientation, "CSV rows are points or dims")->check(CLI::IsMember({"points", "dims"}));

  HarnessArgs cont;
  auto* c = app.add_subcommand("continuous", "Check the continuous-limit fixed points and span recovery");
  add_harness_common(c, cont);
  c->add_option("--D", cont.D, "Ambient dimension (default 20)");
  c->add_option("--d", cont.d, "Inlier dimension (default 15)");
  c->add_option("--p", cont.p, "Outlier probability in (0, 1] (default 0.5)");

  HarnessArgs phase;
  auto* ph = app.add_subcommand("phase", "Phase transition over an (N, M) grid");
  add_harness_common(ph, phase);
  ph->add_option("--D", phase.D, "Ambient dimension (default 200)");
  ph->add_option("--d", phase.d, "Inlier dimension (default 195)");
  ph->add_option("--N-values", phase.N_values, "Inlier counts (default 200 500 1000 1500 2000)");
  ph->add_option("--M-values", phase.M_values, "Outlier counts (default 500 1000 ... 4000)");

  HarnessArgs codim;
  auto* co = app.add_subcommand("codim", "Codimension recovery sweep");
  add_harness_common(co, codim);
  co->add_option("--D", codim.D, "Ambient dimension (default 200)");
  co->add_option("--N", codim.N, "Inlier count (default 1500)");
  co->add_option("--codims", codim.codims, "Codimensions (default 10 12 ... 20)");
  co->add_option("--ratios", codim.ratios, "Outlier ratios r (default 0.6)");

  HarnessArgs pursuit;
  auto* pu = app.add_subcommand("pursuit", "Outlier pursuit on a proxy or a supplied data CSV");
  add_harness_common(pu, pursuit);
  pu->add_option("--ratios", pursuit.ratios, "Corruption ratios (default 0.8 0.9)");
  pu->add_option("--rsgm-c", pursuit.rsgm_c, "Codimension given to rsgm_c (default 5)");
  pu->add_option("--in", pursuit.in, "Data CSV to corrupt instead of the synthetic proxy")->check(CLI::ExistingFile);
  pu->add_option("--orientation", pursuit.orientation, "CSV rows are points or dims")
      ->check(CLI::IsMember({"points", "dims"}));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* failing = &app;
    for (const auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help("", CLI::AppFormatMode::Normal);
    return kUsage;
  }

  try {
    if (g->parsed()) run_gen(gen, out);
    if (s->parsed()) run_solve(solve, out);
    if (r->parsed()) run_rsgm(rsgm, out);
    if (ge->parsed()) run_geometry(geo, out);
    if (t->parsed()) return run_theory(th, out);
    if (c->parsed()) run_harness(cont, ExperimentKind::ContinuousCheck, out);
    if (ph->parsed()) run_harness(phase, ExperimentKind::PhaseTransition, out);
    if (co->parsed()) run_harness(codim, ExperimentKind::CodimSweep, out);
    if (pu->parsed()) run_harness(pursuit, ExperimentKind::OutlierPursuit, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace dpcp::cli
