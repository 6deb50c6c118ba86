#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpcp/analysis.hpp"
#include "dpcp/dataset.hpp"
#include "dpcp/rsgm.hpp"
#include "dpcp/solver.hpp"

namespace dpcp {

enum class ExperimentKind { PhaseTransition, CodimSweep, OutlierPursuit, ContinuousCheck };

/// psgm: c' independent instances; rsgm_c: baseline given the true (or a
/// supplied small) codimension; rsgm_cprime: baseline given c'.
enum class Method { Psgm, RsgmC, RsgmCprime };

std::string to_string(ExperimentKind kind);
std::string to_string(Method method);
ExperimentKind experiment_kind_from_string(const std::string& name);
Method method_from_string(const std::string& name);

/// Synthetic stand-in for a hyperspectral image: unit columns near a d-dim
/// subspace of R^D with a decaying spectrum plus small relative noise.
struct ProxyParams {
  int D = 10;
  int d = 5;
  long long n = 10000;
  std::vector<double> spectrum = {1.0, 0.8, 0.65, 0.5, 0.4};
  double noise = 1e-3;
};

/// Clean proxy matrix (all columns labeled inlier) and its subspace.
std::pair<DataMatrix, SubspaceModel> make_hsi_proxy(const ProxyParams& params, Seed seed);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PhaseTransition;
  int D = 200;
  int d = 195;
  int c_prime = 10;
  int trials = 1;

  // Phase transition grid.
  std::vector<long long> N_values = {200, 500, 1000, 1500, 2000};
  std::vector<long long> M_values = {500, 1000, 1500, 2000, 2500, 3000, 3500, 4000};
  // Codimension sweep.
  long long N = 1500;
  std::vector<int> codims = {10, 12, 14, 16, 18, 20};
  // Codimension sweep and outlier pursuit.
  std::vector<double> ratios = {0.6};
  // Continuous check.
  double p = 0.5;
  // Outlier pursuit.
  ProxyParams proxy;
  /// Codimension given to rsgm_c in the outlier pursuit.
  int rsgm_c = 5;

  std::vector<Method> methods = {Method::Psgm, Method::RsgmC, Method::RsgmCprime};
  StepSchedule schedule = StepSchedule::mbls();
  int max_iters = 2000;
  double stop_tol = 1e-8;
  RsgmSchedule rsgm;
  int rsgm_iters = 300;

  Seed seed = 0;
  int workers = 1;
  /// When false every wall time is written as 0 so reruns are byte-identical.
  bool record_timing = false;
  std::string output;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

using NamedValues = std::vector<std::pair<std::string, double>>;

/// One (cell, method, trial) outcome. The report's orthonormalized
/// complement is not kept.
struct ResultRow {
  std::string experiment;
  NamedValues cell;
  std::string method;
  int trial = 0;
  Seed seed = 0;
  RecoveryReport report;
  NamedValues extra;
  double wall_time = 0.0;
  std::string tag;
  std::string error;

  std::optional<double> extra_value(const std::string& key) const;
  std::optional<double> cell_value(const std::string& key) const;
  friend bool operator==(const ResultRow& a, const ResultRow& b);
};

struct ResultTable {
  std::vector<ResultRow> rows;

  /// Orders rows by experiment, cell values, method and trial.
  void sort();
  friend bool operator==(const ResultTable& a, const ResultTable& b) { return a.rows == b.rows; }
};

/// Optional per-row progress callback (called from worker threads, serialized).
using ProgressFn = std::function<void(const ResultRow&)>;

ResultTable run_phase_transition(const ExperimentConfig& config, const ProgressFn& progress = {});
ResultTable run_codim_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});
/// Uses `matrix` (relabeled by the corruption) when given, else a proxy.
ResultTable run_outlier_pursuit(const ExperimentConfig& config, const DataMatrix* matrix = nullptr,
                                const ProgressFn& progress = {});
ResultTable run_continuous_check(const ExperimentConfig& config, const ProgressFn& progress = {});
ResultTable run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// M = round(r N / (1 - r)).
long long outliers_for_ratio(long long N, double r);

struct CodimSummary {
  int c = 0;
  double r = 0.0;
  int trials = 0;
  double exact_fraction = 0.0;
  double within2_fraction = 0.0;
};

/// Exact-recovery fraction of psgm rows per (c, r).
std::vector<CodimSummary> summarize_codim(const ResultTable& table);

enum class ResultFormat { Csv, Json };

/// Format from the extension (.csv or .json); anything else is an error.
ResultFormat result_format_for(const std::filesystem::path& path);

std::string to_csv(const ResultTable& table);
ResultTable table_from_csv(const std::string& text);
nlohmann::json to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::json& j);

void persist(const ResultTable& table, const std::filesystem::path& path);
void persist(const ResultTable& table, const std::filesystem::path& path, ResultFormat format);
ResultTable load_results(const std::filesystem::path& path);

/// Tab-separated aggregate per (cell, method): the cell coordinates, the
/// method, the metric name, its mean and the row count.
std::string plotdata_tsv(const ResultTable& table);
void write_plotdata(const ResultTable& table, const std::filesystem::path& path);

}  // namespace dpcp
