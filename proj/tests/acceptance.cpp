// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "dpcp/dpcp.hpp"

namespace {

using namespace dpcp;
using Clock = std::chrono::steady_clock;

constexpr Seed kMaster = 20240607;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double line_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::min(1.0, std::abs(a.dot(b))));
}

// Each randomized run returns a canonical text artifact; reruns must reproduce it byte for byte.
struct Artifacts {
  std::map<std::string, std::string> text;
};

std::string fixed_point_run(std::string* out_detail, double* worst_angle, double* elapsed) {
  const auto start = Clock::now();
  std::ostringstream artifact;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Seed s = derive_seed(kMaster, {1, static_cast<std::uint64_t>(t)});
    const auto model = sample_haar_subspace(20, 15, derive_seed(s, {0}));
    const Eigen::VectorXd b0 = Rng(derive_seed(s, {1})).unit_vector(20);
    const auto run = continuous_psgm_run(ContinuousProblem(model, 0.5), b0);
    const double a = line_angle(run.b, continuous_fixed_point(model, b0));
    worst = std::max(worst, a);
    artifact << t << ',' << format_double(a) << ',' << run.iterations << '\n';
  }
  *elapsed = seconds_since(start);
  *worst_angle = worst;
  if (out_detail) *out_detail = fmt("max angle %.3g rad, %.2f s", worst, *elapsed);
  return artifact.str();
}

ExperimentConfig continuous_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::ContinuousCheck;
  c.D = 20;
  c.d = 15;
  c.c_prime = 8;
  c.trials = 50;
  c.p = 0.5;
  c.seed = kMaster;
  return c;
}

ExperimentConfig full_scale_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::PhaseTransition;
  c.D = 200;
  c.d = 195;
  c.c_prime = 10;
  c.N_values = {1500};
  c.M_values = {1500};
  c.trials = 10;
  c.methods = {Method::Psgm, Method::RsgmCprime};
  c.schedule = StepSchedule::mbls();
  c.seed = kMaster;
  return c;
}

ExperimentConfig codim_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::CodimSweep;
  c.D = 200;
  c.N = 1500;
  c.codims = {10, 12, 14, 16, 18, 20};
  c.ratios = {0.6, 0.7};
  c.c_prime = 30;
  c.trials = 10;
  c.methods = {Method::Psgm};
  c.seed = kMaster;
  return c;
}

ExperimentConfig pursuit_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::OutlierPursuit;
  c.ratios = {0.8, 0.9};
  c.c_prime = 10;
  c.rsgm_c = 5;
  c.seed = kMaster;
  return c;
}

std::string monte_carlo_heights(std::map<int, double>* estimates) {
  std::ostringstream artifact;
  for (int d : {2, 3, 5, 10, 50}) {
    Rng rng(derive_seed(kMaster, {8, static_cast<std::uint64_t>(d)}));
    double total = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) total += std::abs(rng.unit_vector(d)(0));
    (*estimates)[d] = total / n;
    artifact << d << ',' << format_double(total / n) << '\n';
  }
  return artifact.str();
}

std::string finite_difference_run(double* worst) {
  std::ostringstream artifact;
  *worst = 0.0;
  Rng rng(derive_seed(kMaster, {9}));
  const double h = 1e-6;
  int done = 0;
  while (done < 100) {
    const Eigen::Index D = 3 + static_cast<Eigen::Index>(rng.below(8));
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.below(40));
    const Eigen::MatrixXd X = rng.normal_matrix(D, n);
    const Eigen::VectorXd b = rng.unit_vector(D);
    const Eigen::VectorXd v = rng.unit_vector(D);
    const Eigen::VectorXd lo = X.transpose() * (b - h * v), hi = X.transpose() * (b + h * v);
    if ((lo.array().sign() != hi.array().sign()).any()) continue;
    const double fd = (objective(X, b + h * v) - objective(X, b - h * v)) / (2 * h);
    const double err = std::abs(fd - subgradient(X, b).dot(v));
    *worst = std::max(*worst, err);
    artifact << done << ',' << format_double(err) << '\n';
    ++done;
  }
  return artifact.str();
}

std::string recursion_run(double* worst) {
  const Seed s = derive_seed(kMaster, {10});
  const auto model = sample_haar_subspace(30, 25, derive_seed(s, {0}));
  const auto data = generate_dataset(model, 600, 400, derive_seed(s, {1}));
  const double M = 400, cD = hemisphere_height(30);
  const Eigen::MatrixXd& Sp = model.basis_sperp();
  *worst = 0.0;
  SolverConfig cfg;
  cfg.c_prime = 10;
  cfg.seed = derive_seed(s, {2});
  cfg.schedule = StepSchedule::mbls();
  cfg.observer = [&](const StepEvent& ev) {
    const Eigen::VectorXd e_o = average_terms(data, ev.b_hat).o_avg - cD * ev.b_hat;
    const Eigen::VectorXd r = Sp.transpose() * ev.b_next - (1 - ev.mu * M * cD) * (Sp.transpose() * ev.b_hat) +
                              ev.mu * M * (Sp.transpose() * e_o);
    *worst = std::max(*worst, r.norm());
  };
  const auto basis = psgm_multi(data, cfg);
  std::ostringstream artifact;
  write_trace_csv(artifact, basis.traces());
  return artifact.str();
}

void report(int id, const std::string& name, const Outcome& o, int* failures) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << o.detail << ")"
            << std::endl;
  if (!o.pass) ++*failures;
}

}  // namespace

int main() {
  int failures = 0;
  Artifacts first;

  // 1. Continuous fixed point.
  {
    std::string detail;
    double worst = 0.0, elapsed = 0.0;
    first.text["1"] = fixed_point_run(&detail, &worst, &elapsed);
    report(1, "continuous limit equals closed-form fixed point", {worst < 1e-6 && elapsed < 10.0, detail}, &failures);
  }

  // 2. Continuous span recovery.
  {
    const auto table = run_continuous_check(continuous_config());
    first.text["2"] = to_csv(table);
    int good = 0;
    double worst = 0.0;
    for (const auto& row : table.rows) {
      const double dist = row.report.projection_distance.value_or(1.0);
      worst = std::max(worst, dist);
      good += row.error.empty() && row.report.estimated_codim == 5 && dist < 1e-8;
    }
    report(2, "continuous span recovery D=20 c=5 c'=8",
           {good == 50, fmt("%.0f/50 trials, max projection distance %.3g", good, worst)}, &failures);
  }

  // 3 and 6. Full-scale recovery and the orthogonality contrast on the same cells.
  ResultTable full_scale;
  {
    const auto start = Clock::now();
    full_scale = run_phase_transition(full_scale_config());
    const double elapsed = seconds_since(start);
    first.text["3"] = to_csv(full_scale);
    std::map<int, const ResultRow*> psgm, rsgm;
    for (const auto& row : full_scale.rows) (row.method == "psgm" ? psgm : rsgm)[row.trial] = &row;
    int good = 0;
    for (const auto& [t, row] : psgm)
      good += row->error.empty() && row->report.estimated_codim == 5 && row->report.projection_distance.value_or(1.0) < 1e-2;
    report(3, "full-scale recovery D=200 c=5 c'=10",
           {good >= 9 && elapsed < 300.0, fmt("%.0f/10 seeds, %.1f s including the baseline", good, elapsed)}, &failures);

    int contrast = 0;
    double min_far = 1e9;
    for (const auto& [t, r] : rsgm) {
      const ResultRow* p = psgm.at(t);
      const double far = r->extra_value("far_columns").value_or(0.0);
      min_far = std::min(min_far, far);
      const bool worse = r->error.empty() && p->error.empty() && far >= 5 &&
                         r->report.outlier_f1.value_or(1.0) < p->report.outlier_f1.value_or(0.0) &&
                         r->report.projection_distance.value_or(0.0) > p->report.projection_distance.value_or(1.0);
      contrast += worse;
    }
    report(6, "RSGM with c'=10 fails where PSGM succeeds",
           {contrast == 10, fmt("%.0f/10 cells strictly worse, min far columns %.0f", contrast, min_far)}, &failures);
  }

  // 4 and 5. Codimension sweep.
  {
    const auto start = Clock::now();
    const auto table = run_codim_sweep(codim_config());
    const double elapsed = seconds_since(start);
    first.text["4"] = to_csv(table);
    int exact6 = 0, n6 = 0, close7 = 0, n7 = 0;
    for (const auto& row : table.rows) {
      const int c = static_cast<int>(*row.cell_value("c"));
      const bool ok = row.error.empty();
      if (*row.cell_value("r") == 0.6) {
        ++n6;
        exact6 += ok && row.report.estimated_codim == c;
      } else {
        ++n7;
        close7 += ok && std::abs(row.report.estimated_codim - c) <= 2;
      }
    }
    report(4, "codimension sweep r=0.6 exact",
           {n6 == 60 && exact6 == n6, fmt("%.0f/%.0f exact, sweep took %.0f s", exact6, n6, elapsed)}, &failures);
    report(5, "codimension sweep r=0.7 within 2",
           {n7 == 60 && close7 >= 0.8 * n7, fmt("%.0f/%.0f within 2", close7, n7)}, &failures);
  }

  // 7. Outlier pursuit proxy.
  {
    const auto table = run_outlier_pursuit(pursuit_config());
    first.text["7"] = to_csv(table);
    bool ok = table.rows.size() == 6;
    std::ostringstream detail;
    for (const auto& row : table.rows) {
      const double f1 = row.report.outlier_f1.value_or(-1.0);
      const bool good = row.error.empty() && (row.method == "rsgm_cprime" ? f1 <= 0.1 : f1 >= 0.98);
      ok = ok && good;
      detail << row.method << "@r=" << *row.cell_value("r") << " F1=" << fmt("%.3f", f1) << ' ';
    }
    std::string d = detail.str();
    if (!d.empty()) d.pop_back();
    report(7, "outlier pursuit proxy F1 targets", {ok, d}, &failures);
  }

  // 8. Hemisphere constants.
  {
    std::map<int, double> mc;
    first.text["8"] = monte_carlo_heights(&mc);
    bool ok = hemisphere_height(2) == 2.0 / std::numbers::pi && hemisphere_height(3) == 0.5 &&
              hemisphere_height(5) == 0.375;
    double worst = 0.0;
    for (const auto& [d, v] : mc) worst = std::max(worst, std::abs(v - hemisphere_height(d)));
    ok = ok && worst < 3e-3;
    report(8, "hemisphere heights exact and Monte Carlo", {ok, fmt("max Monte Carlo deviation %.2e", worst)}, &failures);
  }

  // 9. Subgradient finite differences.
  {
    double worst = 0.0;
    first.text["9"] = finite_difference_run(&worst);
    report(9, "subgradient matches central differences", {worst < 1e-5, fmt("max error %.2e over 100 triples", worst)},
           &failures);
  }

  // 10. Scaled-perturbed recursion.
  {
    double worst = 0.0;
    first.text["10"] = recursion_run(&worst);
    report(10, "scaled-perturbed recursion identity", {worst < 1e-10, fmt("max residual %.2e over 10 traces", worst)},
           &failures);
  }

  // 11. Procrustes identities.
  {
    const auto A = sample_haar_subspace(9, 3, 11).basis_s();
    const double self = subspace_distance(A, A);
    double ortho_err = 0.0;
    for (int c = 1; c <= 4; ++c) {
      const auto m = sample_haar_subspace(2 * c + 1, c, static_cast<Seed>(c));
      ortho_err = std::max(ortho_err, std::abs(subspace_distance(m.basis_s(), m.basis_sperp().leftCols(c)) -
                                               std::sqrt(2.0 * c)));
    }
    const auto B4 = sample_haar_subspace(4, 2, 12).basis_s(), A4 = sample_haar_subspace(4, 2, 13).basis_s();
    double grid = 1e300;
    for (int i = 0; i < 5000; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 5000;
      Eigen::Matrix2d rot, ref;
      rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      ref << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
      grid = std::min({grid, (B4 - A4 * rot).norm(), (B4 - A4 * ref).norm()});
    }
    const double grid_err = std::abs(subspace_distance(B4, A4) - grid);
    report(11, "Procrustes distance identities",
           {self < 1e-12 && ortho_err < 1e-9 && grid_err < 1e-3,
            fmt("self %.1e, orthogonal %.1e, grid %.1e", self, ortho_err, grid_err)},
           &failures);
  }

  // 12. Recovery condition in the continuous limit.
  {
    const int D = 200;
    const auto stats = continuous_limit_stats(D, 195, 1500, 1500, OutlierLimit::InlierHeight);
    ScheduleParams sched{{1e-4}, 0.5, 10, 10};
    bool ok = true;
    double max_rhs = 0.0, prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    for (int cp = 1; cp <= D; ++cp) {
      const double kappa = kappa_and_r(sched, stats, 1500, 1500, static_cast<std::size_t>(cp)).kappa;
      const auto r = recovery_condition(cp, D, stats, kappa);
      max_rhs = std::max(max_rhs, std::abs(r.rhs));
      if (cp <= D / 4) ok = ok && r.condition_holds;
      decreasing = decreasing && r.margin < prev;
      prev = r.margin;
    }
    ok = ok && max_rhs <= 1e-12 && decreasing;
    report(12, "recovery condition in the continuous limit",
           {ok, fmt("max |RHS| %.1e, holds for c' <= 50, margin decreasing %.0f", max_rhs, decreasing ? 1.0 : 0.0)},
           &failures);
  }

  // 13. Determinism: repeat every randomized run.
  {
    Artifacts second;
    double worst = 0.0, elapsed = 0.0;
    second.text["1"] = fixed_point_run(nullptr, &worst, &elapsed);
    second.text["2"] = to_csv(run_continuous_check(continuous_config()));
    second.text["3"] = to_csv(run_phase_transition(full_scale_config()));
    second.text["4"] = to_csv(run_codim_sweep(codim_config()));
    second.text["7"] = to_csv(run_outlier_pursuit(pursuit_config()));
    std::map<int, double> mc;
    second.text["8"] = monte_carlo_heights(&mc);
    second.text["9"] = finite_difference_run(&worst);
    second.text["10"] = recursion_run(&worst);
    std::string mismatched;
    for (const auto& [k, v] : first.text)
      if (second.text[k] != v) mismatched += (mismatched.empty() ? "" : ",") + k;
    report(13, "reruns reproduce byte-identical results",
           {mismatched.empty(), mismatched.empty() ? std::to_string(first.text.size()) + " artifacts identical"
                                                   : "differs for " + mismatched},
           &failures);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
