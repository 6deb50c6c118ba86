#include "dpcp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dpcp/dataset.hpp"
#include "dpcp/error.hpp"

namespace dpcp {

double hemisphere_height(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidDimension, "hemisphere height needs k >= 1");
  // Running ratio (j-2)/(j-1) avoids forming the double factorials.
  const bool even = k % 2 == 0;
  double ratio = 1.0;
  for (int j = even ? 4 : 3; j <= k; j += 2) ratio *= static_cast<double>(j - 2) / static_cast<double>(j - 1);
  return even ? ratio * 2.0 / std::numbers::pi : ratio;
}

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) { return v.unaryExpr([](double x) { return sgn(x); }); }

class AverageObjective {
 public:
  explicit AverageObjective(Eigen::MatrixXd y) : y_(std::move(y)), scale_(1.0 / static_cast<double>(y_.cols())) {}

  Eigen::Index dim() const { return y_.rows(); }
  double value(const Eigen::VectorXd& z) const { return scale_ * (y_.transpose() * z).lpNorm<1>(); }
  Eigen::VectorXd subgradient(const Eigen::VectorXd& z) const {
    return scale_ * (y_ * sign_vector(y_.transpose() * z));
  }
  /// Values at each column of `z`.
  Eigen::VectorXd values(const Eigen::MatrixXd& z) const {
    return scale_ * (y_.transpose() * z).cwiseAbs().colwise().sum().transpose();
  }

 private:
  Eigen::MatrixXd y_;
  double scale_;
};

// Geodesic steps of decreasing length along the tangential subgradient.
double refine_min(const AverageObjective& obj, Eigen::VectorXd z, const EstimatorOptions& options, double* step_out) {
  double f = obj.value(z);
  double step = 0.5;
  for (int it = 0; it < options.max_refine_iters && step >= options.tol; ++it) {
    Eigen::VectorXd g = obj.subgradient(z);
    g -= g.dot(z) * z;
    const double gnorm = g.norm();
    if (gnorm == 0.0) break;
    Eigen::VectorXd cand = std::cos(step) * z - std::sin(step) * (g / gnorm);
    cand.normalize();
    const double fc = obj.value(cand);
    if (fc < f) {
      z = std::move(cand);
      f = fc;
      step = std::min(1.0, step * 1.25);
    } else {
      step *= 0.5;
    }
  }
  *step_out = step;
  return f;
}

// Sign fixed-point ascent: z <- normalize(Y Sgn(Y^T z)) never decreases the value.
double refine_max(const AverageObjective& obj, Eigen::VectorXd z, const EstimatorOptions& options) {
  double f = obj.value(z);
  for (int it = 0; it < options.max_refine_iters; ++it) {
    Eigen::VectorXd g = obj.subgradient(z);
    const double gnorm = g.norm();
    if (gnorm == 0.0) break;
    Eigen::VectorXd cand = g / gnorm;
    const double fc = obj.value(cand);
    if (!(fc > f)) break;
    z = std::move(cand);
    f = fc;
  }
  return f;
}

std::vector<std::size_t> best_indices(const std::vector<double>& values, int count, bool largest) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 0)), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return largest ? values[a] > values[b] : (values[a] < values[b]);
                    });
  idx.resize(k);
  return idx;
}

void require_points(const Eigen::MatrixXd& points) {
  if (points.cols() == 0) throw Error(ErrorKind::EmptyDataset, "estimator needs at least one point");
}

}  // namespace

Estimate estimate_extremal_average(const Eigen::MatrixXd& points, const Eigen::MatrixXd* restrict_basis,
                                   ExtremalMode mode, const EstimatorOptions& options) {
  require_points(points);
  if (restrict_basis && restrict_basis->rows() != points.rows())
    throw Error(ErrorKind::DimensionMismatch, "restriction basis does not match the ambient dimension");
  // Work in coordinates of the restriction subspace: b = U z, ||z|| = 1.
  AverageObjective obj(restrict_basis ? Eigen::MatrixXd(restrict_basis->transpose() * points) : points);
  const bool maximize = mode == ExtremalMode::Max;

  Rng rng(derive_seed(options.seed, {static_cast<std::uint64_t>(mode), 0x65787472ULL}));
  constexpr int kChunk = 64;
  const int n_samples = std::max(options.n_samples, 1);
  std::vector<Eigen::VectorXd> probes;
  std::vector<double> values;
  probes.reserve(static_cast<std::size_t>(n_samples));
  values.reserve(static_cast<std::size_t>(n_samples));
  for (int start = 0; start < n_samples; start += kChunk) {
    const int count = std::min(kChunk, n_samples - start);
    Eigen::MatrixXd z(obj.dim(), count);
    for (int j = 0; j < count; ++j) z.col(j) = rng.unit_vector(obj.dim());
    const Eigen::VectorXd v = obj.values(z);
    for (int j = 0; j < count; ++j) {
      probes.emplace_back(z.col(j));
      values.push_back(v(j));
    }
  }

  Estimate est;
  est.n_samples = n_samples;
  est.one_sided_bound = maximize ? "lower" : "upper";
  est.value = maximize ? *std::max_element(values.begin(), values.end())
                       : *std::min_element(values.begin(), values.end());
  double achieved = 0.0;
  for (std::size_t i : best_indices(values, options.n_restarts, maximize)) {
    double step = 0.0;
    const double refined = maximize ? refine_max(obj, probes[i], options) : refine_min(obj, probes[i], options, &step);
    achieved = std::max(achieved, step);
    est.value = maximize ? std::max(est.value, refined) : std::min(est.value, refined);
    ++est.n_restarts;
  }
  est.achieved_tol = achieved;
  return est;
}

Estimate estimate_eta(const Eigen::MatrixXd& points, const Eigen::MatrixXd* projector_basis,
                      const EstimatorOptions& options) {
  require_points(points);
  if (projector_basis) {
    if (projector_basis->rows() != points.rows())
      throw Error(ErrorKind::DimensionMismatch, "projector basis does not match the ambient dimension");
    // For b = U z the integrand equals ||(I - z z^T) Y Sgn(Y^T z)|| with Y = U^T points.
    const Eigen::MatrixXd coords = projector_basis->transpose() * points;
    return estimate_eta(coords, nullptr, options);
  }
  const double scale = 1.0 / static_cast<double>(points.cols());
  const Eigen::Index D = points.rows();
  auto value = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd v = points * sign_vector(points.transpose() * b);
    return scale * (v - b * b.dot(v)).norm();
  };

  Rng rng(derive_seed(options.seed, {0x657461ULL}));
  const int n_samples = std::max(options.n_samples, 1);
  std::vector<Eigen::VectorXd> probes;
  std::vector<double> values;
  for (int i = 0; i < n_samples; ++i) {
    probes.push_back(rng.unit_vector(D));
    values.push_back(value(probes.back()));
  }

  Estimate est;
  est.n_samples = n_samples;
  est.one_sided_bound = "lower";
  est.value = *std::max_element(values.begin(), values.end());
  const double floor_step = std::max(options.tol, 1e-6);
  double achieved = 0.0;
  for (std::size_t i : best_indices(values, options.n_restarts, true)) {
    Eigen::VectorXd z = probes[i];
    double f = values[i];
    double sigma = 0.3;
    int failures = 0;
    for (int it = 0; it < options.max_refine_iters && sigma >= floor_step; ++it) {
      Eigen::VectorXd cand = z + sigma * rng.normal_vector(D) / std::sqrt(static_cast<double>(D));
      cand.normalize();
      const double fc = value(cand);
      if (fc > f) {
        z = std::move(cand);
        f = fc;
        failures = 0;
      } else if (++failures >= 5) {
        sigma *= 0.5;
        failures = 0;
      }
    }
    achieved = std::max(achieved, sigma);
    est.value = std::max(est.value, f);
    ++est.n_restarts;
  }
  est.achieved_tol = achieved;
  return est;
}

GeometryStats estimate_geometry_stats(const DataMatrix& matrix, const SubspaceModel& subspace,
                                      const EstimatorOptions& options) {
  if (!matrix.has_labels()) throw Error(ErrorKind::MissingLabels, "geometry statistics need inlier/outlier labels");
  if (matrix.ambient_dim() != subspace.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "subspace and data dimensions differ");
  const Eigen::MatrixXd X = matrix.columns_with(Label::Inlier);
  const Eigen::MatrixXd O = matrix.columns_with(Label::Outlier);

  GeometryStats stats;
  stats.c_d = hemisphere_height(static_cast<int>(subspace.inlier_dim()));
  stats.c_D = hemisphere_height(static_cast<int>(subspace.ambient_dim()));
  auto opts = [&](std::uint64_t key) {
    EstimatorOptions o = options;
    o.seed = derive_seed(options.seed, {key});
    return o;
  };
  double achieved = 0.0;
  auto take = [&](const Estimate& e) {
    achieved = std::max(achieved, e.achieved_tol);
    return e.value;
  };
  const Eigen::MatrixXd& S = subspace.basis_s();
  if (X.cols() > 0) {
    stats.c_X_min = take(estimate_extremal_average(X, &S, ExtremalMode::Min, opts(1)));
    stats.c_X_max = take(estimate_extremal_average(X, &S, ExtremalMode::Max, opts(2)));
    stats.eta_X = take(estimate_eta(X, &S, opts(3)));
  }
  if (O.cols() > 0) {
    stats.c_O_min = take(estimate_extremal_average(O, nullptr, ExtremalMode::Min, opts(4)));
    stats.c_O_max = take(estimate_extremal_average(O, nullptr, ExtremalMode::Max, opts(5)));
    stats.eta_O = take(estimate_eta(O, nullptr, opts(6)));
  }
  auto& meta = stats.estimation_meta;
  meta.n_samples = options.n_samples;
  meta.n_restarts = options.n_restarts;
  meta.achieved_tol = achieved;
  meta.seed = options.seed;
  meta.n_inliers = X.cols();
  meta.n_outliers = O.cols();
  meta.ambient_dim = subspace.ambient_dim();
  meta.inlier_dim = subspace.inlier_dim();
  meta.bounds = "estimated";
  return stats;
}

GeometryStats continuous_limit_stats(int D, int d, long long N, long long M, OutlierLimit outliers) {
  if (d < 1 || d >= D) throw Error(ErrorKind::InvalidDimension, "need 1 <= d < D");
  GeometryStats stats;
  stats.c_d = hemisphere_height(d);
  stats.c_D = hemisphere_height(D);
  stats.c_X_min = stats.c_X_max = stats.c_d;
  stats.c_O_min = stats.c_O_max = outliers == OutlierLimit::AmbientHeight ? stats.c_D : stats.c_d;
  stats.estimation_meta.n_inliers = N;
  stats.estimation_meta.n_outliers = M;
  stats.estimation_meta.ambient_dim = D;
  stats.estimation_meta.inlier_dim = d;
  return stats;
}

// --- theoretical conditions --------------------------------------------------

void ScheduleParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidConfig, "beta must lie in (0, 1)");
  if (K0 < 1 || K_star < 1) throw Error(ErrorKind::InvalidConfig, "K0 and K* must be >= 1");
  for (double m : mu0)
    if (!(m > 0.0)) throw Error(ErrorKind::InvalidConfig, "mu0 must be positive");
}

double ScheduleParams::mu0_for(std::size_t instance) const {
  if (mu0.empty()) throw Error(ErrorKind::InvalidConfig, "no initial step size given");
  return mu0.size() == 1 ? mu0.front() : mu0.at(instance);
}

InitCheck check_init_condition(double theta0, const GeometryStats& stats, double N, double M) {
  const double signal = N * stats.c_X_min;
  const double noise = N * stats.eta_X + M * stats.eta_O;
  const double limit = noise == 0.0 ? std::numbers::pi / 2.0 : std::atan(signal / noise);
  const double angle_margin = limit - theta0;
  const double scale_margin = signal - noise;
  return {angle_margin > 0.0 && scale_margin >= 0.0, std::min(angle_margin, scale_margin)};
}

double mu_prime(const GeometryStats& stats, double N, double M) {
  const double scale = std::max(N * stats.c_X_min, M * stats.c_O_max);
  if (!(scale > 0.0)) throw Error(ErrorKind::UndefinedScale, "N c_X,min and M c_O,max are both zero");
  return 1.0 / (4.0 * scale);
}

double k_diamond(double mu, double theta0, const GeometryStats& stats, double N, double M) {
  const double t = std::tan(theta0);
  const double noise = N * stats.eta_X + M * stats.eta_O;
  const double denom = mu * (N * stats.c_X_min - std::max(1.0, t) * noise);
  if (!(denom > 0.0))
    throw Error(ErrorKind::ConditionViolated, "N c_X,min <= max{1, tan theta0} (N eta_X + M eta_O); K0 cannot be certified");
  return t / denom;
}

double beta_upper_bound(double mu0, const GeometryStats& stats, double N, double M, int K_star) {
  const double contraction = 1.0 - mu0 * M * stats.c_D;
  if (!(contraction > 0.0)) throw Error(ErrorKind::InvalidStep, "mu0 M c_D must be below 1");
  const double growth = 1.0 + mu0 * (N * (stats.eta_X + stats.c_X_max) + M * (stats.eta_O + stats.c_O_max));
  return std::pow(contraction / growth, static_cast<double>(K_star));
}

KappaResult kappa_and_r(const ScheduleParams& schedule, const GeometryStats& stats, double N, double M,
                        std::size_t n_instances) {
  schedule.validate();
  const std::size_t count = n_instances ? n_instances : schedule.mu0.size();
  if (count == 0) throw Error(ErrorKind::InvalidConfig, "no instances to evaluate");
  KappaResult out;
  const double beta_root = std::pow(schedule.beta, 1.0 / schedule.K_star);
  const double warmup = std::pow(schedule.beta, static_cast<double>(schedule.K0) / schedule.K_star);
  out.kappa = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double mu0 = schedule.mu0_for(i);
    const double contraction = 1.0 - mu0 * M * stats.c_D;
    if (!(contraction > 0.0))
      throw Error(ErrorKind::InvalidStep, "instance " + std::to_string(i) + ": mu0 M c_D must be below 1");
    const double growth = 1.0 + mu0 * (N * (stats.eta_X + stats.c_X_max) + M * (stats.eta_O + stats.c_O_max));
    const double r = growth / contraction * beta_root;
    if (!(r < 1.0))
      throw Error(ErrorKind::DivergentSeries,
                  "instance " + std::to_string(i) + ": r = " + std::to_string(r) + " >= 1 (beta too large)");
    out.r_list.push_back(r);
    out.kappa = std::max(out.kappa, M * mu0 / (warmup * (1.0 - r)));
  }
  return out;
}

TheoryReport recovery_condition(int c_prime, int D, const GeometryStats& stats, double kappa,
                                const TheoryConstants& constants) {
  if (c_prime < 1 || D < c_prime) throw Error(ErrorKind::InvalidDimension, "need 1 <= c' <= D");
  TheoryReport report;
  report.constants = constants;
  report.kappa = kappa;
  const double cp = c_prime;
  report.lhs = 1.0 - constants.C1 * std::sqrt(cp / D) - constants.epsilon / std::sqrt(static_cast<double>(D));
  report.rhs = std::sqrt(cp) * kappa * (stats.eta_O + stats.c_O_max - stats.c_d);
  report.delta_bound = report.rhs;
  report.margin = report.lhs - report.rhs;
  report.condition_holds = report.margin > 0.0;
  report.probability_lower_bound =
      std::max(0.0, 1.0 - 2.0 * std::exp(-constants.epsilon * constants.epsilon * constants.C2));
  return report;
}

TheoryReport evaluate_theory(const GeometryStats& stats, double N, double M, int D, int c_prime, double theta0,
                             const ScheduleParams& schedule, const TheoryConstants& constants) {
  const KappaResult k = kappa_and_r(schedule, stats, N, M, static_cast<std::size_t>(c_prime));
  TheoryReport report = recovery_condition(c_prime, D, stats, k.kappa, constants);
  report.r_list = k.r_list;
  try {
    report.mu_prime = mu_prime(stats, N, M);
  } catch (const Error&) {
  }
  try {
    report.K_diamond = k_diamond(schedule.mu0_for(0), theta0, stats, N, M);
  } catch (const Error&) {
  }
  double beta_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c_prime; ++i)
    beta_max = std::min(beta_max, beta_upper_bound(schedule.mu0_for(static_cast<std::size_t>(i)), stats, N, M,
                                                   schedule.K_star));
  report.beta_max = beta_max;
  const InitCheck init = check_init_condition(theta0, stats, N, M);
  report.init_condition_holds = init.holds;
  report.init_margin = init.margin;
  return report;
}

// --- serialization -------------------------------------------------------------

namespace {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const GeometryStats& s) {
  const auto& m = s.estimation_meta;
  return {{"c_X_min", s.c_X_min},
          {"c_X_max", s.c_X_max},
          {"c_O_min", s.c_O_min},
          {"c_O_max", s.c_O_max},
          {"eta_X", s.eta_X},
          {"eta_O", s.eta_O},
          {"c_d", s.c_d},
          {"c_D", s.c_D},
          {"estimation_meta",
           {{"n_samples", m.n_samples},
            {"n_restarts", m.n_restarts},
            {"achieved_tol", m.achieved_tol},
            {"seed", m.seed},
            {"n_inliers", m.n_inliers},
            {"n_outliers", m.n_outliers},
            {"ambient_dim", m.ambient_dim},
            {"inlier_dim", m.inlier_dim},
            {"bounds", m.bounds}}}};
}

GeometryStats geometry_stats_from_json(const nlohmann::json& j) {
  GeometryStats s;
  try {
    s.c_X_min = j.at("c_X_min").get<double>();
    s.c_X_max = j.at("c_X_max").get<double>();
    s.c_O_min = j.at("c_O_min").get<double>();
    s.c_O_max = j.at("c_O_max").get<double>();
    s.eta_X = j.at("eta_X").get<double>();
    s.eta_O = j.at("eta_O").get<double>();
    s.c_d = j.at("c_d").get<double>();
    s.c_D = j.at("c_D").get<double>();
    if (j.contains("estimation_meta")) {
      const auto& m = j.at("estimation_meta");
      auto& out = s.estimation_meta;
      out.n_samples = m.value("n_samples", 0);
      out.n_restarts = m.value("n_restarts", 0);
      out.achieved_tol = m.value("achieved_tol", 0.0);
      out.seed = m.value("seed", Seed{0});
      out.n_inliers = m.value("n_inliers", 0LL);
      out.n_outliers = m.value("n_outliers", 0LL);
      out.ambient_dim = m.value("ambient_dim", 0LL);
      out.inlier_dim = m.value("inlier_dim", 0LL);
      out.bounds = m.value("bounds", std::string("analytic"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("geometry stats: ") + e.what());
  }
  return s;
}

nlohmann::json to_json(const TheoryReport& r) {
  return {{"condition_holds", r.condition_holds},
          {"margin", r.margin},
          {"probability_lower_bound", opt(r.probability_lower_bound)},
          {"kappa", r.kappa},
          {"r_list", r.r_list},
          {"delta_bound", r.delta_bound},
          {"mu_prime", opt(r.mu_prime)},
          {"K_diamond", opt(r.K_diamond)},
          {"beta_max", opt(r.beta_max)},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"C1", r.constants.C1},
          {"C2", r.constants.C2},
          {"epsilon", r.constants.epsilon},
          {"init_condition_holds", opt(r.init_condition_holds)},
          {"init_margin", opt(r.init_margin)},
          {"note", r.note}};
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix, std::ostringstream& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else if (it->is_array()) {
      out << key << '=';
      for (std::size_t i = 0; i < it->size(); ++i) {
        if (i) out << ';';
        out << format_double((*it)[i].get<double>());
      }
      out << '\n';
    } else if (it->is_number_float()) {
      out << key << '=' << format_double(it->get<double>()) << '\n';
    } else if (it->is_null()) {
      out << key << "=n/a\n";
    } else if (it->is_string()) {
      out << key << '=' << it->get<std::string>() << '\n';
    } else {
      out << key << '=' << it->dump() << '\n';
    }
  }
}

}  // namespace

std::string to_key_value(const GeometryStats& stats) {
  std::ostringstream out;
  flatten(to_json(stats), "", out);
  return out.str();
}

std::string to_key_value(const TheoryReport& report) {
  std::ostringstream out;
  flatten(to_json(report), "", out);
  return out.str();
}

}  // namespace dpcp
