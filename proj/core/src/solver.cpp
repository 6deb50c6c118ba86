#include "dpcp/solver.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "dpcp/error.hpp"

namespace dpcp {

StepSchedule StepSchedule::constant(double mu) {
  StepSchedule s;
  s.kind = ScheduleKind::Constant;
  s.mu0 = {mu};
  return s;
}

StepSchedule StepSchedule::piecewise_geometric(const ScheduleParams& params) {
  StepSchedule s;
  s.kind = ScheduleKind::PiecewiseGeometric;
  s.mu0 = params.mu0;
  s.beta = params.beta;
  s.K0 = params.K0;
  s.K_star = params.K_star;
  return s;
}

StepSchedule StepSchedule::mbls(std::vector<double> mu0) {
  StepSchedule s;
  s.kind = ScheduleKind::Mbls;
  s.mu0 = std::move(mu0);
  return s;
}

void StepSchedule::validate() const {
  for (double m : mu0)
    if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::InvalidConfig, "step sizes must be positive and finite");
  switch (kind) {
    case ScheduleKind::Constant:
      break;
    case ScheduleKind::PiecewiseGeometric:
      if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidConfig, "beta must lie in (0, 1)");
      if (K0 < 1 || K_star < 1) throw Error(ErrorKind::InvalidConfig, "K0 and K* must be >= 1");
      break;
    case ScheduleKind::Mbls:
      if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidConfig, "alpha must lie in (0, 1)");
      if (!(shrink > 0.0 && shrink < 1.0)) throw Error(ErrorKind::InvalidConfig, "shrink must lie in (0, 1)");
      if (!(grow > 1.0)) throw Error(ErrorKind::InvalidConfig, "grow must exceed 1");
      if (max_backtracks < 0) throw Error(ErrorKind::InvalidConfig, "max_backtracks must be >= 0");
      break;
  }
}

ScheduleParams StepSchedule::params() const {
  ScheduleParams p;
  p.mu0 = mu0;
  p.beta = beta;
  p.K0 = K0;
  p.K_star = K_star;
  return p;
}

double step_size(const StepSchedule& schedule, double mu0, int k) {
  if (schedule.kind != ScheduleKind::PiecewiseGeometric || k < schedule.K0) return mu0;
  const int exponent = (k - schedule.K0) / schedule.K_star + 1;
  return mu0 * std::pow(schedule.beta, exponent);
}

void SolverConfig::validate() const {
  if (c_prime < 1) throw Error(ErrorKind::InvalidConfig, "c' must be >= 1");
  if (max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
  if (!(stop_tol >= 0.0)) throw Error(ErrorKind::InvalidConfig, "stop_tol must be >= 0");
  if (schedule.mu0.size() > 1 && schedule.mu0.size() != static_cast<std::size_t>(c_prime))
    throw Error(ErrorKind::InvalidConfig, "give one mu0 or one per instance");
  schedule.validate();
}

std::vector<Trace> DualBasis::traces() const {
  std::vector<Trace> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(inst.trace);
  return out;
}

namespace {

Eigen::VectorXd signs(const Eigen::VectorXd& v, bool zero_is_zero) {
  return v.unaryExpr([zero_is_zero](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : (zero_is_zero ? 0.0 : 1.0)); });
}

void check_dims(const Eigen::MatrixXd& points, Eigen::Index rows) {
  if (points.rows() != rows) throw Error(ErrorKind::DimensionMismatch, "vector and data dimensions differ");
}

double angle_from(const std::optional<Eigen::MatrixXd>& complement, const Eigen::VectorXd& b) {
  if (!complement) return std::numeric_limits<double>::quiet_NaN();
  const Eigen::VectorXd inside = *complement * (complement->transpose() * b);
  return std::atan2((b - inside).norm(), inside.norm());
}

// Angle between unit vectors from their chord length.
double movement(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
}

}  // namespace

double objective(const Eigen::MatrixXd& points, const Eigen::VectorXd& b) {
  check_dims(points, b.size());
  return (points.transpose() * b).lpNorm<1>();
}

double objective(const DataMatrix& matrix, const Eigen::MatrixXd& B) {
  check_dims(matrix.points(), B.rows());
  return (matrix.points().transpose() * B).cwiseAbs().sum();
}

Eigen::VectorXd subgradient(const Eigen::MatrixXd& points, const Eigen::VectorXd& b, bool sgn_zero_is_zero) {
  check_dims(points, b.size());
  return points * signs(points.transpose() * b, sgn_zero_is_zero);
}

Eigen::VectorXd subgradient(const DataMatrix& matrix, const Eigen::VectorXd& b, bool sgn_zero_is_zero) {
  return subgradient(matrix.points(), b, sgn_zero_is_zero);
}

double auto_initial_step(const Eigen::MatrixXd& points, const Eigen::VectorXd& b0,
                         const std::optional<GeometryStats>& stats) {
  const Eigen::VectorXd g = subgradient(points, b0);
  const double gg = g.squaredNorm();
  double mu = gg > 0.0 ? objective(points, b0) / gg : 1.0;
  if (stats) {
    const auto& meta = stats->estimation_meta;
    try {
      mu = std::min(mu, mu_prime(*stats, static_cast<double>(meta.n_inliers), static_cast<double>(meta.n_outliers)));
    } catch (const Error&) {
    }
  }
  return mu;
}

InstanceResult psgm_single(const DataMatrix& matrix, const Eigen::VectorXd& b0, const SolverConfig& config,
                           std::size_t instance) {
  const Eigen::MatrixXd& X = matrix.points();
  check_dims(X, b0.size());
  if (std::abs(b0.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidConfig, "initial vector must have unit norm");
  config.schedule.validate();
  const StepSchedule& sched = config.schedule;
  const bool zero_is_zero = config.sgn_zero_is_zero;

  InstanceResult res;
  res.b0 = b0;
  res.mu0 = sched.mu0.empty() ? auto_initial_step(X, b0, config.stats)
                              : sched.mu0.size() == 1 ? sched.mu0.front() : sched.mu0.at(instance);

  Eigen::VectorXd b = b0;
  Eigen::VectorXd proj = X.transpose() * b;
  double f = proj.lpNorm<1>();
  Eigen::VectorXd g = X * signs(proj, zero_is_zero);
  res.trace.push_back({0, f, 0.0, angle_from(config.truth_complement, b), 0, false, {}});

  const bool line_search = sched.kind == ScheduleKind::Mbls;
  double mu_ls = res.mu0;
  Eigen::VectorXd raw(b.size()), cand(b.size()), cand_proj;
  for (int k = 0; k < config.max_iters; ++k) {
    double mu = line_search ? mu_ls : step_size(sched, res.mu0, k);
    int backtracks = 0;
    bool forced = false;
    double fc = 0.0;
    if (line_search) {
      const double gt2 = (g - g.dot(b) * b).squaredNorm();
      while (true) {
        raw = b - mu * g;
        const double n = raw.norm();
        if (n > 0.0) {
          cand = raw / n;
          cand_proj = X.transpose() * cand;
          fc = cand_proj.lpNorm<1>();
          if (fc <= f - sched.alpha * mu * gt2) break;
        }
        if (backtracks == sched.max_backtracks) {
          if (n == 0.0) throw Error(ErrorKind::DegenerateStep, "subgradient step is the zero vector");
          forced = true;
          break;
        }
        mu *= sched.shrink;
        ++backtracks;
      }
    } else {
      while (true) {
        raw = b - mu * g;
        const double n = raw.norm();
        if (n > 0.0) {
          cand = raw / n;
          break;
        }
        if (backtracks == sched.max_backtracks)
          throw Error(ErrorKind::DegenerateStep, "subgradient step is the zero vector");
        mu *= 0.5;
        ++backtracks;
      }
      cand_proj = X.transpose() * cand;
      fc = cand_proj.lpNorm<1>();
    }
    if (config.observer) config.observer(StepEvent{instance, k, b, raw, mu, g});

    const double moved = movement(b, cand);
    b.swap(cand);
    proj.swap(cand_proj);
    f = fc;
    g = X * signs(proj, zero_is_zero);
    res.trace.push_back({k + 1, f, mu, angle_from(config.truth_complement, b), backtracks, forced, {}});
    res.iterations = k + 1;
    if (line_search) mu_ls = mu * sched.grow;
    if (moved < config.stop_tol) {
      res.converged = true;
      break;
    }
  }
  res.b = std::move(b);
  return res;
}

Eigen::VectorXd instance_initial_vector(Eigen::Index D, Seed seed, std::size_t instance) {
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(instance)}));
  return rng.unit_vector(D);
}

DualBasis psgm_multi(const DataMatrix& matrix, const SolverConfig& config) {
  config.validate();
  Eigen::MatrixXd B0(matrix.ambient_dim(), config.c_prime);
  for (int i = 0; i < config.c_prime; ++i)
    B0.col(i) = instance_initial_vector(matrix.ambient_dim(), config.seed, static_cast<std::size_t>(i));
  return psgm_multi(matrix, B0, config);
}

DualBasis psgm_multi(const DataMatrix& matrix, const Eigen::MatrixXd& B0, const SolverConfig& config) {
  SolverConfig cfg = config;
  cfg.c_prime = static_cast<int>(B0.cols());
  cfg.validate();
  check_dims(matrix.points(), B0.rows());
  const std::size_t n = static_cast<std::size_t>(B0.cols());

  DualBasis out;
  out.seed = cfg.seed;
  out.instances.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.instances[i] = psgm_single(matrix, B0.col(static_cast<Eigen::Index>(i)), cfg, i);
        out.instances[i].seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(i)});
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.workers, 1)), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "instance " + std::to_string(i) + ": " + e.detail());
    }
  }

  out.B.resize(matrix.ambient_dim(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out.B.col(static_cast<Eigen::Index>(i)) = out.instances[i].b;
  return out;
}

AverageTerms average_terms(const DataMatrix& matrix, const Eigen::VectorXd& b) {
  if (!matrix.has_labels()) throw Error(ErrorKind::MissingLabels, "average terms need inlier/outlier labels");
  check_dims(matrix.points(), b.size());
  const auto& labels = *matrix.labels();
  const Eigen::VectorXd s = signs(matrix.points().transpose() * b, true);
  AverageTerms t{Eigen::VectorXd::Zero(b.size()), Eigen::VectorXd::Zero(b.size())};
  Eigen::Index n_in = 0, n_out = 0;
  for (Eigen::Index j = 0; j < matrix.size(); ++j) {
    if (labels[static_cast<std::size_t>(j)] == Label::Inlier) {
      t.x_avg += s(j) * matrix.points().col(j);
      ++n_in;
    } else {
      t.o_avg += s(j) * matrix.points().col(j);
      ++n_out;
    }
  }
  if (n_in) t.x_avg /= static_cast<double>(n_in);
  if (n_out) t.o_avg /= static_cast<double>(n_out);
  return t;
}

}  // namespace dpcp
