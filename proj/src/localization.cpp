#include "kls/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace kls {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_of(
    const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("covariance eigendecomposition failed");
  return solver;
}

TraceRow make_row(const LocalizationState& state, int q,
                  const std::vector<Halfspace>& halfspaces) {
  TraceRow row;
  row.t = state.t;
  row.mu_norm = state.mu.norm();
  auto solver = eig_of(state.cov);
  row.a_op = solver.eigenvalues().cwiseAbs().maxCoeff();
  row.tr_a2 = solver.eigenvalues().array().square().sum();
  double phi = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i)
    phi += std::pow(solver.eigenvalues()(i) - 1.0, q);
  row.phi_q = phi;
  row.ess = state.ess;
  auto [oracle_mu, oracle_cov] =
      gaussian_oracle(state.dim(), state.t, state.c);
  auto dev_solver = eig_of(state.cov - oracle_cov);
  row.oracle_a_dev = dev_solver.eigenvalues().cwiseAbs().maxCoeff();
  row.oracle_mu_dev = (state.mu - oracle_mu).norm();
  for (const auto& hs : halfspaces) row.g.push_back(state.weighted_fraction(hs));
  return row;
}

}  // namespace

double LocalizationState::weighted_fraction(const Halfspace& hs) const {
  const Eigen::VectorXd proj = cloud * hs.normal;
  double g = 0.0;
  for (int i = 0; i < proj.size(); ++i)
    if (proj(i) > hs.offset) g += weights(i);
  return g;
}

LocalizationState init_cloud(const DistributionSpec& spec, int particles,
                             std::uint64_t seed) {
  if (particles < 1000)
    throw std::invalid_argument("init_cloud: need at least 1000 particles");
  LocalizationState state;
  state.t = 0.0;
  state.c = Eigen::VectorXd::Zero(spec.dim);
  state.cloud = sample(spec, particles, seed).data;
  state.sq_norms = state.cloud.rowwise().squaredNorm();
  refresh(state);
  return state;
}

void refresh(LocalizationState& state) {
  state.log_weights = state.cloud * state.c - 0.5 * state.t * state.sq_norms;
  const double m = state.log_weights.maxCoeff();
  state.weights = (state.log_weights.array() - m).exp();
  state.weights /= state.weights.sum();
  state.ess = 1.0 / state.weights.squaredNorm();

  state.mu = state.cloud.transpose() * state.weights;
  // Weighted two-pass: subtract the weighted mean before forming the Gram
  // matrix, which keeps late-time near-point-mass clouds stable.
  Eigen::MatrixXd centered = state.cloud.rowwise() - state.mu.transpose();
  state.cov = centered.transpose() *
              (centered.array().colwise() * state.weights.array()).matrix();
}

bool step(LocalizationState& state, double dt, Rng& rng,
          const StepOptions& options) {
  if (dt < 0.0) throw std::invalid_argument("step: dt must be >= 0");
  Eigen::VectorXd xi(state.dim());
  for (int i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  state.c += std::sqrt(dt) * xi + state.mu * dt;
  state.t += dt;
  refresh(state);
  return state.ess >= options.ess_floor_frac * state.particles();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_oracle(
    int n, double t, const Eigen::VectorXd& c) {
  if (t < 0.0) throw std::invalid_argument("gaussian_oracle: t must be >= 0");
  return {c / (1.0 + t),
          Eigen::MatrixXd::Identity(n, n) / (1.0 + t)};
}

LocalizationTrace run_trace(const DistributionSpec& spec, double T, double dt,
                            int q, const std::vector<Halfspace>& halfspaces,
                            int particles, std::uint64_t seed,
                            const StepOptions& options) {
  if (q < 2 || q % 2 != 0)
    throw std::invalid_argument("run_trace: q must be an even integer >= 2");
  if (T <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("run_trace: T and dt must be positive");

  LocalizationTrace trace;
  trace.q = q;
  for (const auto& hs : halfspaces) trace.set_ids.push_back(hs.id);

  LocalizationState state = init_cloud(spec, particles, seed);
  Rng rng = Rng(seed).derive(0x10c41);
  trace.rows.push_back(make_row(state, q, halfspaces));
  const long steps = std::lround(T / dt);
  for (long k = 0; k < steps; ++k) {
    const bool ok = step(state, dt, rng, options);
    trace.rows.push_back(make_row(state, q, halfspaces));
    if (!ok) {
      trace.degenerate = true;
      break;
    }
  }
  return trace;
}

LocalizationTrace oracle_trace(int n, double T, double dt, int q) {
  LocalizationTrace trace;
  trace.q = q;
  const long steps = std::lround(T / dt);
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    TraceRow row;
    row.t = t;
    row.mu_norm = 0.0;
    const double lam = 1.0 / (1.0 + t);
    row.a_op = lam;
    row.tr_a2 = n * lam * lam;
    row.phi_q = n * std::pow(t / (1.0 + t), q);
    row.ess = 0.0;
    trace.rows.push_back(row);
  }
  return trace;
}

double phi_drift(const Eigen::MatrixXd& A, int q) {
  const Eigen::MatrixXd diff =
      A - Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int k = 0; k < q - 1; ++k) power = power * diff;
  return -q * (power * A * A).trace();
}

MartingaleResult martingale_check(const DistributionSpec& spec,
                                  const Halfspace& halfspace, double T,
                                  double dt, int runs, int particles,
                                  std::uint64_t seed) {
  if (runs < 30) throw std::invalid_argument("martingale_check: runs >= 30");
  MartingaleResult result;
  result.runs = runs;
  Rng root(seed);

  double sum_g0 = 0.0, sum_gT = 0.0, sumsq_gT = 0.0;
  int mid = 0;
  const long steps = std::lround(T / dt);
  for (int r = 0; r < runs; ++r) {
    LocalizationState state =
        init_cloud(spec, particles, seed + 1000003ULL * (r + 1));
    Rng rng = root.derive(r);
    sum_g0 += state.weighted_fraction(halfspace);
    bool ok = true;
    for (long k = 0; k < steps && ok; ++k) ok = step(state, dt, rng);
    if (!ok) result.degenerate_runs += 1;
    const double gT = state.weighted_fraction(halfspace);
    sum_gT += gT;
    sumsq_gT += gT * gT;
    if (gT >= 0.25 && gT <= 0.75) ++mid;
  }
  result.g0_mean = sum_g0 / runs;
  result.gT_mean = sum_gT / runs;
  const double var =
      (sumsq_gT - sum_gT * sum_gT / runs) / std::max(1, runs - 1);
  result.gT_se = std::sqrt(std::max(0.0, var) / runs);
  result.freq_mid = static_cast<double>(mid) / runs;

  result.report.name = "martingale_g";
  result.report.lhs = std::abs(result.gT_mean - result.g0_mean);
  result.report.rhs = 3.0 * result.gT_se;
  result.report.slack = result.report.rhs - result.report.lhs;
  result.report.satisfied = result.report.lhs <= result.report.rhs + 1e-12;
  return result;
}

CoupledCltResult coupled_clt_distance(const DistributionSpec& specP,
                                      const DistributionSpec& specQ, double T,
                                      double dt, int runs, int particles,
                                      std::uint64_t seed) {
  if (specP.dim != specQ.dim)
    throw std::invalid_argument("coupled_clt_distance: dimension mismatch");
  const int n = specP.dim;
  const double root_n = std::sqrt(static_cast<double>(n));
  const long steps = std::lround(T / dt);
  const bool gaussian_backend = specP.family == Family::kGaussian;

  Rng root(seed);
  BatchMeans acc(std::min(32, runs));
  double tail_sum = 0.0;

  for (int r = 0; r < runs; ++r) {
    Rng rng = root.derive(r);
    Eigen::MatrixXd yrow(1, n);
    sample_into(specQ, rng, yrow);
    const Eigen::VectorXd y = yrow.transpose();

    double integral = 0.0;
    double last_amp = 0.0;
    double tail = 0.0;
    if (gaussian_backend) {
      // A_t = I/(1+t) in closed form; the amplitude is (||y|| - sqrt(n))/(1+t)
      // and the tail integral int_T^inf amp^2 dt closes exactly.
      const double dev = y.norm() - root_n;
      for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        const double amp = dev / (1.0 + t);
        integral += amp * rng.normal() * std::sqrt(dt);
      }
      last_amp = dev / (1.0 + T);
      tail = last_amp * last_amp * (1.0 + T);
    } else {
      LocalizationState state =
          init_cloud(specP, particles, seed + 1000003ULL * (r + 1));
      Rng step_rng = rng.derive(0x57e9);
      for (long k = 0; k < steps; ++k) {
        const Eigen::MatrixXd& A = state.cov;
        const Eigen::MatrixXd A2 = A * A;
        const double amp =
            std::sqrt(std::max(0.0, y.dot(A2 * y))) - std::sqrt(A2.trace());
        integral += amp * rng.normal() * std::sqrt(dt);
        last_amp = amp;
        if (!step(state, dt, step_rng)) break;
      }
      // ||A_t||_op <= O(1/t) decay extrapolation beyond T.
      tail = last_amp * last_amp * T;
    }
    acc.add(integral * integral + tail);
    tail_sum += tail;
  }

  CoupledCltResult result;
  result.squared = acc.estimate(seed);
  result.tail_mean = tail_sum / runs;
  return result;
}

ReflectionResult brownian_reflection_check(double t, double a, int paths,
                                           int steps, std::uint64_t seed) {
  if (a < 0.0) throw std::invalid_argument("reflection: a must be >= 0");
  if (t <= 0.0 || paths < 1 || steps < 1)
    throw std::invalid_argument("reflection: bad t/paths/steps");
  const double dt = t / steps;
  const double sqdt = std::sqrt(dt);
  Rng root(seed);

  long sup_hits = 0, end_hits = 0;
  double diff_sum = 0.0, diff_sumsq = 0.0;
  for (int p = 0; p < paths; ++p) {
    Rng rng = root.derive(p);
    double w = 0.0, wmax = 0.0;
    for (int k = 0; k < steps; ++k) {
      w += sqdt * rng.normal();
      if (w > wmax) wmax = w;
    }
    const int sup_ind = wmax >= a ? 1 : 0;
    const int end_ind = w >= a ? 1 : 0;
    sup_hits += sup_ind;
    end_hits += end_ind;
    const double d = sup_ind - 2.0 * end_ind;
    diff_sum += d;
    diff_sumsq += d * d;
  }

  ReflectionResult result;
  result.p_sup = static_cast<double>(sup_hits) / paths;
  result.p_end = static_cast<double>(end_hits) / paths;
  const double mean_d = diff_sum / paths;
  const double var_d =
      (diff_sumsq - diff_sum * diff_sum / paths) / std::max(1, paths - 1);
  result.diff_se = std::sqrt(std::max(0.0, var_d) / paths);

  result.report.name = "brownian_reflection";
  result.report.lhs = std::abs(mean_d);
  result.report.rhs = 3.0 * result.diff_se;
  result.report.slack = result.report.rhs - result.report.lhs;
  result.report.satisfied = result.report.lhs <= result.report.rhs + 1e-12;
  return result;
}

}  // namespace kls
