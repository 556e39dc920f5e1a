#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kls/distributions.hpp"
#include "kls/metrics.hpp"
#include "kls/rng.hpp"
#include "kls/stats.hpp"

namespace kls {

struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
  std::string id = "h";
};

// Tilted particle cloud. Log-weights are the exact closed form
// c'x - (t/2)||x||^2 + const, recomputable from (t, c) alone, so no error
// accumulates across steps.
struct LocalizationState {
  double t = 0.0;
  Eigen::VectorXd c;
  Eigen::MatrixXd cloud;        // M x n, fixed after init
  Eigen::VectorXd sq_norms;     // cached ||x_i||^2
  Eigen::VectorXd log_weights;  // unnormalized
  Eigen::VectorXd weights;      // normalized
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
  double ess = 0.0;

  int particles() const { return static_cast<int>(cloud.rows()); }
  int dim() const { return static_cast<int>(cloud.cols()); }

  double weighted_fraction(const Halfspace& hs) const;
};

struct StepOptions {
  double ess_floor_frac = 0.02;  // hard halt below this fraction of M
};

LocalizationState init_cloud(const DistributionSpec& spec, int particles,
                             std::uint64_t seed);

// Recomputes weights, mu and cov from (t, c) via log-sum-exp and a weighted
// two-pass covariance.
void refresh(LocalizationState& state);

// Euler-Maruyama update of dc = dW + mu dt. Returns false when the cloud is
// degenerate (ESS below floor); the state is still updated.
bool step(LocalizationState& state, double dt, Rng& rng,
          const StepOptions& options = {});

// Closed-form mean/covariance of the tilted standard Gaussian:
// mu = c/(1+t), cov = I/(1+t).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_oracle(
    int n, double t, const Eigen::VectorXd& c);

struct TraceRow {
  double t = 0.0;
  double mu_norm = 0.0;
  double a_op = 0.0;
  double tr_a2 = 0.0;
  double phi_q = 0.0;
  double ess = 0.0;
  // Deviation from the tilted-Gaussian closed form; exact content only when
  // the initial law is gaussian.
  double oracle_a_dev = 0.0;   // ||A_t - I/(1+t)||_op
  double oracle_mu_dev = 0.0;  // ||mu_t - c_t/(1+t)||
  std::vector<double> g;  // one entry per tracked halfspace
};

struct LocalizationTrace {
  int q = 2;
  std::vector<std::string> set_ids;
  std::vector<TraceRow> rows;
  bool degenerate = false;
};

LocalizationTrace run_trace(const DistributionSpec& spec, double T, double dt,
                            int q, const std::vector<Halfspace>& halfspaces,
                            int particles, std::uint64_t seed,
                            const StepOptions& options = {});

// Deterministic trace of the Gaussian closed form A_t = I/(1+t); the
// potential and its drift have no stochastic component on this path.
LocalizationTrace oracle_trace(int n, double T, double dt, int q);

// Analytic drift of Tr((A-I)^q): -q Tr((A-I)^{q-1} A^2).
double phi_drift(const Eigen::MatrixXd& A, int q);

struct MartingaleResult {
  double g0_mean = 0.0;
  double gT_mean = 0.0;
  double gT_se = 0.0;
  double freq_mid = 0.0;  // fraction of runs with g_T in [1/4, 3/4]
  int runs = 0;
  int degenerate_runs = 0;
  MetricReport report;  // |mean g_T - g_0| vs 3 SE
};

MartingaleResult martingale_check(const DistributionSpec& spec,
                                  const Halfspace& halfspace, double T,
                                  double dt, int runs, int particles,
                                  std::uint64_t seed);

// Couples <x,y> with L = int sqrt(Tr A_t^2) dW against the same scalar
// Brownian increments; per run the squared difference up to T plus a decay
// tail closure. Returns the squared-distance estimate; `tail_mean` is the
// average closure term.
struct CoupledCltResult {
  Estimate squared;  // W_2(<x,y>, L)^2 upper-bound sample mean
  double tail_mean = 0.0;
};

CoupledCltResult coupled_clt_distance(const DistributionSpec& specP,
                                      const DistributionSpec& specQ, double T,
                                      double dt, int runs, int particles,
                                      std::uint64_t seed);

// P(sup_{s<=t} W_s >= a) against 2 P(W_t >= a) on the same paths.
struct ReflectionResult {
  double p_sup = 0.0;
  double p_end = 0.0;
  double diff_se = 0.0;
  MetricReport report;  // |p_sup - 2 p_end| vs 3 SE of the difference
};

ReflectionResult brownian_reflection_check(double t, double a, int paths,
                                           int steps, std::uint64_t seed);

}  // namespace kls
