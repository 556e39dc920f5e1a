#include <doctest.h>

#include <cmath>

#include "kls/distributions.hpp"
#include "kls/localization.hpp"
#include "kls/matfun.hpp"
#include "kls/stats.hpp"

using namespace kls;

namespace {

double chi_thin_shell(int n) {
  const double mean_chi =
      std::sqrt(2.0) * std::exp(std::lgamma((n + 1) / 2.0) -
                                std::lgamma(n / 2.0));
  return 2.0 * n - 2.0 * std::sqrt(static_cast<double>(n)) * mean_chi;
}

}  // namespace

TEST_CASE("init_cloud: uniform weights, ESS = M, near-isotropic moments") {
  const auto spec = make_distribution(Family::kGaussian, 4);
  const int M = 20000;
  const auto state = init_cloud(spec, M, 11);
  CHECK(state.t == 0.0);
  CHECK(state.c.isZero());
  CHECK(state.ess == doctest::Approx(static_cast<double>(M)));
  CHECK(std::abs(state.weights.sum() - 1.0) < 1e-12);
  CHECK(state.mu.norm() < 3.0 * std::sqrt(4.0 / M));
  CHECK_THROWS(init_cloud(spec, 100, 1));
}

TEST_CASE("step: dt = 0 leaves the tilt and law untouched") {
  const auto spec = make_distribution(Family::kGaussian, 3);
  auto state = init_cloud(spec, 2000, 21);
  const auto mu0 = state.mu;
  Rng rng(22);
  CHECK(step(state, 0.0, rng));
  CHECK(state.t == 0.0);
  CHECK(state.mu == mu0);
  CHECK(std::abs(state.weights.sum() - 1.0) < 1e-12);
}

TEST_CASE("step: weights renormalize and ESS shrinks under tilt") {
  const auto spec = make_distribution(Family::kCube, 4);
  auto state = init_cloud(spec, 5000, 31);
  Rng rng(32);
  for (int k = 0; k < 50; ++k) {
    CHECK(step(state, 0.01, rng));
    CHECK(std::abs(state.weights.sum() - 1.0) < 1e-12);
  }
  CHECK(state.t == doctest::Approx(0.5));
  CHECK(state.ess < 5000.0);
  CHECK(state.ess > 100.0);
}

TEST_CASE("gaussian_oracle closed form") {
  Eigen::VectorXd c(2);
  c << 1.0, -2.0;
  auto [mu0, cov0] = gaussian_oracle(2, 0.0, Eigen::VectorXd::Zero(2));
  CHECK(mu0.isZero());
  CHECK(cov0.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  auto [mu1, cov1] = gaussian_oracle(2, 1.0, c);
  CHECK(mu1.isApprox(c / 2.0));
  CHECK(cov1.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("oracle trace: potential equals n (t/(1+t))^q and drift matches") {
  for (int q : {2, 4}) {
    const auto trace = oracle_trace(8, 1.5, 1e-3, q);
    CHECK(trace.q == q);
    for (const auto& row : trace.rows) {
      const double expected = 8.0 * std::pow(row.t / (1.0 + row.t), q);
      CHECK(std::abs(row.phi_q - expected) < 1e-12);
      CHECK(row.phi_q >= 0.0);
    }
    // centered finite differences vs the analytic drift, away from endpoints
    int checked = 0;
    for (std::size_t k = 20; k + 20 < trace.rows.size(); k += 50) {
      const double t = trace.rows[k].t;
      const double dt = trace.rows[k + 1].t - trace.rows[k].t;
      const double fd =
          (trace.rows[k + 1].phi_q - trace.rows[k - 1].phi_q) / (2.0 * dt);
      const Eigen::MatrixXd A =
          Eigen::MatrixXd::Identity(8, 8) / (1.0 + t);
      const double drift = phi_drift(A, q);
      if (std::abs(drift) > 1e-6) {
        CHECK(std::abs(fd - drift) / std::abs(drift) < 0.05);
        ++checked;
      }
    }
    CHECK(checked > 5);
  }
}

TEST_CASE("phi_drift sign: potential increases away from identity") {
  // For A = I/(1+t), (A-I) is negative, q even => drift positive.
  const Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(3, 3);
  CHECK(phi_drift(A, 2) > 0.0);
}

TEST_CASE("run_trace on the gaussian family tracks the conjugacy oracle") {
  const auto spec = make_distribution(Family::kGaussian, 4);
  Halfspace hs{Eigen::VectorXd::Unit(4, 0), 0.0, "h"};
  const auto trace = run_trace(spec, 1.0, 2e-3, 2, {hs}, 30000, 41);
  CHECK_FALSE(trace.degenerate);
  REQUIRE(!trace.rows.empty());
  CHECK(std::abs(trace.rows.front().g[0] - 0.5) <
        3.0 * std::sqrt(0.25 / 30000));
  double prev_t = -1.0;
  double max_dev = 0.0;
  for (const auto& row : trace.rows) {
    CHECK(row.t > prev_t);
    prev_t = row.t;
    CHECK(row.phi_q >= 0.0);
    max_dev = std::max(max_dev, row.oracle_a_dev);
  }
  CHECK(max_dev < 0.1);
  CHECK_THROWS(run_trace(spec, 1.0, 2e-3, 3, {hs}, 30000, 41));
}

TEST_CASE("operator norm stays below 2/t for t >= 1") {
  const auto spec = make_distribution(Family::kCube, 4);
  const auto trace = run_trace(spec, 1.5, 2e-3, 2, {}, 20000, 51);
  for (const auto& row : trace.rows)
    if (row.t >= 1.0 && !trace.degenerate) CHECK(row.a_op <= 2.0 / row.t);
}

TEST_CASE("operator-norm concentration probe at T = 0.1/sqrt(n)") {
  const int n = 32;
  const double T = 0.1 / std::sqrt(static_cast<double>(n));
  for (const char* name : {"gaussian", "cube"}) {
    const auto spec = make_distribution(name, n);
    int exceed = 0;
    const int runs = 50;
    for (int r = 0; r < runs; ++r) {
      const auto trace = run_trace(spec, T, T / 16, 2, {}, 5000, 61 + r);
      double max_op = 0.0;
      for (const auto& row : trace.rows) max_op = std::max(max_op, row.a_op);
      if (max_op >= 2.0) ++exceed;
    }
    CHECK(static_cast<double>(exceed) / runs <= 0.05);
  }
}

TEST_CASE("structural audit of the potential decomposition") {
  // Reconstruct drift and martingale parts of Phi along one run and check:
  // max |drift| * T <= U/8 and QV <= (U/8)^2 imply max Phi <= U.
  const auto spec = make_distribution(Family::kGaussian, 8);
  const int q = 2;
  const double dt = 2e-3, T = 1.0;
  auto state = init_cloud(spec, 30000, 71);
  Rng rng(72);
  StepOptions opt;
  opt.ess_floor_frac = 0.002;  // transient ESS dips past 2% are fine here
  double max_phi = 0.0, max_drift = 0.0, qv = 0.0;
  double prev_phi = 0.0;
  bool first = true;
  while (state.t < T) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.cov);
    const double phi = (eig.eigenvalues().array() - 1.0).pow(q).sum();
    const double drift = phi_drift(state.cov, q);
    if (!first) {
      const double mart = phi - prev_phi - drift * dt;
      qv += mart * mart;
    }
    first = false;
    prev_phi = phi;
    max_phi = std::max(max_phi, phi);
    max_drift = std::max(max_drift, std::abs(drift));
    REQUIRE(step(state, dt, rng, opt));
  }
  const double U = 8.0 * std::max(max_drift * T, std::sqrt(qv));
  if (max_drift * T <= U / 8.0 && qv <= (U / 8.0) * (U / 8.0))
    CHECK(max_phi <= U);
}

TEST_CASE("martingale of halfspace measures") {
  const auto spec = make_distribution(Family::kGaussian, 2);
  Halfspace hs{Eigen::VectorXd::Unit(2, 0), 0.0, "h"};
  const auto result = martingale_check(spec, hs, 0.5, 2e-3, 40, 5000, 81);
  CHECK(result.runs == 40);
  CHECK(result.report.satisfied);
  CHECK(std::abs(result.g0_mean - 0.5) < 0.05);
  // closed form for the mid-band frequency is 2 Phi(0.6745/sqrt(T)) - 1
  CHECK(std::abs(result.freq_mid - 0.665) < 0.25);
  const auto short_run = martingale_check(spec, hs, 0.15, 2e-3, 40, 5000, 82);
  CHECK(short_run.freq_mid >= 0.85);
  CHECK_THROWS(martingale_check(spec, hs, 0.5, 2e-3, 10, 5000, 83));
}

TEST_CASE("coupled CLT distance matches the thin-shell oracle") {
  const auto gauss = make_distribution(Family::kGaussian, 16);
  const auto result = coupled_clt_distance(gauss, gauss, 1.0, 1e-3, 400, 0, 91);
  const double oracle = chi_thin_shell(16);
  CHECK(std::abs(result.squared.value - oracle) <
        3.0 * result.squared.std_error + 0.02 * oracle);
  CHECK(result.tail_mean >= 0.0);
  CHECK(result.tail_mean < result.squared.value);
}

TEST_CASE("brownian reflection principle") {
  const auto zero = brownian_reflection_check(1.0, 0.0, 5000, 100, 101);
  CHECK(zero.p_sup == doctest::Approx(1.0));
  CHECK(2.0 * zero.p_end == doctest::Approx(1.0).epsilon(0.05));

  const auto unit = brownian_reflection_check(1.0, 1.0, 20000, 2000, 102);
  CHECK(unit.report.satisfied);
  const double oracle = 2.0 * (1.0 - normal_cdf(1.0));
  CHECK(std::abs(2.0 * unit.p_end - oracle) < 0.02);
  CHECK(std::abs(unit.p_sup - oracle) < 0.05);
}

TEST_CASE("reflection discretization bias shrinks with step count") {
  const double oracle = 2.0 * (1.0 - normal_cdf(1.0));
  int fine_wins = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto coarse = brownian_reflection_check(1.0, 1.0, 4000, 250,
                                                  200 + rep);
    const auto fine = brownian_reflection_check(1.0, 1.0, 4000, 4000,
                                                200 + rep);
    if (std::abs(fine.p_sup - oracle) < std::abs(coarse.p_sup - oracle))
      ++fine_wins;
  }
  CHECK(fine_wins > 10);
}
