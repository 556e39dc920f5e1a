#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "kls/distributions.hpp"
#include "kls/matfun.hpp"

namespace kls {

// Trial tally for one inequality. Stochastic checks count a violation only
// when the estimated gap is separated from zero by 3 standard errors;
// deterministic checks count any failure beyond the scaled tolerance.
struct IneqTrialReport {
  std::string lemma_id;
  int trials = 0;
  int violations = 0;
  double worst_slack = 0.0;  // min over trials of rhs - lhs
  int ci_flagged = 0;        // point estimate exceeded rhs but within CI

  void merge(const IneqTrialReport& other);
};

// Tr(AB) <= (Tr|A|^s)^{1/s} (Tr|B|^t)^{1/t}, 1/s + 1/t = 1.
bool check_matrix_holder(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double s, double t);

// Tr((B^{1/2} A B^{1/2})^r) <= Tr(B^{r/2} A^r B^{r/2}), A, B PSD, r >= 1.
bool check_lieb_thirring(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double r);

// Tr(A^a B A^{1-a} B) <= Tr(A B^2), A PSD, B symmetric, a in [0,1].
bool check_lieb(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                double alpha);

// Both evaluation routes of T_p(A,B,I) over the empirical measure: the
// V-statistic over all ordered pairs and sum_i Tr(A D_i B D_i) with
// D_i = E_hat[x x' x_i]. Algebraically identical; we report round-off.
struct TequResult {
  double vstat = 0.0;
  double delta_route = 0.0;
  double rel_deviation = 0.0;
};
TequResult tequ_identity(const DistributionSpec& spec,
                         const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         int samples, std::uint64_t seed);

IneqTrialReport check_tequ_identity(const DistributionSpec& spec,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, int samples,
                                    std::uint64_t seed);

// T(B1,B2,B3) <= T(|B1|,|B2|,|B3|), shared pairs.
IneqTrialReport check_trabs(const DistributionSpec& spec,
                            const Eigen::MatrixXd& B1,
                            const Eigen::MatrixXd& B2,
                            const Eigen::MatrixXd& B3, long pairs,
                            std::uint64_t seed);

struct TinqConstants {
  double psi_hat = 1.26;  // plug-in halfspace estimate
  double alpha = 1.0;
  double beta = 0.0;
  double s = 2.0;  // item 5 exponents
  double t = 2.0;
};

// Items 1 and 5 are hard CI-separated checks; items 2-4 report slack
// against the plug-in constants only.
IneqTrialReport check_tinq(const DistributionSpec& spec, int item,
                           const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           long pairs, std::uint64_t seed,
                           const TinqConstants& constants = {});

// T(B^{1/2}A^a B^{1/2}, B^{1/2}A^{1-a}B^{1/2}, C) <= T(B^{1/2}AB^{1/2}, B, C).
IneqTrialReport check_liebtr_tensor(const DistributionSpec& spec,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B,
                                    const Eigen::MatrixXd& C, double alpha,
                                    long pairs, std::uint64_t seed);

// Seeded multi-trial runners used by the CLI and the acceptance suite.
IneqTrialReport holder_trials(int trials, int n, EnsembleKind kind,
                              std::uint64_t seed, double s = 2.0,
                              double t = 2.0);
IneqTrialReport lieb_thirring_trials(int trials, int n, EnsembleKind kind,
                                     double r, std::uint64_t seed);
IneqTrialReport lieb_trials(int trials, int n, EnsembleKind kind, double alpha,
                            std::uint64_t seed);
IneqTrialReport trabs_trials(const DistributionSpec& spec, int trials,
                             long pairs, std::uint64_t seed);
IneqTrialReport tinq_trials(const DistributionSpec& spec, int item, int trials,
                            long pairs, std::uint64_t seed,
                            const TinqConstants& constants = {});
IneqTrialReport liebtr_trials(const DistributionSpec& spec, int trials,
                              long pairs, double alpha, std::uint64_t seed);
// PSD positivity: T(A1,A2,A3) >= -3 SE for PSD triples.
IneqTrialReport psd_positivity_trials(const DistributionSpec& spec, int trials,
                                      long pairs, std::uint64_t seed);

}  // namespace kls
