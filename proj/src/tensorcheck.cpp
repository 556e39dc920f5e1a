#include "kls/tensorcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "kls/moments.hpp"
#include "kls/stats.hpp"

namespace kls {

namespace {

double det_tolerance(double scale) { return 1e-9 * std::max(1.0, scale); }

// Gap estimate lhs - rhs from paired batch means; CI-separated when the
// mean gap exceeds 3 standard errors of the gap.
struct GapStats {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double gap_se = 0.0;
};

GapStats gap_from_batches(const std::vector<double>& lhs_b,
                          const std::vector<double>& rhs_b) {
  const std::size_t B = lhs_b.size();
  GapStats g;
  std::vector<double> diff(B);
  for (std::size_t b = 0; b < B; ++b) {
    g.lhs += lhs_b[b];
    g.rhs += rhs_b[b];
    diff[b] = lhs_b[b] - rhs_b[b];
  }
  g.lhs /= B;
  g.rhs /= B;
  g.gap = g.lhs - g.rhs;
  double ss = 0.0;
  for (double d : diff) ss += (d - g.gap) * (d - g.gap);
  if (B > 1) g.gap_se = std::sqrt(ss / (B - 1) / B);
  return g;
}

void record_stochastic(IneqTrialReport& report, const GapStats& g,
                       bool hard_check) {
  report.trials += 1;
  const double slack = -g.gap;
  if (report.trials == 1 || slack < report.worst_slack)
    report.worst_slack = slack;
  if (g.gap > 3.0 * g.gap_se) {
    if (hard_check)
      report.violations += 1;
    else
      report.ci_flagged += 1;
  } else if (g.gap > 0.0) {
    report.ci_flagged += 1;
  }
}

void record_deterministic(IneqTrialReport& report, double lhs, double rhs,
                          double scale) {
  report.trials += 1;
  const double slack = rhs - lhs;
  if (report.trials == 1 || slack < report.worst_slack)
    report.worst_slack = slack;
  if (lhs > rhs + det_tolerance(scale)) report.violations += 1;
}

}  // namespace

void IneqTrialReport::merge(const IneqTrialReport& other) {
  if (trials == 0) worst_slack = other.worst_slack;
  else if (other.trials > 0)
    worst_slack = std::min(worst_slack, other.worst_slack);
  trials += other.trials;
  violations += other.violations;
  ci_flagged += other.ci_flagged;
}

bool check_matrix_holder(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double s, double t) {
  require_symmetric(A, "matrix_holder A");
  require_symmetric(B, "matrix_holder B");
  if (std::abs(1.0 / s + 1.0 / t - 1.0) > 1e-9)
    throw std::invalid_argument("matrix_holder: 1/s + 1/t must equal 1");
  const double lhs = (A * B).trace();
  const double rhs = std::pow(trace_abs_pow(A, s), 1.0 / s) *
                     std::pow(trace_abs_pow(B, t), 1.0 / t);
  return lhs <= rhs + det_tolerance(rhs);
}

bool check_lieb_thirring(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double r) {
  if (!is_psd(A) || !is_psd(B))
    throw std::invalid_argument("lieb_thirring: inputs must be PSD");
  if (r < 1.0) throw std::invalid_argument("lieb_thirring: r must be >= 1");
  const Eigen::MatrixXd Bh = psd_pow(B, 0.5);
  const Eigen::MatrixXd Brh = psd_pow(B, r / 2.0);
  const Eigen::MatrixXd inner = Bh * A * Bh;
  const double lhs = trace_abs_pow(inner, r);
  const double rhs = (Brh * psd_pow(A, r) * Brh).trace();
  return lhs <= rhs + det_tolerance(std::abs(rhs));
}

bool check_lieb(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                double alpha) {
  if (!is_psd(A)) throw std::invalid_argument("lieb: A must be PSD");
  require_symmetric(B, "lieb B");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("lieb: alpha outside [0,1]");
  const double lhs =
      (psd_pow(A, alpha) * B * psd_pow(A, 1.0 - alpha) * B).trace();
  const double rhs = (A * B * B).trace();
  return lhs <= rhs + det_tolerance(std::abs(rhs));
}

TequResult tequ_identity(const DistributionSpec& spec,
                         const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         int samples, std::uint64_t seed) {
  require_symmetric(A, "tequ A");
  require_symmetric(B, "tequ B");
  const int n = spec.dim;
  const SampleMatrix sm = sample(spec, samples, seed);
  const Eigen::MatrixXd& X = sm.data;
  const long N = X.rows();

  const Eigen::MatrixXd Ma = X * A * X.transpose();
  const Eigen::MatrixXd Mb = X * B * X.transpose();
  const Eigen::MatrixXd Md = X * X.transpose();
  const Eigen::ArrayXXd prod =
      Ma.array() * Mb.array() * Md.array();
  TequResult result;
  result.vstat = prod.sum() / (static_cast<double>(N) * N);
  const double scale =
      prod.abs().sum() / (static_cast<double>(N) * N);

  double other = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd delta =
        X.transpose() * X.col(i).asDiagonal() * X / N;
    other += (A * delta * B * delta).trace();
  }
  result.delta_route = other;
  result.rel_deviation =
      std::abs(result.vstat - other) / std::max(scale, 1.0);
  return result;
}

IneqTrialReport check_tequ_identity(const DistributionSpec& spec,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B, int samples,
                                    std::uint64_t seed) {
  const TequResult r = tequ_identity(spec, A, B, samples, seed);
  IneqTrialReport report;
  report.lemma_id = "tequ";
  report.trials = 1;
  report.worst_slack = r.rel_deviation;
  report.violations = r.rel_deviation > 1e-10 ? 1 : 0;
  return report;
}

IneqTrialReport check_trabs(const DistributionSpec& spec,
                            const Eigen::MatrixXd& B1,
                            const Eigen::MatrixXd& B2,
                            const Eigen::MatrixXd& B3, long pairs,
                            std::uint64_t seed) {
  std::vector<TensorTriple> triples{
      {B1, B2, B3}, {sym_abs(B1), sym_abs(B2), sym_abs(B3)}};
  auto accs = tensor_batches(spec, triples, pairs, seed);
  IneqTrialReport report;
  report.lemma_id = "trabs";
  record_stochastic(report,
                    gap_from_batches(accs[0].batch_means(),
                                     accs[1].batch_means()),
                    /*hard_check=*/true);
  return report;
}

IneqTrialReport check_tinq(const DistributionSpec& spec, int item,
                           const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           long pairs, std::uint64_t seed,
                           const TinqConstants& constants) {
  const int n = spec.dim;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  IneqTrialReport report;
  report.lemma_id = "tinq" + std::to_string(item);

  switch (item) {
    case 1: {
      std::vector<TensorTriple> triples{{A, I, I}, {I, I, I}};
      auto accs = tensor_batches(spec, triples, pairs, seed);
      const double a_op = operator_norm(A);
      auto lhs_b = accs[0].batch_means();
      auto rhs_b = accs[1].batch_means();
      for (auto& v : rhs_b) v *= a_op;
      record_stochastic(report, gap_from_batches(lhs_b, rhs_b), true);
      return report;
    }
    case 2: {
      std::vector<TensorTriple> triples{{A, I, I}};
      auto accs = tensor_batches(spec, triples, pairs, seed);
      const double rhs = constants.psi_hat * constants.psi_hat *
                         trace_abs_pow(A, 1.0);
      auto lhs_b = accs[0].batch_means();
      std::vector<double> rhs_b(lhs_b.size(), rhs);
      record_stochastic(report, gap_from_batches(lhs_b, rhs_b), false);
      return report;
    }
    case 3: {
      std::vector<TensorTriple> triples{{A, B, I}};
      auto accs = tensor_batches(spec, triples, pairs, seed);
      const double rhs = constants.psi_hat * constants.psi_hat *
                         operator_norm(B) * trace_abs_pow(A, 1.0);
      auto lhs_b = accs[0].batch_means();
      std::vector<double> rhs_b(lhs_b.size(), rhs);
      record_stochastic(report, gap_from_batches(lhs_b, rhs_b), false);
      return report;
    }
    case 4: {
      std::vector<TensorTriple> triples{{A, B, I}};
      auto accs = tensor_batches(spec, triples, pairs, seed);
      // The beta -> 0 limit of (Tr|B|^{1/(2 beta)})^{2 beta} is ||B||_op.
      const double b_term =
          constants.beta > 0.0
              ? std::pow(trace_abs_pow(B, 1.0 / (2.0 * constants.beta)),
                         2.0 * constants.beta)
              : operator_norm(B);
      const double rhs = constants.alpha * constants.alpha *
                         std::max(std::log(static_cast<double>(n)), 1.0) *
                         b_term * trace_abs_pow(A, 1.0);
      auto lhs_b = accs[0].batch_means();
      std::vector<double> rhs_b(lhs_b.size(), rhs);
      record_stochastic(report, gap_from_batches(lhs_b, rhs_b), false);
      return report;
    }
    case 5: {
      const double s = constants.s;
      const double t = constants.t;
      if (std::abs(1.0 / s + 1.0 / t - 1.0) > 1e-9)
        throw std::invalid_argument("tinq5: 1/s + 1/t must equal 1");
      std::vector<TensorTriple> triples{
          {A, B, I},
          {psd_pow(sym_abs(A), s), I, I},
          {psd_pow(sym_abs(B), t), I, I}};
      auto accs = tensor_batches(spec, triples, pairs, seed);
      auto lhs_b = accs[0].batch_means();
      auto as_b = accs[1].batch_means();
      auto bt_b = accs[2].batch_means();
      std::vector<double> rhs_b(lhs_b.size());
      for (std::size_t b = 0; b < rhs_b.size(); ++b)
        rhs_b[b] = std::pow(std::max(as_b[b], 0.0), 1.0 / s) *
                   std::pow(std::max(bt_b[b], 0.0), 1.0 / t);
      record_stochastic(report, gap_from_batches(lhs_b, rhs_b), true);
      return report;
    }
    default:
      throw std::invalid_argument("tinq item must be in {1,...,5}");
  }
}

IneqTrialReport check_liebtr_tensor(const DistributionSpec& spec,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& B,
                                    const Eigen::MatrixXd& C, double alpha,
                                    long pairs, std::uint64_t seed) {
  if (!is_psd(A) || !is_psd(B) || !is_psd(C))
    throw std::invalid_argument("liebtr: inputs must be PSD");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("liebtr: alpha outside [0,1]");
  const Eigen::MatrixXd Bh = psd_pow(B, 0.5);
  const Eigen::MatrixXd lhs_a = Bh * psd_pow(A, alpha) * Bh;
  const Eigen::MatrixXd lhs_b = Bh * psd_pow(A, 1.0 - alpha) * Bh;
  const Eigen::MatrixXd rhs_a = Bh * A * Bh;
  std::vector<TensorTriple> triples{{lhs_a, lhs_b, C}, {rhs_a, B, C}};
  auto accs = tensor_batches(spec, triples, pairs, seed);
  IneqTrialReport report;
  report.lemma_id = "liebtr";
  record_stochastic(report,
                    gap_from_batches(accs[0].batch_means(),
                                     accs[1].batch_means()),
                    true);
  return report;
}

IneqTrialReport holder_trials(int trials, int n, EnsembleKind kind,
                              std::uint64_t seed, double s, double t) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = std::string("matrix_holder/") + ensemble_name(kind);
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    const Eigen::MatrixXd A = draw_matrix(kind, n, rng, std::max(1, n / 2));
    const Eigen::MatrixXd B = draw_matrix(kind, n, rng, std::max(1, n / 2));
    const double lhs = (A * B).trace();
    const double rhs = std::pow(trace_abs_pow(A, s), 1.0 / s) *
                       std::pow(trace_abs_pow(B, t), 1.0 / t);
    record_deterministic(report, lhs, rhs, std::abs(rhs));
  }
  return report;
}

IneqTrialReport lieb_thirring_trials(int trials, int n, EnsembleKind kind,
                                     double r, std::uint64_t seed) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = std::string("lieb_thirring/") + ensemble_name(kind);
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    Eigen::MatrixXd A = draw_matrix(kind, n, rng, std::max(1, n / 2));
    Eigen::MatrixXd B = draw_matrix(kind, n, rng, std::max(1, n / 2));
    if (!is_psd(A)) A = sym_abs(A);
    if (!is_psd(B)) B = sym_abs(B);
    const Eigen::MatrixXd Bh = psd_pow(B, 0.5);
    const Eigen::MatrixXd Brh = psd_pow(B, r / 2.0);
    const double lhs = trace_abs_pow(Bh * A * Bh, r);
    const double rhs = (Brh * psd_pow(A, r) * Brh).trace();
    record_deterministic(report, lhs, rhs, std::abs(rhs));
  }
  return report;
}

IneqTrialReport lieb_trials(int trials, int n, EnsembleKind kind, double alpha,
                            std::uint64_t seed) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = std::string("lieb/") + ensemble_name(kind);
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    Eigen::MatrixXd A = draw_matrix(kind, n, rng, std::max(1, n / 2));
    const Eigen::MatrixXd B = draw_matrix(kind, n, rng, std::max(1, n / 2));
    if (!is_psd(A)) A = sym_abs(A);
    const double lhs =
        (psd_pow(A, alpha) * B * psd_pow(A, 1.0 - alpha) * B).trace();
    const double rhs = (A * B * B).trace();
    record_deterministic(report, lhs, rhs, std::abs(rhs));
  }
  return report;
}

IneqTrialReport trabs_trials(const DistributionSpec& spec, int trials,
                             long pairs, std::uint64_t seed) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = "trabs";
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    const int n = spec.dim;
    const Eigen::MatrixXd B1 = draw_matrix(EnsembleKind::kSymmetricGoe, n, rng);
    const Eigen::MatrixXd B2 = draw_matrix(EnsembleKind::kSymmetricGoe, n, rng);
    const Eigen::MatrixXd B3 = draw_matrix(EnsembleKind::kSymmetricGoe, n, rng);
    report.merge(check_trabs(spec, B1, B2, B3, pairs, seed + 7919 * (k + 1)));
  }
  report.lemma_id = "trabs";
  return report;
}

IneqTrialReport tinq_trials(const DistributionSpec& spec, int item, int trials,
                            long pairs, std::uint64_t seed,
                            const TinqConstants& constants) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = "tinq" + std::to_string(item);
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    const int n = spec.dim;
    const Eigen::MatrixXd A = draw_matrix(EnsembleKind::kSymmetricGoe, n, rng);
    const Eigen::MatrixXd B = draw_matrix(EnsembleKind::kSymmetricGoe, n, rng);
    report.merge(check_tinq(spec, item, A, B, pairs, seed + 7919 * (k + 1),
                            constants));
  }
  report.lemma_id = "tinq" + std::to_string(item);
  return report;
}

IneqTrialReport liebtr_trials(const DistributionSpec& spec, int trials,
                              long pairs, double alpha, std::uint64_t seed) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = "liebtr";
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    const int n = spec.dim;
    const Eigen::MatrixXd A = draw_matrix(EnsembleKind::kPsdWishart, n, rng);
    const Eigen::MatrixXd B = draw_matrix(EnsembleKind::kPsdWishart, n, rng);
    const Eigen::MatrixXd C = draw_matrix(EnsembleKind::kPsdWishart, n, rng);
    report.merge(
        check_liebtr_tensor(spec, A, B, C, alpha, pairs, seed + 7919 * (k + 1)));
  }
  report.lemma_id = "liebtr";
  return report;
}

IneqTrialReport psd_positivity_trials(const DistributionSpec& spec, int trials,
                                      long pairs, std::uint64_t seed) {
  Rng root(seed);
  IneqTrialReport report;
  report.lemma_id = "trabs_psd_positivity";
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.derive(k);
    const int n = spec.dim;
    std::vector<TensorTriple> triples{
        {draw_matrix(EnsembleKind::kPsdWishart, n, rng),
         draw_matrix(EnsembleKind::kPsdWishart, n, rng),
         draw_matrix(EnsembleKind::kPsdWishart, n, rng)}};
    auto accs = tensor_batches(spec, triples, pairs, seed + 7919 * (k + 1));
    auto lhs_b = accs[0].batch_means();
    // T(A1,A2,A3) >= 0: check 0 - T <= 0 with CI separation.
    std::vector<double> zero(lhs_b.size(), 0.0);
    for (auto& v : lhs_b) v = -v;
    GapStats g = gap_from_batches(lhs_b, zero);
    record_stochastic(report, g, true);
  }
  report.lemma_id = "trabs_psd_positivity";
  return report;
}

}  // namespace kls
