#include "kls/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kls {

namespace {

constexpr long kPairBlock = 8192;

// Streams 2*block and 2*block+1 feed the x and y sides of each block, so any
// estimator drawing pairs with the same seed sees identical samples.
template <typename Fn>
void for_pair_blocks(const DistributionSpec& specP,
                     const DistributionSpec& specQ, long pairs,
                     std::uint64_t seed, Fn&& fn) {
  if (specP.dim != specQ.dim)
    throw std::invalid_argument("pair specs must share dimension");
  if (pairs < 1) throw std::invalid_argument("pairs must be >= 1");
  Rng root(seed);
  Eigen::MatrixXd X(kPairBlock, specP.dim), Y(kPairBlock, specP.dim);
  for (long start = 0, block = 0; start < pairs;
       start += kPairBlock, ++block) {
    const long rows = std::min(kPairBlock, pairs - start);
    Rng rx = root.derive(2 * block);
    Rng ry = root.derive(2 * block + 1);
    sample_into(specP, rx, X.topRows(rows));
    sample_into(specQ, ry, Y.topRows(rows));
    fn(X.topRows(rows), Y.topRows(rows));
  }
}

template <typename Fn>
void for_sample_blocks(const DistributionSpec& spec, long samples,
                       std::uint64_t seed, Fn&& fn) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  Rng root(seed);
  Eigen::MatrixXd X(kPairBlock, spec.dim);
  for (long start = 0, block = 0; start < samples;
       start += kPairBlock, ++block) {
    const long rows = std::min(kPairBlock, samples - start);
    Rng rx = root.derive(block);
    sample_into(spec, rx, X.topRows(rows));
    fn(X.topRows(rows));
  }
}

Eigen::VectorXd pair_form(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::MatrixXd>& Y,
                          const Eigen::MatrixXd& A) {
  return ((X * A).cwiseProduct(Y)).rowwise().sum();
}

}  // namespace

void require_symmetric(const Eigen::MatrixXd& M, const char* what) {
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
}

Estimate third_moment_inner(const DistributionSpec& specP,
                            const DistributionSpec& specQ, long pairs,
                            std::uint64_t seed) {
  BatchMeans acc(32);
  for_pair_blocks(specP, specQ, pairs, seed,
                  [&](const auto& X, const auto& Y) {
                    Eigen::VectorXd d = (X.cwiseProduct(Y)).rowwise().sum();
                    for (long i = 0; i < d.size(); ++i)
                      acc.add(d(i) * d(i) * d(i));
                  });
  return acc.estimate(seed);
}

std::vector<BatchMeans> tensor_batches(const DistributionSpec& spec,
                                       const std::vector<TensorTriple>& triples,
                                       long pairs, std::uint64_t seed,
                                       int batches) {
  for (const auto& t : triples) {
    require_symmetric(t.A, "tensor_T A");
    require_symmetric(t.B, "tensor_T B");
    require_symmetric(t.C, "tensor_T C");
  }
  std::vector<BatchMeans> accs(triples.size(), BatchMeans(batches));
  for_pair_blocks(spec, spec, pairs, seed, [&](const auto& X, const auto& Y) {
    for (std::size_t k = 0; k < triples.size(); ++k) {
      Eigen::VectorXd u = pair_form(X, Y, triples[k].A);
      Eigen::VectorXd v = pair_form(X, Y, triples[k].B);
      Eigen::VectorXd w = pair_form(X, Y, triples[k].C);
      for (long i = 0; i < u.size(); ++i) accs[k].add(u(i) * v(i) * w(i));
    }
  });
  return accs;
}

Estimate tensor_T(const DistributionSpec& spec, const Eigen::MatrixXd& A,
                  const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                  long pairs, std::uint64_t seed) {
  std::vector<TensorTriple> triples{{A, B, C}};
  return tensor_batches(spec, triples, pairs, seed)[0].estimate(seed);
}

Estimate thin_shell(const DistributionSpec& spec, long samples,
                    std::uint64_t seed) {
  const double root_n = std::sqrt(static_cast<double>(spec.dim));
  BatchMeans acc(32);
  for_sample_blocks(spec, samples, seed, [&](const auto& X) {
    for (long i = 0; i < X.rows(); ++i) {
      const double d = X.row(i).norm() - root_n;
      acc.add(d * d);
    }
  });
  return acc.estimate(seed);
}

Estimate quadratic_form_variance(const DistributionSpec& spec,
                                 const Eigen::MatrixXd& A, long samples,
                                 std::uint64_t seed) {
  require_symmetric(A, "quadratic_form_variance");
  // Batch means over per-batch sample variances.
  const int kB = 32;
  std::vector<std::vector<double>> vals(kB);
  long idx = 0;
  for_sample_blocks(spec, samples, seed, [&](const auto& X) {
    Eigen::VectorXd q = pair_form(X, X, A);
    for (long i = 0; i < q.size(); ++i) vals[idx++ % kB].push_back(q(i));
  });

  auto variance_of = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return v.size() > 1 ? ss / (v.size() - 1) : 0.0;
  };

  std::vector<double> all;
  all.reserve(samples);
  for (auto& v : vals) all.insert(all.end(), v.begin(), v.end());

  Estimate est;
  est.seed = seed;
  est.n_samples = static_cast<long>(all.size());
  est.value = variance_of(all);
  double mean_bv = 0.0;
  std::vector<double> bv;
  for (auto& v : vals)
    if (v.size() > 1) bv.push_back(variance_of(v));
  for (double x : bv) mean_bv += x;
  if (!bv.empty()) mean_bv /= bv.size();
  double ss = 0.0;
  for (double x : bv) ss += (x - mean_bv) * (x - mean_bv);
  if (bv.size() > 1)
    est.std_error = std::sqrt(ss / (bv.size() - 1) / bv.size());
  return est;
}

MetricReport sphere_identity_check(const DistributionSpec& spec, long pairs,
                                   int directions, std::uint64_t seed) {
  const int n = spec.dim;
  // Materialize the shared pairs once; both sides reuse them.
  Eigen::MatrixXd X(pairs, n), Y(pairs, n);
  {
    long row = 0;
    for_pair_blocks(spec, spec, pairs, seed, [&](const auto& Xb, const auto& Yb) {
      X.middleRows(row, Xb.rows()) = Xb;
      Y.middleRows(row, Yb.rows()) = Yb;
      row += Xb.rows();
    });
  }
  Eigen::VectorXd d = (X.cwiseProduct(Y)).rowwise().sum();
  Eigen::VectorXd d2 = d.cwiseProduct(d);
  const double rhs = d2.cwiseProduct(d).mean() / n;

  Rng dir_rng(seed ^ 0x5fe1a3u);
  double sum = 0.0, sumsq = 0.0;
  const int chunk = 64;
  Eigen::MatrixXd Theta(chunk, n);
  for (int start = 0; start < directions; start += chunk) {
    const int rows = std::min(chunk, directions - start);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < n; ++j) Theta(i, j) = dir_rng.normal();
      Theta.row(i).normalize();
    }
    Eigen::MatrixXd px = X * Theta.topRows(rows).transpose();
    Eigen::MatrixXd py = Y * Theta.topRows(rows).transpose();
    for (int c = 0; c < rows; ++c) {
      const double est =
          px.col(c).cwiseProduct(py.col(c)).cwiseProduct(d2).mean();
      sum += est;
      sumsq += est * est;
    }
  }
  const double lhs = sum / directions;
  double se = 0.0;
  if (directions > 1) {
    const double var = (sumsq - sum * sum / directions) / (directions - 1);
    se = std::sqrt(std::max(0.0, var) / directions);
  }

  MetricReport r;
  r.name = "sphere_identity";
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = 3.0 * se - std::abs(lhs - rhs);
  r.satisfied = std::abs(lhs - rhs) <= 3.0 * se + 1e-12;
  return r;
}

CheegerEstimate halfspace_cheeger(const DistributionSpec& spec,
                                  int direction_count, long samples,
                                  std::uint64_t seed) {
  if (direction_count < 1)
    throw std::invalid_argument("direction_count must be >= 1");
  const int n = spec.dim;
  Eigen::MatrixXd S(samples, n);
  {
    Rng root(seed);
    sample_into(spec, root, S);
  }
  Rng dir_rng(seed ^ 0xd17ec7u);

  CheegerEstimate result;
  result.direction_count = direction_count;
  std::vector<double> z(samples);
  for (int k = 0; k < direction_count; ++k) {
    Eigen::VectorXd theta(n);
    if (n == 1) {
      theta(0) = (k % 2 == 0) ? 1.0 : -1.0;
    } else {
      for (int j = 0; j < n; ++j) theta(j) = dir_rng.normal();
      theta.normalize();
    }
    Eigen::Map<Eigen::VectorXd>(z.data(), samples) = S * theta;
    std::vector<double> sorted = z;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[samples / 2];
    const double q25 = sorted[static_cast<long>(0.25 * (samples - 1))];
    const double q75 = sorted[static_cast<long>(0.75 * (samples - 1))];

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= samples;
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (samples - 1));

    // Silverman's rule with the robust spread.
    const double spread = std::min(sd, (q75 - q25) / 1.34);
    const double h =
        0.9 * spread * std::pow(static_cast<double>(samples), -0.2);
    double density = 0.0;
    const double inv_norm = 1.0 / std::sqrt(2.0 * M_PI);
    for (double v : z) {
      const double u = (v - median) / h;
      density += std::exp(-0.5 * u * u);
    }
    density *= inv_norm / (samples * h);
    result.per_direction.push_back(0.5 / density);
  }
  result.value = *std::max_element(result.per_direction.begin(),
                                   result.per_direction.end());
  return result;
}

MetricReport poincare_check(const DistributionSpec& spec,
                            const Eigen::MatrixXd& A, long samples,
                            std::uint64_t seed, double cheeger_estimate,
                            double C) {
  require_symmetric(A, "poincare_check");
  const Estimate var = quadratic_form_variance(spec, A, samples, seed);

  // E||2Ax||^2 on the same sample stream.
  BatchMeans grad(32);
  for_sample_blocks(spec, samples, seed, [&](const auto& X) {
    Eigen::VectorXd g = (X * A).rowwise().squaredNorm() * 4.0;
    for (long i = 0; i < g.size(); ++i) grad.add(g(i));
  });
  const double rhs =
      C * cheeger_estimate * cheeger_estimate * grad.estimate().value;
  return MetricReport::make("poincare", var.value, rhs);
}

}  // namespace kls
