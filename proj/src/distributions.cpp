#include "kls/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

// Rows are produced in fixed-size blocks, one derived stream per block, so a
// parallel producer writes the same bits as the sequential one.
constexpr int kBlockRows = 8192;

void fill_block(const DistributionSpec& spec, Rng& rng,
                Eigen::Ref<Eigen::MatrixXd> block) {
  const int rows = static_cast<int>(block.rows());
  const int n = spec.dim;
  switch (spec.family) {
    case Family::kGaussian:
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < n; ++j) block(i, j) = rng.normal();
      break;
    case Family::kCube:
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < n; ++j)
          block(i, j) = rng.uniform(-spec.scale, spec.scale);
      break;
    case Family::kBall: {
      // Gaussian direction times inverted radial CDF r = R * u^{1/n}.
      Eigen::VectorXd g(n);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < n; ++j) g(j) = rng.normal();
        const double norm = g.norm();
        const double r = spec.scale * std::pow(rng.uniform(), 1.0 / n);
        block.row(i) = (r / norm) * g.transpose();
      }
      break;
    }
    case Family::kLaplaceProd:
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < n; ++j) {
          const double e = rng.exponential();
          const double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
          block(i, j) = sign * spec.scale * e;
        }
      break;
    case Family::kShiftedExpProd:
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < n; ++j) block(i, j) = rng.exponential() - 1.0;
      break;
  }
}

}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::kGaussian;
  if (name == "cube") return Family::kCube;
  if (name == "ball") return Family::kBall;
  if (name == "laplace_prod") return Family::kLaplaceProd;
  if (name == "shifted_exp_prod") return Family::kShiftedExpProd;
  throw std::invalid_argument("unknown family: " + name);
}

std::string family_to_string(Family family) {
  switch (family) {
    case Family::kGaussian: return "gaussian";
    case Family::kCube: return "cube";
    case Family::kBall: return "ball";
    case Family::kLaplaceProd: return "laplace_prod";
    case Family::kShiftedExpProd: return "shifted_exp_prod";
  }
  throw std::invalid_argument("unknown family enum");
}

DistributionSpec make_distribution(Family family, int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  double scale = 1.0;
  switch (family) {
    case Family::kGaussian: scale = 1.0; break;
    case Family::kCube: scale = kSqrt3; break;                   // half-width
    case Family::kBall: scale = std::sqrt(n + 2.0); break;       // radius
    case Family::kLaplaceProd: scale = 1.0 / kSqrt2; break;      // b
    case Family::kShiftedExpProd: scale = 1.0; break;            // rate
  }
  return DistributionSpec{family, n, scale};
}

DistributionSpec make_distribution(const std::string& family, int n) {
  return make_distribution(family_from_string(family), n);
}

void sample_into(const DistributionSpec& spec, Rng& rng,
                 Eigen::Ref<Eigen::MatrixXd> out) {
  const int count = static_cast<int>(out.rows());
  for (int start = 0, block_id = 0; start < count;
       start += kBlockRows, ++block_id) {
    const int rows = std::min(kBlockRows, count - start);
    Rng block_rng = rng.derive(static_cast<std::uint64_t>(block_id));
    fill_block(spec, block_rng, out.middleRows(start, rows));
  }
}

SampleMatrix sample(const DistributionSpec& spec, int count,
                    std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  SampleMatrix result;
  result.data.resize(count, spec.dim);
  result.spec_id = spec.name() + "/" + std::to_string(spec.dim);
  result.seed = seed;
  Rng rng(seed);
  sample_into(spec, rng, result.data);
  return result;
}

double log_density(const DistributionSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& point) {
  if (point.size() != spec.dim)
    throw std::invalid_argument("point dimension mismatch");
  switch (spec.family) {
    case Family::kGaussian:
      return -0.5 * point.squaredNorm();
    case Family::kCube:
      return (point.cwiseAbs().maxCoeff() <= spec.scale) ? 0.0 : kNegInf;
    case Family::kBall:
      return (point.norm() <= spec.scale) ? 0.0 : kNegInf;
    case Family::kLaplaceProd:
      return -point.cwiseAbs().sum() / spec.scale;
    case Family::kShiftedExpProd:
      if (point.minCoeff() < -1.0) return kNegInf;
      return -(point.array() + 1.0).sum();
  }
  return kNegInf;
}

Eigen::VectorXd random_support_point(const DistributionSpec& spec, Rng& rng) {
  Eigen::MatrixXd row(1, spec.dim);
  fill_block(spec, rng, row);
  return row.transpose();
}

}  // namespace kls
