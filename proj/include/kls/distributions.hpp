#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "kls/rng.hpp"

namespace kls {

enum class Family {
  kGaussian,
  kCube,
  kBall,
  kLaplaceProd,
  kShiftedExpProd,
};

Family family_from_string(const std::string& name);
std::string family_to_string(Family family);

// An isotropic log-concave law: zero mean, identity covariance. The scale is
// the analytic isotropization constant of the family, never estimated.
struct DistributionSpec {
  Family family;
  int dim;
  double scale;

  std::string name() const { return family_to_string(family); }
};

// N rows of i.i.d. samples. Identical (spec, count, seed) reproduces the
// matrix bit-for-bit.
struct SampleMatrix {
  Eigen::MatrixXd data;  // count x dim
  std::string spec_id;
  std::uint64_t seed;
};

DistributionSpec make_distribution(Family family, int n);
DistributionSpec make_distribution(const std::string& family, int n);

SampleMatrix sample(const DistributionSpec& spec, int count,
                    std::uint64_t seed);

// Fills `out` (count x dim) using a derived stream; lets callers interleave
// several sample blocks off one generator without materializing SampleMatrix.
void sample_into(const DistributionSpec& spec, Rng& rng,
                 Eigen::Ref<Eigen::MatrixXd> out);

// Unnormalized log-density; -inf outside the support.
double log_density(const DistributionSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& point);

// A point guaranteed inside the support, for midpoint-concavity probes.
Eigen::VectorXd random_support_point(const DistributionSpec& spec, Rng& rng);

}  // namespace kls
