#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kls/distributions.hpp"
#include "kls/metrics.hpp"
#include "kls/stats.hpp"

namespace kls {

// Halfspace scan proxy for the isoperimetric constant: worst direction's
// (1/2) / density-at-median. A lower-bound-style estimate, not psi itself.
struct CheegerEstimate {
  double value = 0.0;
  int direction_count = 0;
  std::vector<double> per_direction;
};

// E <x,y>^3 over independent pairs x ~ p, y ~ q.
Estimate third_moment_inner(const DistributionSpec& specP,
                            const DistributionSpec& specQ, long pairs,
                            std::uint64_t seed);

// T_p(A,B,C) = E (x'Ay)(x'By)(x'Cy) with x, y independent from spec.
Estimate tensor_T(const DistributionSpec& spec,
                  const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                  const Eigen::MatrixXd& C, long pairs, std::uint64_t seed);

// Several T_p estimates off the same sample pairs (common random numbers).
struct TensorTriple {
  Eigen::MatrixXd A, B, C;
};
std::vector<BatchMeans> tensor_batches(const DistributionSpec& spec,
                                       const std::vector<TensorTriple>& triples,
                                       long pairs, std::uint64_t seed,
                                       int batches = 32);

// E (||x|| - sqrt(n))^2.
Estimate thin_shell(const DistributionSpec& spec, long samples,
                    std::uint64_t seed);

// Sample variance of x'Ax.
Estimate quadratic_form_variance(const DistributionSpec& spec,
                                 const Eigen::MatrixXd& A, long samples,
                                 std::uint64_t seed);

// Sphere-average identity: avg over uniform theta of
// E[<x,theta><y,theta><x,y>^2] against (1/n) E<x,y>^3, same pairs both sides.
MetricReport sphere_identity_check(const DistributionSpec& spec, long pairs,
                                   int directions, std::uint64_t seed);

CheegerEstimate halfspace_cheeger(const DistributionSpec& spec,
                                  int direction_count, long samples,
                                  std::uint64_t seed);

// Poincare inequality on the quadratic g(x) = x'Ax:
// Var(g) <= C * psi^2 * E||2Ax||^2, both sides on the same samples.
MetricReport poincare_check(const DistributionSpec& spec,
                            const Eigen::MatrixXd& A, long samples,
                            std::uint64_t seed, double cheeger_estimate,
                            double C);

void require_symmetric(const Eigen::MatrixXd& M, const char* what);

}  // namespace kls
