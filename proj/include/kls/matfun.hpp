#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "kls/rng.hpp"

namespace kls {

// |M|: absolute value of the eigenvalues of a symmetric matrix.
Eigen::MatrixXd sym_abs(const Eigen::MatrixXd& M);

// M^p for symmetric PSD M. Eigenvalues below 1e-12 * lambda_max are clamped
// to zero first, which removes spurious negativity from round-off.
Eigen::MatrixXd psd_pow(const Eigen::MatrixXd& M, double p);

// Tr(|M|^p).
double trace_abs_pow(const Eigen::MatrixXd& M, double p);

double operator_norm(const Eigen::MatrixXd& M);

bool is_psd(const Eigen::MatrixXd& M, double tol = 1e-9);

enum class EnsembleKind {
  kPsdWishart,
  kSymmetricGoe,
  kDiagonal,
  kLowRank,
  kProjection,
};

// Seeded random symmetric test matrices for the inequality suite.
Eigen::MatrixXd draw_matrix(EnsembleKind kind, int n, Rng& rng, int rank = 1);

const char* ensemble_name(EnsembleKind kind);

}  // namespace kls
