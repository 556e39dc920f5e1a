#include "kls/matfun.hpp"

#include <cmath>
#include <stdexcept>

namespace kls {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed");
  return solver;
}

}  // namespace

Eigen::MatrixXd sym_abs(const Eigen::MatrixXd& M) {
  auto solver = eig(M);
  return solver.eigenvectors() *
         solver.eigenvalues().cwiseAbs().asDiagonal() *
         solver.eigenvectors().transpose();
}

Eigen::MatrixXd psd_pow(const Eigen::MatrixXd& M, double p) {
  auto solver = eig(M);
  Eigen::VectorXd lam = solver.eigenvalues();
  const double lam_max = lam.cwiseAbs().maxCoeff();
  const double clamp = 1e-12 * lam_max;
  for (int i = 0; i < lam.size(); ++i) {
    lam(i) = lam(i) < clamp ? 0.0 : std::pow(lam(i), p);
  }
  return solver.eigenvectors() * lam.asDiagonal() *
         solver.eigenvectors().transpose();
}

double trace_abs_pow(const Eigen::MatrixXd& M, double p) {
  auto solver = eig(M);
  return solver.eigenvalues().cwiseAbs().array().pow(p).sum();
}

double operator_norm(const Eigen::MatrixXd& M) {
  auto solver = eig(M);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_psd(const Eigen::MatrixXd& M, double tol) {
  auto solver = eig(M);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  return solver.eigenvalues().minCoeff() >= -tol * scale;
}

Eigen::MatrixXd draw_matrix(EnsembleKind kind, int n, Rng& rng, int rank) {
  Eigen::MatrixXd G(n, n);
  switch (kind) {
    case EnsembleKind::kPsdWishart: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
      return G * G.transpose() / n;
    }
    case EnsembleKind::kSymmetricGoe: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
      return (G + G.transpose()) / std::sqrt(2.0 * n);
    }
    case EnsembleKind::kDiagonal: {
      Eigen::VectorXd d(n);
      for (int i = 0; i < n; ++i) d(i) = rng.uniform(-1.0, 1.0);
      return d.asDiagonal();
    }
    case EnsembleKind::kLowRank: {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
      for (int r = 0; r < rank; ++r) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = rng.normal();
        const double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
        M += sign * v * v.transpose() / n;
      }
      return M;
    }
    case EnsembleKind::kProjection: {
      Eigen::MatrixXd Q(n, rank);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) Q(i, j) = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
      Eigen::MatrixXd thin =
          qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
      return thin * thin.transpose();
    }
  }
  throw std::invalid_argument("unknown ensemble kind");
}

const char* ensemble_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kPsdWishart: return "psd_wishart";
    case EnsembleKind::kSymmetricGoe: return "symmetric_goe";
    case EnsembleKind::kDiagonal: return "diagonal";
    case EnsembleKind::kLowRank: return "low_rank";
    case EnsembleKind::kProjection: return "projection";
  }
  return "unknown";
}

}  // namespace kls
