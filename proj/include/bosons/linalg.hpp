#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

namespace bosons {

using SpMat = Eigen::SparseMatrix<double>;

/// Dense matrix exponential (scaling-and-squaring with Pade approximants).
Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& A);

/// Krylov (Arnoldi) approximation of exp(t A) v with adaptive sub-stepping.
/// Throws NumericalError if the error estimate cannot be brought below tol.
Eigen::VectorXd expm_multiply(const SpMat& A, const Eigen::VectorXd& v, double t = 1.0,
                              double tol = 1e-12, int krylov_dim = 48);

struct EigenResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXd vectors;   // columns, unit norm
  Eigen::VectorXd residuals; // ||A v - lambda v|| per pair
  std::string method;
};

/// Full dense symmetric eigendecomposition with residuals.
EigenResult dense_sym_eig(const Eigen::MatrixXd& A);

/// Lowest `count` eigenpairs of a symmetric sparse matrix by thick-restart
/// Lanczos with full reorthogonalization. Deterministic for a fixed seed.
EigenResult lanczos_lowest(const SpMat& A, int count, std::uint64_t seed = 1,
                           double tol = 1e-10, int max_restarts = 400);

/// Connected components of the symmetric sparsity pattern (diagonal entries
/// ignored); each component is a sorted list of indices.
std::vector<std::vector<long>> sparsity_components(const SpMat& A);

/// Deterministic uniform double in [0,1) from a raw 64-bit engine draw.
inline double uniform01(std::uint64_t raw) { return (raw >> 11) * 0x1.0p-53; }

/// Gauss-Legendre nodes on (-1, 1) with weights.
std::vector<double> gauss_legendre(int n, std::vector<double>& weights);

}  // namespace bosons
