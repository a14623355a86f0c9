#pragma once

#include <vector>

#include "bosons/fock.hpp"
#include "bosons/linalg.hpp"

namespace bosons {

/// Hyperbolic kernel data derived from a per-mode table eta_p.
struct KernelTable {
  std::vector<double> eta;
  std::vector<double> sigma;   // sinh(eta_p)
  std::vector<double> gamma;   // cosh(eta_p)
  std::vector<double> alpha;   // gamma_p - 1
  std::vector<double> beta;    // sigma_p - eta_p

  static KernelTable from_eta(const std::vector<double>& eta);
};

/// Skew-hermitian generator B = 1/2 sum_p eta_p (b+_p b+_{-p} - b_p b_{-p}).
/// Requires eta even under p -> -p; throws ValidationError otherwise.
SparseOperator build_generator(const FockBasis& basis, const std::vector<double>& eta, int N);

/// exp(-B) op exp(B) with an explicit unitarity-drift check. Dense matrix
/// exponentials up to `dense_limit`; above that the exponentials are applied
/// column by column with the Krylov propagator.
SparseOperator conjugate(const SparseOperator& op, const SparseOperator& B, double tol = 1e-10,
                         long dense_limit = 4096);

/// exp(t B) v by the Krylov propagator.
Eigen::VectorXd conjugate_vector(const SparseOperator& B, const Eigen::VectorXd& v, double t,
                                 double tol = 1e-12);

/// Remainder d_p = exp(-B) b_p exp(B) - gamma_p b_p - sigma_p b+_{-p}.
SparseOperator remainder_d(const FockBasis& basis, int mode, const std::vector<double>& eta,
                           int N, double tol = 1e-10);

/// d+_p applied to one vector without forming matrices beyond B.
Eigen::VectorXd remainder_d_dagger_apply(const FockBasis& basis, int mode,
                                         const std::vector<double>& eta, int N,
                                         const Eigen::VectorXd& psi, double tol = 1e-12);

/// Quadratic-form kernels of the once-renormalized pairing block:
///   F_p = [p^2 + vhat(p/N)] [gamma^2 + sigma^2] + 2 gamma sigma vhat(p/N)
///   G_p = [gamma^2 + sigma^2] (vhat(p/N) - (2N)^{-1} sum_q vhat((p-q)/N) eta_q)
///         + 2 gamma sigma [p^2 + vhat(p/N)]
/// The q-sum runs over the full dual lattice via the product-transform
/// identity, so no truncation tail enters.
struct PairKernels {
  std::vector<double> F, G;
};
struct ScatteringSolution;
PairKernels pair_kernels(const MomentumLattice& lattice, const ScatteringSolution& sol);

/// Second-layer angle: tanh(2 tau_p) = -G_p / F_p. Throws DomainError when
/// |G_p| >= F_p (unphysical kernel).
std::vector<double> second_layer_tau(const PairKernels& k);

/// nu_p = (1/4) log(p^2 / (p^2 + 16 pi a0)) per lattice mode.
std::vector<double> bogoliubov_angle_table(const MomentumLattice& lattice, double a0);

/// Two routes to <vac| e^{-B} N+ e^{B} |vac>: the exact conjugation and the
/// structural split sum_p sinh^2(eta_p) + remainder, with the remainder
/// evaluated by quadrature over the transformation parameter.
struct VacuumNumberExpansion {
  double conjugated = 0.0;   // <e^B vac, N+ e^B vac>
  double sigma_sum = 0.0;    // sum_p sinh^2 eta_p
  double remainder = 0.0;    // quadrature of the sub-leading terms
};
VacuumNumberExpansion vacuum_number_expansion(const FockBasis& basis,
                                              const std::vector<double>& eta, int N,
                                              int quad_nodes = 32);

}  // namespace bosons
