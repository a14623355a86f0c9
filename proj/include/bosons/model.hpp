#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bosons/bogoliubov.hpp"
#include "bosons/fock.hpp"
#include "bosons/lattice.hpp"

namespace bosons {

struct ModelConfig {
  MomentumLattice lattice;
  int N = 2;
  double beta = 1.0;
  PotentialSpec spec;
  std::optional<PrefactorConvention> convention;  // default chosen by regime
  int cap = -1;                                   // excitation cap; -1 means N
  long dimension_budget = kDefaultDimensionBudget;

  int effective_cap() const { return cap < 0 ? N : cap; }
  PrefactorConvention effective_convention() const {
    return convention.value_or(default_convention(beta));
  }
  /// Coefficient of a+_{p-l} a+_{q+l} a_p a_q in the pair sum.
  double coupling(const Momentum& l) const {
    return scaled_coupling(spec, N, beta, l, effective_convention());
  }
  void validate() const;
};

/// Full N-particle Hamiltonian: kinetic term plus the momentum-conserving
/// pair sum over all modes including the condensate.
SparseOperator build_full_hamiltonian(const ModelConfig& config, const FullSectorBasis& basis);

/// The four normal-ordered parts of the excitation Hamiltonian plus the
/// kinetic and quartic pieces used by the lower-bound diagnostics.
struct HamiltonianBundle {
  ModelConfig config;
  std::shared_ptr<const FockBasis> basis;
  SparseOperator L0, L2, L3, L4;
  SparseOperator kinetic;  // sum_p p^2 a+_p a_p
  SparseOperator V;        // quartic excitation interaction (= L4)

  // Present when cap == N: the full-sector side and the unitary relabeling.
  std::shared_ptr<const FullSectorBasis> full_basis;
  SparseOperator H_full;
  SparseOperator U;  // full sector -> excitation basis

  SparseOperator total() const { return L0 + L2 + L3 + L4; }
  bool has_full() const { return full_basis != nullptr; }
};

HamiltonianBundle build_excitation_hamiltonian(const ModelConfig& config,
                                               bool with_full_sector = true);

/// Largest |entry| of [H, P_component]: exact momentum-conservation check
/// exploiting that the total momentum is integer-valued and diagonal.
double momentum_conservation_defect(const FullSectorBasis& basis, const SparseOperator& H);

/// Quadratic pairing model sum_p [A_p a+_p a_p + B_p/2 (a+_p a+_{-p} + h.c.)]
/// with A_p = p^2 + 8 pi a0, B_p = 8 pi a0, and its analytic angle tables.
struct QuadraticModel {
  std::shared_ptr<const FockBasis> basis;
  SparseOperator H;
  std::vector<double> A, B;
  std::vector<double> nu;        // (1/4) log(p^2/(p^2 + 16 pi a0))
  std::vector<double> sinh_nu, cosh_nu;
  /// max_p |(1/4) log((A_p - B_p)/(A_p + B_p)) - nu_p|
  double angle_consistency = 0.0;
};

QuadraticModel quadratic_model(const MomentumLattice& lattice, double a0, int cap,
                               long dimension_budget = kDefaultDimensionBudget);

/// Ground energy of one +/-p pair of the quadratic model from the 2x2
/// symplectic diagonalization: sqrt(A^2 - B^2) - A.
double quadratic_pair_ground_energy(double A, double B);

/// Renormalized Hamiltonian e^{B(eta)} L e^{-B(eta)} on the bundle's basis.
SparseOperator build_renormalized(const HamiltonianBundle& bundle, const std::vector<double>& eta,
                                  double tol = 1e-10);

}  // namespace bosons
