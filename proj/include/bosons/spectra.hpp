#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bosons/fock.hpp"
#include "bosons/linalg.hpp"

namespace bosons {

enum class EigMethod { Auto, Dense, Iterative };

struct SpectralResult {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXd vectors;    // orthonormal columns
  Eigen::VectorXd residuals;  // ||H v - E v||
  std::string method;
  /// Clusters of indices whose eigenvalues sit within the degeneracy gap.
  std::vector<std::vector<int>> clusters;
};

/// Lowest eigenpair. Dense path requires residual <= 1e-9, iterative 1e-8.
SpectralResult ground_state(const SparseOperator& H, EigMethod method = EigMethod::Auto,
                            std::uint64_t seed = 1);

/// Lowest `count` eigenpairs, deflated and orthonormal.
SpectralResult low_spectrum(const SparseOperator& H, int count,
                            EigMethod method = EigMethod::Auto, std::uint64_t seed = 1);

/// Full eigendecomposition, block by block over the sparsity components.
struct SpectralBlocks {
  std::vector<std::vector<long>> index;    // basis indices per block
  std::vector<Eigen::VectorXd> values;     // per block, ascending
  std::vector<Eigen::MatrixXd> vectors;    // per block, in block coordinates
  std::vector<double> all_values;          // global ascending list
};
SpectralBlocks full_spectrum(const SparseOperator& H, long dense_budget = 12000);

/// Thermal state at inverse temperature beta, all quantities relative to the
/// reported ground-energy shift.
struct ThermalState {
  double beta = 0.0;
  double shift = 0.0;             // E_0; weights use E_j - shift
  double partition_shifted = 0;   // sum_j exp(-beta (E_j - shift))
  std::vector<double> energies;   // ascending
  std::vector<double> weights;    // e^{-beta(E_j - shift)} / partition
  SpectralBlocks blocks;
  double energy = 0.0;            // Tr[H Gamma]
  double entropy = 0.0;           // -sum w log w
  double free_energy = 0.0;       // energy - entropy / beta
};

ThermalState gibbs(const SparseOperator& H, double beta, long dense_budget = 12000);

/// Tr[O Gamma] for an operator given in the same basis as H.
double thermal_expectation(const ThermalState& state, const SparseOperator& O);

/// Trace distance between Gamma and the projector onto its ground block.
double trace_distance_to_ground(const ThermalState& state, double degeneracy_gap = 1e-10);

}  // namespace bosons
