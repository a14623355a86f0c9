#include "bosons/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bosons {

namespace {

constexpr long kDenseThreshold = 1200;
constexpr double kDegenerateGap = 1e-8;

std::vector<std::vector<int>> cluster_indices(const Eigen::VectorXd& values) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < values.size(); ++i) {
    if (clusters.empty() || values[i] - values[clusters.back().back()] > kDegenerateGap) {
      clusters.push_back({i});
    } else {
      clusters.back().push_back(i);
    }
  }
  return clusters;
}

void require_hermitian(const SparseOperator& H) {
  if (H.hermiticity_defect() > 1e-8)
    throw ValidationError("eigensolver: operator is not hermitian");
}

}  // namespace

SpectralResult low_spectrum(const SparseOperator& H, int count, EigMethod method,
                            std::uint64_t seed) {
  if (count < 1) throw DomainError("low_spectrum: count must be >= 1");
  require_hermitian(H);
  const long n = H.rows();
  if (count > n) throw DomainError("low_spectrum: count exceeds the dimension");

  const bool dense = method == EigMethod::Dense ||
                     (method == EigMethod::Auto && (n <= kDenseThreshold || count > n / 4));
  SpectralResult out;
  if (dense) {
    auto full = dense_sym_eig(Eigen::MatrixXd(H.mat));
    out.values = full.values.head(count);
    out.vectors = full.vectors.leftCols(count);
    out.residuals = full.residuals.head(count);
    out.method = "dense";
    const double tol = 1e-9 * std::max(1.0, full.values.cwiseAbs().maxCoeff());
    if (out.residuals.maxCoeff() > tol)
      throw NumericalError("low_spectrum: dense residual " +
                           std::to_string(out.residuals.maxCoeff()) + " above tolerance");
  } else {
    auto lz = lanczos_lowest(H.mat, count, seed, 1e-8 * std::max(1.0, H.max_abs()));
    out.values = lz.values;
    out.vectors = lz.vectors;
    out.residuals = lz.residuals;
    out.method = "lanczos";
  }
  out.clusters = cluster_indices(out.values);
  return out;
}

SpectralResult ground_state(const SparseOperator& H, EigMethod method, std::uint64_t seed) {
  return low_spectrum(H, 1, method, seed);
}

SpectralBlocks full_spectrum(const SparseOperator& H, long dense_budget) {
  require_hermitian(H);
  const long n = H.rows();
  SpectralBlocks out;
  out.index = sparsity_components(H.mat);
  Eigen::MatrixXd dense(H.mat);
  for (const auto& idx : out.index) {
    const long m = static_cast<long>(idx.size());
    if (m > dense_budget)
      throw CapacityError("full_spectrum: block dimension " + std::to_string(m) +
                          " exceeds dense budget " + std::to_string(dense_budget));
    Eigen::MatrixXd block(m, m);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) block(i, j) = dense(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    if (es.info() != Eigen::Success) throw NumericalError("full_spectrum: block solver failed");
    out.values.push_back(es.eigenvalues());
    out.vectors.push_back(es.eigenvectors());
    for (long i = 0; i < m; ++i) out.all_values.push_back(es.eigenvalues()[i]);
  }
  std::sort(out.all_values.begin(), out.all_values.end());
  (void)n;
  return out;
}

ThermalState gibbs(const SparseOperator& H, double beta, long dense_budget) {
  if (!(beta > 0.0)) throw DomainError("gibbs: beta must be positive");
  ThermalState st;
  st.beta = beta;
  st.blocks = full_spectrum(H, dense_budget);
  st.energies = st.blocks.all_values;
  st.shift = st.energies.front();
  st.partition_shifted = 0.0;
  st.weights.resize(st.energies.size());
  for (size_t j = 0; j < st.energies.size(); ++j) {
    st.weights[j] = std::exp(-beta * (st.energies[j] - st.shift));
    st.partition_shifted += st.weights[j];
  }
  for (auto& w : st.weights) w /= st.partition_shifted;
  st.energy = 0.0;
  st.entropy = 0.0;
  for (size_t j = 0; j < st.energies.size(); ++j) {
    st.energy += st.weights[j] * st.energies[j];
    if (st.weights[j] > 0.0) st.entropy -= st.weights[j] * std::log(st.weights[j]);
  }
  st.free_energy = st.energy - st.entropy / beta;
  return st;
}

double thermal_expectation(const ThermalState& state, const SparseOperator& O) {
  Eigen::MatrixXd dense(O.mat);
  double acc = 0.0;
  const double z = state.partition_shifted;
  for (size_t b = 0; b < state.blocks.index.size(); ++b) {
    const auto& idx = state.blocks.index[b];
    const long m = static_cast<long>(idx.size());
    Eigen::MatrixXd blockO(m, m);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) blockO(i, j) = dense(idx[i], idx[j]);
    const auto& V = state.blocks.vectors[b];
    const auto& vals = state.blocks.values[b];
    Eigen::MatrixXd transformed = V.transpose() * blockO * V;
    for (long j = 0; j < m; ++j) {
      const double w = std::exp(-state.beta * (vals[j] - state.shift)) / z;
      acc += w * transformed(j, j);
    }
  }
  return acc;
}

double trace_distance_to_ground(const ThermalState& state, double degeneracy_gap) {
  // Gamma and the ground projector share an eigenbasis; the trace distance is
  // half the l1 distance of the spectra.
  const double e0 = state.energies.front();
  long deg = 0;
  for (double e : state.energies) {
    if (e - e0 <= degeneracy_gap) ++deg;
  }
  double dist = 0.0;
  for (size_t j = 0; j < state.energies.size(); ++j) {
    const double target = (state.energies[j] - e0 <= degeneracy_gap) ? 1.0 / deg : 0.0;
    dist += std::abs(state.weights[j] - target);
  }
  return 0.5 * dist;
}

}  // namespace bosons
