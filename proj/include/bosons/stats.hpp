#pragma once

#include <optional>
#include <vector>

#include "bosons/fock.hpp"
#include "bosons/model.hpp"
#include "bosons/spectra.hpp"

namespace bosons {

/// P(N+ = n) for n = 0..cap via sector projectors. Requires a unit vector.
std::vector<double> nplus_distribution(const Eigen::VectorXd& state, const FockBasis& basis);

/// <e^{kappa N+}> computed sector-wise from the distribution.
double exp_moment(const std::vector<double>& distribution, double kappa);
double exp_moment(const Eigen::VectorXd& state, const FockBasis& basis, double kappa);

struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool degenerate = false;
};

/// Weighted least squares on log P(N+ >= n), weights proportional to P(n),
/// restricted to the range where the tail mass stays above the floor.
TailFit tail_fit(const std::vector<double>& distribution, double floor = 1e-12);

/// log E[e^{lambda (N+ - mu)}] per grid point; overflow marked per-entry.
struct MgfSample {
  double lambda = 0.0;
  double value = 0.0;
  bool overflow = false;
};
std::vector<MgfSample> mgf(const std::vector<double>& distribution, const std::vector<double>& lambda_grid,
                           double mu);
std::vector<MgfSample> mgf(const Eigen::VectorXd& state, const FockBasis& basis,
                           const std::vector<double>& lambda_grid, double mu);

/// min over the grid of (-lambda x + lambda^2 sigma^2 / 2).
double chernoff(double x, double sigma2, const std::vector<double>& lambda_grid);

/// Largest violation of P(N+ >= n) <= e^{-kappa n} E[e^{kappa N+}] over the
/// probe grid; an exact inequality, so anything above rounding is a failure.
double markov_chain_violation(const std::vector<double>& distribution,
                              const std::vector<double>& kappa_grid);

/// Tr[e^{kappa N+} Gamma] from a thermal state on an excitation basis.
double gibbs_exp_moment(const ThermalState& state, const FockBasis& basis, double kappa);

/// Depletion statistics of one normalized state against kernel predictions.
struct DepletionReport {
  std::vector<double> distribution;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> exp_moments;  // (kappa, value)
  TailFit tail;
  std::vector<MgfSample> mgf_samples;
  // kernel predictions
  double predicted_mean = 0.0;               // sum_p sinh^2(nu_p)
  double predicted_variance = 0.0;           // pair-summed second moment
  double predicted_variance_per_mode = 0.0;  // single-pairing reading
  double finite_size_factor = 1.0;           // (1 - 1/N) when b-operators apply
};

DepletionReport depletion_report(const Eigen::VectorXd& state, const FockBasis& basis,
                                 const std::vector<double>& sinh_nu,
                                 const std::vector<double>& cosh_nu,
                                 const std::vector<double>& kappa_grid,
                                 const std::vector<double>& lambda_grid, int N_finite = 0);

/// Mean/variance of dGamma(O) against the kernel predictions; both powers of
/// sinh in the predicted mean are reported (the quadratic reading is the one
/// exact diagonalization confirms).
struct ObservableStats {
  double measured_mean = 0.0;
  double measured_variance = 0.0;
  double predicted_mean = 0.0;          // sum_p sinh^2(nu_p) O_pp
  double predicted_mean_sinh1 = 0.0;    // sum_p sinh(nu_p) O_pp
  double predicted_variance = 0.0;      // direct + anomalous Wick pairing
  double predicted_variance_direct = 0.0;  // sum_pq |O_pq|^2 cosh^2 sinh^2
};

ObservableStats observable_stats(const Eigen::VectorXd& state, const FockBasis& basis,
                                 const Eigen::MatrixXd& O, const std::vector<double>& sinh_nu,
                                 const std::vector<double>& cosh_nu);

/// Mean-field double-commutator identity: dense [E, [E, H]] against the
/// zero-mode-classified right-hand side with 4 sinh^2(n kappa s / 2) weights.
struct DoubleCommutatorCheck {
  double max_deviation = 0.0;
  /// entry ratio of the pair-creation block between kappa and 2 kappa runs,
  /// for the printed sinh^2 prefactor scaling
  double pair_block_scale = 0.0;
};
DoubleCommutatorCheck double_commutator_check(const ModelConfig& config, double s, double kappa);

/// Exponential-commutator identities for a b-operator monomial.
struct MonomialSpec {
  std::vector<std::pair<int, bool>> factors;  // (mode, is_creation), leftmost first
};
struct MonomialCommutatorCheck {
  int imbalance = 0;          // creators minus annihilators
  double double_dev = 0.0;    // [E,[E,B]] vs 4 sinh^2(imb k/2) E B E
  double single_dev_left = 0.0;   // [E,B] vs 2 e^{-imb k/2} sinh(imb k/2) E B
  double single_dev_right = 0.0;  // [E,B] vs 2 e^{+imb k/2} sinh(imb k/2) B E
};
MonomialCommutatorCheck monomial_commutator_check(const FockBasis& basis, const MonomialSpec& monomial,
                                           int N, double kappa);

/// Onsager certificate: largest t with H - E0 - t N+ + c >= 0 (PSD), found by
/// bisection on the minimal eigenvalue.
struct OnsagerCertificate {
  double coefficient = 0.0;  // the fitted C^{-1}
  double offset = 0.0;       // the c used
  double min_eig = 0.0;      // certificate at the fitted coefficient
};
OnsagerCertificate onsager_check(const ModelConfig& config, double c_offset,
                                 double bisect_tol = 1e-8);

/// Mechanical replay of the exponential-growth control: xi(s) = e^{s k N+} psi.
struct GronwallReplay {
  double max_derivative_gap = 0.0;  // |finite difference - 2 kappa <N+>| max
  double final_norm_sq = 0.0;       // ||xi(1)||^2
  double exp_bound = 0.0;           // exp(2 kappa max_s <N+>_normalized)
  bool bound_holds = false;
};
GronwallReplay gronwall_replay(const Eigen::VectorXd& psi, const FockBasis& basis, double kappa,
                               int s_points = 21, double fd_step = 1e-5);

}  // namespace bosons
