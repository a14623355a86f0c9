#pragma once

#include <map>
#include <vector>

#include "bosons/lattice.hpp"

namespace bosons {

/// Zero-energy scattering data for the unscaled potential v.
struct ScatteringLength {
  double a0 = 0.0;            // physical scattering length, f = 1 - a0/r outside
  double raw_integral = 0.0;  // int v f dx = 8 pi a0
};

/// Solve (-Laplace + v/2) f = 0 with f -> 1 at infinity via u = r f.
/// Requires a real-space potential; relative accuracy ~1e-10.
ScatteringLength scattering_length(const PotentialSpec& spec, double ode_tol = 1e-12);

struct NeumannProblem {
  PotentialSpec spec;
  int N = 2;
  double ell = 0.45;  // ball radius, R < ell < 1/2

  void validate() const;
};

/// Lowest Neumann eigenpair of (-Laplace + v_N/(2N)) f = lambda f on the ball
/// of radius ell with f(ell) = 1, f'(ell) = 0, where v_N(x) = N^3 v(N x).
struct ScatteringSolution {
  PotentialSpec spec;
  int N = 0;
  double ell = 0.0;
  double lambda = 0.0;
  ScatteringLength length;  // zero-energy data of the unscaled potential

  std::vector<double> radial_grid;  // Chebyshev points in [0, ell]
  std::vector<double> f_values;

  // Gauss-Legendre data for Fourier integrals of omega = 1 - f
  std::vector<double> gl_r, gl_w, gl_omega;
  // same on the potential support [0, R/N] where v_N omega lives
  std::vector<double> gls_r, gls_w, gls_omega;
};

ScatteringSolution solve_neumann(const NeumannProblem& problem, double ode_tol = 1e-12,
                                 int cheb_points = 2048, int gl_points = 512);

/// omega_hat(q) = 4 pi / q * int_0^ell omega(r) r sin(q r) dr  (q = |p|).
double omega_hat(const ScatteringSolution& sol, double qnorm);

/// eta_p = -N omega_hat(p) for every lattice mode (shared value per |k|^2 class).
std::vector<double> eta_table(const ScatteringSolution& sol, const MomentumLattice& lattice);

/// Exact lattice convolution (2N)^{-1} sum_{q in the full dual lattice}
/// vhat((p-q)/N) eta_q = -(1/2) (v_N omega)^(p), evaluated as a radial
/// integral over the potential support (product-transform identity).
double eta_convolution(const ScatteringSolution& sol, double qnorm);

/// Residual report for the momentum-space scattering identity on the lattice:
///   p^2 eta_p + v_hat(p/N)/(2N) + (2N)^-1 sum_q v_hat((p-q)/N) eta_q
///     = N lambda chi_hat(p) + lambda sum_q chi_hat(p-q) eta_q,
/// with the q-sum truncated at `conv_cutoff` (defaults to twice the lattice
/// cutoff) and the dropped tail estimated from the 1/(N q^2) kernel decay.
struct EtaIdentityReport {
  double max_residual = 0.0;
  double tail_estimate = 0.0;
  int conv_cutoff = 0;
  std::vector<double> residuals;  // per lattice mode
};

EtaIdentityReport verify_eta_identity(const ScatteringSolution& sol,
                                      const MomentumLattice& lattice, int conv_cutoff = 0);

/// Fourier transform of the indicator of the ball with radius ell.
double ball_indicator_hat(double ell, double qnorm);

}  // namespace bosons
