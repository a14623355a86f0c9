#include "bosons/scattering.hpp"

#include "bosons/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bosons {

namespace {

// Dormand-Prince 5(4) for the radial system y = (u, u'), u'' = w(r) u.
// Integrates from r0 to r1 with absolute local tolerance; optionally records
// accepted steps (r, u, u') for dense Hermite evaluation.
struct OdeTrace {
  std::vector<double> r, u, du;
};

struct Rhs {
  std::function<double(double)> w;  // u'' = w(r) u
};

void dp_step(const Rhs& rhs, double r, double u, double du, double h, double& u5, double& du5,
             double& err) {
  auto f = [&](double rr, double uu, double vv, double& ku, double& kv) {
    ku = vv;
    kv = rhs.w(rr) * uu;
  };
  double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v, k5u, k5v, k6u, k6v, k7u, k7v;
  f(r, u, du, k1u, k1v);
  f(r + h / 5.0, u + h * k1u / 5.0, du + h * k1v / 5.0, k2u, k2v);
  f(r + 3.0 * h / 10.0, u + h * (3.0 * k1u + 9.0 * k2u) / 40.0,
    du + h * (3.0 * k1v + 9.0 * k2v) / 40.0, k3u, k3v);
  f(r + 4.0 * h / 5.0, u + h * (44.0 * k1u / 45.0 - 56.0 * k2u / 15.0 + 32.0 * k3u / 9.0),
    du + h * (44.0 * k1v / 45.0 - 56.0 * k2v / 15.0 + 32.0 * k3v / 9.0), k4u, k4v);
  f(r + 8.0 * h / 9.0,
    u + h * (19372.0 * k1u / 6561.0 - 25360.0 * k2u / 2187.0 + 64448.0 * k3u / 6561.0 -
             212.0 * k4u / 729.0),
    du + h * (19372.0 * k1v / 6561.0 - 25360.0 * k2v / 2187.0 + 64448.0 * k3v / 6561.0 -
              212.0 * k4v / 729.0),
    k5u, k5v);
  f(r + h,
    u + h * (9017.0 * k1u / 3168.0 - 355.0 * k2u / 33.0 + 46732.0 * k3u / 5247.0 +
             49.0 * k4u / 176.0 - 5103.0 * k5u / 18656.0),
    du + h * (9017.0 * k1v / 3168.0 - 355.0 * k2v / 33.0 + 46732.0 * k3v / 5247.0 +
              49.0 * k4v / 176.0 - 5103.0 * k5v / 18656.0),
    k6u, k6v);
  u5 = u + h * (35.0 * k1u / 384.0 + 500.0 * k3u / 1113.0 + 125.0 * k4u / 192.0 -
                2187.0 * k5u / 6784.0 + 11.0 * k6u / 84.0);
  du5 = du + h * (35.0 * k1v / 384.0 + 500.0 * k3v / 1113.0 + 125.0 * k4v / 192.0 -
                  2187.0 * k5v / 6784.0 + 11.0 * k6v / 84.0);
  f(r + h, u5, du5, k7u, k7v);
  const double e_u = h * (71.0 * k1u / 57600.0 - 71.0 * k3u / 16695.0 + 71.0 * k4u / 1920.0 -
                          17253.0 * k5u / 339200.0 + 22.0 * k6u / 525.0 - k7u / 40.0);
  const double e_v = h * (71.0 * k1v / 57600.0 - 71.0 * k3v / 16695.0 + 71.0 * k4v / 1920.0 -
                          17253.0 * k5v / 339200.0 + 22.0 * k6v / 525.0 - k7v / 40.0);
  err = std::sqrt(e_u * e_u + e_v * e_v);
}

// Integrate over [r0, r1]; updates (u, du) in place.
void integrate(const Rhs& rhs, double r0, double r1, double& u, double& du, double tol,
               OdeTrace* trace) {
  if (r1 <= r0) return;
  double r = r0;
  double h = (r1 - r0) / 64.0;
  const double hmin = (r1 - r0) * 1e-14;
  if (trace) {
    trace->r.push_back(r);
    trace->u.push_back(u);
    trace->du.push_back(du);
  }
  int guard = 0;
  while (r < r1) {
    if (++guard > 4000000) throw NumericalError("radial integrator: step limit reached");
    h = std::min(h, r1 - r);
    double u5, du5, err;
    dp_step(rhs, r, u, du, h, u5, du5, err);
    const double scale = tol * std::max(1.0, std::max(std::abs(u), std::abs(du)));
    if (err <= scale || h <= hmin) {
      r += h;
      u = u5;
      du = du5;
      if (trace) {
        trace->r.push_back(r);
        trace->u.push_back(u);
        trace->du.push_back(du);
      }
    }
    const double fac = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
    h *= std::clamp(fac, 0.2, 4.0);
  }
}

// Cubic Hermite evaluation of u(r) on a recorded trace.
double hermite_eval(const OdeTrace& t, double r) {
  auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
  size_t i = it == t.r.begin() ? 0 : static_cast<size_t>(it - t.r.begin() - 1);
  if (i + 1 >= t.r.size()) i = t.r.size() - 2;
  const double h = t.r[i + 1] - t.r[i];
  if (h <= 0.0) return t.u[i];
  const double s = (r - t.r[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * t.u[i] + h10 * h * t.du[i] + h01 * t.u[i + 1] + h11 * h * t.du[i + 1];
}



}  // namespace

void NeumannProblem::validate() const {
  if (N < 1) throw DomainError("NeumannProblem: N must be >= 1");
  if (!(ell > 0.0 && ell < 0.5)) throw DomainError("NeumannProblem: need 0 < ell < 1/2");
  if (spec.has_real_space() && spec.kind != PotentialKind::Zero && !(spec.R < ell))
    throw DomainError("NeumannProblem: potential support R must satisfy R < ell");
  if (!spec.has_real_space())
    throw DomainError("NeumannProblem: table potential has no real-space form");
}

ScatteringLength scattering_length(const PotentialSpec& spec, double ode_tol) {
  if (!spec.has_real_space())
    throw DomainError("scattering_length: table potential has no real-space form");
  ScatteringLength out;
  if (spec.kind == PotentialKind::Zero || spec.V0 == 0.0) return out;

  const double R = spec.R;
  Rhs rhs{[&](double r) { return 0.5 * spec.value(std::min(r, R)); }};
  double u = 0.0, du = 1.0;
  OdeTrace trace;
  integrate(rhs, 0.0, R, u, du, ode_tol, &trace);
  if (std::abs(du) < 1e-300)
    throw NumericalError("scattering_length: u'(R) vanished, no outward match");
  out.a0 = R - u / du;

  // raw integral int v f dx with f = u / (u'(R) r)
  std::vector<double> w;
  auto x = gauss_legendre(256, w);
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = 0.5 * R * (x[i] + 1.0);
    const double ww = 0.5 * R * w[i];
    const double ur = hermite_eval(trace, r);
    acc += ww * spec.value(r) * ur * r;  // v * (u/r) * r^2
  }
  out.raw_integral = 4.0 * (kTwoPi / 2.0) * acc / du;
  return out;
}

namespace {

// Shooting mismatch for the Neumann problem at trial lambda:
// u(0) = 0, u'(0) = 1; condition u(ell) - ell u'(ell) = 0.
double neumann_mismatch(const PotentialSpec& spec, int N, double ell, double lambda,
                        double ode_tol, OdeTrace* trace) {
  const double edge = spec.kind == PotentialKind::Zero ? 0.0 : spec.R / N;
  Rhs inside{[&](double r) {
    return 0.5 * N * N * spec.value(std::min(r * N, spec.R)) - lambda;
  }};
  Rhs outside{[&](double) { return -lambda; }};
  double u = 0.0, du = 1.0;
  if (edge > 0.0) integrate(inside, 0.0, std::min(edge, ell), u, du, ode_tol, trace);
  if (edge < ell) integrate(outside, std::max(edge, 0.0), ell, u, du, ode_tol, trace);
  return u - ell * du;
}

}  // namespace

ScatteringSolution solve_neumann(const NeumannProblem& problem, double ode_tol, int cheb_points,
                                 int gl_points) {
  problem.validate();
  const auto& spec = problem.spec;
  const int N = problem.N;
  const double ell = problem.ell;

  ScatteringSolution sol;
  sol.spec = spec;
  sol.N = N;
  sol.ell = ell;
  sol.length = spec.kind == PotentialKind::Zero ? ScatteringLength{} : scattering_length(spec, ode_tol);

  const double pi = kTwoPi / 2.0;
  const double vhat0 = fourier_coefficient(spec, 0.0);

  double lambda = 0.0;
  if (spec.kind != PotentialKind::Zero && spec.V0 > 0.0) {
    const double guess = 3.0 * vhat0 / (8.0 * pi * N * ell * ell * ell);
    double lo = 0.0, hi = 10.0 * guess;
    double glo = neumann_mismatch(spec, N, ell, lo, ode_tol, nullptr);
    double ghi = neumann_mismatch(spec, N, ell, hi, ode_tol, nullptr);
    int widen = 0;
    while (glo * ghi > 0.0) {
      if (++widen > 60)
        throw NumericalError("solve_neumann: eigenvalue bracketing failed, mismatch " +
                             std::to_string(ghi));
      hi *= 2.0;
      ghi = neumann_mismatch(spec, N, ell, hi, ode_tol, nullptr);
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = neumann_mismatch(spec, N, ell, mid, ode_tol, nullptr);
      if (glo * gm <= 0.0) {
        hi = mid;
        ghi = gm;
      } else {
        lo = mid;
        glo = gm;
      }
      if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    lambda = 0.5 * (lo + hi);
  }
  sol.lambda = lambda;

  // final pass with dense output, normalized so that f(ell) = 1
  OdeTrace trace;
  neumann_mismatch(spec, N, ell, lambda, ode_tol, &trace);
  const double uend = trace.u.back();
  const double scale = uend / ell;  // = u'(ell) at the eigenvalue
  if (std::abs(scale) < 1e-300) throw NumericalError("solve_neumann: degenerate normalization");

  auto f_of = [&](double r) {
    if (r <= 1e-12 * ell) {
      // u ~ u'(0) r near the origin
      return trace.du.front() / scale;
    }
    return hermite_eval(trace, r) / (scale * r);
  };

  sol.radial_grid.resize(cheb_points);
  sol.f_values.resize(cheb_points);
  for (int i = 0; i < cheb_points; ++i) {
    const double r = 0.5 * ell * (1.0 - std::cos(pi * i / (cheb_points - 1)));
    sol.radial_grid[i] = r;
    sol.f_values[i] = f_of(r);
  }

  std::vector<double> w;
  auto x = gauss_legendre(gl_points, w);
  sol.gl_r.resize(gl_points);
  sol.gl_w.resize(gl_points);
  sol.gl_omega.resize(gl_points);
  for (int i = 0; i < gl_points; ++i) {
    const double r = 0.5 * ell * (x[i] + 1.0);
    sol.gl_r[i] = r;
    sol.gl_w[i] = 0.5 * ell * w[i];
    sol.gl_omega[i] = 1.0 - f_of(r);
  }

  // second grid resolving the potential support, where v_N omega lives
  const double edge = spec.kind == PotentialKind::Zero ? 0.0 : spec.R / N;
  if (edge > 0.0) {
    std::vector<double> ws;
    auto xs = gauss_legendre(256, ws);
    sol.gls_r.resize(xs.size());
    sol.gls_w.resize(xs.size());
    sol.gls_omega.resize(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      const double r = 0.5 * edge * (xs[i] + 1.0);
      sol.gls_r[i] = r;
      sol.gls_w[i] = 0.5 * edge * ws[i];
      sol.gls_omega[i] = 1.0 - f_of(r);
    }
  }
  return sol;
}

double eta_convolution(const ScatteringSolution& sol, double qnorm) {
  if (sol.gls_r.empty()) return 0.0;
  const double pi = kTwoPi / 2.0;
  const double q = std::abs(qnorm);
  const double n3 = static_cast<double>(sol.N) * sol.N * sol.N;
  double acc = 0.0;
  for (size_t i = 0; i < sol.gls_r.size(); ++i) {
    const double r = sol.gls_r[i];
    const double vn = n3 * sol.spec.value(sol.N * r);
    const double kern = q < 1e-10 ? r * r : r * std::sin(q * r) / q;
    acc += sol.gls_w[i] * vn * sol.gls_omega[i] * kern;
  }
  return -0.5 * 4.0 * pi * acc;
}

double omega_hat(const ScatteringSolution& sol, double qnorm) {
  const double pi = kTwoPi / 2.0;
  const double q = std::abs(qnorm);
  double acc = 0.0;
  if (q < 1e-10) {
    for (size_t i = 0; i < sol.gl_r.size(); ++i)
      acc += sol.gl_w[i] * sol.gl_omega[i] * sol.gl_r[i] * sol.gl_r[i];
    return 4.0 * pi * acc;
  }
  for (size_t i = 0; i < sol.gl_r.size(); ++i)
    acc += sol.gl_w[i] * sol.gl_omega[i] * sol.gl_r[i] * std::sin(q * sol.gl_r[i]);
  return 4.0 * pi * acc / q;
}

std::vector<double> eta_table(const ScatteringSolution& sol, const MomentumLattice& lattice) {
  std::map<int, double> by_class;
  std::vector<double> eta(lattice.size());
  for (int i = 0; i < lattice.size(); ++i) {
    const int n2 = lattice.mode(i).norm2_int();
    auto it = by_class.find(n2);
    if (it == by_class.end()) {
      const double val = -static_cast<double>(sol.N) * omega_hat(sol, kTwoPi * std::sqrt(double(n2)));
      it = by_class.emplace(n2, val).first;
    }
    eta[i] = it->second;
  }
  return eta;
}

double ball_indicator_hat(double ell, double qnorm) {
  // same radial shape as the square well at unit height
  const double pi = kTwoPi / 2.0;
  const double q = std::abs(qnorm);
  const double x = q * ell;
  double shape;
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    shape = (1.0 / 3.0) - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0;
  } else {
    shape = (std::sin(x) - x * std::cos(x)) / (x * x * x);
  }
  return 4.0 * pi * ell * ell * ell * shape;
}

EtaIdentityReport verify_eta_identity(const ScatteringSolution& sol,
                                      const MomentumLattice& lattice, int conv_cutoff) {
  EtaIdentityReport rep;
  const int base_cut = lattice.cutoff_value() > 0 ? lattice.cutoff_value() : 4;
  rep.conv_cutoff = conv_cutoff > 0 ? conv_cutoff : 2 * base_cut;

  auto conv = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, rep.conv_cutoff);
  auto eta_conv = eta_table(sol, conv);
  const int N = sol.N;
  const double lambda = sol.lambda;
  const double eta0 = -static_cast<double>(N) * omega_hat(sol, 0.0);

  // cache v_hat and chi_hat by squared integer distance
  std::map<int, double> vhat_cache, chi_cache;
  auto vhat_of = [&](int n2) {
    auto it = vhat_cache.find(n2);
    if (it == vhat_cache.end()) {
      const double q = kTwoPi * std::sqrt(double(n2));
      it = vhat_cache.emplace(n2, fourier_coefficient(sol.spec, q / N)).first;
    }
    return it->second;
  };
  auto chi_of = [&](int n2) {
    auto it = chi_cache.find(n2);
    if (it == chi_cache.end()) {
      const double q = kTwoPi * std::sqrt(double(n2));
      it = chi_cache.emplace(n2, ball_indicator_hat(sol.ell, q)).first;
    }
    return it->second;
  };

  auto eta_lat = eta_table(sol, lattice);
  rep.residuals.resize(lattice.size());
  for (int i = 0; i < lattice.size(); ++i) {
    const Momentum p = lattice.mode(i);
    const double p2 = p.p_norm2();
    // The momentum-space form of the Neumann equation, in the eta = -N omega_hat
    // normalization, carries the bare potential term with weight 1/2.
    double lhs = p2 * eta_lat[i] + 0.5 * vhat_of(p.norm2_int());
    double rhs = N * lambda * chi_of(p.norm2_int());
    // q = 0 participates in the convolution
    lhs += vhat_of(p.norm2_int()) * eta0 / (2.0 * N);
    rhs += lambda * chi_of(p.norm2_int()) * eta0;
    for (int j = 0; j < conv.size(); ++j) {
      const Momentum q = conv.mode(j);
      const int d2 = (p - q).norm2_int();
      lhs += vhat_of(d2) * eta_conv[j] / (2.0 * N);
      rhs += lambda * chi_of(d2) * eta_conv[j];
    }
    rep.residuals[i] = std::abs(lhs - rhs);
    rep.max_residual = std::max(rep.max_residual, rep.residuals[i]);
  }

  // Dropped q-tail: |eta_q| <= C/q^2 with C read off the outermost computed
  // shell; kernel envelopes summed shell by shell until they die out.
  double ceta = 0.0;
  for (int j = 0; j < conv.size(); ++j) {
    if (conv.mode(j).norm2_int() >= (rep.conv_cutoff - 1) * (rep.conv_cutoff - 1))
      ceta = std::max(ceta, std::abs(eta_conv[j]) * conv.mode(j).p_norm2());
  }
  const double vhat0 = std::abs(fourier_coefficient(sol.spec, 0.0));
  const double pi = kTwoPi / 2.0;
  auto env_v = [&](double q) {
    if (sol.spec.kind == PotentialKind::Zero || q <= 0.0) return vhat0;
    const double x = q * sol.spec.R;
    const double r3 = sol.spec.R * sol.spec.R * sol.spec.R;
    return std::min(vhat0, 4.0 * pi * sol.spec.V0 * r3 * (1.0 + x) / (x * x * x));
  };
  auto env_chi = [&](double q) {
    const double chi0 = std::abs(ball_indicator_hat(sol.ell, 0.0));
    if (q <= 0.0) return chi0;
    const double x = q * sol.ell;
    const double l3 = sol.ell * sol.ell * sol.ell;
    return std::min(chi0, 4.0 * pi * l3 * (1.0 + x) / (x * x * x));
  };
  double tail = 0.0;
  for (int k = rep.conv_cutoff + 1; k < 200000; ++k) {
    const double shell_count = 4.0 * pi * k * k + 24.0;
    const double q = kTwoPi * k;
    const double eta_bound = ceta / (q * q);
    const double term =
        shell_count * eta_bound * (env_v(q / N) / (2.0 * N) + lambda * env_chi(q));
    tail += term;
    if (term < 1e-14 * std::max(tail, 1e-30) && k > rep.conv_cutoff + 8) break;
  }
  rep.tail_estimate = tail;
  return rep;
}

}  // namespace bosons
