#include "bosons/bogoliubov.hpp"

#include <cmath>
#include <map>

#include "bosons/scattering.hpp"

namespace bosons {

KernelTable KernelTable::from_eta(const std::vector<double>& eta) {
  KernelTable t;
  t.eta = eta;
  const size_t n = eta.size();
  t.sigma.resize(n);
  t.gamma.resize(n);
  t.alpha.resize(n);
  t.beta.resize(n);
  for (size_t i = 0; i < n; ++i) {
    t.sigma[i] = std::sinh(eta[i]);
    t.gamma[i] = std::cosh(eta[i]);
    t.alpha[i] = t.gamma[i] - 1.0;
    t.beta[i] = t.sigma[i] - eta[i];
  }
  return t;
}

SparseOperator build_generator(const FockBasis& basis, const std::vector<double>& eta, int N) {
  const auto& lat = basis.lattice();
  if (static_cast<int>(eta.size()) != lat.size())
    throw ValidationError("build_generator: eta table length mismatch");
  for (int i = 0; i < lat.size(); ++i) {
    const int j = lat.negate(i);
    if (std::abs(eta[i] - eta[j]) > 1e-12)
      throw ValidationError("build_generator: eta table is not even in p");
  }
  Eigen::SparseMatrix<double> acc(basis.dim(), basis.dim());
  for (int i = 0; i < lat.size(); ++i) {
    if (eta[i] == 0.0) continue;
    const int j = lat.negate(i);
    auto pair_ann = modified_b(basis, i, N) * modified_b(basis, j, N);
    acc = acc + 0.5 * eta[i] * (Eigen::SparseMatrix<double>(pair_ann.mat.transpose()) - pair_ann.mat);
  }
  acc.prune(0.0);
  acc.makeCompressed();
  return SparseOperator(std::move(acc));
}

SparseOperator conjugate(const SparseOperator& op, const SparseOperator& B, double tol,
                         long dense_limit) {
  if (op.rows() != B.rows() || op.cols() != B.cols())
    throw ValidationError("conjugate: operator and generator live on different bases");
  const long n = op.rows();
  Eigen::MatrixXd result;
  double drift = 0.0;
  if (n <= dense_limit) {
    Eigen::MatrixXd Eplus = expm_dense(Eigen::MatrixXd(B.mat));
    Eigen::MatrixXd Eminus = expm_dense(-Eigen::MatrixXd(B.mat));
    drift = (Eminus * Eplus - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (drift > tol)
      throw NumericalError("conjugate: unitarity drift " + std::to_string(drift) +
                           " above tolerance");
    result = Eminus * Eigen::MatrixXd(op.mat) * Eplus;
  } else {
    // column-wise Krylov: conj(op) e_j = e^{-B} op e^{B} e_j
    result.resize(n, n);
    Eigen::VectorXd col(n);
    for (long j = 0; j < n; ++j) {
      col.setZero();
      col[j] = 1.0;
      Eigen::VectorXd w = expm_multiply(B.mat, col, 1.0, tol);
      drift = std::max(drift, std::abs(w.norm() - 1.0));
      w = op.mat * w;
      result.col(j) = expm_multiply(B.mat, w, -1.0, tol);
    }
    if (drift > tol)
      throw NumericalError("conjugate: propagator norm drift " + std::to_string(drift) +
                           " above tolerance");
  }
  Eigen::SparseMatrix<double> sp = result.sparseView(1.0, 1e-300);
  sp.makeCompressed();
  return SparseOperator(std::move(sp), op.hermitian_hint);
}

Eigen::VectorXd conjugate_vector(const SparseOperator& B, const Eigen::VectorXd& v, double t,
                                 double tol) {
  return expm_multiply(B.mat, v, t, tol);
}

SparseOperator remainder_d(const FockBasis& basis, int mode, const std::vector<double>& eta,
                           int N, double tol) {
  const auto& lat = basis.lattice();
  auto B = build_generator(basis, eta, N);
  auto conj_b = conjugate(modified_b(basis, mode, N), B, tol);
  const int neg = lat.negate(mode);
  const double g = std::cosh(eta[mode]);
  const double s = std::sinh(eta[mode]);
  auto principal =
      modified_b(basis, mode, N).scaled(g) + modified_b_dagger(basis, neg, N).scaled(s);
  return conj_b - principal;
}

Eigen::VectorXd remainder_d_dagger_apply(const FockBasis& basis, int mode,
                                         const std::vector<double>& eta, int N,
                                         const Eigen::VectorXd& psi, double tol) {
  const auto& lat = basis.lattice();
  auto B = build_generator(basis, eta, N);
  // e^{-B} b+_p e^{B} psi - gamma_p b+_p psi - sigma_p b_{-p} psi
  Eigen::VectorXd w = expm_multiply(B.mat, psi, 1.0, tol);
  w = modified_b_dagger(basis, mode, N).apply(w);
  w = expm_multiply(B.mat, w, -1.0, tol);
  const int neg = lat.negate(mode);
  w -= std::cosh(eta[mode]) * modified_b_dagger(basis, mode, N).apply(psi);
  w -= std::sinh(eta[mode]) * modified_b(basis, neg, N).apply(psi);
  return w;
}

PairKernels pair_kernels(const MomentumLattice& lattice, const ScatteringSolution& sol) {
  auto eta = eta_table(sol, lattice);
  std::map<int, double> conv_cache;
  PairKernels out;
  out.F.resize(lattice.size());
  out.G.resize(lattice.size());
  for (int i = 0; i < lattice.size(); ++i) {
    const Momentum p = lattice.mode(i);
    const double p2 = p.p_norm2();
    const double vp = fourier_coefficient(sol.spec, p.p_norm() / sol.N);
    const double g = std::cosh(eta[i]), s = std::sinh(eta[i]);
    const double gs2 = g * g + s * s;
    auto it = conv_cache.find(p.norm2_int());
    if (it == conv_cache.end())
      it = conv_cache.emplace(p.norm2_int(), eta_convolution(sol, p.p_norm())).first;
    // Resummed coupling vtilde = vhat(p/N) + (1/N) sum_q vhat((p-q)/N) eta_q
    // = (v_N f_N)^(p); with it, the eta- and tau-rotations compose exactly to
    // the diagonalizing angle of (p^2 + vtilde, vtilde).
    const double vt = vp + 2.0 * it->second;
    out.F[i] = (p2 + vt) * gs2 + 2.0 * g * s * vt;
    out.G[i] = gs2 * vt + 2.0 * g * s * (p2 + vt);
  }
  return out;
}

std::vector<double> second_layer_tau(const PairKernels& k) {
  std::vector<double> tau(k.F.size());
  for (size_t i = 0; i < k.F.size(); ++i) {
    if (!(std::abs(k.G[i]) < k.F[i]))
      throw DomainError("second_layer_tau: |G_p| >= F_p, unphysical kernel");
    tau[i] = 0.5 * std::atanh(-k.G[i] / k.F[i]);
  }
  return tau;
}

std::vector<double> bogoliubov_angle_table(const MomentumLattice& lattice, double a0) {
  if (a0 < 0.0) throw DomainError("bogoliubov_angle_table: a0 must be >= 0");
  std::vector<double> nu(lattice.size());
  const double pi = kTwoPi / 2.0;
  for (int i = 0; i < lattice.size(); ++i) {
    const double p2 = lattice.mode(i).p_norm2();
    nu[i] = 0.25 * std::log(p2 / (p2 + 16.0 * pi * a0));
  }
  return nu;
}

VacuumNumberExpansion vacuum_number_expansion(const FockBasis& basis,
                                              const std::vector<double>& eta, int N,
                                              int quad_nodes) {
  const auto& lat = basis.lattice();
  auto B = build_generator(basis, eta, N);

  Eigen::VectorXd vac = Eigen::VectorXd::Zero(basis.dim());
  vac[0] = 1.0;
  Eigen::VectorXd phi1 = expm_multiply(B.mat, vac, 1.0, 1e-13);

  VacuumNumberExpansion out;
  out.conjugated = phi1.dot(excitation_number(basis).apply(phi1));
  for (double e : eta) out.sigma_sum += std::sinh(e) * std::sinh(e);

  // pairing operator P = sum_p eta_p (b+_p b+_{-p} + b_p b_{-p})
  Eigen::SparseMatrix<double> P(basis.dim(), basis.dim());
  for (int i = 0; i < lat.size(); ++i) {
    if (eta[i] == 0.0) continue;
    auto bb = modified_b(basis, i, N) * modified_b(basis, lat.negate(i), N);
    P = P + eta[i] * (bb.mat + Eigen::SparseMatrix<double>(bb.mat.transpose()));
  }

  // Gauss-Legendre on [0,1]: remainder = int (w(s) - pi(s)) ds where
  // w(s) = <e^{sB} vac, P e^{sB} vac> and pi(s) is the principal part whose
  // integral is exactly sum_p sinh^2(eta_p).
  std::vector<double> gw;
  std::vector<double> gx = gauss_legendre(quad_nodes, gw);
  double remainder = 0.0;
  for (int i = 0; i < quad_nodes; ++i) {
    const double s = 0.5 * (gx[i] + 1.0);
    const double w = 0.5 * gw[i];
    Eigen::VectorXd phis = expm_multiply(B.mat, vac, s, 1e-13);
    const double ws = phis.dot(P * phis);
    double pis = 0.0;
    for (double e : eta) pis += e * std::sinh(2.0 * s * e);
    remainder += w * (ws - pis);
  }
  out.remainder = remainder;
  return out;
}

}  // namespace bosons
