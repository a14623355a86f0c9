#include "bosons/model.hpp"

#include <cmath>

namespace bosons {

void ModelConfig::validate() const {
  if (N < 2) throw ValidationError("ModelConfig: N must be >= 2");
  if (beta < 0.0 || beta > 1.0) throw ValidationError("ModelConfig: beta must lie in [0,1]");
  if (cap >= 0 && cap > N) throw ValidationError("ModelConfig: cap must satisfy cap <= N");
  if (lattice.size() == 0) throw ValidationError("ModelConfig: empty lattice");
}

SparseOperator build_full_hamiltonian(const ModelConfig& config, const FullSectorBasis& basis) {
  config.validate();
  const auto& lat = basis.lattice();
  const int M = lat.size();

  // kinetic diagonal sum_p p^2 n_p  (slot s >= 1 holds mode s-1)
  std::vector<Eigen::Triplet<double>> trip;
  for (long r = 0; r < basis.dim(); ++r) {
    const auto& occ = basis.occ(r);
    double e = 0.0;
    for (int s = 1; s <= M; ++s) e += lat.mode(s - 1).p_norm2() * occ[s];
    if (e != 0.0) trip.emplace_back(r, r, e);
  }
  Eigen::SparseMatrix<double> kin(basis.dim(), basis.dim());
  kin.setFromTriplets(trip.begin(), trip.end());

  // pair sum: ordered quadruples of slots with momentum conservation;
  // coefficient is the coupling at the transfer l = mom(a1) - mom(c1)
  auto mom_of = [&](int slot) { return slot == 0 ? Momentum{} : lat.mode(slot - 1); };
  std::vector<Monomial> terms;
  for (int c1 = 0; c1 <= M; ++c1) {
    for (int c2 = 0; c2 <= M; ++c2) {
      for (int a1 = 0; a1 <= M; ++a1) {
        const Momentum rest = mom_of(c1) + mom_of(c2) - mom_of(a1);
        for (int a2 = 0; a2 <= M; ++a2) {
          if (!(mom_of(a2) == rest)) continue;
          const Momentum l = mom_of(a1) - mom_of(c1);
          const double w = config.coupling(l);
          if (w == 0.0) continue;
          terms.push_back(Monomial{{{c1, true}, {c2, true}, {a1, false}, {a2, false}}, w});
        }
      }
    }
  }
  auto pair_part = assemble_monomials(basis, terms);
  Eigen::SparseMatrix<double> H = kin + pair_part.mat;
  H.prune(0.0);
  H.makeCompressed();
  return SparseOperator(std::move(H), true);
}

HamiltonianBundle build_excitation_hamiltonian(const ModelConfig& config, bool with_full_sector) {
  config.validate();
  HamiltonianBundle bundle;
  bundle.config = config;
  bundle.basis = std::make_shared<FockBasis>(config.lattice, config.effective_cap(),
                                             config.dimension_budget);
  const FockBasis& basis = *bundle.basis;
  const auto& lat = basis.lattice();
  const int M = lat.size();
  const int N = config.N;

  // L0: diagonal in the sector total
  const double w0 = config.coupling(Momentum{});
  bundle.L0 = sector_diagonal(basis, [&](int t) { return w0 * (N - t) * (N + t - 1.0); });

  // kinetic diagonal
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (long r = 0; r < basis.dim(); ++r) {
      const auto& st = basis.state(r);
      double e = 0.0;
      for (int i = 0; i < M; ++i) e += lat.mode(i).p_norm2() * st.occ[i];
      if (e != 0.0) trip.emplace_back(r, r, e);
    }
    Eigen::SparseMatrix<double> kin(basis.dim(), basis.dim());
    kin.setFromTriplets(trip.begin(), trip.end());
    bundle.kinetic = SparseOperator(std::move(kin), true);
  }

  // L2 = kinetic + 2N w(p) [b+_p b_p - a+_p a_p/N] + N w(p) [b+_p b+_{-p} + h.c.]
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (long r = 0; r < basis.dim(); ++r) {
      const auto& st = basis.state(r);
      double e = 0.0;
      for (int i = 0; i < M; ++i) {
        if (st.occ[i] == 0) continue;
        e += 2.0 * config.coupling(lat.mode(i)) * st.occ[i] * (N - st.total);
      }
      if (e != 0.0) trip.emplace_back(r, r, e);
    }
    Eigen::SparseMatrix<double> numpart(basis.dim(), basis.dim());
    numpart.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseMatrix<double> pair(basis.dim(), basis.dim());
    for (int i = 0; i < M; ++i) {
      const double w = config.coupling(lat.mode(i));
      if (w == 0.0) continue;
      auto bb = modified_b(basis, i, N) * modified_b(basis, lat.negate(i), N);
      pair = pair + N * w * (bb.mat + Eigen::SparseMatrix<double>(bb.mat.transpose()));
    }
    Eigen::SparseMatrix<double> L2 = bundle.kinetic.mat + numpart + pair;
    L2.prune(0.0);
    L2.makeCompressed();
    bundle.L2 = SparseOperator(std::move(L2), true);
  }

  // L3 = 2 sqrt(N) w(p) [b+_{p+q} a+_{-p} a_q + h.c.]
  {
    Eigen::SparseMatrix<double> L3(basis.dim(), basis.dim());
    for (int ip = 0; ip < M; ++ip) {
      const Momentum p = lat.mode(ip);
      const double w = config.coupling(p);
      if (w == 0.0) continue;
      const int ineg = lat.negate(ip);
      for (int iq = 0; iq < M; ++iq) {
        const Momentum pq = p + lat.mode(iq);
        if (pq.is_zero() || !lat.contains(pq)) continue;
        auto term = modified_b_dagger(basis, lat.index_of(pq), N) *
                    (creation(basis, ineg) * annihilation(basis, iq));
        L3 = L3 + 2.0 * std::sqrt(static_cast<double>(N)) * w *
                      (term.mat + Eigen::SparseMatrix<double>(term.mat.transpose()));
      }
    }
    L3.prune(0.0);
    L3.makeCompressed();
    bundle.L3 = SparseOperator(std::move(L3), true);
  }

  // L4 = sum w(r) a+_{p+r} a+_q a_p a_{q+r}, all four indices on the lattice
  {
    std::vector<Monomial> terms;
    for (int ip = 0; ip < M; ++ip) {
      const Momentum p = lat.mode(ip);
      for (int ipr = 0; ipr < M; ++ipr) {
        const Momentum r = lat.mode(ipr) - p;  // p + r runs over the lattice
        for (int iq = 0; iq < M; ++iq) {
          const Momentum qr = lat.mode(iq) + r;
          if (qr.is_zero() || !lat.contains(qr)) continue;
          const double w = config.coupling(r);
          if (w == 0.0) continue;
          terms.push_back(Monomial{
              {{ipr, true}, {iq, true}, {ip, false}, {lat.index_of(qr), false}}, w});
        }
      }
    }
    bundle.L4 = assemble_monomials(basis, terms);
    bundle.L4.hermitian_hint = true;
  }
  bundle.V = bundle.L4;

  if (with_full_sector && config.effective_cap() == N) {
    bundle.full_basis =
        std::make_shared<FullSectorBasis>(config.lattice, N, config.dimension_budget);
    bundle.H_full = build_full_hamiltonian(config, *bundle.full_basis);
    bundle.U = excitation_map(*bundle.full_basis, basis);
  }
  return bundle;
}

double momentum_conservation_defect(const FullSectorBasis& basis, const SparseOperator& H) {
  const auto& lat = basis.lattice();
  const int M = lat.size();
  std::vector<std::array<long, 3>> ptot(basis.dim());
  for (long r = 0; r < basis.dim(); ++r) {
    const auto& occ = basis.occ(r);
    std::array<long, 3> acc{0, 0, 0};
    for (int s = 1; s <= M; ++s) {
      for (int c = 0; c < 3; ++c) acc[c] += static_cast<long>(occ[s]) * lat.mode(s - 1).k[c];
    }
    ptot[r] = acc;
  }
  double defect = 0.0;
  for (int k = 0; k < H.mat.outerSize(); ++k) {
    for (SpMat::InnerIterator it(H.mat, k); it; ++it) {
      if (ptot[it.row()] != ptot[it.col()]) defect = std::max(defect, std::abs(it.value()));
    }
  }
  return defect;
}

QuadraticModel quadratic_model(const MomentumLattice& lattice, double a0, int cap,
                               long dimension_budget) {
  if (a0 < 0.0) throw DomainError("quadratic_model: a0 must be >= 0");
  QuadraticModel model;
  model.basis = std::make_shared<FockBasis>(lattice, cap, dimension_budget);
  const FockBasis& basis = *model.basis;
  const int M = lattice.size();
  const double pi = kTwoPi / 2.0;

  model.A.resize(M);
  model.B.resize(M);
  model.nu.resize(M);
  model.sinh_nu.resize(M);
  model.cosh_nu.resize(M);
  for (int i = 0; i < M; ++i) {
    const double p2 = lattice.mode(i).p_norm2();
    model.A[i] = p2 + 8.0 * pi * a0;
    model.B[i] = 8.0 * pi * a0;
    model.nu[i] = 0.25 * std::log(p2 / (p2 + 16.0 * pi * a0));
    model.sinh_nu[i] = std::sinh(model.nu[i]);
    model.cosh_nu[i] = std::cosh(model.nu[i]);
    const double via_ab = 0.25 * std::log((model.A[i] - model.B[i]) / (model.A[i] + model.B[i]));
    model.angle_consistency = std::max(model.angle_consistency, std::abs(via_ab - model.nu[i]));
  }

  Eigen::SparseMatrix<double> H(basis.dim(), basis.dim());
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (long r = 0; r < basis.dim(); ++r) {
      const auto& st = basis.state(r);
      double e = 0.0;
      for (int i = 0; i < M; ++i) e += model.A[i] * st.occ[i];
      if (e != 0.0) trip.emplace_back(r, r, e);
    }
    H.setFromTriplets(trip.begin(), trip.end());
  }
  for (int i = 0; i < M; ++i) {
    if (model.B[i] == 0.0) continue;
    auto aa = annihilation(basis, i) * annihilation(basis, lattice.negate(i));
    H = H + 0.5 * model.B[i] * (aa.mat + Eigen::SparseMatrix<double>(aa.mat.transpose()));
  }
  H.prune(0.0);
  H.makeCompressed();
  model.H = SparseOperator(std::move(H), true);
  return model;
}

double quadratic_pair_ground_energy(double A, double B) {
  if (A < std::abs(B)) throw DomainError("quadratic_pair_ground_energy: A < |B|");
  return std::sqrt(A * A - B * B) - A;
}

SparseOperator build_renormalized(const HamiltonianBundle& bundle, const std::vector<double>& eta,
                                  double tol) {
  auto B = build_generator(*bundle.basis, eta, bundle.config.N);
  // e^{B} L e^{-B}
  return conjugate(bundle.total(), B.scaled(-1.0), tol);
}

}  // namespace bosons
