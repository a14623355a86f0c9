// Acceptance suite: one line per criterion, exit 1 on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bosons/bogoliubov.hpp"
#include "bosons/io.hpp"
#include "bosons/model.hpp"
#include "bosons/runner.hpp"
#include "bosons/scattering.hpp"
#include "bosons/spectra.hpp"
#include "bosons/stats.hpp"

using namespace bosons;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> body;
};

PotentialSpec well() { return PotentialSpec::square_well(50.0, 0.2); }

MomentumLattice three_modes() {
  return MomentumLattice::from_modes(
      {Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}, Momentum{{0, 1, 0}}});
}

// 1. exact operator algebra at M in {3, 6}, N = 3, max deviation 1e-10
bool crit_exact_algebra(std::string& detail) {
  const int N = 3;
  double worst = 0.0;
  for (auto lat : {three_modes(), MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1)}) {
    FockBasis basis(lat, N);
    for (int p = 0; p < lat.size(); ++p) {
      for (int q = 0; q < lat.size(); ++q) {
        auto bp = modified_b(basis, p, N);
        auto bqd = modified_b_dagger(basis, q, N);
        auto rhs = (creation(basis, q) * annihilation(basis, p)).scaled(-1.0 / N);
        if (p == q)
          rhs = rhs + sector_diagonal(basis, [N](int t) { return 1.0 - double(t) / N; });
        worst = std::max(worst, (bp * bqd - bqd * bp - rhs).max_abs());
      }
    }
    // monomial exponential-commutator identities
    const int p0 = 0, n0 = lat.negate(0);
    for (const auto& mono :
         {MonomialSpec{{{p0, true}, {n0, true}}}, MonomialSpec{{{p0, false}, {n0, false}}},
          MonomialSpec{{{p0, true}, {p0, false}}},
          MonomialSpec{{{n0, true}, {p0, false}, {n0, false}}}}) {
      auto chk = monomial_commutator_check(basis, mono, N, 0.3);
      worst = std::max({worst, chk.double_dev, chk.single_dev_left, chk.single_dev_right});
    }
    // mean-field double commutator identity
    ModelConfig mc{lat, N, 0.0, well(), {}, -1};
    auto chk = double_commutator_check(mc, 0.7, 0.1);
    worst = std::max(worst, chk.max_deviation);
  }
  std::ostringstream os;
  os << "max deviation " << format_full(worst);
  detail = os.str();
  return worst <= 1e-10;
}

// 2. U H U+ equals the excitation sum at M = 6, N = 3 (dim 84)
bool crit_master_conjugation(std::string& detail) {
  ModelConfig cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), 3, 1.0, well(), {},
                  -1};
  auto bundle = build_excitation_hamiltonian(cfg);
  if (bundle.basis->dim() != 84) {
    detail = "unexpected dimension";
    return false;
  }
  const double dev = (bundle.U * bundle.H_full * bundle.U.adjoint() - bundle.total()).max_abs();
  detail = "max entry deviation " + format_full(dev) + " at dim 84";
  return dev <= 1e-10;
}

// 3. scattering: closed-form a0, eigenvalue 1/N law, kernel decay
bool crit_scattering(std::string& detail) {
  auto spec = well();
  auto sl = scattering_length(spec);
  const double kappa = std::sqrt(spec.V0 / 2.0);
  const double closed = spec.R * (1.0 - std::tanh(kappa * spec.R) / (kappa * spec.R));
  const double rel = std::abs(sl.a0 - closed) / closed;
  bool ok = rel <= 1e-8;

  const double ell = 0.45;
  const double vhat0 = fourier_coefficient(spec, 0.0);
  double first = 0.0, worst_growth = 0.0;
  double eta_bound = 0.0;
  auto lat6 = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 6);
  for (int N : {50, 100, 200}) {
    auto sol = solve_neumann(NeumannProblem{spec, N, ell});
    const double ref = 3.0 * vhat0 / (8.0 * (kTwoPi / 2.0) * N * ell * ell * ell);
    const double dev_n = std::abs(sol.lambda - ref) * N;
    if (N == 50) {
      first = dev_n;
    } else {
      worst_growth = std::max(worst_growth, dev_n / first);
    }
    auto eta = eta_table(sol, lat6);
    for (int i = 0; i < lat6.size(); ++i)
      eta_bound = std::max(eta_bound, std::abs(eta[i]) * lat6.mode(i).p_norm2());
  }
  ok = ok && worst_growth <= 1.2;                 // no growth of |dev| * N
  ok = ok && eta_bound <= 10.0 * vhat0;           // |eta_p| p^2 bounded on the lattice
  std::ostringstream os;
  os << "a0 rel err " << format_full(rel) << ", dev*N growth " << format_full(worst_growth)
     << ", max |eta| p^2 " << format_full(eta_bound);
  detail = os.str();
  return ok;
}

// 4. remainder scaling in 1/N and unitarity of the pair exponential
bool crit_bogoliubov_action(std::string& detail) {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 4);
  std::vector<double> eta(lat.size());
  for (int i = 0; i < lat.size(); ++i) eta[i] = -0.4 / lat.mode(i).p_norm2();

  std::vector<int> occ(lat.size(), 0);
  occ[1] += 1;
  occ[lat.negate(1)] += 1;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(basis.dim());
  psi[basis.rank_of(occ)] = 1.0;

  bool ok = true;
  double prev = -1.0;
  std::ostringstream os;
  os << "ratios";
  for (int N : {8, 16, 32}) {
    const double norm = remainder_d_dagger_apply(basis, 0, eta, N, psi).norm();
    if (prev > 0.0) {
      const double ratio = norm / prev;
      ok = ok && ratio >= 0.3 && ratio <= 0.7;
      os << " " << format_full(ratio);
    }
    prev = norm;
  }

  FockBasis ub(lat, 3);
  auto B = build_generator(ub, eta, 3);
  Eigen::MatrixXd E = expm_dense(B.dense());
  const double drift =
      (E.transpose() * E - Eigen::MatrixXd::Identity(ub.dim(), ub.dim())).cwiseAbs().maxCoeff();
  ok = ok && drift <= 1e-10;
  os << ", unitarity drift " << format_full(drift);
  detail = os.str();
  return ok;
}

// 5. quadratic-model depletion statistics against the kernel tables
bool crit_quadratic_statistics(std::string& detail) {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const double a0 = scattering_length(well()).a0;
  int cap = 4;
  QuadraticModel model;
  Eigen::VectorXd psi;
  double top = 1.0;
  for (; cap <= 20; cap += 2) {
    model = quadratic_model(lat, a0, cap);
    auto gs = ground_state(model.H, EigMethod::Auto, 11);
    psi = gs.vectors.col(0);
    top = nplus_distribution(psi, *model.basis)[cap];
    if (top < 1e-10) break;
  }
  auto rep = depletion_report(psi, *model.basis, model.sinh_nu, model.cosh_nu, {0.1}, {0.0}, 0);
  const double mean_err = std::abs(rep.mean - rep.predicted_mean);
  const double var_err = std::abs(rep.variance - rep.predicted_variance);
  const double h = 1e-3;
  auto curv = mgf(rep.distribution, {-h, 0.0, h}, rep.mean);
  const double curvature = (curv[0].value - 2.0 * curv[1].value + curv[2].value) / (h * h);
  const double curv_rel = std::abs(curvature - rep.predicted_variance) / rep.predicted_variance;
  std::ostringstream os;
  os << "cap " << cap << ", mean err " << format_full(mean_err) << ", variance err "
     << format_full(var_err) << ", curvature rel err " << format_full(curv_rel);
  detail = os.str();
  return top < 1e-10 && mean_err <= 1e-6 && var_err <= 1e-6 && curv_rel <= 1e-4;
}

// 6. second-layer kernels converge to the dispersion angle at rate 1/N
bool crit_second_layer(std::string& detail) {
  auto spec = well();
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 6);
  const double a0 = scattering_length(spec).a0;
  auto nu = bogoliubov_angle_table(lat, a0);
  std::vector<double> gaps;
  for (int N : {64, 128, 256}) {
    auto sol = solve_neumann(NeumannProblem{spec, N, 0.45});
    auto kern = pair_kernels(lat, sol);
    auto tau = second_layer_tau(kern);
    auto eta = eta_table(sol, lat);
    double gap = 0.0;
    for (int i = 0; i < lat.size(); ++i)
      gap = std::max(gap, std::abs(eta[i] + tau[i] - nu[i]));
    gaps.push_back(gap);
  }
  const double f1 = gaps[0] / gaps[1];
  const double f2 = gaps[1] / gaps[2];
  std::ostringstream os;
  os << "gaps " << format_full(gaps[0]) << " -> " << format_full(gaps[1]) << " -> "
     << format_full(gaps[2]) << ", factors " << format_full(f1) << ", " << format_full(f2);
  detail = os.str();
  return f1 >= 1.7 && f1 <= 2.3 && f2 >= 1.7 && f2 <= 2.3;
}

// 7. exponential tail of the interacting ground state at dim 924
bool crit_exponential_tail(std::string& detail) {
  ModelConfig cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), 6, 1.0, well(), {},
                  -1};
  auto bundle = build_excitation_hamiltonian(cfg, false);
  if (bundle.basis->dim() != 924) {
    detail = "unexpected dimension";
    return false;
  }
  auto gs = ground_state(bundle.total(), EigMethod::Auto, 3);
  auto dist = nplus_distribution(gs.vectors.col(0), *bundle.basis);
  auto fit = tail_fit(dist);
  const std::vector<double> probes{0.05, 0.1, 0.2, 0.4, 0.8};
  const double violation = markov_chain_violation(dist, probes);
  std::ostringstream os;
  os << "slope " << format_full(fit.slope) << ", R^2 " << format_full(fit.r2)
     << ", markov violation " << format_full(violation);
  detail = os.str();
  return !fit.degenerate && fit.slope < 0.0 && fit.r2 >= 0.95 && violation <= 1e-12;
}

// 8. thermal exponential moments stay O(1) across the particle sweep
bool crit_gibbs(std::string& detail) {
  const double beta = 2.0, kappa = 0.2;
  double mmin = 1e300, mmax = 0.0, zmin = 1e300, zmax = 0.0;
  for (int n : {4, 6, 8}) {
    ModelConfig cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), n, 1.0, well(),
                    {}, -1};
    auto bundle = build_excitation_hamiltonian(cfg, false);
    auto st = gibbs(bundle.total(), beta);
    const double m = gibbs_exp_moment(st, *bundle.basis, kappa);
    mmin = std::min(mmin, m);
    mmax = std::max(mmax, m);
    zmin = std::min(zmin, st.partition_shifted);
    zmax = std::max(zmax, st.partition_shifted);
  }
  // cold limit against the ground-state moment at N = 4
  ModelConfig cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), 4, 1.0, well(), {},
                  -1};
  auto bundle = build_excitation_hamiltonian(cfg, false);
  auto H = bundle.total();
  auto gs = ground_state(H, EigMethod::Auto, 5);
  const double ground_moment = exp_moment(gs.vectors.col(0), *bundle.basis, kappa);
  auto cold = gibbs(H, 4e5);
  const double cold_gap = std::abs(gibbs_exp_moment(cold, *bundle.basis, kappa) - ground_moment);

  std::ostringstream os;
  os << "moment spread " << format_full(mmax / mmin) << ", partition spread "
     << format_full(zmax / zmin) << ", cold-limit gap " << format_full(cold_gap);
  detail = os.str();
  return mmax / mmin <= 1.5 && zmax / zmin <= 1.25 && cold_gap <= 1e-6;
}

// 9. operator lower bound certificate
bool crit_onsager(std::string& detail) {
  ModelConfig free_cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), 3, 0.0,
                       PotentialSpec::zero(), {}, -1};
  auto free_cert = onsager_check(free_cfg, 0.0);
  const double gap_err = std::abs(free_cert.coefficient - kTwoPi * kTwoPi);

  ModelConfig cfg{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1), 4, 0.0, well(), {},
                  -1};
  auto cert = onsager_check(cfg, 1.0);
  std::ostringstream os;
  os << "free control gap err " << format_full(gap_err) << ", interacting C^-1 "
     << format_full(cert.coefficient) << ", certificate min eig " << format_full(cert.min_eig);
  detail = os.str();
  return gap_err <= 1e-6 && cert.coefficient > 0.0 &&
         cert.min_eig >= -1e-10 * std::max(1.0, cert.coefficient) &&
         free_cert.min_eig >= -1e-10;
}

// 10. determinism of artifacts under a fixed seed
bool crit_determinism(std::string& detail) {
  RunConfig cfg;
  cfg.experiment = Experiment::Decay;
  cfg.N = 4;
  cfg.cutoff = 1;
  cfg.potential = "square_well";
  cfg.V0 = 50.0;
  cfg.R = 0.2;
  cfg.ell = 0.45;
  cfg.seed = 2024;
  cfg.out_dir = "acceptance_out/det_a";
  run(cfg);
  cfg.out_dir = "acceptance_out/det_b";
  run(cfg);
  bool same = true;
  for (const std::string name : {"decay_tail.csv", "decay_mgf.csv", "depletion.json"}) {
    same = same && read_text_file("acceptance_out/det_a/" + name) ==
                       read_text_file("acceptance_out/det_b/" + name);
  }
  detail = same ? "byte-identical artifacts across repeated runs" : "artifact mismatch";
  return same;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "exact operator algebra", crit_exact_algebra},
      {2, "conjugation master identity", crit_master_conjugation},
      {3, "scattering solver", crit_scattering},
      {4, "pair-transformation action", crit_bogoliubov_action},
      {5, "quadratic-model statistics", crit_quadratic_statistics},
      {6, "second-layer kernels", crit_second_layer},
      {7, "exponential tail", crit_exponential_tail},
      {8, "thermal moments", crit_gibbs},
      {9, "operator lower bound", crit_onsager},
      {10, "artifact determinism", crit_determinism},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d [%s] %-32s %8.0f ms  %s\n", c.id, ok ? "PASS" : "FAIL",
                c.name.c_str(), ms, detail.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
