#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bosons/stats.hpp"

using namespace bosons;

namespace {

ModelConfig gp_config(int N) {
  return ModelConfig{MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1),
                     N,
                     1.0,
                     PotentialSpec::square_well(50.0, 0.2),
                     {},
                     -1};
}

Eigen::VectorXd unit_at(long dim, long r) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[r] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("vacuum distribution and validation") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  auto dist = nplus_distribution(unit_at(basis.dim(), 0), basis);
  CHECK(dist[0] == 1.0);
  for (size_t n = 1; n < dist.size(); ++n) CHECK(dist[n] == 0.0);

  Eigen::VectorXd bad = 2.0 * unit_at(basis.dim(), 0);
  CHECK_THROWS_AS(nplus_distribution(bad, basis), ValidationError);
}

TEST_CASE("two-mode squeezed vacuum occupation law") {
  auto pair = MomentumLattice::from_modes({Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}});
  const int cap = 40;
  const double a0 = 0.08;
  auto model = quadratic_model(pair, a0, cap);
  auto gs = ground_state(model.H, EigMethod::Iterative, 5);
  Eigen::VectorXd psi = gs.vectors.col(0);
  if (psi[0] < 0) psi = -psi;
  auto dist = nplus_distribution(psi, *model.basis);

  const double t = std::tanh(std::abs(model.nu[0]));
  for (int n = 0; n <= cap; ++n) {
    if (n % 2 == 1) {
      CHECK(dist[n] <= 1e-12);  // parity superselection
    } else {
      const int k = n / 2;
      const double expect = (1.0 - t * t) * std::pow(t, 2 * k);
      CHECK(std::abs(dist[n] - expect) <= 1e-8);
    }
  }
}

TEST_CASE("exponential moments") {
  std::vector<double> dist{0.5, 0.3, 0.2};
  CHECK(exp_moment(dist, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  double prev = 0.0;
  for (double kappa : {-0.5, 0.0, 0.3, 0.8}) {
    const double m = exp_moment(dist, kappa);
    CHECK(m > prev);  // monotone nondecreasing in kappa
    prev = m;
  }
  // consistency with a direct diagonal evaluation on a real state
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  std::mt19937_64 rng(2);
  Eigen::VectorXd psi(basis.dim());
  for (long i = 0; i < basis.dim(); ++i) psi[i] = 2.0 * uniform01(rng()) - 1.0;
  psi.normalize();
  const double kappa = 0.37;
  double direct = 0.0;
  for (long r = 0; r < basis.dim(); ++r)
    direct += std::exp(kappa * basis.state(r).total) * psi[r] * psi[r];
  CHECK(std::abs(exp_moment(psi, basis, kappa) - direct) <= 1e-12);
}

TEST_CASE("tail fit on a geometric law is exact") {
  const double q = 0.35;
  std::vector<double> dist(30);
  for (size_t n = 0; n < dist.size(); ++n) dist[n] = (1.0 - q) * std::pow(q, n);
  auto fit = tail_fit(dist);
  CHECK(!fit.degenerate);
  CHECK(fit.slope == doctest::Approx(std::log(q)).epsilon(1e-6));
  CHECK(fit.r2 >= 1.0 - 1e-10);

  std::vector<double> point{1.0, 0.0, 0.0};
  CHECK(tail_fit(point).degenerate);
}

TEST_CASE("mgf and chernoff") {
  std::vector<double> dist{0.2, 0.5, 0.2, 0.1};
  double mean = 0.0;
  for (size_t n = 0; n < dist.size(); ++n) mean += n * dist[n];
  auto samples = mgf(dist, {-0.2, 0.0, 0.2}, mean);
  CHECK(samples[1].value == doctest::Approx(0.0).epsilon(1e-14));
  for (const auto& s : samples) CHECK(!s.overflow);

  // overflow marker, not a crash
  auto wild = mgf(dist, {1e6}, 0.0);
  CHECK(wild[0].overflow);

  // exact minimizer on the grid reproduces -x^2/(2 sigma^2)
  const double sigma2 = 1.7, x = 0.9;
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(i * 0.005);
  const double bound = chernoff(x, sigma2, grid);
  CHECK(bound == doctest::Approx(-x * x / (2.0 * sigma2)).epsilon(1e-4));
}

TEST_CASE("markov chain of inequalities is exact") {
  ModelConfig cfg = gp_config(4);
  auto bundle = build_excitation_hamiltonian(cfg, false);
  auto gs = ground_state(bundle.total());
  auto dist = nplus_distribution(gs.vectors.col(0), *bundle.basis);
  CHECK(markov_chain_violation(dist, {0.05, 0.1, 0.3, 0.7, 1.5}) <= 1e-12);
}

TEST_CASE("gibbs exponential moment") {
  ModelConfig cfg = gp_config(4);
  auto bundle = build_excitation_hamiltonian(cfg, false);
  auto H = bundle.total();
  const double kappa = 0.2;

  // beta -> infinity collapses to the ground-state moment
  auto cold = gibbs(H, 4e5);
  auto gs = ground_state(H);
  const double ground_moment = exp_moment(gs.vectors.col(0), *bundle.basis, kappa);
  CHECK(std::abs(gibbs_exp_moment(cold, *bundle.basis, kappa) - ground_moment) <= 1e-6);

  // single mode, kinetic only: double geometric sum
  auto lat1 = MomentumLattice::from_modes({Momentum{{1, 0, 0}}});
  const int cap = 9;
  FockBasis basis1(lat1, cap);
  std::vector<Eigen::Triplet<double>> trip;
  for (long r = 0; r < basis1.dim(); ++r)
    trip.emplace_back(r, r, kTwoPi * kTwoPi * basis1.state(r).total);
  Eigen::SparseMatrix<double> m(basis1.dim(), basis1.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  const double beta = 0.008;
  auto st = gibbs(SparseOperator(std::move(m), true), beta);
  double num = 0.0, den = 0.0;
  for (int n = 0; n <= cap; ++n) {
    num += std::exp((kappa - beta * kTwoPi * kTwoPi) * n);
    den += std::exp(-beta * kTwoPi * kTwoPi * n);
  }
  CHECK(gibbs_exp_moment(st, basis1, kappa) == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("quadratic model depletion statistics match the kernel predictions") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const double a0 = 0.0477;
  int cap = 4;
  Eigen::VectorXd psi;
  QuadraticModel model = quadratic_model(lat, a0, cap);
  for (; cap <= 12; cap += 2) {
    model = quadratic_model(lat, a0, cap);
    auto gs = ground_state(model.H);
    psi = gs.vectors.col(0);
    auto dist = nplus_distribution(psi, *model.basis);
    if (dist[cap] < 1e-10) break;  // top-sector mass converged
  }
  auto rep = depletion_report(psi, *model.basis, model.sinh_nu, model.cosh_nu,
                              {0.1, 0.2}, {-1e-3, 0.0, 1e-3}, 0);

  CHECK(std::abs(rep.mean - rep.predicted_mean) <= 1e-6);
  CHECK(std::abs(rep.variance - rep.predicted_variance) <= 1e-6);
  // the single-pairing reading misses the second Wick contraction by 2x
  CHECK(rep.variance / rep.predicted_variance_per_mode == doctest::Approx(2.0).epsilon(1e-4));

  // MGF curvature at zero equals the variance
  const double h = 1e-3;
  auto curv_samples = mgf(rep.distribution, {-h, 0.0, h}, rep.mean);
  const double curvature =
      (curv_samples[0].value - 2.0 * curv_samples[1].value + curv_samples[2].value) / (h * h);
  CHECK(std::abs(curvature - rep.predicted_variance) <=
        1e-4 * std::abs(rep.predicted_variance));
}

TEST_CASE("observable statistics adjudicate the kernel powers") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const double a0 = 0.06;
  auto model = quadratic_model(lat, a0, 10);
  auto gs = ground_state(model.H);
  Eigen::VectorXd psi = gs.vectors.col(0);
  const int m = lat.size();

  // identity table reduces to the depletion quantities
  auto id_stats = observable_stats(psi, *model.basis, Eigen::MatrixXd::Identity(m, m),
                                   model.sinh_nu, model.cosh_nu);
  double s2 = 0.0;
  for (double s : model.sinh_nu) s2 += s * s;
  CHECK(id_stats.predicted_mean == doctest::Approx(s2).epsilon(1e-14));
  CHECK(std::abs(id_stats.measured_mean - id_stats.predicted_mean) <= 1e-6);
  CHECK(std::abs(id_stats.measured_variance - id_stats.predicted_variance) <= 1e-6);

  // zero table gives all zeros
  auto zero_stats = observable_stats(psi, *model.basis, Eigen::MatrixXd::Zero(m, m),
                                     model.sinh_nu, model.cosh_nu);
  CHECK(zero_stats.measured_mean == 0.0);
  CHECK(zero_stats.measured_variance == doctest::Approx(0.0));
  CHECK(zero_stats.predicted_variance == 0.0);

  // random diagonal table: the sinh^2 reading matches, the sinh^1 does not
  std::mt19937_64 rng(17);
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) O(i, i) = uniform01(rng()) + 0.5;
  auto st = observable_stats(psi, *model.basis, O, model.sinh_nu, model.cosh_nu);
  CHECK(std::abs(st.measured_mean - st.predicted_mean) <= 1e-6);
  CHECK(std::abs(st.measured_mean - st.predicted_mean_sinh1) > 1e-3);
  CHECK(std::abs(st.measured_variance - st.predicted_variance) <= 1e-6);
}

TEST_CASE("mean-field double commutator identity") {
  for (auto lattice :
       {MomentumLattice::from_modes({Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}, Momentum{{0, 1, 0}}}),
        MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1)}) {
    ModelConfig cfg{lattice, 3, 0.0, PotentialSpec::square_well(30.0, 0.25), {}, -1};
    auto chk = double_commutator_check(cfg, 0.7, 0.1);
    CHECK(chk.max_deviation <= 1e-10);

    const double theta = 0.7 * 0.1;
    const double expect = std::pow(std::sinh(2.0 * theta) / std::sinh(theta), 2) *
                          std::exp(2.0 * theta);
    CHECK(chk.pair_block_scale == doctest::Approx(expect).epsilon(1e-10));
  }
  // kappa = 0: both sides vanish
  ModelConfig cfg = gp_config(3);
  cfg.beta = 0.0;
  auto chk0 = double_commutator_check(cfg, 0.7, 0.0);
  CHECK(chk0.max_deviation == 0.0);
}

TEST_CASE("monomial commutator identities") {
  auto lat3 = MomentumLattice::from_modes(
      {Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}, Momentum{{0, 1, 0}}});
  const int N = 3;
  FockBasis basis(lat3, N);
  const int p = lat3.index_of(Momentum{{1, 0, 0}});
  const int mp = lat3.index_of(Momentum{{-1, 0, 0}});
  const int q = lat3.index_of(Momentum{{0, 1, 0}});

  // number-conserving monomial: double commutator is exactly zero
  auto balanced = monomial_commutator_check(basis, MonomialSpec{{{p, true}, {q, false}}}, N, 0.4);
  CHECK(balanced.imbalance == 0);
  CHECK(balanced.double_dev == 0.0);

  // pair creation (+2)
  auto pair = monomial_commutator_check(basis, MonomialSpec{{{p, true}, {mp, true}}}, N, 0.4);
  CHECK(pair.imbalance == 2);
  CHECK(pair.double_dev <= 1e-12);
  CHECK(pair.single_dev_left <= 1e-12);
  CHECK(pair.single_dev_right <= 1e-12);

  // a longer mixed monomial (-1)
  auto mixed = monomial_commutator_check(
      basis, MonomialSpec{{{q, true}, {p, false}, {mp, false}}}, N, 0.25);
  CHECK(mixed.imbalance == -1);
  CHECK(mixed.double_dev <= 1e-12);
  CHECK(mixed.single_dev_left <= 1e-12);
  CHECK(mixed.single_dev_right <= 1e-12);
}

TEST_CASE("monomial commutator identities hold for random dagger patterns") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const int N = 3;
  FockBasis basis(lat, N);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int len = 1 + static_cast<int>(uniform01(rng()) * 4.0);
    MonomialSpec mono;
    for (int i = 0; i < len; ++i) {
      const int mode = static_cast<int>(uniform01(rng()) * lat.size());
      mono.factors.emplace_back(mode, uniform01(rng()) < 0.5);
    }
    const double kappa = 0.05 + 0.5 * uniform01(rng());
    auto chk = monomial_commutator_check(basis, mono, N, kappa);
    CHECK(chk.double_dev <= 1e-11);
    CHECK(chk.single_dev_left <= 1e-11);
    CHECK(chk.single_dev_right <= 1e-11);
    if (chk.imbalance == 0) CHECK(chk.double_dev == 0.0);
  }
}

TEST_CASE("onsager certificate") {
  // free control: the kinetic gap (2 pi)^2 exactly, with zero offset
  ModelConfig cfg = gp_config(3);
  cfg.beta = 0.0;
  cfg.spec = PotentialSpec::zero();
  auto cert = onsager_check(cfg, 0.0);
  CHECK(cert.coefficient == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-9));
  CHECK(cert.min_eig >= -1e-10);

  // interacting mean-field gas: positive coefficient with a PSD certificate
  cfg.spec = PotentialSpec::square_well(30.0, 0.25);
  auto cert2 = onsager_check(cfg, 1.0);
  CHECK(cert2.coefficient > 0.0);
  CHECK(cert2.min_eig >= -1e-10 * std::max(1.0, cert2.coefficient));

  // fitted coefficient stable across the particle sweep at fixed potential
  double cmin = 1e300, cmax = 0.0;
  for (int n : {4, 6, 8}) {
    ModelConfig sweep = cfg;
    sweep.N = n;
    const double c = onsager_check(sweep, 1.0).coefficient;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  CHECK(cmax / cmin <= 1.3);
}

TEST_CASE("gronwall replay on the interacting ground state") {
  ModelConfig cfg = gp_config(4);
  auto bundle = build_excitation_hamiltonian(cfg, false);
  auto gs = ground_state(bundle.total());
  auto rep = gronwall_replay(gs.vectors.col(0), *bundle.basis, 0.3);
  CHECK(rep.max_derivative_gap <= 1e-8);
  CHECK(rep.bound_holds);
  CHECK(rep.final_norm_sq >= 1.0);
}
