#include "bosons/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "bosons/io.hpp"
#include "bosons/scattering.hpp"
#include "bosons/stats.hpp"

namespace bosons {

namespace {

using nlohmann::json;

struct Context {
  RunReport report;
  std::string dir;
  bool want_csv = true;
  bool want_json = true;

  void check(const std::string& name, const std::string& anchor, bool passed, double value,
             double tolerance, const std::string& details = "") {
    report.checks.push_back(CheckEntry{name, anchor, true, passed, value, tolerance, details});
  }
  void note(const std::string& name, const std::string& anchor, double value,
            const std::string& details = "") {
    report.checks.push_back(CheckEntry{name, anchor, false, true, value, 0.0, details});
  }
  std::string artifact(const std::string& filename) {
    const std::string path = dir + "/" + filename;
    report.artifacts.push_back(path);
    return path;
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// ---------------------------------------------------------------- scatter --

void run_scatter(const RunConfig& cfg, Context& ctx) {
  const auto spec = cfg.potential_spec();
  auto lattice = MomentumLattice::enumerate_modes(cfg.cutoff_kind, cfg.cutoff);

  if (spec.kind != PotentialKind::Zero) {
    auto sl = scattering_length(spec, cfg.ode_tol);
    ctx.note("scattering_length", "zero-energy-radial-solve", sl.a0);
    ctx.check("raw_integral_8pi_a0", "zero-energy-integral-identity",
              std::abs(sl.raw_integral - 8.0 * (kTwoPi / 2.0) * sl.a0) <=
                  1e-8 * std::max(1.0, std::abs(sl.raw_integral)),
              sl.raw_integral, 1e-8, "int v f versus 8 pi a0");
    if (spec.kind == PotentialKind::SquareWell) {
      const double kappa = std::sqrt(spec.V0 / 2.0);
      const double closed = spec.R * (1.0 - std::tanh(kappa * spec.R) / (kappa * spec.R));
      ctx.check("square_well_a0_closed_form", "square-well-scattering-length",
                std::abs(sl.a0 - closed) <= 1e-8 * std::abs(closed), sl.a0, 1e-8,
                "closed form R(1 - tanh(kR)/(kR))");
    }
  }

  auto sol = solve_neumann(NeumannProblem{spec, cfg.scatter_N, cfg.ell}, cfg.ode_tol);
  ctx.note("neumann_lambda", "neumann-lowest-eigenvalue", sol.lambda);
  bool bounds_ok = true;
  for (double f : sol.f_values) bounds_ok = bounds_ok && f >= -1e-10 && f <= 1.0 + 1e-10;
  ctx.check("profile_bounds", "neumann-profile-bounds", bounds_ok,
            *std::min_element(sol.f_values.begin(), sol.f_values.end()), 1e-10,
            "0 <= f <= 1 on the radial grid");

  auto eta = eta_table(sol, lattice);
  double decay = 0.0;
  for (int i = 0; i < lattice.size(); ++i)
    decay = std::max(decay, std::abs(eta[i]) * lattice.mode(i).p_norm2());
  ctx.note("eta_p2_bound", "kernel-quadratic-decay", decay, "max |eta_p| p^2 over the lattice");

  auto identity = verify_eta_identity(sol, lattice);
  ctx.check("eta_identity_within_budget", "momentum-space-scattering-identity",
            identity.max_residual <= 1.5 * identity.tail_estimate + 1e-6, identity.max_residual,
            identity.tail_estimate, "residual against quadrature + truncation budget");

  if (ctx.want_csv) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < sol.radial_grid.size(); ++i)
      rows.push_back({sol.radial_grid[i], sol.f_values[i]});
    write_csv_numeric(ctx.artifact("scattering_profile.csv"), {"r", "f"}, rows);

    auto kern = pair_kernels(lattice, sol);
    auto tau = second_layer_tau(kern);
    auto nu = bogoliubov_angle_table(lattice, sol.length.a0);
    std::vector<std::vector<std::string>> krows;
    for (int i = 0; i < lattice.size(); ++i) {
      const auto& m = lattice.mode(i);
      krows.push_back({std::to_string(m.k[0]), std::to_string(m.k[1]), std::to_string(m.k[2]),
                       format_full(eta[i]), format_full(std::sinh(eta[i])),
                       format_full(std::cosh(eta[i])), format_full(tau[i]), format_full(nu[i])});
    }
    write_csv(ctx.artifact("kernels.csv"), {"kx", "ky", "kz", "eta", "sigma", "gamma", "tau", "nu"},
              krows);
  }
  if (ctx.want_json) {
    json j;
    j["lambda"] = sol.lambda;
    j["a0"] = sol.length.a0;
    j["raw_integral"] = sol.length.raw_integral;
    j["ell"] = sol.ell;
    j["N"] = sol.N;
    json etas = json::array();
    for (int i = 0; i < lattice.size(); ++i) {
      etas.push_back({{"k", {lattice.mode(i).k[0], lattice.mode(i).k[1], lattice.mode(i).k[2]}},
                      {"eta", eta[i]}});
    }
    j["eta"] = etas;
    write_text_file(ctx.artifact("scattering.json"), j.dump(2) + "\n");
  }
}

// --------------------------------------------------------------- spectrum --

void run_spectrum(const RunConfig& cfg, Context& ctx) {
  auto bundle = build_excitation_hamiltonian(cfg.model_config());
  auto L = bundle.total();
  ctx.check("excitation_hermitian", "operator-hermiticity", L.hermiticity_defect() <= 1e-12,
            L.hermiticity_defect(), 1e-12);
  if (bundle.has_full()) {
    const double dev = (bundle.U * bundle.H_full * bundle.U.adjoint() - L).max_abs();
    ctx.check("conjugation_master_identity", "excitation-conjugation", dev <= 1e-10, dev, 1e-10,
              "U H U+ versus the normal-ordered excitation sum");
    const double mom = momentum_conservation_defect(*bundle.full_basis, bundle.H_full);
    ctx.check("momentum_conservation", "total-momentum-commutes", mom <= 1e-12, mom, 1e-12);
  }

  const int count = static_cast<int>(std::min<long>(8, bundle.basis->dim()));
  auto res = low_spectrum(L, count, EigMethod::Auto, cfg.seed);
  ctx.note("ground_energy", "lowest-eigenvalue", res.values[0]);
  bool ascending = true;
  for (int i = 1; i < res.values.size(); ++i)
    ascending = ascending && res.values[i] - res.values[i - 1] >= -1e-10;
  ctx.check("spectrum_ascending", "eigenvalue-order", ascending, res.values[count - 1], 1e-10);

  // renormalized Hamiltonian: isospectrality and the reported lower-bound gap
  const auto spec = cfg.potential_spec();
  if (bundle.basis->dim() <= 1024 && spec.kind != PotentialKind::Zero) {
    auto sol = solve_neumann(NeumannProblem{spec, cfg.N, cfg.ell}, cfg.ode_tol);
    auto eta = eta_table(sol, bundle.basis->lattice());
    auto G = build_renormalized(bundle, eta);
    auto eigL = dense_sym_eig(L.dense());
    auto eigG = dense_sym_eig(G.dense());
    const double drift = (eigL.values - eigG.values).cwiseAbs().maxCoeff();
    ctx.check("renormalized_isospectral", "conjugation-spectrum-invariance", drift <= 1e-9,
              drift, 1e-9);
    Eigen::MatrixXd probe = G.dense() -
                            eigL.values[0] * Eigen::MatrixXd::Identity(G.rows(), G.cols()) -
                            0.5 * (bundle.kinetic + bundle.V).dense();
    auto probe_eig = dense_sym_eig(0.5 * (probe + probe.transpose()));
    ctx.note("renormalized_lower_bound_constant", "renormalized-lower-bound",
             std::max(0.0, -probe_eig.values[0]),
             "smallest constant C with G - E0 - (K+V)/2 + C >= 0");
  }

  if (ctx.want_csv) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < res.values.size(); ++i)
      rows.push_back({static_cast<double>(i), res.values[i], res.residuals[i]});
    write_csv_numeric(ctx.artifact("spectrum.csv"), {"index", "eigenvalue", "residual"}, rows);
  }
}

// ------------------------------------------------------------------ decay --

void run_decay(const RunConfig& cfg, Context& ctx) {
  auto bundle = build_excitation_hamiltonian(cfg.model_config(), false);
  auto gs = ground_state(bundle.total(), EigMethod::Auto, cfg.seed);
  Eigen::VectorXd psi = gs.vectors.col(0);

  const auto spec = cfg.potential_spec();
  const double a0 = spec.kind == PotentialKind::Zero ? 0.0 : scattering_length(spec, cfg.ode_tol).a0;
  auto nu = bogoliubov_angle_table(bundle.basis->lattice(), a0);
  std::vector<double> snu(nu.size()), cnu(nu.size());
  for (size_t i = 0; i < nu.size(); ++i) {
    snu[i] = std::sinh(nu[i]);
    cnu[i] = std::cosh(nu[i]);
  }

  auto rep = depletion_report(psi, *bundle.basis, snu, cnu, cfg.kappa_grid, cfg.lambda_grid,
                              cfg.N);
  double mass = 0.0;
  for (double p : rep.distribution) mass += p;
  ctx.check("distribution_normalized", "sector-projector-completeness",
            std::abs(mass - 1.0) <= 1e-12, mass, 1e-12);

  const double violation = markov_chain_violation(rep.distribution, cfg.kappa_grid);
  ctx.check("markov_chain_exact", "tail-markov-inequality", violation <= 1e-12, violation, 1e-12,
            "P(N+ >= n) <= e^{-kappa n} E[e^{kappa N+}] for every probe kappa");

  ctx.check("tail_slope_negative", "exponential-tail-sign", !rep.tail.degenerate && rep.tail.slope < 0.0,
            rep.tail.slope, 0.0, "finite-N proxy for the asymptotic tail bound");
  ctx.check("tail_fit_quality", "exponential-tail-linearity", rep.tail.r2 >= 0.95, rep.tail.r2,
            0.95, "finite-N proxy for the asymptotic tail bound");
  ctx.note("depletion_mean", "depletion-mean", rep.mean);
  ctx.note("depletion_variance", "depletion-variance", rep.variance);
  ctx.note("predicted_mean_kernel", "kernel-predicted-mean", rep.predicted_mean);

  auto gron = gronwall_replay(psi, *bundle.basis, cfg.kappa_grid.back());
  ctx.check("gronwall_derivative", "norm-growth-derivative", gron.max_derivative_gap <= 1e-8,
            gron.max_derivative_gap, 1e-8,
            "d/ds ||xi||^2 equals 2 kappa <N+> along the flow");
  ctx.check("gronwall_bound", "norm-growth-bound", gron.bound_holds, gron.final_norm_sq, 0.0);

  if (ctx.want_csv) {
    std::vector<std::vector<double>> rows;
    double tail_acc = 0.0;
    std::vector<double> tails(rep.distribution.size());
    for (size_t n = rep.distribution.size(); n-- > 0;) {
      tail_acc += rep.distribution[n];
      tails[n] = tail_acc;
    }
    for (size_t n = 0; n < rep.distribution.size(); ++n)
      rows.push_back({static_cast<double>(n), rep.distribution[n], tails[n]});
    write_csv_numeric(ctx.artifact("decay_tail.csv"), {"n", "P(N+=n)", "P(N+>=n)"}, rows);

    std::vector<std::vector<double>> mrows;
    for (const auto& s : rep.mgf_samples)
      mrows.push_back({s.lambda, s.value, s.overflow ? 1.0 : 0.0});
    write_csv_numeric(ctx.artifact("decay_mgf.csv"), {"lambda", "log_mgf", "overflow"}, mrows);
  }
  if (ctx.want_json) {
    json j;
    j["mean"] = rep.mean;
    j["variance"] = rep.variance;
    j["predicted_mean"] = rep.predicted_mean;
    j["predicted_variance"] = rep.predicted_variance;
    j["predicted_variance_per_mode"] = rep.predicted_variance_per_mode;
    j["finite_size_factor"] = rep.finite_size_factor;
    j["tail_slope"] = rep.tail.slope;
    j["tail_r2"] = rep.tail.r2;
    json moments = json::array();
    for (auto [kappa, value] : rep.exp_moments)
      moments.push_back({{"kappa", kappa}, {"value", value}});
    j["exp_moments"] = moments;
    write_text_file(ctx.artifact("depletion.json"), j.dump(2) + "\n");
  }
}

// -------------------------------------------------------------------- ldp --

void run_ldp(const RunConfig& cfg, Context& ctx) {
  const auto spec = cfg.potential_spec();
  if (spec.kind == PotentialKind::Zero)
    throw ValidationError("ldp: a zero potential has no depletion statistics");
  const double a0 = scattering_length(spec, cfg.ode_tol).a0;
  auto lattice = MomentumLattice::enumerate_modes(cfg.cutoff_kind, cfg.cutoff);

  // raise the cap until the top sector is numerically empty
  int cap = 4;
  QuadraticModel model;
  Eigen::VectorXd psi;
  double top_mass = 1.0;
  for (; cap <= 40; cap += 2) {
    model = quadratic_model(lattice, a0, cap, cfg.budget);
    auto gs = ground_state(model.H, EigMethod::Auto, cfg.seed);
    psi = gs.vectors.col(0);
    auto dist = nplus_distribution(psi, *model.basis);
    top_mass = dist[cap];
    if (top_mass < 1e-10) break;
  }
  ctx.check("cap_converged", "truncation-mass", top_mass < 1e-10, top_mass, 1e-10,
            "top-sector mass at cap " + std::to_string(cap));

  auto rep = depletion_report(psi, *model.basis, model.sinh_nu, model.cosh_nu, cfg.kappa_grid,
                              cfg.lambda_grid, 0);
  ctx.check("mean_matches_kernels", "depletion-mean-kernel",
            std::abs(rep.mean - rep.predicted_mean) <= 1e-6, rep.mean, 1e-6,
            "measured mean versus sum of sinh^2");
  ctx.check("variance_matches_kernels", "depletion-variance-kernel",
            std::abs(rep.variance - rep.predicted_variance) <= 1e-6, rep.variance, 1e-6,
            "measured variance versus the pair-summed second moment");

  const double h = 1e-3;
  auto curv = mgf(rep.distribution, {-h, 0.0, h}, rep.mean);
  const double curvature = (curv[0].value - 2.0 * curv[1].value + curv[2].value) / (h * h);
  ctx.check("mgf_curvature", "mgf-second-derivative",
            std::abs(curvature - rep.predicted_variance) <=
                1e-4 * std::abs(rep.predicted_variance),
            curvature, 1e-4, "central difference at lambda = 0");

  // Chernoff bound on a fine grid covering the minimizer x / sigma^2
  bool chern_ok = true;
  std::vector<std::vector<double>> crows;
  for (double x : cfg.x_grid) {
    auto grid = linspace(0.0, 2.0 * x / rep.predicted_variance, 4001);
    const double bound = chernoff(x, rep.predicted_variance, grid);
    const double exact = -x * x / (2.0 * rep.predicted_variance);
    chern_ok = chern_ok && std::abs(bound - exact) <= 1e-4 * std::max(1.0, std::abs(exact));
    crows.push_back({x, bound, exact});
  }
  ctx.check("chernoff_parabola", "chernoff-minimizer", chern_ok,
            crows.empty() ? 0.0 : crows.front()[1], 1e-4);

  // random diagonal observable adjudicates the kernel powers
  std::mt19937_64 rng(cfg.seed);
  const int m = lattice.size();
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) O(i, i) = uniform01(rng()) + 0.5;
  auto obs = observable_stats(psi, *model.basis, O, model.sinh_nu, model.cosh_nu);
  ctx.check("observable_mean_power", "observable-mean-kernel",
            std::abs(obs.measured_mean - obs.predicted_mean) <= 1e-6, obs.measured_mean, 1e-6,
            "quadratic sinh reading of the kernel mean");
  ctx.check("observable_variance", "observable-variance-kernel",
            std::abs(obs.measured_variance - obs.predicted_variance) <= 1e-6,
            obs.measured_variance, 1e-6);

  if (ctx.want_csv) {
    std::vector<std::vector<double>> mrows;
    for (const auto& s : rep.mgf_samples)
      mrows.push_back({s.lambda, s.value, s.overflow ? 1.0 : 0.0});
    write_csv_numeric(ctx.artifact("ldp_mgf.csv"), {"lambda", "log_mgf", "overflow"}, mrows);
    write_csv_numeric(ctx.artifact("ldp_chernoff.csv"), {"x", "bound", "parabola"}, crows);
  }
  if (ctx.want_json) {
    json j;
    j["a0"] = a0;
    j["cap"] = cap;
    j["mean"] = rep.mean;
    j["variance"] = rep.variance;
    j["predicted_mean"] = rep.predicted_mean;
    j["predicted_variance"] = rep.predicted_variance;
    j["predicted_variance_per_mode"] = rep.predicted_variance_per_mode;
    j["mgf_curvature"] = curvature;
    write_text_file(ctx.artifact("ldp.json"), j.dump(2) + "\n");
  }
}

// ------------------------------------------------------------------ gibbs --

void run_gibbs(const RunConfig& cfg, Context& ctx) {
  const double beta = cfg.gibbs_beta;
  double kappa = cfg.kappa_grid.front();
  for (double k : cfg.kappa_grid) {
    if (std::abs(k - 0.2) < std::abs(kappa - 0.2)) kappa = k;
  }

  std::vector<std::vector<double>> rows;
  double moment_min = 1e300, moment_max = 0.0;
  double partition_min = 1e300, partition_max = 0.0;
  for (int n : cfg.n_sweep) {
    ModelConfig mc = cfg.model_config_for(n);
    auto bundle = build_excitation_hamiltonian(mc, false);
    auto st = gibbs(bundle.total(), beta);
    const double moment = gibbs_exp_moment(st, *bundle.basis, kappa);
    moment_min = std::min(moment_min, moment);
    moment_max = std::max(moment_max, moment);
    partition_min = std::min(partition_min, st.partition_shifted);
    partition_max = std::max(partition_max, st.partition_shifted);
    rows.push_back({static_cast<double>(n), beta, kappa, moment, st.partition_shifted,
                    st.energy, st.entropy, st.free_energy});
  }
  ctx.check("gibbs_moment_trend", "thermal-exponential-moment-stability",
            moment_max / moment_min <= 1.5, moment_max / moment_min, 1.5,
            "Tr[e^{kappa N+} Gamma] across the particle sweep; finite-N proxy for the "
            "N-uniform thermal bound");
  ctx.check("partition_sandwich_stable", "shifted-partition-stability",
            partition_max / partition_min <= 1.25, partition_max / partition_min, 1.25,
            "e^{beta E0} Z(beta) across the particle sweep; finite-N proxy for the "
            "partition-function sandwich");

  // cold limit collapses onto the ground-state moment
  {
    ModelConfig mc = cfg.model_config_for(cfg.n_sweep.front());
    auto bundle = build_excitation_hamiltonian(mc, false);
    auto H = bundle.total();
    auto gs = ground_state(H, EigMethod::Auto, cfg.seed);
    const double ground_moment = exp_moment(gs.vectors.col(0), *bundle.basis, kappa);
    auto cold = gibbs(H, 4e5);
    const double cold_moment = gibbs_exp_moment(cold, *bundle.basis, kappa);
    ctx.check("cold_limit", "zero-temperature-collapse",
              std::abs(cold_moment - ground_moment) <= 1e-6, cold_moment, 1e-6);
    ctx.check("cold_trace_distance", "zero-temperature-projector",
              trace_distance_to_ground(cold) <= 1e-6, trace_distance_to_ground(cold), 1e-6);
  }

  if (ctx.want_csv) {
    write_csv_numeric(ctx.artifact("gibbs.csv"),
                      {"N", "beta", "kappa", "exp_moment", "partition_shifted", "energy",
                       "entropy", "free_energy"},
                      rows);
  }
}

// ----------------------------------------------------------------- verify --

void run_verify(const RunConfig& cfg, Context& ctx) {
  auto three_modes = MomentumLattice::from_modes(
      {Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}, Momentum{{0, 1, 0}}});
  auto six_modes = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const int N = 3;

  // modified commutation relations with the 1/N correction
  for (const auto* lat : {&three_modes, &six_modes}) {
    FockBasis basis(*lat, N);
    double worst = 0.0;
    for (int p = 0; p < lat->size(); ++p) {
      for (int q = 0; q < lat->size(); ++q) {
        auto bp = modified_b(basis, p, N);
        auto bqd = modified_b_dagger(basis, q, N);
        auto lhs = bp * bqd - bqd * bp;
        auto rhs = (creation(basis, q) * annihilation(basis, p)).scaled(-1.0 / N);
        if (p == q) {
          rhs = rhs + sector_diagonal(basis, [N](int t) { return 1.0 - double(t) / N; });
        }
        worst = std::max(worst, (lhs - rhs).max_abs());
      }
    }
    ctx.check("modified_ccr_M" + std::to_string(lat->size()), "modified-commutator",
              worst <= 1e-10, worst, 1e-10,
              "[b_p, b+_q] = delta (1 - N+/N) - a+_q a_p / N as matrices");
  }

  // monomial exponential-commutator identities
  {
    FockBasis basis(three_modes, N);
    const int p = three_modes.index_of(Momentum{{1, 0, 0}});
    const int mp = three_modes.index_of(Momentum{{-1, 0, 0}});
    const int q = three_modes.index_of(Momentum{{0, 1, 0}});
    double worst = 0.0;
    for (const auto& mono :
         {MonomialSpec{{{p, true}, {mp, true}}}, MonomialSpec{{{p, true}, {q, false}}},
          MonomialSpec{{{q, true}, {p, false}, {mp, false}}},
          MonomialSpec{{{p, false}, {mp, false}}}}) {
      auto chk = monomial_commutator_check(basis, mono, N, 0.3);
      worst = std::max({worst, chk.double_dev, chk.single_dev_left, chk.single_dev_right});
    }
    ctx.check("monomial_commutators", "pair-monomial-exponential-commutator", worst <= 1e-10,
              worst, 1e-10);
  }

  // mean-field double commutator at M in {3, 6}
  for (const auto* lat : {&three_modes, &six_modes}) {
    ModelConfig mc{*lat, N, 0.0, cfg.potential_spec(), {}, -1, cfg.budget};
    auto chk = double_commutator_check(mc, 0.7, 0.1);
    ctx.check("double_commutator_M" + std::to_string(lat->size()),
              "mean-field-double-commutator", chk.max_deviation <= 1e-10, chk.max_deviation,
              1e-10);
  }

  // conjugation master identity at M = 6, N = 3
  {
    ModelConfig mc{six_modes, N, cfg.beta_scaling, cfg.potential_spec(), {}, -1, cfg.budget};
    auto bundle = build_excitation_hamiltonian(mc);
    const double dev = (bundle.U * bundle.H_full * bundle.U.adjoint() - bundle.total()).max_abs();
    ctx.check("conjugation_master_identity", "excitation-conjugation", dev <= 1e-10, dev, 1e-10);
    const double mom = momentum_conservation_defect(*bundle.full_basis, bundle.H_full);
    ctx.check("momentum_conservation", "total-momentum-commutes", mom <= 1e-12, mom, 1e-12);
  }

  // generator and conjugation sanity
  {
    FockBasis basis(six_modes, N);
    std::vector<double> eta(six_modes.size());
    for (int i = 0; i < six_modes.size(); ++i) eta[i] = -0.3 / six_modes.mode(i).p_norm2();
    auto B = build_generator(basis, eta, N);
    Eigen::MatrixXd E = expm_dense(B.dense());
    const double drift =
        (E.transpose() * E - Eigen::MatrixXd::Identity(basis.dim(), basis.dim()))
            .cwiseAbs()
            .maxCoeff();
    ctx.check("generator_unitary", "pair-generator-orthogonality", drift <= 1e-10, drift, 1e-10);

    auto ex = vacuum_number_expansion(basis, eta, N);
    const double gap = std::abs(ex.conjugated - ex.sigma_sum - ex.remainder);
    ctx.check("conjugated_number_split", "conjugated-number-expansion", gap <= 1e-8, gap, 1e-8,
              "exact conjugation versus sinh^2 sum plus quadrature remainder");

    auto t = KernelTable::from_eta(eta);
    double worst = 0.0;
    for (size_t i = 0; i < t.eta.size(); ++i)
      worst = std::max(worst, std::abs(t.gamma[i] * t.gamma[i] - t.sigma[i] * t.sigma[i] - 1.0));
    ctx.check("kernel_hyperbolic_identity", "kernel-table-identity", worst <= 1e-12, worst, 1e-12);
  }

  // quadratic model angle consistency
  {
    auto model = quadratic_model(six_modes, 0.05, 4, cfg.budget);
    ctx.check("quadratic_angle_consistency", "dispersion-angle-identity",
              model.angle_consistency <= 1e-14, model.angle_consistency, 1e-14);
  }

  // excitation map is an exact unitary relabeling
  {
    FullSectorBasis full(six_modes, N);
    FockBasis ex_basis(six_modes, N);
    auto U = excitation_map(full, ex_basis);
    const double uu =
        ((U * U.adjoint()).dense() - Eigen::MatrixXd::Identity(ex_basis.dim(), ex_basis.dim()))
            .cwiseAbs()
            .maxCoeff();
    ctx.check("excitation_map_unitary", "excitation-relabeling", uu == 0.0, uu, 0.0);
  }
}

}  // namespace

RunReport run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx;
  ctx.report.config = config;
  ctx.dir = config.out_dir;
  ctx.want_csv =
      std::find(config.formats.begin(), config.formats.end(), "csv") != config.formats.end();
  ctx.want_json =
      std::find(config.formats.begin(), config.formats.end(), "json") != config.formats.end();
  std::filesystem::create_directories(ctx.dir);

  switch (config.experiment) {
    case Experiment::Scatter:
      run_scatter(config, ctx);
      break;
    case Experiment::Spectrum:
      run_spectrum(config, ctx);
      break;
    case Experiment::Decay:
      run_decay(config, ctx);
      break;
    case Experiment::Ldp:
      run_ldp(config, ctx);
      break;
    case Experiment::Gibbs:
      run_gibbs(config, ctx);
      break;
    case Experiment::Verify:
      run_verify(config, ctx);
      break;
  }

  const auto t1 = std::chrono::steady_clock::now();
  ctx.report.timing_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  const std::string report_path = ctx.dir + "/report.json";
  write_text_file(report_path, report_to_json(ctx.report));
  ctx.report.artifacts.push_back(report_path);
  return ctx.report;
}

std::string report_to_json(const RunReport& report) {
  json j;
  j["schema_version"] = report.schema_version;
  const auto& c = report.config;
  j["config"] = {{"experiment", experiment_name(c.experiment)},
                 {"model",
                  {{"N", c.N},
                   {"beta", c.beta_scaling},
                   {"cutoff_kind", c.cutoff_kind == CutoffKind::Euclidean ? "euclidean" : "sup"},
                   {"cutoff", c.cutoff},
                   {"potential", c.potential},
                   {"V0", c.V0},
                   {"R", c.R},
                   {"cap", c.cap},
                   {"prefactor", c.prefactor},
                   {"budget", c.budget}}},
                 {"scattering", {{"ell", c.ell}, {"ode_tol", c.ode_tol}, {"N", c.scatter_N}}},
                 {"statistics",
                  {{"kappa_grid", c.kappa_grid},
                   {"lambda_grid", c.lambda_grid},
                   {"x_grid", c.x_grid},
                   {"n_sweep", c.n_sweep},
                   {"gibbs_beta", c.gibbs_beta},
                   {"onsager_offset", c.onsager_offset}}},
                 {"output", {{"directory", c.out_dir}, {"formats", c.formats}}},
                 {"seed", c.seed}};
  json checks = json::array();
  for (const auto& chk : report.checks) {
    checks.push_back({{"name", chk.name},
                      {"anchor", chk.anchor},
                      {"asserted", chk.asserted},
                      {"passed", chk.passed},
                      {"value", chk.value},
                      {"tolerance", chk.tolerance},
                      {"details", chk.details}});
  }
  j["checks"] = checks;
  j["timing_ms"] = report.timing_ms;
  j["artifacts"] = report.artifacts;
  return j.dump(2) + "\n";
}

}  // namespace bosons
