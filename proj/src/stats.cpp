#include "bosons/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bosons {

std::vector<double> nplus_distribution(const Eigen::VectorXd& state, const FockBasis& basis) {
  if (state.size() != basis.dim())
    throw ValidationError("nplus_distribution: state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-10)
    throw ValidationError("nplus_distribution: state is not normalized");
  std::vector<double> dist(basis.cap() + 1, 0.0);
  for (int t = 0; t <= basis.cap(); ++t) {
    auto [lo, hi] = basis.sector_range(t);
    dist[t] = state.segment(lo, hi - lo).squaredNorm();
  }
  return dist;
}

double exp_moment(const std::vector<double>& distribution, double kappa) {
  double acc = 0.0;
  for (size_t n = 0; n < distribution.size(); ++n) acc += std::exp(kappa * n) * distribution[n];
  return acc;
}

double exp_moment(const Eigen::VectorXd& state, const FockBasis& basis, double kappa) {
  return exp_moment(nplus_distribution(state, basis), kappa);
}

TailFit tail_fit(const std::vector<double>& distribution, double floor) {
  TailFit fit;
  const size_t n = distribution.size();
  std::vector<double> tail(n, 0.0);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += distribution[i];
    tail[i] = acc;
  }
  // weighted least squares on log tail, weights ~ P(n)
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (size_t i = 0; i < n; ++i) {
    if (tail[i] < floor) break;
    const double w = std::max(distribution[i], floor);
    const double x = static_cast<double>(i);
    const double y = std::log(tail[i]);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
    ++used;
  }
  const double det = sw * sxx - sx * sx;
  if (used < 3 || std::abs(det) < 1e-300) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  // weighted R^2
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / sw;
  for (size_t i = 0; i < n; ++i) {
    if (tail[i] < floor) break;
    const double w = std::max(distribution[i], floor);
    const double y = std::log(tail[i]);
    const double yhat = fit.intercept + fit.slope * i;
    ss_res += w * (y - yhat) * (y - yhat);
    ss_tot += w * (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<MgfSample> mgf(const std::vector<double>& distribution,
                           const std::vector<double>& lambda_grid, double mu) {
  std::vector<MgfSample> out;
  out.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    MgfSample s;
    s.lambda = lambda;
    double acc = 0.0;
    for (size_t n = 0; n < distribution.size(); ++n)
      acc += std::exp(lambda * (static_cast<double>(n) - mu)) * distribution[n];
    if (!std::isfinite(acc) || acc <= 0.0) {
      s.overflow = true;
    } else {
      s.value = std::log(acc);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<MgfSample> mgf(const Eigen::VectorXd& state, const FockBasis& basis,
                           const std::vector<double>& lambda_grid, double mu) {
  return mgf(nplus_distribution(state, basis), lambda_grid, mu);
}

double chernoff(double x, double sigma2, const std::vector<double>& lambda_grid) {
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    best = std::min(best, -lambda * x + 0.5 * lambda * lambda * sigma2);
  }
  return best;
}

double markov_chain_violation(const std::vector<double>& distribution,
                              const std::vector<double>& kappa_grid) {
  const size_t n = distribution.size();
  std::vector<double> tail(n, 0.0);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += distribution[i];
    tail[i] = acc;
  }
  double worst = 0.0;
  for (double kappa : kappa_grid) {
    const double m = exp_moment(distribution, kappa);
    for (size_t i = 0; i < n; ++i) {
      worst = std::max(worst, tail[i] - std::exp(-kappa * i) * m);
    }
  }
  return worst;
}

double gibbs_exp_moment(const ThermalState& state, const FockBasis& basis, double kappa) {
  std::vector<Eigen::Triplet<double>> trip;
  for (long r = 0; r < basis.dim(); ++r)
    trip.emplace_back(r, r, std::exp(kappa * basis.state(r).total));
  Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return thermal_expectation(state, SparseOperator(std::move(m), true));
}

DepletionReport depletion_report(const Eigen::VectorXd& state, const FockBasis& basis,
                                 const std::vector<double>& sinh_nu,
                                 const std::vector<double>& cosh_nu,
                                 const std::vector<double>& kappa_grid,
                                 const std::vector<double>& lambda_grid, int N_finite) {
  DepletionReport rep;
  rep.distribution = nplus_distribution(state, basis);
  for (size_t n = 0; n < rep.distribution.size(); ++n) rep.mean += n * rep.distribution[n];
  for (size_t n = 0; n < rep.distribution.size(); ++n) {
    const double d = n - rep.mean;
    rep.variance += d * d * rep.distribution[n];
  }
  for (double kappa : kappa_grid)
    rep.exp_moments.emplace_back(kappa, exp_moment(rep.distribution, kappa));
  rep.tail = tail_fit(rep.distribution);
  rep.mgf_samples = mgf(rep.distribution, lambda_grid, rep.mean);

  rep.finite_size_factor = N_finite > 0 ? 1.0 - 1.0 / N_finite : 1.0;
  for (size_t i = 0; i < sinh_nu.size(); ++i) {
    const double s2 = sinh_nu[i] * sinh_nu[i];
    rep.predicted_mean += s2;
    rep.predicted_variance_per_mode += rep.finite_size_factor * s2 * cosh_nu[i] * cosh_nu[i];
  }
  // both Wick pairings survive for the number operator: twice the per-mode sum
  rep.predicted_variance = 2.0 * rep.predicted_variance_per_mode;
  return rep;
}

ObservableStats observable_stats(const Eigen::VectorXd& state, const FockBasis& basis,
                                 const Eigen::MatrixXd& O, const std::vector<double>& sinh_nu,
                                 const std::vector<double>& cosh_nu) {
  const auto& lat = basis.lattice();
  const int m = lat.size();
  if (O.rows() != m || O.cols() != m) throw ValidationError("observable_stats: shape mismatch");
  ObservableStats st;
  auto dg = dGamma(basis, O);
  Eigen::VectorXd dpsi = dg.apply(state);
  st.measured_mean = state.dot(dpsi);
  st.measured_variance = dpsi.squaredNorm() - st.measured_mean * st.measured_mean;

  for (int p = 0; p < m; ++p) {
    st.predicted_mean += sinh_nu[p] * sinh_nu[p] * O(p, p);
    st.predicted_mean_sinh1 += sinh_nu[p] * O(p, p);
  }
  double direct = 0.0, anomalous = 0.0;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      direct += O(p, q) * O(q, p) * sinh_nu[p] * sinh_nu[p] * cosh_nu[q] * cosh_nu[q];
      anomalous += O(p, q) * O(lat.negate(p), lat.negate(q)) * sinh_nu[p] * cosh_nu[p] *
                   sinh_nu[q] * cosh_nu[q];
    }
  }
  st.predicted_variance_direct = direct;
  st.predicted_variance = direct + anomalous;
  return st;
}

DoubleCommutatorCheck double_commutator_check(const ModelConfig& config, double s, double kappa) {
  ModelConfig cfg = config;
  cfg.validate();
  FullSectorBasis basis(cfg.lattice, cfg.N);
  auto H = build_full_hamiltonian(cfg, basis);
  const auto& lat = basis.lattice();
  const int M = lat.size();
  auto mom_of = [&](int slot) { return slot == 0 ? Momentum{} : lat.mode(slot - 1); };

  auto weighted_rhs_core = [&](double theta) {
    // classify every pair-sum monomial by its condensate-mode imbalance and
    // apply the 4 sinh^2(imbalance * theta / 2) weight; kinetic and balanced
    // terms drop out of the double commutator
    std::vector<Monomial> terms;
    for (int c1 = 0; c1 <= M; ++c1) {
      for (int c2 = 0; c2 <= M; ++c2) {
        for (int a1 = 0; a1 <= M; ++a1) {
          const Momentum rest = mom_of(c1) + mom_of(c2) - mom_of(a1);
          for (int a2 = 0; a2 <= M; ++a2) {
            if (!(mom_of(a2) == rest)) continue;
            const int imbalance = (c1 != 0) + (c2 != 0) - (a1 != 0) - (a2 != 0);
            if (imbalance == 0) continue;
            const double w = cfg.coupling(mom_of(a1) - mom_of(c1));
            if (w == 0.0) continue;
            const double weight = 4.0 * std::pow(std::sinh(imbalance * theta / 2.0), 2);
            terms.push_back(
                Monomial{{{c1, true}, {c2, true}, {a1, false}, {a2, false}}, w * weight});
          }
        }
      }
    }
    return assemble_monomials(basis, terms);
  };

  auto exponential = [&](double theta) {
    std::vector<Eigen::Triplet<double>> trip;
    for (long r = 0; r < basis.dim(); ++r) {
      trip.emplace_back(r, r, std::exp(theta * (cfg.N - basis.occ(r)[0])));
    }
    Eigen::SparseMatrix<double> mat(basis.dim(), basis.dim());
    mat.setFromTriplets(trip.begin(), trip.end());
    return SparseOperator(std::move(mat), true);
  };

  const double theta = s * kappa;
  auto E = exponential(theta);
  auto EH = E * H;
  auto lhs = E * (EH - H * E) - (EH - H * E) * E;
  auto rhs = E * weighted_rhs_core(theta) * E;
  DoubleCommutatorCheck out;
  out.max_deviation = (lhs - rhs).max_abs();

  // pair-creation block scaling: the vacuum -> (l, -l) entry of the dense
  // double commutator picks up sinh^2(theta) e^{2 theta} and doubling kappa
  // multiplies it by [sinh^2(2 theta)/sinh^2(theta)] e^{2 theta}
  std::vector<int> vac(basis.num_slots(), 0);
  vac[0] = cfg.N;
  std::vector<int> pair = vac;
  pair[0] -= 2;
  pair[1] += 1;
  pair[lat.negate(0) + 1] += 1;
  const long r0 = basis.rank_of(vac);
  const long r2 = basis.rank_of(pair);
  const double e1 = lhs.mat.coeff(r2, r0);
  auto E2 = exponential(2.0 * theta);
  auto EH2 = E2 * H;
  auto lhs2 = E2 * (EH2 - H * E2) - (EH2 - H * E2) * E2;
  const double e2 = lhs2.mat.coeff(r2, r0);
  out.pair_block_scale = e1 != 0.0 ? e2 / e1 : 0.0;
  return out;
}

MonomialCommutatorCheck monomial_commutator_check(const FockBasis& basis, const MonomialSpec& monomial,
                                           int N, double kappa) {
  MonomialCommutatorCheck out;
  SparseOperator B(Eigen::SparseMatrix<double>(basis.dim(), basis.dim()));
  bool first = true;
  for (auto [mode, create] : monomial.factors) {
    auto op = create ? modified_b_dagger(basis, mode, N) : modified_b(basis, mode, N);
    B = first ? op : B * op;
    first = false;
    out.imbalance += create ? 1 : -1;
  }
  if (first) throw ValidationError("monomial_commutator_check: empty monomial");

  auto E = sector_diagonal(basis, [&](int t) { return std::exp(kappa * t); });
  auto comm = E * B - B * E;
  auto dbl = E * comm - comm * E;
  const double f = out.imbalance * kappa / 2.0;
  auto rhs = (E * B * E).scaled(4.0 * std::sinh(f) * std::sinh(f));
  out.double_dev = (dbl - rhs).max_abs();
  out.single_dev_left = (comm - (E * B).scaled(2.0 * std::exp(-f) * std::sinh(f))).max_abs();
  out.single_dev_right = (comm - (B * E).scaled(2.0 * std::exp(f) * std::sinh(f))).max_abs();
  return out;
}

OnsagerCertificate onsager_check(const ModelConfig& config, double c_offset, double bisect_tol) {
  ModelConfig cfg = config;
  cfg.validate();
  FullSectorBasis basis(cfg.lattice, cfg.N);
  auto H = build_full_hamiltonian(cfg, basis);
  const double e0 = ground_state(H).values[0];

  std::vector<Eigen::Triplet<double>> trip;
  for (long r = 0; r < basis.dim(); ++r)
    trip.emplace_back(r, r, static_cast<double>(cfg.N - basis.occ(r)[0]));
  Eigen::SparseMatrix<double> nmat(basis.dim(), basis.dim());
  nmat.setFromTriplets(trip.begin(), trip.end());
  auto nplus = SparseOperator(std::move(nmat), true);

  // repeated lowest-eigenvalue queries: the full dense decomposition would be
  // recomputed at every bisection step, so prefer the Krylov path
  const EigMethod method = basis.dim() > 400 ? EigMethod::Iterative : EigMethod::Dense;
  auto min_eig = [&](double t) {
    Eigen::SparseMatrix<double> mat = H.mat - t * nplus.mat;
    for (long r = 0; r < basis.dim(); ++r) mat.coeffRef(r, r) += c_offset - e0;
    mat.makeCompressed();
    auto res = ground_state(SparseOperator(std::move(mat), true), method, 7);
    return res.values[0];
  };

  const double scale = std::max(1.0, std::abs(e0));
  double lo = 0.0, hi = kTwoPi * kTwoPi;
  // grow hi until PSD fails; the kinetic gap bounds the budget-0 answer
  while (min_eig(hi) >= -1e-10 * scale) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) break;
  }
  while (hi - lo > bisect_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (min_eig(mid) >= -1e-10 * scale) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  OnsagerCertificate cert;
  cert.coefficient = lo;
  cert.offset = c_offset;
  cert.min_eig = min_eig(lo);
  return cert;
}

GronwallReplay gronwall_replay(const Eigen::VectorXd& psi, const FockBasis& basis, double kappa,
                               int s_points, double fd_step) {
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw ValidationError("gronwall_replay: state is not normalized");
  GronwallReplay rep;
  auto xi_of = [&](double s) {
    Eigen::VectorXd xi(psi.size());
    for (int t = 0; t <= basis.cap(); ++t) {
      auto [lo, hi] = basis.sector_range(t);
      xi.segment(lo, hi - lo) = std::exp(s * kappa * t) * psi.segment(lo, hi - lo);
    }
    return xi;
  };
  auto nplus_quad = [&](const Eigen::VectorXd& xi) {
    double acc = 0.0;
    for (int t = 0; t <= basis.cap(); ++t) {
      auto [lo, hi] = basis.sector_range(t);
      acc += t * xi.segment(lo, hi - lo).squaredNorm();
    }
    return acc;
  };

  double max_ratio = 0.0;
  for (int i = 0; i < s_points; ++i) {
    const double s = static_cast<double>(i) / (s_points - 1);
    Eigen::VectorXd xi = xi_of(s);
    const double direct = 2.0 * kappa * nplus_quad(xi);
    const double fd =
        (xi_of(s + fd_step).squaredNorm() - xi_of(s - fd_step).squaredNorm()) / (2.0 * fd_step);
    rep.max_derivative_gap = std::max(rep.max_derivative_gap, std::abs(direct - fd));
    max_ratio = std::max(max_ratio, nplus_quad(xi) / xi.squaredNorm());
  }
  rep.final_norm_sq = xi_of(1.0).squaredNorm();
  rep.exp_bound = std::exp(2.0 * kappa * max_ratio);
  rep.bound_holds = rep.final_norm_sq <= rep.exp_bound * (1.0 + 1e-12);
  return rep;
}

}  // namespace bosons
