#include "bosons/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bosons/lattice.hpp"

namespace bosons {

Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& A) { return A.exp(); }

namespace {

// One Arnoldi sweep for exp(tau A) v, v assumed unit norm. Returns the
// approximation together with a standard a-posteriori error estimate.
struct ArnoldiStep {
  Eigen::VectorXd w;
  double err = 0.0;
};

ArnoldiStep arnoldi_exp(const SpMat& A, const Eigen::VectorXd& v, double tau, int m) {
  const long n = v.size();
  m = static_cast<int>(std::min<long>(m, n));
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  V.col(0) = v;
  int used = m;
  bool breakdown = false;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = A * V.col(j);
    // modified Gram-Schmidt, two passes
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const double h = V.col(i).dot(w);
        H(i, j) += h;
        w -= h * V.col(i);
      }
    }
    const double hnorm = w.norm();
    H(j + 1, j) = hnorm;
    if (hnorm < 1e-14) {
      used = j + 1;
      breakdown = true;
      break;
    }
    V.col(j + 1) = w / hnorm;
  }
  Eigen::MatrixXd Hm = H.topLeftCorner(used, used);
  Eigen::MatrixXd E = (tau * Hm).exp();
  Eigen::VectorXd y = E.col(0);
  ArnoldiStep out;
  out.w = V.leftCols(used) * y;
  out.err = breakdown ? 0.0 : std::abs(H(used, used - 1) * y[used - 1]) * std::abs(tau);
  return out;
}

}  // namespace

Eigen::VectorXd expm_multiply(const SpMat& A, const Eigen::VectorXd& v, double t, double tol,
                              int krylov_dim) {
  const double nrm = v.norm();
  if (nrm == 0.0 || t == 0.0) return v;
  Eigen::VectorXd x = v;
  int steps = 1;
  for (int attempt = 0; attempt < 24; ++attempt) {
    x = v;
    const double tau = t / steps;
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double xn = x.norm();
      if (xn == 0.0) return x;
      auto st = arnoldi_exp(A, x / xn, tau, krylov_dim);
      worst = std::max(worst, st.err);
      x = xn * st.w;
    }
    if (worst * steps <= tol) return x;
    steps *= 2;
  }
  throw NumericalError("expm_multiply: tolerance not reached after step refinement");
}

EigenResult dense_sym_eig(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("dense_sym_eig: solver failed");
  EigenResult r;
  r.values = es.eigenvalues();
  r.vectors = es.eigenvectors();
  r.method = "dense";
  r.residuals.resize(r.values.size());
  for (long i = 0; i < r.values.size(); ++i) {
    r.residuals[i] = (A * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
  }
  return r;
}

EigenResult lanczos_lowest(const SpMat& A, int count, std::uint64_t seed, double tol,
                           int max_restarts) {
  const long n = A.rows();
  if (count < 1) throw DomainError("lanczos_lowest: count must be >= 1");
  if (count >= n) {
    EigenResult full = dense_sym_eig(Eigen::MatrixXd(A));
    full.method = "dense-fallback";
    return full;
  }

  std::mt19937_64 rng(seed);
  const int keep = std::min<long>(n, count + 8);            // thick-restart window
  const int m = static_cast<int>(std::min<long>(n, std::max(2 * keep + 12, 40)));

  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd start(n);
  for (long i = 0; i < n; ++i) start[i] = 2.0 * uniform01(rng()) - 1.0;
  start.normalize();

  Eigen::MatrixXd basis = start;  // columns carried across restarts
  double worst = 0.0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    // assemble an orthonormal basis from the carried vectors, then expand
    int filled = 0;
    for (int c = 0; c < basis.cols() && filled < m; ++c) {
      Eigen::VectorXd w = basis.col(c);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < filled; ++i) w -= V.col(i).dot(w) * V.col(i);
      const double nw = w.norm();
      if (nw > 1e-12) {
        V.col(filled++) = w / nw;
      }
    }
    while (filled < m) {
      Eigen::VectorXd w;
      if (filled > 0) {
        w = A * V.col(filled - 1);
      } else {
        w.resize(n);
        for (long i = 0; i < n; ++i) w[i] = 2.0 * uniform01(rng()) - 1.0;
      }
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < filled; ++i) w -= V.col(i).dot(w) * V.col(i);
      const double nw = w.norm();
      if (nw > 1e-12) {
        V.col(filled++) = w / nw;
      } else {
        // invariant subspace hit; pad with a fresh random direction
        w.resize(n);
        for (long i = 0; i < n; ++i) w[i] = 2.0 * uniform01(rng()) - 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i < filled; ++i) w -= V.col(i).dot(w) * V.col(i);
        V.col(filled++) = w / w.norm();
      }
    }

    Eigen::MatrixXd AV = A * V;
    Eigen::MatrixXd T = V.transpose() * AV;
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    Eigen::MatrixXd ritz = V * small.eigenvectors().leftCols(keep);
    Eigen::VectorXd vals = small.eigenvalues().head(keep);

    worst = 0.0;
    for (int i = 0; i < count; ++i) {
      worst = std::max(worst, (A * ritz.col(i) - vals[i] * ritz.col(i)).norm());
    }
    if (worst <= tol || restart == max_restarts - 1) {
      EigenResult r;
      r.values = vals.head(count);
      r.vectors = ritz.leftCols(count);
      r.residuals.resize(count);
      for (int i = 0; i < count; ++i)
        r.residuals[i] = (A * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
      r.method = "lanczos";
      if (worst > tol)
        throw NumericalError("lanczos_lowest: best residual " + std::to_string(worst) +
                             " above tolerance after max restarts");
      return r;
    }
    basis = ritz;  // thick restart
  }
  throw NumericalError("lanczos_lowest: unreachable");
}

std::vector<double> gauss_legendre(int n, std::vector<double>& weights) {
  std::vector<double> x(n);
  weights.resize(n);
  const double pi = kTwoPi / 2.0;
  for (int i = 0; i < n; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        break;
      }
    }
    x[i] = t;
  }
  return x;
}

std::vector<std::vector<long>> sparsity_components(const SpMat& A) {
  const long n = A.rows();
  std::vector<long> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<long(long)> find = [&](long x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) unite(it.row(), it.col());
    }
  }
  std::vector<std::vector<long>> comps;
  std::vector<long> label(n, -1);
  for (long i = 0; i < n; ++i) {
    const long root = find(i);
    if (label[root] < 0) {
      label[root] = static_cast<long>(comps.size());
      comps.emplace_back();
    }
    comps[label[root]].push_back(i);
  }
  return comps;
}

}  // namespace bosons
