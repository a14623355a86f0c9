#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "bosons/fock.hpp"

using namespace bosons;

namespace {

Eigen::VectorXd random_unit(long dim, std::mt19937_64& rng) {
  Eigen::VectorXd v(dim);
  for (long i = 0; i < dim; ++i) {
    // raw-engine uniform keeps the draw deterministic across standard libraries
    v[i] = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
  }
  return v / v.norm();
}

}  // namespace

TEST_CASE("basis dimensions") {
  auto lat3 = MomentumLattice::from_modes(
      {Momentum{{1, 0, 0}}, Momentum{{-1, 0, 0}}, Momentum{{0, 1, 0}}});
  FockBasis b32(lat3, 2);
  CHECK(b32.dim() == 10);  // C(5,3)

  auto lat1 = MomentumLattice::from_modes({Momentum{{1, 0, 0}}});
  FockBasis b11(lat1, 1);
  CHECK(b11.dim() == 2);

  auto lat6 = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis b64(lat6, 4);
  // brute-force count of occupation vectors with sum <= 4 over 6 modes
  long count = 0;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c)
        for (int d = 0; a + b + c + d <= 4; ++d)
          for (int e = 0; a + b + c + d + e <= 4; ++e)
            for (int f = 0; a + b + c + d + e + f <= 4; ++f) ++count;
  CHECK(count == 210);
  CHECK(b64.dim() == count);
}

TEST_CASE("basis ordering, ranking and sector offsets") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  // states sorted by total then lexicographically; rank_of inverts enumeration
  for (long r = 0; r < basis.dim(); ++r) {
    CHECK(basis.rank_of(basis.state(r).occ) == r);
    if (r + 1 < basis.dim()) {
      const auto& a = basis.state(r);
      const auto& b = basis.state(r + 1);
      const bool ordered = a.total < b.total || (a.total == b.total && a.occ < b.occ);
      CHECK(ordered);
    }
  }
  for (int t = 0; t <= 3; ++t) {
    auto [lo, hi] = basis.sector_range(t);
    for (long r = lo; r < hi; ++r) CHECK(basis.state(r).total == t);
  }
  CHECK(basis.sector_range(3).second == basis.dim());
}

TEST_CASE("capacity budget raises with the offending dimension") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::SupNorm, 2);
  bool threw = false;
  try {
    FockBasis big(lat, 12, 1000);
  } catch (const CapacityError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("exceeds budget") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("creation and annihilation basics") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  const int p = 2;
  auto ad = creation(basis, p);
  auto a = annihilation(basis, p);

  // a_p on states with n_p = 0 gives zero
  for (long r = 0; r < basis.dim(); ++r) {
    if (basis.state(r).occ[p] == 0) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.dim());
      e[r] = 1.0;
      CHECK(a.apply(e).norm() == 0.0);
    }
  }
  // a+_p a_p is diagonal with eigenvalue n_p
  auto num = ad * a;
  for (long r = 0; r < basis.dim(); ++r) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.dim());
    e[r] = 1.0;
    Eigen::VectorXd w = num.apply(e);
    CHECK(w[r] == doctest::Approx(basis.state(r).occ[p]).epsilon(1e-14));
    w[r] = 0.0;
    CHECK(w.norm() == 0.0);
  }
  CHECK_THROWS_AS(creation(basis, 99), IndexError);
}

TEST_CASE("CCR on sub-cap sectors; hard truncation on the top sector") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const int cap = 3;
  FockBasis basis(lat, cap);
  for (int p : {0, 3}) {
    for (int q : {0, 3, 5}) {
      auto comm = annihilation(basis, p) * creation(basis, q) -
                  creation(basis, q) * annihilation(basis, p);
      Eigen::MatrixXd c = comm.dense();
      // restricted to total <= cap-1 the commutator is exactly delta_{pq} Id
      const long sub = basis.sector_range(cap - 1).second;
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(sub, sub);
      if (p == q) expect.setIdentity();
      CHECK((c.topLeftCorner(sub, sub) - expect).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  // a+ maps the top sector to zero
  auto ad = creation(basis, 1);
  for (long r = basis.sector_range(cap).first; r < basis.dim(); ++r) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(basis.dim());
    e[r] = 1.0;
    CHECK(ad.apply(e).norm() == 0.0);
  }
}

TEST_CASE("modified b operator against a dense 3x3 product oracle") {
  // single mode, N = 2, cap = 2: dim 3 with states n = 0,1,2
  auto lat = MomentumLattice::from_modes({Momentum{{1, 0, 0}}});
  const int N = 2;
  FockBasis basis(lat, 2);
  REQUIRE(basis.dim() == 3);
  auto b = modified_b(basis, 0, N);

  // oracle: D * A with D = diag(sqrt(1 - n/N)) applied after annihilation
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(0, 1) = 1.0;               // a|1> = |0>
  A(1, 2) = std::sqrt(2.0);    // a|2> = sqrt(2)|1>
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  for (int n = 0; n <= 2; ++n) D(n, n) = std::sqrt(1.0 - n / 2.0);
  CHECK((b.dense() - D * A).cwiseAbs().maxCoeff() <= 1e-15);

  // b|n=1> = |n=0> exactly
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[1] = 1.0;
  Eigen::VectorXd r = b.apply(e1);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-15));

  // b+ on total = N is zero
  auto bd = modified_b_dagger(basis, 0, N);
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(3);
  e2[2] = 1.0;
  CHECK(bd.apply(e2).norm() == 0.0);

  CHECK_THROWS_AS(modified_b(basis, 0, 1), DomainError);
}

TEST_CASE("b approaches a on low sectors as N grows") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 2);
  const int N = 64;
  auto b = modified_b(basis, 0, N);
  auto a = annihilation(basis, 0);
  std::mt19937_64 rng(7);
  // states concentrated on total = 2
  for (int trial = 0; trial < 10; ++trial) {
    auto [lo, hi] = basis.sector_range(2);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(basis.dim());
    Eigen::VectorXd sub = random_unit(hi - lo, rng);
    psi.segment(lo, hi - lo) = sub;
    const double an = a.apply(psi).norm();
    const double rel = (b.apply(psi) - a.apply(psi)).norm() / an;
    CHECK(rel <= 2.0 * 2.0 / N);  // O(total/N)
    CHECK(rel > 0.0);
  }
}

TEST_CASE("modified commutation relation holds with the 1/N term") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const int N = 3;
  FockBasis basis(lat, N);
  for (int p : {0, 2}) {
    for (int q : {0, 2, 4}) {
      auto b_p = modified_b(basis, p, N);
      auto bd_q = modified_b_dagger(basis, q, N);
      auto lhs = b_p * bd_q - bd_q * b_p;
      // delta_{pq} (1 - N+/N) - (1/N) a+_q a_p
      auto rhs = (creation(basis, q) * annihilation(basis, p)).scaled(-1.0 / N);
      if (p == q) {
        rhs = rhs + sector_diagonal(basis, [N](int t) { return 1.0 - static_cast<double>(t) / N; });
      }
      CHECK((lhs - rhs).max_abs() <= 1e-12);
    }
  }
  // [b_p, b_q] = 0 and [b+_p, b+_q] = 0 (machine epsilon; the entries are
  // single square roots of exact rationals, products reassociate by one ulp)
  auto b0 = modified_b(basis, 0, N);
  auto b3 = modified_b(basis, 3, N);
  CHECK((b0 * b3 - b3 * b0).max_abs() <= 1e-15);
  auto c0 = b0.adjoint(), c3 = b3.adjoint();
  CHECK((c0 * c3 - c3 * c0).max_abs() <= 1e-15);
}

TEST_CASE("excitation number operator") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  auto nplus = excitation_number(basis);
  // vacuum eigenvalue 0
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(basis.dim());
  vac[0] = 1.0;
  CHECK(nplus.apply(vac).norm() == 0.0);
  // equals sum_p a+_p a_p entrywise
  SparseOperator sum(Eigen::SparseMatrix<double>(basis.dim(), basis.dim()));
  for (int p = 0; p < basis.num_modes(); ++p)
    sum = sum + creation(basis, p) * annihilation(basis, p);
  CHECK((sum - nplus).max_abs() <= 1e-13);
}

TEST_CASE("dGamma reductions and bounds") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 3);
  const int m = basis.num_modes();

  // identity table reproduces the excitation number
  CHECK((dGamma(basis, Eigen::MatrixXd::Identity(m, m)) - excitation_number(basis)).max_abs() <=
        1e-13);
  // zero table gives the zero operator
  CHECK(dGamma(basis, Eigen::MatrixXd::Zero(m, m)).max_abs() == 0.0);
  // non-hermitian table rejected
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(m, m);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(dGamma(basis, bad), ValidationError);

  std::mt19937_64 rng(11);
  auto nplus = excitation_number(basis).dense();
  Eigen::MatrixXd nhalf = nplus.cwiseSqrt();

  // rank-one |h><h| gives a+(h) a(h); norm bounds for a(h), a+(h)
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd h(m);
    for (int i = 0; i < m; ++i) h[i] = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    Eigen::MatrixXd O = h * h.transpose();
    auto dg = dGamma(basis, O);
    Eigen::VectorXd psi = random_unit(basis.dim(), rng);
    // <psi, dGamma psi> = ||a(h) psi||^2 <= ||h||^2 ||N+^{1/2} psi||^2
    const double lhs = psi.dot(dg.apply(psi));
    const double rhs = h.squaredNorm() * (nhalf * psi).squaredNorm();
    CHECK(lhs <= rhs + 1e-10);

    // creation side: ||a+(h) psi|| <= ||h|| ||(N+ + 1)^{1/2} psi||
    SparseOperator ah_dag(Eigen::SparseMatrix<double>(basis.dim(), basis.dim()));
    for (int p = 0; p < m; ++p) ah_dag = ah_dag + creation(basis, p).scaled(h[p]);
    Eigen::VectorXd nplus1half =
        (nplus.diagonal().array() + 1.0).sqrt().matrix().asDiagonal() * psi;
    CHECK(ah_dag.apply(psi).norm() <= h.norm() * nplus1half.norm() + 1e-10);
  }

  // operator-norm bound ||sum H_pq a+_p a_q psi|| <= ||H||_op ||N+ psi||
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd H(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H(i, j) = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    H = 0.5 * (H + H.transpose()).eval();
    auto dg = dGamma(basis, H);
    Eigen::VectorXd psi = random_unit(basis.dim(), rng);
    const double opnorm =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().cwiseAbs().maxCoeff();
    CHECK(dg.apply(psi).norm() <= opnorm * (nplus * psi).norm() + 1e-10);
  }
}

TEST_CASE("excitation map is a unitary relabeling") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  const int N = 3;
  FullSectorBasis full(lat, N);
  FockBasis ex(lat, N);
  REQUIRE(full.dim() == ex.dim());
  auto U = excitation_map(full, ex);

  // all particles in the condensate maps to the Fock vacuum
  std::vector<int> cond(full.num_slots(), 0);
  cond[0] = N;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(full.dim());
  e[full.rank_of(cond)] = 1.0;
  Eigen::VectorXd img = U.apply(e);
  CHECK(img[ex.rank_of(std::vector<int>(ex.num_modes(), 0))] == doctest::Approx(1.0));
  CHECK(img.norm() == doctest::Approx(1.0));

  // U U+ = Id and U+ U = Id
  Eigen::MatrixXd UU = (U * U.adjoint()).dense();
  CHECK((UU - Eigen::MatrixXd::Identity(ex.dim(), ex.dim())).cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd UtU = (U.adjoint() * U).dense();
  CHECK((UtU - Eigen::MatrixXd::Identity(full.dim(), full.dim())).cwiseAbs().maxCoeff() == 0.0);

  // <psi, N+ psi> is invariant under the relabeling
  std::mt19937_64 rng(3);
  Eigen::VectorXd psi = random_unit(full.dim(), rng);
  // N+ on the full sector: diagonal N - n0
  Eigen::VectorXd diag(full.dim());
  for (long r = 0; r < full.dim(); ++r) diag[r] = N - full.occ(r)[0];
  const double full_val = psi.dot(diag.asDiagonal() * psi);
  Eigen::VectorXd mapped = U.apply(psi);
  const double ex_val = mapped.dot(excitation_number(ex).apply(mapped));
  CHECK(full_val == doctest::Approx(ex_val).epsilon(1e-13));
}

TEST_CASE("adjoint is an involution and triplet storage stays finite") {
  auto lat = MomentumLattice::enumerate_modes(CutoffKind::Euclidean, 1);
  FockBasis basis(lat, 2);
  auto op = creation(basis, 1) * annihilation(basis, 4);
  CHECK((op.adjoint().adjoint() - op).max_abs() == 0.0);
  auto herm = op + op.adjoint();
  CHECK(herm.hermiticity_defect() <= 1e-14);
}

TEST_CASE("complex scalar instantiation stays usable") {
  using C = std::complex<double>;
  Eigen::SparseMatrix<C> m(2, 2);
  m.insert(0, 1) = C(0.0, 1.0);
  SparseOperatorT<C> op(m);
  auto a = op.adjoint();
  CHECK(std::abs(a.mat.coeff(1, 0) - C(0.0, -1.0)) == 0.0);
  CHECK(op.max_abs() == doctest::Approx(1.0));
}
