#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <utility>
#include <vector>

#include "bosons/lattice.hpp"

namespace bosons {

/// Occupation numbers per lattice mode plus their sum.
struct OccupationState {
  std::vector<int> occ;
  int total = 0;
};

/// Sparse operator between two occupation bases. Scalar is templated so the
/// same plumbing can carry complex entries; everything in scope is real.
template <typename Scalar>
struct SparseOperatorT {
  Eigen::SparseMatrix<Scalar> mat;
  bool hermitian_hint = false;

  SparseOperatorT() = default;
  explicit SparseOperatorT(Eigen::SparseMatrix<Scalar> m, bool herm = false)
      : mat(std::move(m)), hermitian_hint(herm) {}

  Eigen::Index rows() const { return mat.rows(); }
  Eigen::Index cols() const { return mat.cols(); }

  SparseOperatorT adjoint() const {
    Eigen::SparseMatrix<Scalar> t = mat.adjoint();
    t.makeCompressed();
    return SparseOperatorT(std::move(t), hermitian_hint);
  }

  SparseOperatorT operator*(const SparseOperatorT& o) const {
    Eigen::SparseMatrix<Scalar> p = mat * o.mat;
    p.prune(Scalar(0));
    p.makeCompressed();
    return SparseOperatorT(std::move(p));
  }
  SparseOperatorT operator+(const SparseOperatorT& o) const {
    Eigen::SparseMatrix<Scalar> s = mat + o.mat;
    s.makeCompressed();
    return SparseOperatorT(std::move(s), hermitian_hint && o.hermitian_hint);
  }
  SparseOperatorT operator-(const SparseOperatorT& o) const {
    Eigen::SparseMatrix<Scalar> s = mat - o.mat;
    s.makeCompressed();
    return SparseOperatorT(std::move(s), hermitian_hint && o.hermitian_hint);
  }
  SparseOperatorT scaled(Scalar c) const {
    Eigen::SparseMatrix<Scalar> s = mat * c;
    return SparseOperatorT(std::move(s), hermitian_hint);
  }

  /// Largest |entry| of this operator.
  double max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat.outerSize(); ++k)
      for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(mat, k); it; ++it)
        m = std::max(m, static_cast<double>(std::abs(it.value())));
    return m;
  }
  /// Max-entry deviation from hermiticity.
  double hermiticity_defect() const { return (*this - adjoint()).max_abs(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return mat * v; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat); }
};

using SparseOperator = SparseOperatorT<double>;

inline constexpr long kDefaultDimensionBudget = 2'000'000;

/// Truncated excitation Fock space: occupation states over the lattice modes
/// with total <= cap, ordered by total then lexicographically.
class FockBasis {
 public:
  FockBasis(const MomentumLattice& lattice, int cap, long dimension_budget = kDefaultDimensionBudget);

  const MomentumLattice& lattice() const { return lattice_; }
  int cap() const { return cap_; }
  int num_modes() const { return lattice_.size(); }
  long dim() const { return static_cast<long>(states_.size()); }

  const OccupationState& state(long r) const { return states_[r]; }
  const std::vector<OccupationState>& states() const { return states_; }

  /// Perfect rank of an occupation vector (combinatorial number system).
  long rank_of(const std::vector<int>& occ) const;

  /// First rank of the sector with the given total; sector_offset(cap+1) = dim.
  long sector_offset(int total) const { return offsets_.at(total); }
  std::pair<long, long> sector_range(int total) const {
    return {offsets_.at(total), offsets_.at(total + 1)};
  }

 private:
  MomentumLattice lattice_;
  int cap_;
  std::vector<OccupationState> states_;
  std::vector<long> offsets_;
  std::vector<std::vector<unsigned long long>> binom_;
};

/// Full N-particle sector: occupations (n0, n_1..n_M) with n0 the condensate
/// mode and total exactly N, ordered lexicographically on the full vector.
class FullSectorBasis {
 public:
  FullSectorBasis(const MomentumLattice& lattice, int N, long dimension_budget = kDefaultDimensionBudget);

  const MomentumLattice& lattice() const { return lattice_; }
  int particles() const { return N_; }
  /// Slot count including the condensate slot 0.
  int num_slots() const { return lattice_.size() + 1; }
  long dim() const { return static_cast<long>(states_.size()); }

  /// occ includes the condensate occupation at index 0.
  const std::vector<int>& occ(long r) const { return states_[r]; }
  long rank_of(const std::vector<int>& occ) const;

 private:
  MomentumLattice lattice_;
  int N_;
  std::vector<std::vector<int>> states_;
  std::vector<std::vector<unsigned long long>> binom_;
};

/// a+_p ; maps the top sector (total == cap) to zero (hard truncation).
SparseOperator creation(const FockBasis& basis, int mode);
/// a_p ; the adjoint of creation.
SparseOperator annihilation(const FockBasis& basis, int mode);
/// b_p = sqrt(1 - N+/N) a_p, the square-root factor applied on the left.
/// Throws DomainError when cap > N.
SparseOperator modified_b(const FockBasis& basis, int mode, int N);
/// b+_p = a+_p sqrt(1 - N+/N); annihilates the sector total == N.
SparseOperator modified_b_dagger(const FockBasis& basis, int mode, int N);
/// Diagonal operator with entry = total excitation number of each state.
SparseOperator excitation_number(const FockBasis& basis);
/// Diagonal operator f(total) for an arbitrary per-sector weight.
SparseOperator sector_diagonal(const FockBasis& basis, const std::function<double(int)>& f);
/// dGamma(O) = sum_{p,q} O_{p,q} a+_p a_q for a mode-indexed coefficient table.
/// With require_hermitian set, a non-symmetric table is rejected.
SparseOperator dGamma(const FockBasis& basis, const Eigen::MatrixXd& O,
                      bool require_hermitian = true);

/// Unitary relabeling U_N between the full N-particle sector and the
/// excitation basis with cap = N (drops / restores n0 = N - sum n_p).
/// Returned operator maps full-sector vectors to excitation vectors.
SparseOperator excitation_map(const FullSectorBasis& full, const FockBasis& excitation);

/// One normal-ordered monomial given as an operator string, leftmost factor
/// first; factors are (slot, is_creation). Applied right to left.
struct Monomial {
  std::vector<std::pair<int, bool>> factors;
  double coeff = 0.0;
};

/// Assemble sum_i coeff_i * monomial_i on the excitation basis (slots are
/// lattice mode ordinals; creation on the top sector gives zero).
SparseOperator assemble_monomials(const FockBasis& basis, const std::vector<Monomial>& terms);
/// Same on the full sector basis (slot 0 is the condensate mode).
SparseOperator assemble_monomials(const FullSectorBasis& basis, const std::vector<Monomial>& terms);

}  // namespace bosons
