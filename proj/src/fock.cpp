#include "bosons/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace bosons {

namespace {

constexpr unsigned long long kSaturated = ~0ULL;

// Pascal table up to n rows with saturating addition. Entries actually read
// by the ranking maps are bounded by the basis dimension, which is checked
// against the budget before any ranking happens; saturated entries only occur
// in row regions the ranking never touches.
std::vector<std::vector<unsigned long long>> pascal(int n) {
  std::vector<std::vector<unsigned long long>> b(n + 1);
  for (int i = 0; i <= n; ++i) {
    b[i].resize(i + 1);
    b[i][0] = b[i][i] = 1;
    for (int j = 1; j < i; ++j) {
      const unsigned long long x = b[i - 1][j - 1], y = b[i - 1][j];
      b[i][j] = (x == kSaturated || y == kSaturated || x + y < x) ? kSaturated : x + y;
    }
  }
  return b;
}

unsigned long long choose(const std::vector<std::vector<unsigned long long>>& b, int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  return b[n][k];
}

// Number of compositions of s into m non-negative parts.
unsigned long long compositions(const std::vector<std::vector<unsigned long long>>& b, int s,
                                int m) {
  if (m == 0) return s == 0 ? 1 : 0;
  return choose(b, s + m - 1, m - 1);
}

// Lexicographic rank of a fixed-sum composition among all compositions of
// `total` into `m` parts (component 0 most significant, ascending).
long composition_rank(const std::vector<std::vector<unsigned long long>>& b,
                      const std::vector<int>& occ, int total) {
  const int m = static_cast<int>(occ.size());
  long rank = 0;
  int rem = total;
  for (int i = 0; i < m; ++i) {
    for (int v = 0; v < occ[i]; ++v) {
      rank += static_cast<long>(compositions(b, rem - v, m - i - 1));
    }
    rem -= occ[i];
  }
  return rank;
}

// Enumerate compositions of `total` into `m` parts in lexicographic order.
void enumerate_compositions(int total, int m, std::vector<int>& work, int pos,
                            const std::function<void(const std::vector<int>&)>& emit) {
  if (pos == m - 1) {
    work[pos] = total;
    emit(work);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    work[pos] = v;
    enumerate_compositions(total - v, m, work, pos + 1, emit);
  }
}

}  // namespace

FockBasis::FockBasis(const MomentumLattice& lattice, int cap, long dimension_budget)
    : lattice_(lattice), cap_(cap) {
  if (cap < 0) throw DomainError("FockBasis: cap must be >= 0");
  const int m = lattice.size();
  binom_ = pascal(cap + m + 2);
  const unsigned long long dim = choose(binom_, cap + m, m);
  if (dim > static_cast<unsigned long long>(dimension_budget)) {
    const std::string d = dim == kSaturated ? "(overflows 64 bits)" : std::to_string(dim);
    throw CapacityError("FockBasis: dimension " + d + " exceeds budget " +
                        std::to_string(dimension_budget));
  }
  states_.reserve(dim);
  offsets_.assign(cap_ + 2, 0);
  std::vector<int> work(m, 0);
  for (int t = 0; t <= cap_; ++t) {
    offsets_[t] = static_cast<long>(states_.size());
    enumerate_compositions(t, m, work, 0, [&](const std::vector<int>& occ) {
      states_.push_back(OccupationState{occ, t});
    });
  }
  offsets_[cap_ + 1] = static_cast<long>(states_.size());
  if (states_.size() != dim) throw Error("FockBasis: enumeration mismatch");
}

long FockBasis::rank_of(const std::vector<int>& occ) const {
  if (static_cast<int>(occ.size()) != num_modes())
    throw IndexError("rank_of: occupation length mismatch");
  int total = 0;
  for (int v : occ) {
    if (v < 0) throw IndexError("rank_of: negative occupation");
    total += v;
  }
  if (total > cap_) throw IndexError("rank_of: total exceeds cap");
  return offsets_[total] + composition_rank(binom_, occ, total);
}

FullSectorBasis::FullSectorBasis(const MomentumLattice& lattice, int N, long dimension_budget)
    : lattice_(lattice), N_(N) {
  if (N < 0) throw DomainError("FullSectorBasis: N must be >= 0");
  const int slots = lattice.size() + 1;
  binom_ = pascal(N + slots + 2);
  const unsigned long long dim = compositions(binom_, N, slots);
  if (dim > static_cast<unsigned long long>(dimension_budget)) {
    const std::string d = dim == kSaturated ? "(overflows 64 bits)" : std::to_string(dim);
    throw CapacityError("FullSectorBasis: dimension " + d + " exceeds budget " +
                        std::to_string(dimension_budget));
  }
  states_.reserve(dim);
  std::vector<int> work(slots, 0);
  enumerate_compositions(N, slots, work, 0,
                         [&](const std::vector<int>& occ) { states_.push_back(occ); });
  if (states_.size() != dim) throw Error("FullSectorBasis: enumeration mismatch");
}

long FullSectorBasis::rank_of(const std::vector<int>& occ) const {
  if (static_cast<int>(occ.size()) != num_slots())
    throw IndexError("rank_of: occupation length mismatch");
  int total = 0;
  for (int v : occ) {
    if (v < 0) throw IndexError("rank_of: negative occupation");
    total += v;
  }
  if (total != N_) throw IndexError("rank_of: total != N");
  return composition_rank(binom_, occ, N_);
}

SparseOperator creation(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.num_modes()) throw IndexError("creation: unknown mode");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(basis.dim());
  std::vector<int> occ;
  for (long r = 0; r < basis.dim(); ++r) {
    const auto& s = basis.state(r);
    if (s.total >= basis.cap()) continue;  // hard truncation
    occ = s.occ;
    occ[mode] += 1;
    trip.emplace_back(basis.rank_of(occ), r, std::sqrt(static_cast<double>(occ[mode])));
  }
  Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator annihilation(const FockBasis& basis, int mode) {
  return creation(basis, mode).adjoint();
}

SparseOperator sector_diagonal(const FockBasis& basis, const std::function<double(int)>& f) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(basis.dim());
  for (long r = 0; r < basis.dim(); ++r) {
    const double v = f(basis.state(r).total);
    if (v != 0.0) trip.emplace_back(r, r, v);
  }
  Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return SparseOperator(std::move(m), true);
}

SparseOperator modified_b(const FockBasis& basis, int mode, int N) {
  if (basis.cap() > N) throw DomainError("modified_b: cap > N makes sqrt(1 - N+/N) imaginary");
  if (mode < 0 || mode >= basis.num_modes()) throw IndexError("modified_b: unknown mode");
  // sqrt(1 - N+/N) a_p with the diagonal factor evaluated on the
  // post-annihilation sector: one square root of an exact rational per entry.
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<int> occ;
  for (long r = 0; r < basis.dim(); ++r) {
    const auto& s = basis.state(r);
    if (s.occ[mode] == 0) continue;
    occ = s.occ;
    const double np = occ[mode];
    occ[mode] -= 1;
    const double w = np * static_cast<double>(N - (s.total - 1)) / static_cast<double>(N);
    trip.emplace_back(basis.rank_of(occ), r, std::sqrt(w));
  }
  Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator modified_b_dagger(const FockBasis& basis, int mode, int N) {
  return modified_b(basis, mode, N).adjoint();
}

SparseOperator excitation_number(const FockBasis& basis) {
  return sector_diagonal(basis, [](int t) { return static_cast<double>(t); });
}

SparseOperator dGamma(const FockBasis& basis, const Eigen::MatrixXd& O, bool require_hermitian) {
  const int m = basis.num_modes();
  if (O.rows() != m || O.cols() != m) throw ValidationError("dGamma: table shape mismatch");
  if (require_hermitian && (O - O.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ValidationError("dGamma: coefficient table is not hermitian");
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<int> occ;
  for (long r = 0; r < basis.dim(); ++r) {
    const auto& s = basis.state(r);
    for (int q = 0; q < m; ++q) {
      if (s.occ[q] == 0) continue;
      for (int p = 0; p < m; ++p) {
        if (O(p, q) == 0.0) continue;
        occ = s.occ;
        double amp = std::sqrt(static_cast<double>(occ[q]));
        occ[q] -= 1;
        amp *= std::sqrt(static_cast<double>(occ[p] + 1));
        occ[p] += 1;
        trip.emplace_back(basis.rank_of(occ), r, O(p, q) * amp);
      }
    }
  }
  Eigen::SparseMatrix<double> mat(basis.dim(), basis.dim());
  mat.setFromTriplets(trip.begin(), trip.end());
  mat.prune(0.0);
  mat.makeCompressed();
  return SparseOperator(std::move(mat), require_hermitian);
}

SparseOperator excitation_map(const FullSectorBasis& full, const FockBasis& excitation) {
  if (excitation.cap() != full.particles())
    throw ValidationError("excitation_map: excitation cap must equal N");
  if (excitation.num_modes() + 1 != full.num_slots())
    throw ValidationError("excitation_map: lattice mismatch");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(full.dim());
  for (long r = 0; r < full.dim(); ++r) {
    const auto& occ = full.occ(r);
    std::vector<int> ex(occ.begin() + 1, occ.end());
    trip.emplace_back(excitation.rank_of(ex), r, 1.0);
  }
  Eigen::SparseMatrix<double> m(excitation.dim(), full.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

namespace {

template <typename BasisT>
SparseOperator assemble_impl(const BasisT& basis, const std::vector<Monomial>& terms,
                             int max_total) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<int> occ;
  for (long r = 0; r < basis.dim(); ++r) {
    for (const auto& term : terms) {
      if (term.coeff == 0.0) continue;
      if constexpr (std::is_same_v<BasisT, FockBasis>) {
        occ = basis.state(r).occ;
      } else {
        occ = basis.occ(r);
      }
      int total = 0;
      for (int v : occ) total += v;
      double amp = term.coeff;
      bool dead = false;
      for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
        const auto [slot, create] = *it;
        if (create) {
          if (total >= max_total) {
            dead = true;
            break;
          }
          occ[slot] += 1;
          total += 1;
          amp *= std::sqrt(static_cast<double>(occ[slot]));
        } else {
          if (occ[slot] == 0) {
            dead = true;
            break;
          }
          amp *= std::sqrt(static_cast<double>(occ[slot]));
          occ[slot] -= 1;
          total -= 1;
        }
      }
      if (dead || amp == 0.0) continue;
      trip.emplace_back(basis.rank_of(occ), r, amp);
    }
  }
  Eigen::SparseMatrix<double> m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(0.0);
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

}  // namespace

SparseOperator assemble_monomials(const FockBasis& basis, const std::vector<Monomial>& terms) {
  return assemble_impl(basis, terms, basis.cap());
}

SparseOperator assemble_monomials(const FullSectorBasis& basis,
                                  const std::vector<Monomial>& terms) {
  // Intermediate states may leave the N-particle sector (they live in the
  // ambient Fock space); only the final state is ranked, so each monomial
  // must conserve the particle number.
  for (const auto& t : terms) {
    int net = 0;
    for (auto [slot, create] : t.factors) net += create ? 1 : -1;
    if (net != 0)
      throw ValidationError("assemble_monomials: monomial does not conserve particle number");
  }
  return assemble_impl(basis, terms, std::numeric_limits<int>::max());
}

}  // namespace bosons
