#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bosons {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct CapacityError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Integer lattice vector k; the physical momentum on the unit torus is 2*pi*k.
struct Momentum {
  std::array<int, 3> k{0, 0, 0};

  int norm2_int() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
  /// |p|^2 = 4 pi^2 |k|^2, computed from the integer norm (no cancellation).
  double p_norm2() const { return kTwoPi * kTwoPi * static_cast<double>(norm2_int()); }
  double p_norm() const;
  std::array<double, 3> p() const {
    return {kTwoPi * k[0], kTwoPi * k[1], kTwoPi * k[2]};
  }
  Momentum operator-() const { return {{-k[0], -k[1], -k[2]}}; }
  Momentum operator+(const Momentum& o) const {
    return {{k[0] + o.k[0], k[1] + o.k[1], k[2] + o.k[2]}};
  }
  Momentum operator-(const Momentum& o) const {
    return {{k[0] - o.k[0], k[1] - o.k[1], k[2] - o.k[2]}};
  }
  bool operator==(const Momentum& o) const { return k == o.k; }
  bool operator<(const Momentum& o) const { return k < o.k; }
  bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }
  std::string str() const;
};

enum class CutoffKind { SupNorm, Euclidean };

/// Finite symmetric subset of 2*pi*Z^3 \ {0} with index maps and +/-p pairing.
class MomentumLattice {
 public:
  /// Empty lattice; fill via enumerate_modes or from_modes.
  MomentumLattice() = default;

  /// All k with 0 < |k| <= cutoff_value (norm per cutoff_kind), ordered
  /// lexicographically on k. Throws DomainError for cutoff_value == 0.
  static MomentumLattice enumerate_modes(CutoffKind kind, int cutoff_value);

  /// Explicit mode list for tests and toy setups. The list need not be closed
  /// under negation; negate() throws for modes whose partner is absent.
  static MomentumLattice from_modes(std::vector<Momentum> modes);

  int size() const { return static_cast<int>(modes_.size()); }
  const std::vector<Momentum>& modes() const { return modes_; }
  const Momentum& mode(int i) const { return modes_.at(i); }

  /// Ordinal of a lattice vector; throws IndexError if absent.
  int index_of(const Momentum& m) const;
  bool contains(const Momentum& m) const { return index_.count(m) > 0; }
  /// Ordinal of -p for the mode at ordinal i.
  int negate(int i) const;

  CutoffKind cutoff_kind() const { return kind_; }
  int cutoff_value() const { return cutoff_; }

 private:
  void build_index();

  std::vector<Momentum> modes_;
  std::map<Momentum, int> index_;
  CutoffKind kind_ = CutoffKind::Euclidean;
  int cutoff_ = 0;
};

enum class PotentialKind { Zero, SquareWell, CosineBump, Table };

/// Non-negative, spherically symmetric potential with compact support, plus
/// an explicit-coefficient table variant for algebra tests.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  double V0 = 0.0;  // height (energy)
  double R = 0.0;   // support radius, must be < 1/2
  /// Table variant: lattice vector k -> coefficient, used verbatim by the
  /// coupling regardless of the scaling regime.
  std::map<Momentum, double> table;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec square_well(double V0, double R);
  static PotentialSpec cosine_bump(double V0, double R);
  static PotentialSpec from_table(std::map<Momentum, double> t);

  /// Real-space value v(r); not available for Table.
  double value(double r) const;
  bool has_real_space() const { return kind != PotentialKind::Table; }
  std::string kind_name() const;
};

/// v_hat(q) = int v(x) exp(-i q x) dx for |q| = qnorm; real and even in q.
double fourier_coefficient(const PotentialSpec& spec, double qnorm);

/// Convenience overload for a 3-vector argument.
double fourier_coefficient(const PotentialSpec& spec, const std::array<double, 3>& q);

/// Which pair-interaction prefactor to use: 1/(2N) or 1/(2(N-1)).
enum class PrefactorConvention { OverN, OverNMinus1 };

/// Default convention for a given scaling exponent: the mean-field endpoint
/// beta = 0 uses 1/(2(N-1)), every beta > 0 uses 1/(2N).
PrefactorConvention default_convention(double beta);

/// Coefficient multiplying a+_{p-l} a+_{q+l} a_p a_q in the pair sum of the
/// scaled Hamiltonian: prefactor * v_hat(l_phys / N^beta). The Table variant
/// is looked up by the lattice vector l itself.
double scaled_coupling(const PotentialSpec& spec, int N, double beta, const Momentum& l,
                       PrefactorConvention convention);
double scaled_coupling(const PotentialSpec& spec, int N, double beta, const Momentum& l);

}  // namespace bosons
