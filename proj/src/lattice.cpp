#include "bosons/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bosons {

double Momentum::p_norm() const { return kTwoPi * std::sqrt(static_cast<double>(norm2_int())); }

std::string Momentum::str() const {
  std::ostringstream os;
  os << "(" << k[0] << "," << k[1] << "," << k[2] << ")";
  return os.str();
}

MomentumLattice MomentumLattice::enumerate_modes(CutoffKind kind, int cutoff_value) {
  if (cutoff_value < 1) {
    throw DomainError("enumerate_modes: cutoff_value must be >= 1 (empty lattice)");
  }
  MomentumLattice lat;
  lat.kind_ = kind;
  lat.cutoff_ = cutoff_value;
  const int c = cutoff_value;
  for (int x = -c; x <= c; ++x) {
    for (int y = -c; y <= c; ++y) {
      for (int z = -c; z <= c; ++z) {
        Momentum m{{x, y, z}};
        if (m.is_zero()) continue;
        if (kind == CutoffKind::Euclidean && m.norm2_int() > c * c) continue;
        lat.modes_.push_back(m);
      }
    }
  }
  std::sort(lat.modes_.begin(), lat.modes_.end());
  lat.build_index();
  return lat;
}

MomentumLattice MomentumLattice::from_modes(std::vector<Momentum> modes) {
  MomentumLattice lat;
  for (const auto& m : modes) {
    if (m.is_zero()) throw ValidationError("from_modes: zero momentum is not a lattice mode");
  }
  lat.modes_ = std::move(modes);
  std::sort(lat.modes_.begin(), lat.modes_.end());
  lat.modes_.erase(std::unique(lat.modes_.begin(), lat.modes_.end()), lat.modes_.end());
  lat.build_index();
  return lat;
}

void MomentumLattice::build_index() {
  index_.clear();
  for (int i = 0; i < size(); ++i) index_[modes_[i]] = i;
}

int MomentumLattice::index_of(const Momentum& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw IndexError("index_of: momentum " + m.str() + " not in lattice");
  return it->second;
}

int MomentumLattice::negate(int i) const { return index_of(-mode(i)); }

PotentialSpec PotentialSpec::square_well(double V0, double R) {
  if (V0 < 0.0) throw ValidationError("square_well: V0 must be non-negative");
  if (!(R > 0.0 && R < 0.5)) throw ValidationError("square_well: need 0 < R < 1/2");
  PotentialSpec s;
  s.kind = PotentialKind::SquareWell;
  s.V0 = V0;
  s.R = R;
  return s;
}

PotentialSpec PotentialSpec::cosine_bump(double V0, double R) {
  if (V0 < 0.0) throw ValidationError("cosine_bump: V0 must be non-negative");
  if (!(R > 0.0 && R < 0.5)) throw ValidationError("cosine_bump: need 0 < R < 1/2");
  PotentialSpec s;
  s.kind = PotentialKind::CosineBump;
  s.V0 = V0;
  s.R = R;
  return s;
}

PotentialSpec PotentialSpec::from_table(std::map<Momentum, double> t) {
  PotentialSpec s;
  s.kind = PotentialKind::Table;
  s.table = std::move(t);
  return s;
}

double PotentialSpec::value(double r) const {
  switch (kind) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::SquareWell:
      return r <= R ? V0 : 0.0;
    case PotentialKind::CosineBump: {
      if (r > R) return 0.0;
      const double c = std::cos(0.5 * (kTwoPi / 2.0) * r / R);  // cos(pi r / (2R))
      return V0 * c * c;
    }
    case PotentialKind::Table:
      throw DomainError("PotentialSpec::value: table potential has no real-space form");
  }
  return 0.0;
}

std::string PotentialSpec::kind_name() const {
  switch (kind) {
    case PotentialKind::Zero:
      return "zero";
    case PotentialKind::SquareWell:
      return "square_well";
    case PotentialKind::CosineBump:
      return "cosine_bump";
    case PotentialKind::Table:
      return "table";
  }
  return "?";
}

namespace {

// (sin x - x cos x) / x^3 with a series branch near zero. The direct form
// loses all digits for small x; the series keeps relative error below 1e-15
// for x < 1e-3.
double ball_shape(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return (1.0 / 3.0) - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0;
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

// Adaptive Gauss-Legendre for smooth radial integrands, absolute tolerance.
template <typename F>
double adaptive_gl(F f, double a, double b, double abstol, int depth = 0) {
  static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  auto gl8 = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += ws[i] * f(c + h * xs[i]);
    return s * h;
  };
  const double whole = gl8(a, b);
  const double mid = 0.5 * (a + b);
  const double split = gl8(a, mid) + gl8(mid, b);
  if (std::abs(whole - split) <= abstol || depth > 40) return split;
  return adaptive_gl(f, a, mid, 0.5 * abstol, depth + 1) +
         adaptive_gl(f, mid, b, 0.5 * abstol, depth + 1);
}

}  // namespace

double fourier_coefficient(const PotentialSpec& spec, double qnorm) {
  const double q = std::abs(qnorm);
  switch (spec.kind) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::SquareWell: {
      // 4 pi V0 (sin qR - qR cos qR)/q^3 = 4 pi V0 R^3 * ball_shape(qR)
      const double x = q * spec.R;
      return 4.0 * (kTwoPi / 2.0) * spec.V0 * spec.R * spec.R * spec.R * ball_shape(x);
    }
    case PotentialKind::CosineBump: {
      const double pi = kTwoPi / 2.0;
      auto radial = [&](double r) {
        const double c = std::cos(0.5 * pi * r / spec.R);
        const double v = spec.V0 * c * c;
        if (q < 1e-8) return v * r * r;  // sinc limit
        return v * r * std::sin(q * r) / q;
      };
      return 4.0 * pi * adaptive_gl(radial, 0.0, spec.R, 1e-12);
    }
    case PotentialKind::Table: {
      // The table is keyed by lattice vectors; a pure-norm query can only
      // resolve the zero entry.
      if (q < 1e-12) {
        auto it = spec.table.find(Momentum{});
        return it == spec.table.end() ? 0.0 : it->second;
      }
      return 0.0;
    }
  }
  return 0.0;
}

double fourier_coefficient(const PotentialSpec& spec, const std::array<double, 3>& q) {
  if (spec.kind == PotentialKind::Table) {
    // Resolve q = 2 pi k for integer k, else no support.
    Momentum m;
    for (int i = 0; i < 3; ++i) {
      const double ki = q[i] / kTwoPi;
      const double r = std::round(ki);
      if (std::abs(ki - r) > 1e-9) return 0.0;
      m.k[i] = static_cast<int>(r);
    }
    auto it = spec.table.find(m);
    if (it != spec.table.end()) return it->second;
    it = spec.table.find(-m);  // even extension
    return it == spec.table.end() ? 0.0 : it->second;
  }
  return fourier_coefficient(spec, std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]));
}

PrefactorConvention default_convention(double beta) {
  return beta == 0.0 ? PrefactorConvention::OverNMinus1 : PrefactorConvention::OverN;
}

double scaled_coupling(const PotentialSpec& spec, int N, double beta, const Momentum& l,
                       PrefactorConvention convention) {
  if (N < 2) throw DomainError("scaled_coupling: need N >= 2");
  if (beta < 0.0 || beta > 1.0) throw DomainError("scaled_coupling: beta must lie in [0,1]");
  const double pref =
      convention == PrefactorConvention::OverN ? 1.0 / (2.0 * N) : 1.0 / (2.0 * (N - 1));
  if (spec.kind == PotentialKind::Table) {
    auto it = spec.table.find(l);
    if (it == spec.table.end()) it = spec.table.find(-l);
    return it == spec.table.end() ? 0.0 : pref * it->second;
  }
  const double scale = std::pow(static_cast<double>(N), beta);
  return pref * fourier_coefficient(spec, l.p_norm() / scale);
}

double scaled_coupling(const PotentialSpec& spec, int N, double beta, const Momentum& l) {
  return scaled_coupling(spec, N, beta, l, default_convention(beta));
}

}  // namespace bosons
