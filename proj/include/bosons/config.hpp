#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bosons/lattice.hpp"
#include "bosons/model.hpp"

namespace bosons {

enum class Experiment { Scatter, Spectrum, Decay, Ldp, Gibbs, Verify };

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

/// One run = one config file. Nested key-value text, all validation errors
/// collected and reported together.
struct RunConfig {
  Experiment experiment = Experiment::Verify;

  // [model]
  int N = 6;
  double beta_scaling = 1.0;
  CutoffKind cutoff_kind = CutoffKind::Euclidean;
  int cutoff = 1;
  std::string potential = "square_well";
  double V0 = 50.0;
  double R = 0.2;
  int cap = -1;  // -1: equal to N
  std::string prefactor = "regime";  // regime | over_n | over_n_minus_1
  long budget = kDefaultDimensionBudget;

  // [scattering]
  double ell = 0.45;
  double ode_tol = 1e-12;
  int scatter_N = 100;

  // [statistics]
  std::vector<double> kappa_grid{0.05, 0.1, 0.2, 0.4};
  std::vector<double> lambda_grid{-0.2, -0.1, -0.05, 0.05, 0.1, 0.2};
  std::vector<double> x_grid{0.5, 1.0, 1.5};
  std::vector<int> n_sweep{4, 6, 8};
  double gibbs_beta = 2.0;
  double onsager_offset = 1.0;

  // [output]
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  std::uint64_t seed = 1;

  PotentialSpec potential_spec() const;
  ModelConfig model_config() const;
  ModelConfig model_config_for(int particles) const;
};

/// Parse the nested key-value text; throws ValidationError carrying every
/// problem found (one per line), with unknown keys pointing at the nearest
/// valid key.
RunConfig parse_config(const std::string& text);

}  // namespace bosons
