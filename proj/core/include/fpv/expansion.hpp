#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fpv/kernel.hpp"
#include "fpv/sde.hpp"

namespace fpv {

struct ExpansionConstants {
  int k = 1;
  double hurst = 0.0;
  double c_g_infinity = 0.0;
  double c_tau = 0.0;
  double mu0 = 0.0;  // mu_{2k,0}

  static ExpansionConstants compute(int k, HurstParam h, double tol = 1e-7);
};

// v = C_Ginf * int a^2, a3 = int a^3, c1 = -mu_{2k,0} (a(X_0) + a(X_1)) / 2
struct PathFunctionals {
  double v = 0.0;
  double a3 = 0.0;
  double c1 = 0.0;
};

PathFunctionals path_functionals(const GridPath& path, int k, HurstParam h, double tol = 1e-7);
PathFunctionals path_functionals(const GridPath& path, const ExpansionConstants& constants);

struct EnsembleProvenance {
  std::string model;
  ParamMap params;
  std::size_t n = 0;
  std::size_t kappa = 0;
  std::uint64_t seed = 0;
  double x0 = 0.0;
};

struct ExpansionEnsemble {
  ExpansionConstants constants;
  std::vector<PathFunctionals> records;
  EnsembleProvenance provenance;

  std::size_t size() const noexcept { return records.size(); }
  // sqrt of the largest conditional variance
  double effective_std() const;
};

// Paths are sampled on the fine grid of size kappa * n from the expansion
// stream of `seed`, so they never share randomness with Z_n samples.
ExpansionEnsemble build_expansion_ensemble(std::shared_ptr<const SdeModel> model, int k, HurstParam h,
                                           std::size_t n, std::size_t kappa, std::size_t paths,
                                           std::uint64_t seed, double x0 = 0.0, std::size_t threads = 0,
                                           double tol = 1e-7);

// h_alpha with (-d/dz)^alpha phi(z; 0, v) = h_alpha phi(z; 0, v), alpha <= 3.
double gaussian_derivative_weight(int alpha, double z, double v);
double normal_density(double z, double v);

double baseline_density(double z, const ExpansionEnsemble& e);
double expansion_density(double z, const ExpansionEnsemble& e, std::size_t n);
double baseline_cdf(double x, const ExpansionEnsemble& e);
double expansion_cdf(double x, const ExpansionEnsemble& e, std::size_t n);

struct DensityRow {
  double z = 0.0;
  double p_baseline = 0.0;
  double p_corrected = 0.0;
  double f_baseline = 0.0;
  double f_corrected = 0.0;
};

// Uniform grid over +-half_width effective standard deviations.
std::vector<double> z_grid(const ExpansionEnsemble& e, double half_width = 8.0, std::size_t points = 10001);
std::vector<DensityRow> evaluate_density_grid(const ExpansionEnsemble& e, std::size_t n, const std::vector<double>& zs,
                                              std::size_t threads = 0);
// Grid intervals on which the corrected CDF decreases.
std::size_t count_decreasing_steps(const std::vector<DensityRow>& rows);

}  // namespace fpv
