#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fpv/fbm.hpp"

namespace fpv {

using ParamMap = std::map<std::string, double>;

// Scalar function with derivatives up to max_order.
class SmoothFunction {
 public:
  using Eval = std::function<double(double x, int order)>;

  SmoothFunction(Eval eval, int max_order);
  static SmoothFunction constant(double c, int max_order = 4);

  double operator()(double x) const { return eval_(x, 0); }
  double derivative(double x, int order) const;
  int max_order() const noexcept { return max_order_; }

 private:
  Eval eval_;
  int max_order_;
};

// dX = V2(X) dt + V1(X) dB with weight f in the power variation.
struct SdeModel {
  std::string name;
  SmoothFunction v1;
  SmoothFunction v2;
  SmoothFunction f;
  bool bounded = true;
  ParamMap params;

  // f(x) V1(x)^{2k}
  double a(double x, int k) const;
};

struct BoundednessReport {
  bool finite = true;
  bool within_bound = true;
  double max_abs = 0.0;
  std::string worst;  // e.g. "v1'' at x=..."
};

// Evaluates every available derivative on a uniform grid over [-radius, radius].
BoundednessReport spot_check_bounds(const SdeModel& model, double radius = 50.0, std::size_t points = 2001);

class ModelRegistry {
 public:
  using Factory = std::function<SdeModel(const ParamMap&)>;

  void add(const std::string& name, ParamMap defaults, Factory factory);
  std::vector<std::string> names() const;
  const ParamMap& defaults(const std::string& name) const;
  // Exact, case-sensitive lookup. Unknown parameters are rejected.
  std::shared_ptr<const SdeModel> make(const std::string& name, const ParamMap& params = {}) const;

 private:
  struct Entry {
    ParamMap defaults;
    Factory factory;
  };
  std::map<std::string, Entry> entries_;
};

// additive, bounded-tanh, bounded-tanh-lorentz, linear (flagged unbounded).
const ModelRegistry& model_registry();

struct GridPath {
  std::size_t m = 0;      // fine grid size
  std::size_t kappa = 1;  // fine steps per coarse step
  std::vector<double> B;  // fBm on the fine grid, m + 1 values
  std::vector<double> X;  // solution on the fine grid, m + 1 values
  double x0 = 0.0;
  std::shared_ptr<const SdeModel> model;

  std::size_t coarse_n() const noexcept { return m / kappa; }
  std::vector<double> coarse_x() const;
  std::vector<double> coarse_b() const;
};

// Left-point Euler scheme on the grid of the supplied fBm path.
GridPath euler_solve(std::shared_ptr<const SdeModel> model, std::span<const double> fbm_path, double x0,
                     std::size_t kappa);

// Samples fGn on the fine grid of size kappa * n and solves the SDE.
GridPath simulate_path(std::shared_ptr<const SdeModel> model, std::size_t n, std::size_t kappa, double hurst,
                       std::uint64_t seed, double x0 = 0.0, FgnMethod method = FgnMethod::circulant);

}  // namespace fpv
