#include "fpv/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fpv/combinatorics.hpp"
#include "fpv/parallel.hpp"
#include "fpv/random.hpp"
#include "fpv/variation.hpp"

namespace fpv {

namespace {

void require_nonempty(const ExpansionEnsemble& e) {
  if (e.records.empty()) throw std::invalid_argument("expansion ensemble is empty");
}

void require_n(std::size_t n) {
  if (n < 2) throw std::invalid_argument("expansion needs n >= 2");
}

}  // namespace

ExpansionConstants ExpansionConstants::compute(int k, HurstParam h, double tol) {
  ExpansionConstants c;
  c.k = k;
  c.hurst = h.value();
  c.c_g_infinity = fpv::c_g_infinity(k, h, tol).value;
  c.c_tau = fpv::c_tau(k, h, std::max(tol, 1e-6)).value;
  c.mu0 = mu(k, 0, h);
  return c;
}

PathFunctionals path_functionals(const GridPath& path, const ExpansionConstants& constants) {
  const int k = constants.k;
  std::vector<double> a2(path.X.size()), a3(path.X.size());
  for (std::size_t i = 0; i < path.X.size(); ++i) {
    const double a = path.model->a(path.X[i], k);
    a2[i] = a * a;
    a3[i] = a * a * a;
  }
  PathFunctionals r;
  r.v = constants.c_g_infinity * trapezoid(a2);
  r.a3 = trapezoid(a3);
  r.c1 = -0.5 * constants.mu0 * (path.model->a(path.X.front(), k) + path.model->a(path.X.back(), k));
  if (!(r.v > 0.0) || !std::isfinite(r.v)) {
    std::ostringstream os;
    os << "degenerate conditional variance v=" << r.v << " (x0=" << path.x0 << ", model " << path.model->name << ")";
    throw std::runtime_error(os.str());
  }
  return r;
}

PathFunctionals path_functionals(const GridPath& path, int k, HurstParam h, double tol) {
  ExpansionConstants c;
  c.k = k;
  c.hurst = h.value();
  c.c_g_infinity = fpv::c_g_infinity(k, h, tol).value;
  c.mu0 = mu(k, 0, h);
  return path_functionals(path, c);
}

double ExpansionEnsemble::effective_std() const {
  require_nonempty(*this);
  double vmax = 0.0;
  for (const auto& r : records) vmax = std::max(vmax, r.v);
  return std::sqrt(vmax);
}

ExpansionEnsemble build_expansion_ensemble(std::shared_ptr<const SdeModel> model, int k, HurstParam h,
                                           std::size_t n, std::size_t kappa, std::size_t paths,
                                           std::uint64_t seed, double x0, std::size_t threads, double tol) {
  if (paths == 0) throw std::invalid_argument("expansion ensemble needs at least one path");
  ExpansionEnsemble e;
  e.constants = ExpansionConstants::compute(k, h, tol);
  e.provenance = {model->name, model->params, n, kappa, seed, x0};
  e.records = parallel_map(
      paths,
      [&](std::size_t i) {
        GridPath p = simulate_path(model, n, kappa, h.value(), substream_seed(seed, i, StreamTag::expansion), x0);
        try {
          return path_functionals(p, e.constants);
        } catch (const std::runtime_error& err) {
          throw std::runtime_error("expansion path " + std::to_string(i) + ": " + err.what());
        }
      },
      threads);
  return e;
}

double normal_density(double z, double v) {
  return std::exp(-0.5 * z * z / v) / std::sqrt(2.0 * std::numbers::pi * v);
}

double gaussian_derivative_weight(int alpha, double z, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("gaussian_derivative_weight needs v > 0");
  switch (alpha) {
    case 0: return 1.0;
    case 1: return z / v;
    case 2: return z * z / (v * v) - 1.0 / v;
    case 3: return z * z * z / (v * v * v) - 3.0 * z / (v * v);
    default: throw std::out_of_range("gaussian_derivative_weight supports alpha <= 3");
  }
}

double baseline_density(double z, const ExpansionEnsemble& e) {
  require_nonempty(e);
  double s = 0.0;
  for (const auto& r : e.records) s += normal_density(z, r.v);
  return s / static_cast<double>(e.size());
}

double expansion_density(double z, const ExpansionEnsemble& e, std::size_t n) {
  require_nonempty(e);
  require_n(n);
  const double eps = 1.0 / std::sqrt(static_cast<double>(n));
  const double ct = e.constants.c_tau / 3.0;
  double s = 0.0;
  for (const auto& r : e.records) {
    const double corr = ct * r.a3 * gaussian_derivative_weight(3, z, r.v) + r.c1 * gaussian_derivative_weight(1, z, r.v);
    s += (1.0 + eps * corr) * normal_density(z, r.v);
  }
  return s / static_cast<double>(e.size());
}

double baseline_cdf(double x, const ExpansionEnsemble& e) {
  require_nonempty(e);
  double s = 0.0;
  for (const auto& r : e.records) s += 0.5 * std::erfc(-x / std::sqrt(2.0 * r.v));
  return s / static_cast<double>(e.size());
}

double expansion_cdf(double x, const ExpansionEnsemble& e, std::size_t n) {
  require_nonempty(e);
  require_n(n);
  const double eps = 1.0 / std::sqrt(static_cast<double>(n));
  const double ct = e.constants.c_tau / 3.0;
  double base = 0.0, corr = 0.0;
  for (const auto& r : e.records) {
    base += 0.5 * std::erfc(-x / std::sqrt(2.0 * r.v));
    corr += (ct * r.a3 * gaussian_derivative_weight(2, x, r.v) + r.c1) * normal_density(x, r.v);
  }
  return (base - eps * corr) / static_cast<double>(e.size());
}

std::vector<double> z_grid(const ExpansionEnsemble& e, double half_width, std::size_t points) {
  if (points < 2) throw std::invalid_argument("z grid needs at least two points");
  const double s = e.effective_std() * half_width;
  std::vector<double> z(points);
  for (std::size_t i = 0; i < points; ++i) z[i] = -s + 2.0 * s * static_cast<double>(i) / static_cast<double>(points - 1);
  return z;
}

std::vector<DensityRow> evaluate_density_grid(const ExpansionEnsemble& e, std::size_t n, const std::vector<double>& zs,
                                              std::size_t threads) {
  require_nonempty(e);
  require_n(n);
  const double eps = 1.0 / std::sqrt(static_cast<double>(n));
  const double ct = e.constants.c_tau / 3.0;
  return parallel_map(
      zs.size(),
      [&](std::size_t i) {
        const double z = zs[i];
        double p0 = 0.0, p1 = 0.0, f0 = 0.0, f1 = 0.0;
        for (const auto& r : e.records) {
          const double phi = normal_density(z, r.v);
          p0 += phi;
          p1 += (ct * r.a3 * gaussian_derivative_weight(3, z, r.v) + r.c1 * gaussian_derivative_weight(1, z, r.v)) * phi;
          f0 += 0.5 * std::erfc(-z / std::sqrt(2.0 * r.v));
          f1 += (ct * r.a3 * gaussian_derivative_weight(2, z, r.v) + r.c1) * phi;
        }
        const double m = static_cast<double>(e.size());
        return DensityRow{z, p0 / m, (p0 + eps * p1) / m, f0 / m, (f0 - eps * f1) / m};
      },
      threads);
}

std::size_t count_decreasing_steps(const std::vector<DensityRow>& rows) {
  std::size_t c = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].f_corrected < rows[i - 1].f_corrected) ++c;
  return c;
}

}  // namespace fpv
