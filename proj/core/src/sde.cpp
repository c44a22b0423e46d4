#include "fpv/sde.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fpv {

namespace {

double param(const ParamMap& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("missing model parameter '" + key + "'");
  return it->second;
}

// derivatives of tanh written in t = tanh x
double tanh_derivative(double x, int order) {
  const double t = std::tanh(x);
  const double s = 1.0 - t * t;
  switch (order) {
    case 0: return t;
    case 1: return s;
    case 2: return -2.0 * t * s;
    case 3: return s * (6.0 * t * t - 2.0);
    case 4: return t * s * (16.0 - 24.0 * t * t);
    default: throw std::out_of_range("tanh derivative order above 4");
  }
}

double lorentz_derivative(double x, int order) {
  const double d = 1.0 + x * x;
  switch (order) {
    case 0: return 1.0 / d;
    case 1: return -2.0 * x / (d * d);
    case 2: return (6.0 * x * x - 2.0) / (d * d * d);
    default: throw std::out_of_range("lorentz derivative order above 2");
  }
}

SmoothFunction scaled(double scale, double shift_value, SmoothFunction::Eval g, int max_order) {
  // scale * (shift_value + g)
  return SmoothFunction(
      [scale, shift_value, g](double x, int order) {
        return scale * ((order == 0 ? shift_value : 0.0) + g(x, order));
      },
      max_order);
}

SdeModel bounded_tanh(const ParamMap& p, bool lorentz) {
  const double sigma = param(p, "sigma");
  const double weight = param(p, "weight");
  SdeModel m{
      lorentz ? "bounded-tanh-lorentz" : "bounded-tanh",
      scaled(sigma, 1.0, [](double x, int o) { return 0.5 * tanh_derivative(x, o); }, 4),
      scaled(-1.0, 0.0, tanh_derivative, 4),
      lorentz ? scaled(weight, 0.0, lorentz_derivative, 2) : SmoothFunction::constant(weight, 2),
      true,
      p,
  };
  return m;
}

ModelRegistry build_registry() {
  ModelRegistry r;
  r.add("additive", {{"sigma", 1.0}, {"weight", 1.0}}, [](const ParamMap& p) {
    return SdeModel{"additive", SmoothFunction::constant(param(p, "sigma")), SmoothFunction::constant(0.0),
                    SmoothFunction::constant(param(p, "weight"), 2), true, p};
  });
  r.add("bounded-tanh", {{"sigma", 1.0}, {"weight", 1.0}},
        [](const ParamMap& p) { return bounded_tanh(p, false); });
  r.add("bounded-tanh-lorentz", {{"sigma", 1.0}, {"weight", 1.0}},
        [](const ParamMap& p) { return bounded_tanh(p, true); });
  r.add("linear", {{"sigma", 1.0}, {"weight", 1.0}}, [](const ParamMap& p) {
    const double sigma = param(p, "sigma");
    SmoothFunction v1(
        [sigma](double x, int o) { return o == 0 ? sigma * (1.0 + x) : (o == 1 ? sigma : 0.0); }, 4);
    return SdeModel{"linear", v1, SmoothFunction::constant(0.0), SmoothFunction::constant(param(p, "weight"), 2),
                    false, p};
  });
  return r;
}

}  // namespace

SmoothFunction::SmoothFunction(Eval eval, int max_order) : eval_(std::move(eval)), max_order_(max_order) {
  if (!eval_) throw std::invalid_argument("empty smooth function");
}

SmoothFunction SmoothFunction::constant(double c, int max_order) {
  return SmoothFunction([c](double, int order) { return order == 0 ? c : 0.0; }, max_order);
}

double SmoothFunction::derivative(double x, int order) const {
  if (order < 0 || order > max_order_) {
    throw std::out_of_range("derivative order " + std::to_string(order) + " not available");
  }
  return eval_(x, order);
}

double SdeModel::a(double x, int k) const {
  const double v = v1(x);
  return f(x) * std::pow(v * v, k);
}

BoundednessReport spot_check_bounds(const SdeModel& model, double radius, std::size_t points) {
  constexpr double kBound = 1e6;
  BoundednessReport report;
  const std::pair<const char*, const SmoothFunction*> fns[] = {{"v1", &model.v1}, {"v2", &model.v2}, {"f", &model.f}};
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(points - 1);
    for (auto [label, fn] : fns) {
      for (int o = 0; o <= fn->max_order(); ++o) {
        const double v = fn->derivative(x, o);
        if (!std::isfinite(v)) {
          report.finite = false;
          report.within_bound = false;
        }
        if (std::abs(v) > report.max_abs) {
          report.max_abs = std::abs(v);
          std::ostringstream os;
          os << label << std::string(static_cast<std::size_t>(o), '\'') << " at x=" << x;
          report.worst = os.str();
        }
      }
    }
  }
  if (report.max_abs > kBound) report.within_bound = false;
  return report;
}

void ModelRegistry::add(const std::string& name, ParamMap defaults, Factory factory) {
  entries_[name] = Entry{std::move(defaults), std::move(factory)};
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

const ParamMap& ModelRegistry::defaults(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) make(name);
  return it->second.defaults;
}

std::shared_ptr<const SdeModel> ModelRegistry::make(const std::string& name, const ParamMap& params) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    std::string msg = "unknown model '" + name + "'; available:";
    for (const auto& [k, v] : entries_) msg += " " + k;
    throw std::invalid_argument(msg);
  }
  ParamMap merged = it->second.defaults;
  for (const auto& [k, v] : params) {
    if (!merged.count(k)) throw std::invalid_argument("model '" + name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("model parameter '" + k + "' is not finite");
    merged[k] = v;
  }
  return std::make_shared<const SdeModel>(it->second.factory(merged));
}

const ModelRegistry& model_registry() {
  static const ModelRegistry registry = build_registry();
  return registry;
}

std::vector<double> GridPath::coarse_x() const {
  std::vector<double> out(coarse_n() + 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = X[j * kappa];
  return out;
}

std::vector<double> GridPath::coarse_b() const {
  std::vector<double> out(coarse_n() + 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = B[j * kappa];
  return out;
}

GridPath euler_solve(std::shared_ptr<const SdeModel> model, std::span<const double> fbm_path, double x0,
                     std::size_t kappa) {
  if (!model) throw std::invalid_argument("euler_solve: null model");
  if (kappa < 1) throw std::invalid_argument("euler_solve: kappa must be >= 1");
  if (fbm_path.size() < 2) throw std::invalid_argument("euler_solve: path needs at least two points");
  const std::size_t m = fbm_path.size() - 1;
  if (m % kappa != 0) throw std::invalid_argument("euler_solve: fine grid size not divisible by kappa");
  GridPath p;
  p.m = m;
  p.kappa = kappa;
  p.x0 = x0;
  p.model = model;
  p.B.assign(fbm_path.begin(), fbm_path.end());
  p.X.resize(m + 1);
  p.X[0] = x0;
  const double dt = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = p.X[i];
    const double next = x + model->v2(x) * dt + model->v1(x) * (fbm_path[i + 1] - fbm_path[i]);
    if (!std::isfinite(next)) throw std::runtime_error("euler_solve: non-finite state at step " + std::to_string(i + 1));
    p.X[i + 1] = next;
  }
  return p;
}

GridPath simulate_path(std::shared_ptr<const SdeModel> model, std::size_t n, std::size_t kappa, double hurst,
                       std::uint64_t seed, double x0, FgnMethod method) {
  FgnSample s = sample_fgn(n * kappa, hurst, seed, method);
  std::vector<double> b = path_from_increments(s);
  return euler_solve(std::move(model), b, x0, kappa);
}

}  // namespace fpv
