#include "fpv/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "fpv/combinatorics.hpp"
#include "fpv/fbm.hpp"
#include "fpv/parallel.hpp"
#include "fpv/random.hpp"
#include "fpv/stats.hpp"
#include "fpv/wick.hpp"

namespace fpv {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

std::vector<int> parse_id(const std::string& id, std::string& kind) {
  std::vector<std::string> parts;
  std::stringstream ss(id);
  std::string item;
  while (std::getline(ss, item, '_')) parts.push_back(item);
  if (parts.empty()) throw std::invalid_argument("empty functional id");
  kind = parts[0];
  std::vector<int> nums;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    try {
      std::size_t used = 0;
      int v = std::stoi(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("");
      nums.push_back(v);
    } catch (...) {
      throw std::invalid_argument("malformed functional id '" + id + "'");
    }
  }
  return nums;
}

void require_arity(const std::string& id, const std::vector<int>& nums, std::size_t arity) {
  if (nums.size() != arity) throw std::invalid_argument("functional id '" + id + "' expects " + std::to_string(arity) + " indices");
}

LambdaIndex checked_lambda(const std::string& id, int l1, int l2, int m) {
  if (l1 < 1 || l2 < 1 || m < 0 || m > std::min(2 * l1 - 1, 2 * l2 - 1)) {
    throw std::invalid_argument("functional id '" + id + "' is outside the Lambda index set");
  }
  return {l1, l2, m};
}

WeightedGraph two_vertex(int theta, int q1, int q2) {
  std::map<HalfVertex, int> q;
  if (q1 > 0) q[{0, 2}] = q1;
  if (q2 > 0) q[{1, 2}] = q2;
  ComponentAnnotation ann{1, q1 + q2 > 0 ? ComponentClass::class2 : ComponentClass::q_free};
  return WeightedGraph(2, {{{0, 1}, {1, 1}, theta}}, std::move(q), {ann});
}

}  // namespace

const char* to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::class1: return "class-1";
    case ComponentClass::class2: return "class-2";
    case ComponentClass::q_free: return "q-free";
  }
  return "?";
}

const char* to_string(DvCase c) {
  switch (c) {
    case DvCase::q_free: return "q-free";
    case DvCase::order_mismatch: return "order-mismatch";
    case DvCase::general: return "general";
  }
  return "?";
}

WeightedGraph::WeightedGraph(std::size_t vertices, std::vector<ThetaEdge> edges, std::map<HalfVertex, int> q,
                             std::vector<ComponentAnnotation> annotations)
    : vertices_(vertices), edges_(std::move(edges)), q_(std::move(q)) {
  if (vertices_ == 0) throw std::invalid_argument("graph needs at least one vertex");
  auto check_half = [&](const HalfVertex& h) {
    if (h.vertex >= vertices_ || (h.kappa != 1 && h.kappa != 2)) throw std::invalid_argument("invalid half-vertex");
  };
  std::vector<std::size_t> parent(vertices_);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& e : edges_) {
    check_half(e.a);
    check_half(e.b);
    if (e.multiplicity < 1) throw std::invalid_argument("edge multiplicity must be positive");
    parent[find_root(parent, e.a.vertex)] = find_root(parent, e.b.vertex);
  }
  for (const auto& [hv, v] : q_) {
    check_half(hv);
    if (v < 0) throw std::invalid_argument("q weights must be nonnegative");
  }
  std::map<std::size_t, std::size_t> root_to_component;
  for (std::size_t v = 0; v < vertices_; ++v) {
    const std::size_t r = find_root(parent, v);
    auto [it, fresh] = root_to_component.emplace(r, components_.size());
    if (fresh) components_.emplace_back();
    components_[it->second].vertices.push_back(v);
  }
  auto comp_of = [&](std::size_t v) { return root_to_component.at(find_root(parent, v)); };
  for (const auto& e : edges_) {
    auto& c = components_[comp_of(e.a.vertex)];
    c.theta_bar += e.multiplicity;
    ++c.edge_count;
  }
  for (const auto& [hv, v] : q_) components_[comp_of(hv.vertex)].q_bar += v;
  if (annotations.size() != components_.size()) {
    throw std::invalid_argument("graph has " + std::to_string(components_.size()) + " components but " +
                                std::to_string(annotations.size()) + " annotations");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    auto& c = components_[i];
    c.annotation = annotations[i];
    if ((c.q_bar == 0) != (c.annotation.cls == ComponentClass::q_free)) {
      throw std::invalid_argument("component class annotation disagrees with its q weight");
    }
    if (c.annotation.l2 < 0 || c.annotation.l2 > c.edge_count) {
      throw std::invalid_argument("l2 annotation exceeds the component's edge count");
    }
  }
}

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b) {
  const std::size_t off = a.vertex_count();
  auto edges = a.edges();
  for (auto e : b.edges()) {
    e.a.vertex += off;
    e.b.vertex += off;
    edges.push_back(e);
  }
  auto q = a.q();
  for (const auto& [hv, v] : b.q()) q[{hv.vertex + off, hv.kappa}] = v;
  std::vector<ComponentAnnotation> ann;
  for (const auto& c : a.components()) ann.push_back(c.annotation);
  for (const auto& c : b.components()) ann.push_back(c.annotation);
  return WeightedGraph(off + b.vertex_count(), std::move(edges), std::move(q), std::move(ann));
}

double theta_exponent(const Component& c, HurstParam h) {
  const double two_h = h.two_h();
  const double v = static_cast<double>(c.vertices.size());
  return 1.0 - two_h * c.theta_bar + (two_h - 1.0) * (v - 1.0 - c.annotation.l2);
}

double q_exponent(const Component& c, HurstParam h) {
  if (c.q_bar == 0) return 0.0;
  switch (c.annotation.cls) {
    case ComponentClass::class2: return -0.5 - h.value() * c.q_bar;
    case ComponentClass::class1: return -1.0 - h.value() * (c.q_bar - 1);
    case ComponentClass::q_free: break;
  }
  throw std::logic_error("q-free component with positive q weight");
}

double exponent(const WeightedGraph& g, HurstParam h) {
  double e = 0.0;
  for (const auto& c : g.components()) e += theta_exponent(c, h) + q_exponent(c, h);
  return e;
}

DvBound dv_exponent_bound(const WeightedGraph& g, int q, HurstParam h) {
  if (q < 2) throw std::invalid_argument("dv_exponent_bound needs q >= 2");
  const double e = exponent(g, h);
  bool any_q = false, any_match = false;
  for (const auto& c : g.components()) {
    if (c.q_bar == 0) continue;
    any_q = true;
    if (c.q_bar == q) any_match = true;
  }
  if (!any_q) return {e - h.value(), DvCase::q_free};
  if (!any_match) return {e - 0.5, DvCase::order_mismatch};
  return {e, DvCase::general};
}

double CatalogEntry::predicted(HurstParam h) const {
  double best = -1e300;
  for (const auto& g : graphs) best = std::max(best, exponent(g, h));
  return prefactor + best;
}

CatalogEntry catalog_entry(const std::string& id, HurstParam h) {
  std::string kind;
  auto nums = parse_id(id, kind);
  const double two_h = h.two_h();
  CatalogEntry e;
  e.id = id;
  if (kind == "G") {
    require_arity(id, nums, 3);
    auto idx = checked_lambda(id, nums[0], nums[1], nums[2]);
    e.description = "double sum of rho^{m+1} against the joint Wick product of orders q1, q2";
    e.prefactor = two_h * (idx.l1 + idx.l2) - 1.0;
    e.graphs.push_back(two_vertex(idx.m + 1, idx.q1(), idx.q2()));
  } else if (kind == "Isharp") {
    require_arity(id, nums, 4);
    auto idx = checked_lambda(id, nums[0], nums[1], nums[3]);
    const int l3 = nums[2];
    if (idx.in_zero() || 2 * l3 != idx.q1() + idx.q2()) {
      throw std::invalid_argument("functional id '" + id + "' is not a sharp index");
    }
    e.description = "deterministic triple sum rho^{m+1} rho^{q1} rho^{q2}";
    e.prefactor = two_h * (idx.l1 + idx.l2 + l3) - 1.5;
    std::vector<ThetaEdge> edges{{{0, 1}, {1, 1}, idx.m + 1}};
    if (idx.q1() > 0) edges.push_back({{0, 2}, {2, 1}, idx.q1()});
    if (idx.q2() > 0) edges.push_back({{1, 2}, {2, 2}, idx.q2()});
    e.graphs.emplace_back(3, std::move(edges), std::map<HalfVertex, int>{},
                          std::vector<ComponentAnnotation>{{2, ComponentClass::q_free}});
  } else if (kind == "u") {
    require_arity(id, nums, 1);
    const int l = nums[0];
    if (l < 1) throw std::invalid_argument("functional id '" + id + "' needs l >= 1");
    e.description = "squared H-norm of u^(l)";
    e.prefactor = 2.0 * two_h * l - 1.0;
    for (int r = 0; r <= 2 * l - 1; ++r) e.graphs.push_back(two_vertex(1 + r, 2 * l - 1 - r, 2 * l - 1 - r));
  } else if (kind == "Mprime") {
    require_arity(id, nums, 1);
    const int l = nums[0];
    if (l < 1) throw std::invalid_argument("functional id '" + id + "' needs l >= 1");
    e.description = "single sum of Wick powers of order 2l";
    e.prefactor = two_h * l - 0.5;
    e.graphs.emplace_back(1, std::vector<ThetaEdge>{}, std::map<HalfVertex, int>{{{0, 1}, 2 * l}},
                          std::vector<ComponentAnnotation>{{0, ComponentClass::class2}});
  } else {
    throw std::invalid_argument("unknown functional '" + id + "' (expected G_, Isharp_, u_ or Mprime_)");
  }
  return e;
}

std::vector<std::string> default_catalog() {
  return {"G_1_1_0",        "G_1_1_1",        "G_1_2_0",        "G_1_2_1", "G_2_2_1", "G_2_2_3", "Isharp_1_1_1_0",
          "Isharp_1_2_1_1", "Isharp_1_2_2_0", "Isharp_2_2_1_2", "u_1",     "u_2",     "Mprime_1", "Mprime_2"};
}

struct FunctionalEvaluator::Impl {
  enum class Kind { g, isharp, u, mprime } kind;
  std::size_t n = 0;
  double c0v = 0.0;
  int l1 = 0, l2 = 0, l3 = 0, m = 0, l = 0;
  double constant = 0.0;
  bool is_deterministic = false;
  std::map<int, detail::ToeplitzOperator> ops;
  std::vector<double> rho;

  const detail::ToeplitzOperator& op(int e) const { return ops.at(e); }
  void add_op(int e) {
    if (ops.count(e)) return;
    std::vector<double> k(n - 1);
    for (std::size_t d = 0; d < k.size(); ++d) k[d] = std::pow(rho[d], e);
    ops.emplace(e, detail::ToeplitzOperator(k, n - 1));
  }
  std::vector<double> wick(const std::vector<double>& x, int p) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = wick_power(x[i], c0v, p);
    return out;
  }
};

FunctionalEvaluator::FunctionalEvaluator(const std::string& id, HurstParam h, std::size_t n)
    : impl_(std::make_unique<Impl>()) {
  if (n < 4) throw std::invalid_argument("functional evaluation needs n >= 4");
  catalog_entry(id, h);  // validates the id
  std::string kind;
  auto nums = parse_id(id, kind);
  auto& s = *impl_;
  s.n = n;
  s.c0v = c0(h);
  s.rho = rho_hat_table(static_cast<std::int64_t>(2 * n), h);
  const double nn = static_cast<double>(n);
  if (kind == "G") {
    s.kind = Impl::Kind::g;
    s.l1 = nums[0];
    s.l2 = nums[1];
    s.m = nums[2];
    const LambdaIndex idx{s.l1, s.l2, s.m};
    for (int r = 0; r <= std::min(idx.q1(), idx.q2()); ++r) s.add_op(s.m + 1 + r);
    if (idx.q1() == 0 && idx.q2() == 0) {
      s.is_deterministic = true;
      double t = 0.0;
      for (std::int64_t d = -static_cast<std::int64_t>(n) + 2; d <= static_cast<std::int64_t>(n) - 2; ++d)
        t += static_cast<double>(static_cast<std::int64_t>(n) - 1 - std::abs(d)) * std::pow(s.rho[std::abs(d)], s.m + 1);
      s.constant = t / nn;
    }
  } else if (kind == "Isharp") {
    s.kind = Impl::Kind::isharp;
    s.is_deterministic = true;
    const LambdaIndex idx{nums[0], nums[1], nums[3]};
    const int e1 = idx.m + 1, e2 = idx.q1(), e3 = idx.q2();
    const auto lim = static_cast<std::int64_t>(n) - 2;
    auto pw = [&](std::int64_t d, int e) { return e == 0 ? 1.0 : std::pow(s.rho[static_cast<std::size_t>(std::abs(d))], e); };
    std::vector<double> a(2 * lim + 1), b(2 * lim + 1), c(4 * lim + 1);
    for (std::int64_t d = -lim; d <= lim; ++d) {
      a[d + lim] = pw(d, e1);
      b[d + lim] = pw(d, e2);
    }
    for (std::int64_t d = -2 * lim; d <= 2 * lim; ++d) c[d + 2 * lim] = pw(d, e3);
    double total = 0.0;
    for (std::int64_t d = -lim; d <= lim; ++d) {
      double inner = 0.0;
      for (std::int64_t e = -lim; e <= lim; ++e) {
        const std::int64_t span = std::max({std::int64_t{0}, d, e}) - std::min({std::int64_t{0}, d, e});
        const std::int64_t count = lim + 1 - span;
        if (count <= 0) continue;
        inner += b[e + lim] * c[e - d + 2 * lim] * static_cast<double>(count);
      }
      total += a[d + lim] * inner;
    }
    s.constant = total / (nn * std::sqrt(nn));
  } else if (kind == "u") {
    s.kind = Impl::Kind::u;
    s.l = nums[0];
    s.add_op(1);
  } else {
    s.kind = Impl::Kind::mprime;
    s.l = nums[0];
  }
}

FunctionalEvaluator::~FunctionalEvaluator() = default;
FunctionalEvaluator::FunctionalEvaluator(FunctionalEvaluator&&) noexcept = default;
FunctionalEvaluator& FunctionalEvaluator::operator=(FunctionalEvaluator&&) noexcept = default;

bool FunctionalEvaluator::deterministic() const noexcept { return impl_->is_deterministic; }

double FunctionalEvaluator::operator()(const std::vector<double>& x) const {
  const auto& s = *impl_;
  if (x.size() != s.n - 1) throw std::invalid_argument("functional evaluation expects n - 1 second differences");
  if (s.is_deterministic) return s.constant;
  const double nn = static_cast<double>(s.n);
  switch (s.kind) {
    case Impl::Kind::g: {
      const LambdaIndex idx{s.l1, s.l2, s.m};
      const int q1 = idx.q1(), q2 = idx.q2();
      double total = 0.0;
      for (int r = 0; r <= std::min(q1, q2); ++r) {
        const double coef = (r % 2 ? -1.0 : 1.0) * static_cast<double>(product_formula_coeff(q1, q2, r));
        total += coef * s.op(s.m + 1 + r).bilinear(s.wick(x, q1 - r), s.wick(x, q2 - r));
      }
      return total / nn;
    }
    case Impl::Kind::u: {
      auto w = s.wick(x, 2 * s.l - 1);
      return s.op(1).bilinear(w, w) / nn;
    }
    case Impl::Kind::mprime: {
      double t = 0.0;
      for (double v : x) t += wick_power(v, s.c0v, 2 * s.l);
      return t / std::sqrt(nn);
    }
    case Impl::Kind::isharp: break;
  }
  return s.constant;
}

std::vector<OrderReport> verify_orders(const std::vector<std::string>& ids, HurstParam h,
                                       const std::vector<std::size_t>& n_grid, std::size_t paths, std::uint64_t seed,
                                       std::size_t threads, std::size_t bootstrap) {
  if (n_grid.size() < 3) throw std::invalid_argument("verify_order needs an n grid of at least 3 points");
  if (paths < 2) throw std::invalid_argument("verify_order needs at least two paths");
  const std::size_t nf = ids.size();
  // values[f][g][path]
  std::vector<std::vector<std::vector<double>>> values(nf, std::vector<std::vector<double>>(n_grid.size()));
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    std::vector<FunctionalEvaluator> evals;
    for (const auto& id : ids) evals.emplace_back(id, h, n);
    auto sampler = fgn_sampler(n, h.value(), FgnMethod::circulant);
    const double scale = std::pow(static_cast<double>(n), h.value());
    const std::uint64_t grid_seed = substream_seed(seed, n, StreamTag::order);
    auto per_path = parallel_map(
        paths,
        [&](std::size_t i) {
          NormalStream rng(substream_seed(grid_seed, i, StreamTag::order));
          std::vector<double> inc(n);
          sampler->sample(rng, inc);
          std::vector<double> x(n - 1);
          for (std::size_t j = 1; j < n; ++j) x[j - 1] = scale * (inc[j] - inc[j - 1]);
          std::vector<double> out(nf);
          for (std::size_t f = 0; f < nf; ++f) out[f] = evals[f](x);
          return out;
        },
        threads);
    for (std::size_t f = 0; f < nf; ++f) {
      values[f][g].resize(paths);
      for (std::size_t i = 0; i < paths; ++i) values[f][g][i] = per_path[i][f];
    }
  }
  std::vector<double> logn(n_grid.size());
  for (std::size_t g = 0; g < n_grid.size(); ++g) logn[g] = std::log(static_cast<double>(n_grid[g]));
  auto norm_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  std::vector<OrderReport> reports;
  for (std::size_t f = 0; f < nf; ++f) {
    OrderReport r;
    r.functional = ids[f];
    r.hurst = h.value();
    r.n_grid = n_grid;
    r.paths = paths;
    r.seed = seed;
    r.predicted = catalog_entry(ids[f], h).predicted(h);
    std::vector<double> logs(n_grid.size());
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      r.norms.push_back(norm_of(values[f][g]));
      logs[g] = std::log(r.norms.back());
    }
    r.slope = least_squares_line(logn, logs).slope;
    std::vector<double> boot;
    for (std::size_t b = 0; b < bootstrap; ++b) {
      std::mt19937_64 rng(substream_seed(seed ^ (f + 1), b, StreamTag::bootstrap));
      std::uniform_int_distribution<std::size_t> pick(0, paths - 1);
      std::vector<double> bl(n_grid.size());
      for (std::size_t g = 0; g < n_grid.size(); ++g) {
        double s = 0.0;
        for (std::size_t i = 0; i < paths; ++i) {
          const double v = values[f][g][pick(rng)];
          s += v * v;
        }
        bl[g] = 0.5 * std::log(s / static_cast<double>(paths));
      }
      boot.push_back(least_squares_line(logn, bl).slope);
    }
    r.ci_lo = boot.empty() ? r.slope : quantile(boot, 0.025);
    r.ci_hi = boot.empty() ? r.slope : quantile(boot, 0.975);
    r.pass = r.slope <= r.predicted + kOrderTolerance;
    reports.push_back(std::move(r));
  }
  return reports;
}

OrderReport verify_order(const std::string& id, HurstParam h, const std::vector<std::size_t>& n_grid,
                         std::size_t paths, std::uint64_t seed, std::size_t threads, std::size_t bootstrap) {
  return verify_orders({id}, h, n_grid, paths, seed, threads, bootstrap).front();
}

}  // namespace fpv
