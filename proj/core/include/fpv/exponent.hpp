#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fpv/kernel.hpp"

namespace fpv {

struct HalfVertex {
  std::size_t vertex = 0;
  int kappa = 1;  // 1 or 2
  auto operator<=>(const HalfVertex&) const = default;
};

struct ThetaEdge {
  HalfVertex a;
  HalfVertex b;
  int multiplicity = 1;
};

enum class ComponentClass { class1, class2, q_free };
const char* to_string(ComponentClass c);

struct ComponentAnnotation {
  int l2 = 0;  // designated class-2 edge count
  ComponentClass cls = ComponentClass::q_free;
};

struct Component {
  std::vector<std::size_t> vertices;
  int theta_bar = 0;
  int q_bar = 0;
  int edge_count = 0;
  ComponentAnnotation annotation;
};

// G = (V, theta, q) with per-component annotations, given in the order of
// components sorted by their smallest vertex.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertices, std::vector<ThetaEdge> edges, std::map<HalfVertex, int> q,
                std::vector<ComponentAnnotation> annotations);

  std::size_t vertex_count() const noexcept { return vertices_; }
  const std::vector<ThetaEdge>& edges() const noexcept { return edges_; }
  const std::map<HalfVertex, int>& q() const noexcept { return q_; }
  const std::vector<Component>& components() const noexcept { return components_; }

 private:
  std::size_t vertices_;
  std::vector<ThetaEdge> edges_;
  std::map<HalfVertex, int> q_;
  std::vector<Component> components_;
};

WeightedGraph disjoint_union(const WeightedGraph& a, const WeightedGraph& b);

double theta_exponent(const Component& c, HurstParam h);
double q_exponent(const Component& c, HurstParam h);
double exponent(const WeightedGraph& g, HurstParam h);

enum class DvCase { q_free, order_mismatch, general };
const char* to_string(DvCase c);

struct DvBound {
  double bound = 0.0;
  DvCase which = DvCase::general;
};
// Bound on e(G') after applying D_v with v of chaos order q >= 2.
DvBound dv_exponent_bound(const WeightedGraph& g, int q, HurstParam h);

// A catalog functional: prefactor n^{prefactor} times a sum over graphs; the
// predicted order is prefactor + max_G e(G).
struct CatalogEntry {
  std::string id;
  std::string description;
  double prefactor = 0.0;
  std::vector<WeightedGraph> graphs;
  double predicted(HurstParam h) const;
};

// Ids: G_l1_l2_m, Isharp_l1_l2_l3_m, u_l, Mprime_l.
CatalogEntry catalog_entry(const std::string& id, HurstParam h);
std::vector<std::string> default_catalog();

// Normalized value of a catalog functional on one draw of the scaled second
// differences x_j = n^H B(d^n_j), j = 1..n-1 (additive model, unit weight).
class FunctionalEvaluator {
 public:
  FunctionalEvaluator(const std::string& id, HurstParam h, std::size_t n);
  ~FunctionalEvaluator();
  FunctionalEvaluator(FunctionalEvaluator&&) noexcept;
  FunctionalEvaluator& operator=(FunctionalEvaluator&&) noexcept;

  bool deterministic() const noexcept;
  double operator()(const std::vector<double>& x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct OrderReport {
  std::string functional;
  double hurst = 0.0;
  std::vector<std::size_t> n_grid;
  std::vector<double> norms;
  double slope = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double predicted = 0.0;
  bool pass = false;  // slope <= predicted + tolerance
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

constexpr double kOrderTolerance = 0.07;

std::vector<OrderReport> verify_orders(const std::vector<std::string>& ids, HurstParam h,
                                       const std::vector<std::size_t>& n_grid, std::size_t paths, std::uint64_t seed,
                                       std::size_t threads = 0, std::size_t bootstrap = 200);
OrderReport verify_order(const std::string& id, HurstParam h, const std::vector<std::size_t>& n_grid,
                         std::size_t paths, std::uint64_t seed, std::size_t threads = 0, std::size_t bootstrap = 200);

}  // namespace fpv
