#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mmot/error.hpp"
#include "mmot/numeric.hpp"

namespace mmot {

/// A cell of the product grid X_1 x ... x X_d, one point index per axis.
using Index = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

struct Point {
  std::string label;
  std::vector<Rational> coord;  // empty when the point carries no coordinates
};

struct Space {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
};

/// Dense cost array over the full grid, row-major (last axis fastest).
struct TensorCost {
  std::vector<Rational> values;
};

enum class BuiltinKind { PairwiseQuadratic, Coulomb, Product };

std::string_view to_string(BuiltinKind kind);
BuiltinKind parse_builtin(std::string_view name);

struct BuiltinCost {
  BuiltinKind kind = BuiltinKind::PairwiseQuadratic;
  double floor = 1e-6;             // coulomb: distances below this are clamped
  std::vector<Rational> weights;   // product: c(x) = prod_i <x_i, w> + offset
  std::optional<Rational> offset;  // product: resolved to max(0, -min prod) when absent
};

using CostSpec = std::variant<TensorCost, BuiltinCost>;

/// d finite marked spaces, d marginals and a cost. Source data is kept exact;
/// `arithmetic` selects how algorithms compute on it.
struct Instance {
  std::vector<Space> spaces;
  std::vector<std::vector<Rational>> marginals;
  CostSpec cost;
  Arithmetic arithmetic = Arithmetic::Rational;

  std::size_t dims() const { return spaces.size(); }
  std::vector<std::size_t> shape() const;
};

/// Number of cells in a product of axes, saturating at SIZE_MAX.
std::size_t cell_count(const std::vector<std::size_t>& shape);

/// Row-major offset of `cell` in a full grid of the given shape.
std::size_t linear_index(const std::vector<std::size_t>& shape, const Index& cell);

/// Cartesian product of per-axis point subsets; enumerates cells in lexicographic order.
class CellProduct {
 public:
  explicit CellProduct(std::vector<std::vector<std::size_t>> axes);
  static CellProduct full(const std::vector<std::size_t>& shape);

  const std::vector<std::vector<std::size_t>>& axes() const { return axes_; }
  std::size_t size() const { return cell_count(sizes()); }
  std::vector<std::size_t> sizes() const;
  bool contains(const Index& cell) const;

  /// Invokes f(const Index&) for every cell, lexicographically.
  template <class F>
  void for_each(F&& f) const {
    if (axes_.empty()) return;
    for (const auto& axis : axes_)
      if (axis.empty()) return;
    std::vector<std::size_t> pos(axes_.size(), 0);
    Index cell(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) cell[k] = axes_[k][0];
    while (true) {
      f(static_cast<const Index&>(cell));
      std::size_t k = axes_.size();
      while (k > 0) {
        --k;
        if (++pos[k] < axes_[k].size()) {
          cell[k] = axes_[k][pos[k]];
          break;
        }
        pos[k] = 0;
        cell[k] = axes_[k][0];
        if (k == 0) return;
      }
    }
  }

 private:
  std::vector<std::vector<std::size_t>> axes_;
};

/// Finitely supported nonnegative measure on the grid; absent cells carry zero mass.
template <class T>
using Measure = std::map<Index, T>;

template <class T>
struct TransportPlan {
  Measure<T> entries;
};

struct SupportSet {
  std::set<Index> points;

  bool contains(const Index& cell) const { return points.count(cell) != 0; }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  /// Sorted distinct coordinates of the support along every axis.
  std::vector<std::vector<std::size_t>> projections(std::size_t dims) const;
};

/// Potential value in [-inf, inf); std::nullopt stands for -inf.
template <class T>
using Extended = std::optional<T>;

enum class TupleDomain { OnProjections, OnAmbient };

template <class T>
struct SplittingTuple {
  std::vector<std::vector<Extended<T>>> potentials;  // potentials[i][p] = phi_i(point p of X_i)
  TupleDomain domain = TupleDomain::OnProjections;

  /// phi_1(x_1) + ... + phi_d(x_d), or nullopt if any term is -inf.
  Extended<T> sum_at(const Index& cell) const;
};

/// Points of Gamma and permutations sigma_2..sigma_d (0-based, one per axis 2..d)
/// whose recombination strictly lowers the summed cost.
template <class T>
struct RearrangementWitness {
  std::vector<Index> points;
  std::vector<std::vector<std::size_t>> permutations;
  T cost_before{};
  T cost_after{};

  /// Cell x_1^(i), x_2^(sigma_2(i)), ..., x_d^(sigma_d(i)).
  Index recombined(std::size_t i) const;
};

// ---------------------------------------------------------------------------
// Operations

/// Exact cost value at a cell.
Rational cost_eval(const Instance& instance, const Index& cell);

/// Cost values over every cell of `cells`, in enumeration order.
template <class T>
std::vector<T> cost_values(const Instance& instance, const CellProduct& cells);

/// Marginal k converted to the computing field.
template <class T>
std::vector<T> marginal(const Instance& instance, std::size_t k);

/// Axis sums of the plan's masses.
template <class T>
std::vector<std::vector<T>> marginals_of(const TransportPlan<T>& plan, const Instance& instance);

/// Every violated plan invariant against the instance; empty when valid.
template <class T>
std::vector<std::string> validate_plan(const Instance& instance, const TransportPlan<T>& plan);

/// Integral of c against the plan. Throws InvalidPlan on a marginal mismatch.
template <class T>
T plan_cost(const Instance& instance, const TransportPlan<T>& plan);

/// Integral of c against an arbitrary finite measure, no marginal checks.
template <class T>
T measure_cost(const Instance& instance, const Measure<T>& measure);

/// Cells with mass > 0 (> 1e-12 in float mode).
template <class T>
SupportSet support_of(const TransportPlan<T>& plan);

/// Every violated instance invariant; empty when the instance is well formed.
std::vector<std::string> validate_instance(const Instance& instance);

/// Throws InvalidInstance listing every violation.
void require_valid(const Instance& instance);

/// Fills in the product-cost offset when absent so that c >= 0.
void resolve_cost_offset(Instance& instance);

/// Recomputed (before, after) sums for a witness.
template <class T>
std::pair<T, T> witness_costs(const Instance& instance, const RearrangementWitness<T>& witness);

}  // namespace mmot
