#include "mmot/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace mmot {

std::string_view to_string(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::PairwiseQuadratic: return "pairwise_quadratic";
    case BuiltinKind::Coulomb: return "coulomb";
    case BuiltinKind::Product: return "product";
  }
  return "?";
}

BuiltinKind parse_builtin(std::string_view name) {
  if (name == "pairwise_quadratic") return BuiltinKind::PairwiseQuadratic;
  if (name == "coulomb") return BuiltinKind::Coulomb;
  if (name == "product") return BuiltinKind::Product;
  throw Error(Errc::UnknownCost, "unknown builtin cost '" + std::string(name) + "'");
}

std::vector<std::size_t> Instance::shape() const {
  std::vector<std::size_t> s;
  s.reserve(spaces.size());
  for (const auto& space : spaces) s.push_back(space.size());
  return s;
}

std::size_t cell_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t s : shape) {
    if (s == 0) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / s) return std::numeric_limits<std::size_t>::max();
    n *= s;
  }
  return n;
}

std::size_t linear_index(const std::vector<std::size_t>& shape, const Index& cell) {
  std::size_t offset = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) offset = offset * shape[k] + cell[k];
  return offset;
}

CellProduct::CellProduct(std::vector<std::vector<std::size_t>> axes) : axes_(std::move(axes)) {}

CellProduct CellProduct::full(const std::vector<std::size_t>& shape) {
  std::vector<std::vector<std::size_t>> axes(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    axes[k].resize(shape[k]);
    for (std::size_t p = 0; p < shape[k]; ++p) axes[k][p] = p;
  }
  return CellProduct(std::move(axes));
}

std::vector<std::size_t> CellProduct::sizes() const {
  std::vector<std::size_t> s;
  for (const auto& axis : axes_) s.push_back(axis.size());
  return s;
}

bool CellProduct::contains(const Index& cell) const {
  if (cell.size() != axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (!std::binary_search(axes_[k].begin(), axes_[k].end(), cell[k])) return false;
  return true;
}

std::vector<std::vector<std::size_t>> SupportSet::projections(std::size_t dims) const {
  std::vector<std::set<std::size_t>> seen(dims);
  for (const auto& cell : points)
    for (std::size_t k = 0; k < dims; ++k) seen[k].insert(cell[k]);
  std::vector<std::vector<std::size_t>> out(dims);
  for (std::size_t k = 0; k < dims; ++k) out[k].assign(seen[k].begin(), seen[k].end());
  return out;
}

template <class T>
Extended<T> SplittingTuple<T>::sum_at(const Index& cell) const {
  T total{};
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    const auto& v = potentials[k][cell[k]];
    if (!v) return std::nullopt;
    total += *v;
  }
  return total;
}

template <class T>
Index RearrangementWitness<T>::recombined(std::size_t i) const {
  Index cell = points[i];
  for (std::size_t j = 0; j < permutations.size(); ++j) cell[j + 1] = points[permutations[j][i]][j + 1];
  return cell;
}

namespace {

Rational squared_distance(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    Rational diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

Rational builtin_value(const Instance& instance, const BuiltinCost& spec, const Index& cell) {
  const std::size_t d = instance.dims();
  auto coord = [&](std::size_t k) -> const std::vector<Rational>& {
    return instance.spaces[k].points[cell[k]].coord;
  };
  switch (spec.kind) {
    case BuiltinKind::PairwiseQuadratic: {
      Rational s = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) s += squared_distance(coord(i), coord(j));
      return s;
    }
    case BuiltinKind::Coulomb: {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
          double dist = std::sqrt(squared_distance(coord(i), coord(j)).get_d());
          s += 1.0 / std::max(dist, spec.floor);
        }
      return exact_rational(s);
    }
    case BuiltinKind::Product: {
      Rational prod = 1;
      for (std::size_t i = 0; i < d; ++i) {
        Rational dot = 0;
        const auto& x = coord(i);
        for (std::size_t t = 0; t < x.size() && t < spec.weights.size(); ++t) dot += x[t] * spec.weights[t];
        prod *= dot;
      }
      return prod + spec.offset.value_or(Rational(0));
    }
  }
  return 0;
}

}  // namespace

Rational cost_eval(const Instance& instance, const Index& cell) {
  const auto shape = instance.shape();
  if (cell.size() != shape.size())
    throw Error(Errc::IndexOutOfRange, "cell has " + std::to_string(cell.size()) + " coordinates, expected " +
                                           std::to_string(shape.size()));
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (cell[k] >= shape[k])
      throw Error(Errc::IndexOutOfRange,
                  "axis " + std::to_string(k) + " index " + std::to_string(cell[k]) + " >= " + std::to_string(shape[k]));
  if (const auto* tensor = std::get_if<TensorCost>(&instance.cost)) {
    const std::size_t offset = linear_index(shape, cell);
    if (offset >= tensor->values.size()) throw Error(Errc::IndexOutOfRange, "tensor too small for grid");
    return tensor->values[offset];
  }
  return builtin_value(instance, std::get<BuiltinCost>(instance.cost), cell);
}

template <class T>
std::vector<T> cost_values(const Instance& instance, const CellProduct& cells) {
  std::vector<T> out;
  out.reserve(cells.size());
  cells.for_each([&](const Index& cell) { out.push_back(from_rational<T>(cost_eval(instance, cell))); });
  return out;
}

template <class T>
std::vector<T> marginal(const Instance& instance, std::size_t k) {
  std::vector<T> out;
  out.reserve(instance.marginals.at(k).size());
  for (const auto& w : instance.marginals[k]) out.push_back(from_rational<T>(w));
  return out;
}

template <class T>
std::vector<std::vector<T>> marginals_of(const TransportPlan<T>& plan, const Instance& instance) {
  const auto shape = instance.shape();
  std::vector<std::vector<T>> out(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) out[k].assign(shape[k], T{});
  for (const auto& [cell, mass] : plan.entries)
    for (std::size_t k = 0; k < shape.size(); ++k) out[k].at(cell.at(k)) += mass;
  return out;
}

template <class T>
std::vector<std::string> validate_plan(const Instance& instance, const TransportPlan<T>& plan) {
  std::vector<std::string> errors;
  const auto shape = instance.shape();
  for (const auto& [cell, mass] : plan.entries) {
    bool in_range = cell.size() == shape.size();
    for (std::size_t k = 0; in_range && k < shape.size(); ++k) in_range = cell[k] < shape[k];
    if (!in_range) {
      errors.push_back("plan entry outside the product grid");
      return errors;
    }
    if (!(mass > T{})) errors.push_back("plan masses must be > 0");
  }
  const auto sums = marginals_of(plan, instance);
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (std::size_t p = 0; p < shape[k]; ++p) {
      const T expected = from_rational<T>(instance.marginals.at(k).at(p));
      if (!near(sums[k][p], expected, Tolerance::kMarginalPoint)) {
        std::ostringstream msg;
        msg << "axis " << k << " marginal at point " << p << " is " << to_double(sums[k][p]) << ", expected "
            << to_double(expected);
        errors.push_back(msg.str());
      }
    }
  return errors;
}

template <class T>
T measure_cost(const Instance& instance, const Measure<T>& measure) {
  T total{};
  for (const auto& [cell, mass] : measure) total += mass * from_rational<T>(cost_eval(instance, cell));
  return total;
}

template <class T>
T plan_cost(const Instance& instance, const TransportPlan<T>& plan) {
  auto errors = validate_plan(instance, plan);
  if (!errors.empty()) throw Error(Errc::InvalidPlan, errors.front());
  return measure_cost(instance, plan.entries);
}

template <class T>
SupportSet support_of(const TransportPlan<T>& plan) {
  SupportSet support;
  for (const auto& [cell, mass] : plan.entries) {
    if constexpr (is_exact_v<T>) {
      if (sgn(mass) > 0) support.points.insert(cell);
    } else {
      if (mass > Tolerance::kSupport) support.points.insert(cell);
    }
  }
  return support;
}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> errors;
  const std::size_t d = instance.dims();
  if (d == 0) {
    errors.push_back("instance has no spaces");
    return errors;
  }
  bool shape_ok = true;
  for (std::size_t k = 0; k < d; ++k) {
    const auto& space = instance.spaces[k];
    if (space.size() == 0) {
      errors.push_back("space " + std::to_string(k) + " has no points");
      shape_ok = false;
    }
    std::unordered_set<std::string> labels;
    for (const auto& p : space.points)
      if (!labels.insert(p.label).second)
        errors.push_back("space " + std::to_string(k) + " has duplicate label '" + p.label + "'");
  }

  if (instance.marginals.size() != d) {
    errors.push_back("expected " + std::to_string(d) + " marginals, got " + std::to_string(instance.marginals.size()));
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      const auto& w = instance.marginals[k];
      if (w.size() != instance.spaces[k].size()) {
        errors.push_back("marginal " + std::to_string(k) + " has " + std::to_string(w.size()) + " weights for " +
                         std::to_string(instance.spaces[k].size()) + " points");
        continue;
      }
      Rational total = 0;
      double total_f = 0.0;
      bool negative = false;
      for (const auto& x : w) {
        if (sgn(x) < 0) negative = true;
        total += x;
        total_f += x.get_d();
      }
      if (negative) errors.push_back("marginal " + std::to_string(k) + " has a negative weight");
      const bool sums_to_one = instance.arithmetic == Arithmetic::Rational
                                   ? total == 1
                                   : std::abs(total_f - 1.0) <= Tolerance::kMarginalSum;
      if (!sums_to_one) {
        std::ostringstream msg;
        msg << "marginal " << k << " sums to " << total.get_d() << " (" << format_rational(total) << ")";
        errors.push_back(msg.str());
      }
    }
  }

  if (!shape_ok) return errors;
  const auto shape = instance.shape();
  if (const auto* tensor = std::get_if<TensorCost>(&instance.cost)) {
    if (tensor->values.size() != cell_count(shape)) {
      errors.push_back("cost tensor has " + std::to_string(tensor->values.size()) + " entries, grid has " +
                       std::to_string(cell_count(shape)));
    } else {
      for (const auto& v : tensor->values)
        if (sgn(v) < 0) {
          errors.push_back("cost must be >= 0 (found " + format_rational(v) + ")");
          break;
        }
    }
    return errors;
  }

  const auto& spec = std::get<BuiltinCost>(instance.cost);
  std::optional<std::size_t> dim;
  bool coords_ok = true;
  for (std::size_t k = 0; k < d; ++k)
    for (const auto& p : instance.spaces[k].points) {
      if (p.coord.empty()) {
        errors.push_back("builtin cost requires coordinates on point '" + p.label + "' of space " + std::to_string(k));
        coords_ok = false;
      } else if (dim && *dim != p.coord.size()) {
        errors.push_back("coordinate dimension mismatch at point '" + p.label + "'");
        coords_ok = false;
      } else {
        dim = p.coord.size();
      }
    }
  if (spec.kind == BuiltinKind::Coulomb && !(spec.floor > 0.0 && std::isfinite(spec.floor)))
    errors.push_back("coulomb floor must be finite and > 0");
  if (spec.kind == BuiltinKind::Product && dim && spec.weights.size() != *dim)
    errors.push_back("product weights have dimension " + std::to_string(spec.weights.size()) + ", coordinates " +
                     std::to_string(*dim));
  if (coords_ok && errors.empty() && spec.kind == BuiltinKind::Product &&
      cell_count(shape) <= kDefaultGridCap) {
    bool negative = false;
    CellProduct::full(shape).for_each([&](const Index& cell) {
      if (!negative && sgn(cost_eval(instance, cell)) < 0) negative = true;
    });
    if (negative) errors.push_back("cost must be >= 0 (product offset too small)");
  }
  return errors;
}

void require_valid(const Instance& instance) {
  auto errors = validate_instance(instance);
  if (errors.empty()) return;
  std::string joined;
  for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
  throw Error(Errc::InvalidInstance, joined);
}

void resolve_cost_offset(Instance& instance) {
  auto* spec = std::get_if<BuiltinCost>(&instance.cost);
  if (spec == nullptr || spec->kind != BuiltinKind::Product || spec->offset) return;
  spec->offset = Rational(0);
  for (std::size_t k = 0; k < instance.dims(); ++k)
    for (const auto& p : instance.spaces[k].points)
      if (p.coord.size() != spec->weights.size()) return;  // left for validate_instance to report
  const auto shape = instance.shape();
  if (cell_count(shape) > kDefaultGridCap) return;
  Rational lowest = 0;
  CellProduct::full(shape).for_each([&](const Index& cell) {
    Rational v = cost_eval(instance, cell);
    if (v < lowest) lowest = v;
  });
  spec->offset = -lowest;
}

template <class T>
std::pair<T, T> witness_costs(const Instance& instance, const RearrangementWitness<T>& witness) {
  T before{}, after{};
  for (std::size_t i = 0; i < witness.points.size(); ++i) {
    before += from_rational<T>(cost_eval(instance, witness.points[i]));
    after += from_rational<T>(cost_eval(instance, witness.recombined(i)));
  }
  return {before, after};
}

#define MMOT_INSTANTIATE_CORE(T)                                                                   \
  template struct SplittingTuple<T>;                                                               \
  template struct RearrangementWitness<T>;                                                         \
  template std::vector<T> cost_values<T>(const Instance&, const CellProduct&);                     \
  template std::vector<T> marginal<T>(const Instance&, std::size_t);                               \
  template std::vector<std::vector<T>> marginals_of<T>(const TransportPlan<T>&, const Instance&);  \
  template std::vector<std::string> validate_plan<T>(const Instance&, const TransportPlan<T>&);    \
  template T plan_cost<T>(const Instance&, const TransportPlan<T>&);                               \
  template T measure_cost<T>(const Instance&, const Measure<T>&);                                  \
  template SupportSet support_of<T>(const TransportPlan<T>&);                                      \
  template std::pair<T, T> witness_costs<T>(const Instance&, const RearrangementWitness<T>&);

MMOT_INSTANTIATE_CORE(Rational)
MMOT_INSTANTIATE_CORE(double)

}  // namespace mmot
