#include "mmot/splitting.hpp"

namespace mmot {

template <class T>
SplittingTuple<T> splitting_for_finite(const SupportSet& g, const Instance& instance, const MonotoneOptions& options) {
  auto verdict = check_monotone_exact<T>(g, instance, options);
  if (verdict.result != MonotoneResult::Monotone) throw NotMonotoneError<T>(std::move(*verdict.witness));
  return std::move(*verdict.tuple);
}

template <class T>
TupleReport<T> verify_tuple(const SplittingTuple<T>& tuple, const SupportSet& g, const Instance& instance,
                            VerifyDomain domain) {
  const auto shape = instance.shape();
  if (tuple.potentials.size() != shape.size())
    throw Error(Errc::DimensionMismatch, "tuple has " + std::to_string(tuple.potentials.size()) + " potentials");
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (tuple.potentials[k].size() != shape[k])
      throw Error(Errc::DimensionMismatch, "potential " + std::to_string(k) + " has the wrong length");

  const CellProduct cells =
      domain == VerifyDomain::Ambient ? CellProduct::full(shape) : CellProduct(g.projections(shape.size()));
  TupleReport<T> report;
  auto check = [&](const Index& cell, bool equality) {
    const T cost = from_rational<T>(cost_eval(instance, cell));
    const Extended<T> sum = tuple.sum_at(cell);
    ++report.cells_checked;
    if (!sum) {
      if (equality) report.violations.push_back({TupleViolation<T>::Kind::Equality, cell, sum, cost});
      return;
    }
    if (equality ? !near(*sum, cost, Tolerance::kFeasibility) : !leq(*sum, cost, Tolerance::kFeasibility))
      report.violations.push_back(
          {equality ? TupleViolation<T>::Kind::Equality : TupleViolation<T>::Kind::Inequality, cell, sum, cost});
  };
  cells.for_each([&](const Index& cell) { check(cell, g.contains(cell)); });
  // G may reach outside the chosen domain only when the caller passes a foreign G.
  for (const auto& cell : g.points)
    if (!cells.contains(cell)) check(cell, true);
  return report;
}

template <class T>
SplittingTuple<T> extend_by_infconvolution(const SplittingTuple<T>& tuple, const SupportSet& g,
                                           const Instance& instance) {
  const VerifyDomain domain =
      tuple.domain == TupleDomain::OnAmbient ? VerifyDomain::Ambient : VerifyDomain::Projections;
  if (!verify_tuple(tuple, g, instance, domain).ok())
    throw Error(Errc::InputNotSplitting, "input tuple is not (G,c)-splitting on its domain");

  const auto shape = instance.shape();
  const std::size_t d = shape.size();
  const CellProduct grid = CellProduct::full(shape);
  const auto costs = cost_values<T>(instance, grid);

  SplittingTuple<T> out = tuple;
  out.domain = TupleDomain::OnAmbient;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Extended<T>> lowest(shape[i], std::nullopt);
    std::size_t offset = 0;
    grid.for_each([&](const Index& cell) {
      const T& c = costs[offset++];
      T value = c;
      for (std::size_t k = 0; k < d; ++k) {
        if (k == i) continue;
        const auto& phi = out.potentials[k][cell[k]];
        if (!phi) return;  // c - (-inf) = +inf never attains the minimum
        value -= *phi;
      }
      auto& slot = lowest[cell[i]];
      if (!slot || value < *slot) slot = value;
    });
    for (std::size_t p = 0; p < shape[i]; ++p)
      if (!lowest[p]) throw Error(Errc::InputNotSplitting, "a potential is -inf on an entire axis");
    out.potentials[i] = std::move(lowest);
  }
  return out;
}

template <class T>
SplittingTuple<T> normalize_at_base(const SplittingTuple<T>& tuple, const Index& base, const SupportSet& g,
                                    const Instance& instance) {
  if (!g.contains(base)) throw Error(Errc::BasePointNotInG, "base point is not in G");
  const std::size_t d = instance.dims();
  if (tuple.potentials.size() != d) throw Error(Errc::DimensionMismatch, "tuple arity differs from the instance");
  for (std::size_t k = 0; k < d; ++k)
    if (!tuple.potentials[k].at(base[k]))
      throw Error(Errc::InfinitePotentialAtBase, "potential " + std::to_string(k) + " is -inf at the base point");

  SplittingTuple<T> out = tuple;
  T shift(0);
  for (std::size_t k = 1; k < d; ++k) {
    const T at_base = *tuple.potentials[k][base[k]];
    shift += at_base;
    for (auto& v : out.potentials[k])
      if (v) *v -= at_base;
  }
  for (auto& v : out.potentials[0])
    if (v) *v += shift;
  return out;
}

template <class T>
std::vector<std::vector<T>> base_fiber_costs(const Index& base, const Instance& instance) {
  const auto shape = instance.shape();
  std::vector<std::vector<T>> out(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    Index cell = base;
    for (std::size_t p = 0; p < shape[i]; ++p) {
      cell[i] = p;
      out[i].push_back(from_rational<T>(cost_eval(instance, cell)));
    }
  }
  return out;
}

#define MMOT_INSTANTIATE_SPLITTING(T)                                                                               \
  template SplittingTuple<T> splitting_for_finite<T>(const SupportSet&, const Instance&, const MonotoneOptions&);   \
  template SplittingTuple<T> extend_by_infconvolution<T>(const SplittingTuple<T>&, const SupportSet&,               \
                                                         const Instance&);                                          \
  template SplittingTuple<T> normalize_at_base<T>(const SplittingTuple<T>&, const Index&, const SupportSet&,        \
                                                  const Instance&);                                                 \
  template TupleReport<T> verify_tuple<T>(const SplittingTuple<T>&, const SupportSet&, const Instance&,             \
                                          VerifyDomain);                                                            \
  template std::vector<std::vector<T>> base_fiber_costs<T>(const Index&, const Instance&);

MMOT_INSTANTIATE_SPLITTING(Rational)
MMOT_INSTANTIATE_SPLITTING(double)

}  // namespace mmot
