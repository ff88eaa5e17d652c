#pragma once

// Instance builders and random generators shared by the test suites.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/generate.hpp"

namespace mmot::test {

inline Rational R(const char* text) { return parse_rational(text); }

/// p/q in lowest terms (mpq_class(p, q) does not reduce).
inline Rational Q(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline Space line_space(std::size_t size, std::size_t axis = 0) {
  Space s;
  for (std::size_t p = 0; p < size; ++p)
    s.points.push_back({"x" + std::to_string(axis) + "_" + std::to_string(p), {Rational(static_cast<long>(p))}});
  return s;
}

/// Points 0, 1, ..., n-1 on a line per axis with the pairwise quadratic cost.
/// For d = 2 this is c(x, y) = (x - y)^2.
inline Instance quadratic_instance(const std::vector<std::vector<Rational>>& marginals,
                                   Arithmetic mode = Arithmetic::Rational) {
  Instance inst;
  for (std::size_t k = 0; k < marginals.size(); ++k) inst.spaces.push_back(line_space(marginals[k].size(), k));
  inst.marginals = marginals;
  inst.cost = BuiltinCost{BuiltinKind::PairwiseQuadratic};
  inst.arithmetic = mode;
  return inst;
}

inline Instance tensor_instance(const std::vector<std::size_t>& shape, std::vector<Rational> values,
                                const std::vector<std::vector<Rational>>& marginals,
                                Arithmetic mode = Arithmetic::Rational) {
  Instance inst;
  for (std::size_t k = 0; k < shape.size(); ++k) inst.spaces.push_back(line_space(shape[k], k));
  inst.marginals = marginals;
  inst.cost = TensorCost{std::move(values)};
  inst.arithmetic = mode;
  return inst;
}

inline std::vector<Rational> uniform(std::size_t n) { return std::vector<Rational>(n, Q(1, static_cast<long>(n))); }

/// Multi-axis north-west corner rule along a random order of every axis:
/// a random vertex of the transport polytope.
inline TransportPlan<Rational> random_vertex_plan(const Instance& inst, Rng& rng, bool shuffle = true) {
  const std::size_t d = inst.dims();
  std::vector<std::vector<std::size_t>> order(d);
  std::vector<std::vector<Rational>> remaining = inst.marginals;
  for (std::size_t k = 0; k < d; ++k) {
    order[k].resize(inst.spaces[k].size());
    std::iota(order[k].begin(), order[k].end(), 0);
    if (shuffle)
      for (std::size_t i = order[k].size(); i > 1; --i) std::swap(order[k][i - 1], order[k][rng.below(i)]);
  }
  std::vector<std::size_t> pos(d, 0);
  TransportPlan<Rational> plan;
  auto skip_empty = [&](std::size_t k) {
    while (pos[k] < order[k].size() && sgn(remaining[k][order[k][pos[k]]]) == 0) ++pos[k];
  };
  for (std::size_t k = 0; k < d; ++k) skip_empty(k);
  while (true) {
    for (std::size_t k = 0; k < d; ++k)
      if (pos[k] >= order[k].size()) return plan;
    Index cell(d);
    Rational mass = remaining[0][order[0][pos[0]]];
    for (std::size_t k = 0; k < d; ++k) {
      cell[k] = order[k][pos[k]];
      mass = std::min(mass, remaining[k][cell[k]]);
    }
    plan.entries[cell] += mass;
    for (std::size_t k = 0; k < d; ++k) {
      remaining[k][cell[k]] -= mass;
      skip_empty(k);
    }
  }
}

/// Random instance drawn like the batch suite: d in [min_d, max_d], sizes in [1, max_size].
inline Instance random_instance(Rng& rng, std::size_t min_d = 2, std::size_t max_d = 4, std::size_t max_size = 4,
                                const char* cost = "random") {
  const std::size_t d = rng.between(min_d, max_d);
  std::vector<std::size_t> sizes(d);
  for (auto& s : sizes) s = rng.between(1, max_size);
  return gen_instance(d, sizes, cost, rng);
}

template <class T>
TransportPlan<double> to_float(const TransportPlan<T>& plan) {
  TransportPlan<double> out;
  for (const auto& [cell, mass] : plan.entries) out.entries[cell] = to_double(mass);
  return out;
}

inline Instance with_mode(Instance inst, Arithmetic mode) {
  inst.arithmetic = mode;
  return inst;
}

}  // namespace mmot::test
