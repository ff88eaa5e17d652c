#pragma once

// Independent reference computations. Nothing here calls the solver, the LP
// kernel, the monotonicity checkers or the splitting routines.

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "mmot/core.hpp"

namespace mmot::oracle {

inline void for_each_cell(const std::vector<std::size_t>& shape, const std::function<void(const Index&)>& f) {
  Index cell(shape.size(), 0);
  if (shape.empty()) return;
  for (auto s : shape)
    if (s == 0) return;
  while (true) {
    f(cell);
    std::size_t k = shape.size();
    while (k > 0) {
      --k;
      if (++cell[k] < shape[k]) break;
      cell[k] = 0;
      if (k == 0) return;
    }
  }
}

/// Sum over every grid cell of mass * c, reading masses into a dense array first.
inline Rational exhaustive_cost(const Instance& inst, const Measure<Rational>& plan) {
  const auto shape = inst.shape();
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  std::vector<Rational> dense(total, 0);
  for (const auto& [cell, mass] : plan) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) off = off * shape[k] + cell[k];
    dense[off] += mass;
  }
  Rational sum = 0;
  std::size_t off = 0;
  for_each_cell(shape, [&](const Index& cell) { sum += dense[off++] * cost_eval(inst, cell); });
  return sum;
}

inline std::vector<std::vector<Rational>> dense_marginals(const Instance& inst, const Measure<Rational>& plan) {
  const auto shape = inst.shape();
  std::vector<std::vector<Rational>> out;
  for (auto s : shape) out.emplace_back(s, Rational(0));
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (std::size_t p = 0; p < shape[k]; ++p)
      for (const auto& [cell, mass] : plan)
        if (cell[k] == p) out[k][p] += mass;
  return out;
}

/// Classical d = 2 cyclical monotonicity test: some cycle of distinct support
/// points (x_1,y_1),...,(x_n,y_n), n <= max_len, with sum c(x_i,y_{i+1}) < sum c(x_i,y_i).
inline bool cycle_violation_d2(const SupportSet& gamma, const Instance& inst, std::size_t max_len) {
  const std::vector<Index> pts(gamma.points.begin(), gamma.points.end());
  std::vector<std::size_t> chain;
  std::vector<bool> used(pts.size(), false);
  std::function<bool()> extend = [&]() -> bool {
    if (chain.size() >= 2) {
      Rational before = 0, after = 0;
      for (std::size_t i = 0; i < chain.size(); ++i) {
        const Index& a = pts[chain[i]];
        const Index& b = pts[chain[(i + 1) % chain.size()]];
        before += cost_eval(inst, a);
        after += cost_eval(inst, Index{a[0], b[1]});
      }
      if (after < before) return true;
    }
    if (chain.size() == max_len) return false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      chain.push_back(i);
      const bool found = extend();
      chain.pop_back();
      used[i] = false;
      if (found) return true;
    }
    return false;
  };
  return extend();
}

struct GridCheck {
  bool inequality_ok = true;
  bool equality_ok = true;
};

/// Checks sum phi <= c on every cell of the full grid and equality on G.
inline GridCheck check_on_grid(const Instance& inst, const std::vector<std::vector<Rational>>& phi,
                               const SupportSet& g) {
  GridCheck out;
  for_each_cell(inst.shape(), [&](const Index& cell) {
    Rational sum = 0;
    for (std::size_t k = 0; k < cell.size(); ++k) sum += phi[k][cell[k]];
    const Rational c = cost_eval(inst, cell);
    if (sum > c) out.inequality_ok = false;
    if (g.contains(cell) && sum != c) out.equality_ok = false;
  });
  return out;
}

/// Minimum of the integral of c over couplings of the two uniform two-point marginals
/// with the third marginal a point mass at 0: pi(0,0)=pi(1,1)=t, pi(0,1)=pi(1,0)=1/2-t,
/// scanned over t = 0, 1/200, ..., 1/2.
inline Rational delta0_coupling_minimum(const Instance& inst) {
  Rational best;
  bool first = true;
  for (int step = 0; step <= 100; ++step) {
    Rational t(step, 200);
    t.canonicalize();
    const Rational s = Rational(1, 2) - t;
    const Rational value = t * cost_eval(inst, {0, 0, 0}) + s * cost_eval(inst, {0, 1, 0}) +
                           s * cost_eval(inst, {1, 0, 0}) + t * cost_eval(inst, {1, 1, 0});
    if (first || value < best) best = value;
    first = false;
  }
  return best;
}

template <class T>
bool is_permutation_of_range(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) return false;
  return true;
}

/// Recomputes both sums of a witness directly from its fields.
template <class T>
std::pair<Rational, Rational> witness_sums(const Instance& inst, const RearrangementWitness<T>& w) {
  Rational before = 0, after = 0;
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    before += cost_eval(inst, w.points[i]);
    Index cell(inst.dims());
    cell[0] = w.points[i][0];
    for (std::size_t j = 1; j < inst.dims(); ++j) cell[j] = w.points[w.permutations[j - 1][i]][j];
    after += cost_eval(inst, cell);
  }
  return {before, after};
}

}  // namespace mmot::oracle
