#pragma once

#include "mmot/core.hpp"
#include "mmot/lp.hpp"

namespace mmot {

struct SolveOptions {
  std::size_t grid_cap = kDefaultGridCap;
  lp::Options lp;
};

template <class T>
struct SolveResult {
  TransportPlan<T> optimal_plan;
  T optimal_value{};
  SplittingTuple<T> dual_tuple;  // OnAmbient, gauge fixed at the plan's smallest support cell
  T gap{};                       // optimal_value - sum_i <phi_i, mu_i>
};

template <class T>
struct DualSolution {
  SplittingTuple<T> tuple;
  T value{};
};

/// Minimizes the integral of c over plans with the instance's marginals.
/// The LP has one variable per grid cell (lexicographic) and one equality per
/// (axis, point); the d - 1 redundant rows are kept.
template <class T>
SolveResult<T> solve_primal(const Instance& instance, const SolveOptions& options = {});

/// Maximizes sum_i <phi_i, mu_i> subject to phi_1(x_1) + ... + phi_d(x_d) <= c(x) on the grid.
template <class T>
DualSolution<T> solve_dual(const Instance& instance, const SolveOptions& options = {});

/// Primal minus dual optimum, each from its own LP.
template <class T>
T duality_gap(const Instance& instance, const SolveOptions& options = {});

}  // namespace mmot
