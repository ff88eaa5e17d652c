#include "mmot/solver.hpp"

#include "mmot/splitting.hpp"

namespace mmot {

namespace {

void require_grid(const Instance& instance, std::size_t cap) {
  require_valid(instance);
  const std::size_t cells = cell_count(instance.shape());
  if (cells > cap)
    throw Error(Errc::GridTooLarge,
                "product grid has " + std::to_string(cells) + " cells, cap is " + std::to_string(cap));
}

// Offset of each (axis, point) pair in a flat vector of potentials.
std::vector<std::size_t> axis_offsets(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> offsets(shape.size() + 1, 0);
  for (std::size_t k = 0; k < shape.size(); ++k) offsets[k + 1] = offsets[k] + shape[k];
  return offsets;
}

}  // namespace

template <class T>
SolveResult<T> solve_primal(const Instance& instance, const SolveOptions& options) {
  require_grid(instance, options.grid_cap);
  const auto shape = instance.shape();
  const auto offsets = axis_offsets(shape);
  const CellProduct grid = CellProduct::full(shape);
  const std::size_t cells = grid.size();

  lp::LinearProgram<T> program;
  program.sense = lp::Sense::Minimize;
  program.objective = cost_values<T>(instance, grid);
  program.constraints.resize(offsets.back());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const auto mu = marginal<T>(instance, k);
    for (std::size_t p = 0; p < shape[k]; ++p) {
      auto& row = program.constraints[offsets[k] + p];
      row.coeffs.assign(cells, T(0));
      row.relation = lp::Relation::Equal;
      row.rhs = mu[p];
    }
  }
  std::size_t column = 0;
  grid.for_each([&](const Index& cell) {
    for (std::size_t k = 0; k < shape.size(); ++k) program.constraints[offsets[k] + cell[k]].coeffs[column] = T(1);
    ++column;
  });

  const auto outcome = lp::solve_lp(program, options.lp);
  if (outcome.status != lp::Status::Optimal)
    throw Error(Errc::InvalidInstance, std::string("transport LP is ") + lp::to_string(outcome.status));

  SolveResult<T> result;
  column = 0;
  grid.for_each([&](const Index& cell) {
    const T& mass = outcome.primal[column++];
    bool keep;
    if constexpr (is_exact_v<T>)
      keep = sgn(mass) > 0;
    else
      keep = mass > Tolerance::kSupport;
    if (keep) result.optimal_plan.entries.emplace(cell, mass);
  });
  result.optimal_value = outcome.objective_value;

  SplittingTuple<T> tuple;
  tuple.domain = TupleDomain::OnAmbient;
  tuple.potentials.resize(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (std::size_t p = 0; p < shape[k]; ++p) tuple.potentials[k].emplace_back(outcome.dual[offsets[k] + p]);

  const SupportSet support = support_of(result.optimal_plan);
  if (!support.empty()) tuple = normalize_at_base(tuple, *support.points.begin(), support, instance);
  result.dual_tuple = std::move(tuple);

  T paired(0);
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const auto mu = marginal<T>(instance, k);
    for (std::size_t p = 0; p < shape[k]; ++p) paired += *result.dual_tuple.potentials[k][p] * mu[p];
  }
  result.gap = result.optimal_value - paired;
  return result;
}

template <class T>
DualSolution<T> solve_dual(const Instance& instance, const SolveOptions& options) {
  require_grid(instance, options.grid_cap);
  const auto shape = instance.shape();
  const auto offsets = axis_offsets(shape);
  const std::size_t vars = offsets.back();
  const CellProduct grid = CellProduct::full(shape);
  const auto costs = cost_values<T>(instance, grid);

  lp::LinearProgram<T> program;
  program.sense = lp::Sense::Maximize;
  program.objective.reserve(vars);
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (const auto& w : marginal<T>(instance, k)) program.objective.push_back(w);
  program.bounds.assign(vars, lp::Bound::Free);
  program.constraints.reserve(grid.size());
  std::size_t row = 0;
  grid.for_each([&](const Index& cell) {
    lp::Constraint<T> c;
    c.coeffs.assign(vars, T(0));
    for (std::size_t k = 0; k < shape.size(); ++k) c.coeffs[offsets[k] + cell[k]] += T(1);
    c.relation = lp::Relation::LessEqual;
    c.rhs = costs[row++];
    program.constraints.push_back(std::move(c));
  });

  const auto outcome = lp::solve_lp(program, options.lp);
  if (outcome.status != lp::Status::Optimal)
    throw Error(Errc::InvalidInstance, std::string("dual LP is ") + lp::to_string(outcome.status));

  DualSolution<T> result;
  result.tuple.domain = TupleDomain::OnAmbient;
  result.tuple.potentials.resize(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (std::size_t p = 0; p < shape[k]; ++p) result.tuple.potentials[k].emplace_back(outcome.primal[offsets[k] + p]);
  result.value = outcome.objective_value;
  return result;
}

template <class T>
T duality_gap(const Instance& instance, const SolveOptions& options) {
  return solve_primal<T>(instance, options).optimal_value - solve_dual<T>(instance, options).value;
}

template SolveResult<Rational> solve_primal<Rational>(const Instance&, const SolveOptions&);
template SolveResult<double> solve_primal<double>(const Instance&, const SolveOptions&);
template DualSolution<Rational> solve_dual<Rational>(const Instance&, const SolveOptions&);
template DualSolution<double> solve_dual<double>(const Instance&, const SolveOptions&);
template Rational duality_gap<Rational>(const Instance&, const SolveOptions&);
template double duality_gap<double>(const Instance&, const SolveOptions&);

}  // namespace mmot
