#include "doctest.h"
#include "fixtures.hpp"
#include "mmot/solver.hpp"
#include "oracles.hpp"

using namespace mmot;
using namespace mmot::test;

namespace {

const std::vector<Rational> kDelta0{1, 0};

Instance delta0_instance(Arithmetic mode = Arithmetic::Rational) {
  return quadratic_instance({uniform(2), uniform(2), kDelta0}, mode);
}

std::vector<std::vector<Rational>> finite_potentials(const SplittingTuple<Rational>& t) {
  std::vector<std::vector<Rational>> out;
  for (const auto& axis : t.potentials) {
    out.emplace_back();
    for (const auto& v : axis) {
      REQUIRE(v.has_value());
      out.back().push_back(*v);
    }
  }
  return out;
}

Rational paired_value(const Instance& inst, const SplittingTuple<Rational>& t) {
  Rational s = 0;
  for (std::size_t k = 0; k < inst.dims(); ++k)
    for (std::size_t p = 0; p < inst.spaces[k].size(); ++p)
      if (sgn(inst.marginals[k][p]) != 0) s += inst.marginals[k][p] * *t.potentials[k][p];
  return s;
}

}  // namespace

TEST_CASE("solve_primal on {0,1}^3 with uniform marginals has a zero-cost plan") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2), uniform(2)});
  const auto res = solve_primal<Rational>(inst);
  CHECK(res.optimal_value == 0);
  CHECK(plan_cost(inst, res.optimal_plan) == 0);
  CHECK(res.gap == 0);
}

TEST_CASE("delta_0 third marginal gives value 1") {
  const Instance inst = delta0_instance();
  const Rational oracle_value = oracle::delta0_coupling_minimum(inst);
  CHECK(oracle_value == 1);

  const auto res = solve_primal<Rational>(inst);
  CHECK(res.optimal_value == oracle_value);
  CHECK(validate_plan(inst, res.optimal_plan).empty());
  CHECK(res.gap == 0);
  const auto grid = oracle::check_on_grid(inst, finite_potentials(res.dual_tuple), support_of(res.optimal_plan));
  CHECK(grid.inequality_ok);
  CHECK(grid.equality_ok);
  CHECK(paired_value(inst, res.dual_tuple) == oracle_value);

  const auto dual = solve_dual<Rational>(inst);
  CHECK(dual.value == oracle_value);
  CHECK(oracle::check_on_grid(inst, finite_potentials(dual.tuple), {}).inequality_ok);

  const auto fres = solve_primal<double>(with_mode(inst, Arithmetic::Float));
  CHECK(fres.optimal_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(fres.gap) <= 1e-9);
}

TEST_CASE("two-point identity coupling") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2)});
  const auto res = solve_primal<Rational>(inst);
  CHECK(res.optimal_value == 0);
  CHECK(res.optimal_plan.entries == Measure<Rational>{{{0, 0}, R("1/2")}, {{1, 1}, R("1/2")}});

  const auto dual = solve_dual<Rational>(inst);
  CHECK(dual.value == 0);
  // All four cells of the 2x2 grid.
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const Rational c = (Rational(static_cast<long>(x)) - Rational(static_cast<long>(y))) *
                         (Rational(static_cast<long>(x)) - Rational(static_cast<long>(y)));
      CHECK(*dual.tuple.potentials[0][x] + *dual.tuple.potentials[1][y] <= c);
    }
}

TEST_CASE("zero cost") {
  Instance inst = tensor_instance({2, 3}, std::vector<Rational>(6, 0), {uniform(2), uniform(3)});
  CHECK(solve_primal<Rational>(inst).optimal_value == 0);
  const auto dual = solve_dual<Rational>(inst);
  CHECK(dual.value == 0);
  for (const auto& axis : dual.tuple.potentials)
    for (const auto& v : axis) CHECK(*v == 0);
  CHECK(duality_gap<Rational>(inst) == 0);
  CHECK(duality_gap<double>(with_mode(inst, Arithmetic::Float)) == 0.0);
}

TEST_CASE("duality gap vanishes on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng);
    const auto res = solve_primal<Rational>(inst);
    CHECK(duality_gap<Rational>(inst) == 0);
    CHECK(res.gap == 0);
    CHECK(validate_plan(inst, res.optimal_plan).empty());
    CHECK(paired_value(inst, res.dual_tuple) == res.optimal_value);
    CHECK(oracle::check_on_grid(inst, finite_potentials(res.dual_tuple), support_of(res.optimal_plan)).inequality_ok);
  }
}

TEST_CASE("float gap on random 3x3x3 instances") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = gen_instance(3, {3, 3, 3}, "random", rng, Arithmetic::Float);
    CHECK(std::abs(duality_gap<double>(inst)) <= 1e-9);
    const double exact = solve_primal<Rational>(with_mode(inst, Arithmetic::Rational)).optimal_value.get_d();
    CHECK(solve_primal<double>(inst).optimal_value == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("constant shift of the cost shifts the value and keeps the plan optimal") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_instance(rng, 2, 3, 3);
    const Rational k = Q(static_cast<long>(rng.between(1, 20)), static_cast<long>(rng.between(1, 5)));
    Instance shifted = inst;
    auto& values = std::get<TensorCost>(shifted.cost).values;
    for (auto& v : values) v += k;
    const auto base = solve_primal<Rational>(inst);
    const auto moved = solve_primal<Rational>(shifted);
    CHECK(moved.optimal_value == base.optimal_value + k);
    CHECK(plan_cost(shifted, base.optimal_plan) == moved.optimal_value);
  }
}

TEST_CASE("grid cap") {
  const Instance inst = quadratic_instance({uniform(4), uniform(4), uniform(4)});
  SolveOptions opts;
  opts.grid_cap = 63;
  try {
    solve_primal<Rational>(inst, opts);
    FAIL("expected GridTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridTooLarge);
  }
  opts.grid_cap = 64;
  CHECK(solve_primal<Rational>(inst, opts).optimal_value == 0);
}
