#include "doctest.h"
#include "fixtures.hpp"
#include "mmot/monotone.hpp"
#include "mmot/solver.hpp"
#include "oracles.hpp"

using namespace mmot;
using namespace mmot::test;

namespace {

SupportSet set_of(std::initializer_list<Index> cells) { return SupportSet{std::set<Index>(cells)}; }

template <class T>
void check_witness_improves(const Instance& inst, const SupportSet& gamma, const RearrangementWitness<T>& w) {
  REQUIRE(w.points.size() >= 2);
  for (const auto& p : w.points) CHECK(gamma.contains(p));
  REQUIRE(w.permutations.size() == inst.dims() - 1);
  for (const auto& perm : w.permutations) {
    CHECK(perm.size() == w.points.size());
    CHECK(oracle::is_permutation_of_range<T>(perm));
  }
  const auto [before, after] = oracle::witness_sums(inst, w);
  CHECK(after < before);
  if constexpr (is_exact_v<T>) {
    CHECK(before == w.cost_before);
    CHECK(after == w.cost_after);
  }
}

std::vector<std::vector<Rational>> marginals_of_measure(const Instance& inst, const Measure<Rational>& m) {
  return oracle::dense_marginals(inst, m);
}

Rational integral(const Instance& inst, const Measure<Rational>& m) {
  Rational s = 0;
  for (const auto& [cell, mass] : m) s += mass * cost_eval(inst, cell);
  return s;
}

// Random vertex plans on random instances: a mix of monotone and violated supports.
struct Case {
  Instance inst;
  SupportSet gamma;
};

Case random_case(Rng& rng, std::size_t d_lo, std::size_t d_hi, std::size_t max_size) {
  Instance inst = random_instance(rng, d_lo, d_hi, max_size);
  return {inst, support_of(random_vertex_plan(inst, rng))};
}

}  // namespace

TEST_CASE("diagonal support is monotone") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2)});
  const auto v = check_monotone_exact<Rational>(set_of({{0, 0}, {1, 1}}), inst);
  REQUIRE(v.result == MonotoneResult::Monotone);
  REQUIRE(v.tuple);
  for (const Index& cell : {Index{0, 0}, Index{1, 1}}) CHECK(*v.tuple->sum_at(cell) == cost_eval(inst, cell));
  for (const Index& cell : {Index{0, 1}, Index{1, 0}}) CHECK(*v.tuple->sum_at(cell) <= cost_eval(inst, cell));

  const auto b = check_monotone_bruteforce<Rational>(set_of({{0, 0}, {1, 1}}), inst, 3);
  CHECK(b.result == MonotoneResult::Inconclusive);
  CHECK(b.method == CheckMethod::BruteForce);
  CHECK(b.n_max == 3);
}

TEST_CASE("anti-diagonal support is violated by the swap") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2)});
  const SupportSet gamma = set_of({{0, 1}, {1, 0}});
  const auto v = check_monotone_exact<Rational>(gamma, inst);
  REQUIRE(v.result == MonotoneResult::Violated);
  REQUIRE(v.witness);
  CHECK(v.witness->points.size() == 2);
  CHECK(v.witness->cost_before == 2);
  CHECK(v.witness->cost_after == 0);
  check_witness_improves(inst, gamma, *v.witness);

  const auto b = check_monotone_bruteforce<Rational>(gamma, inst, 2);
  REQUIRE(b.result == MonotoneResult::Violated);
  check_witness_improves(inst, gamma, *b.witness);

  const auto fv = check_monotone_exact<double>(gamma, with_mode(inst, Arithmetic::Float));
  REQUIRE(fv.result == MonotoneResult::Violated);
  check_witness_improves(inst, gamma, *fv.witness);
}

TEST_CASE("three-marginal support on a two-by-two-by-one projection grid") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2), {R("1"), R("0")}});
  const SupportSet gamma = set_of({{0, 0, 0}, {1, 1, 0}});
  const auto sys = build_splitting_system<Rational>(gamma, inst);
  CHECK(sys.row_cells.size() == 4);
  CHECK(sys.variables() == 5);

  const auto v = check_monotone_exact<Rational>(gamma, inst);
  REQUIRE(v.result == MonotoneResult::Monotone);
  const auto& t = *v.tuple;
  CHECK(t.domain == TupleDomain::OnProjections);
  // All four cells of {0,1} x {0,1} x {0}.
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const Index cell{a, b, 0};
      const auto s = t.sum_at(cell);
      REQUIRE(s);
      if (gamma.contains(cell))
        CHECK(*s == cost_eval(inst, cell));
      else
        CHECK(*s <= cost_eval(inst, cell));
    }
  // The tuple from the worked example also satisfies the system.
  SplittingTuple<Rational> known{{{Rational(0), Rational(2)}, {Rational(0), Rational(0)}, {Rational(0), std::nullopt}},
                                 TupleDomain::OnProjections};
  CHECK(*known.sum_at({0, 0, 0}) == 0);
  CHECK(*known.sum_at({1, 1, 0}) == 2);
  CHECK(*known.sum_at({1, 0, 0}) <= 2);
  CHECK(*known.sum_at({0, 1, 0}) <= 2);
}

TEST_CASE("splitting system of the swap set is infeasible") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2)});
  const SupportSet gamma = set_of({{0, 1}, {1, 0}});
  const auto sys = build_splitting_system<Rational>(gamma, inst);
  const auto f = lp::check_feasibility(sys.constraints, sys.bounds, sys.variables());
  REQUIRE_FALSE(f.feasible);
  CHECK(lp::verify_farkas(sys.constraints, sys.bounds, sys.variables(), f.certificate));

  const auto pair = improving_pair_from_certificate(f.certificate, gamma, inst);
  CHECK(pair.alpha == Measure<Rational>{{{0, 1}, R("1/2")}, {{1, 0}, R("1/2")}});
  CHECK(pair.alpha_prime == Measure<Rational>{{{0, 0}, R("1/2")}, {{1, 1}, R("1/2")}});
}

TEST_CASE("extract_witness") {
  const Instance inst = quadratic_instance({uniform(2), uniform(2)});
  const Measure<Rational> bad{{{0, 1}, R("1/2")}, {{1, 0}, R("1/2")}};
  const Measure<Rational> good{{{0, 0}, R("1/2")}, {{1, 1}, R("1/2")}};

  SUBCASE("two-point swap") {
    CHECK(denominator_product(bad, good) == 2);
    const auto w = extract_witness(bad, good, inst);
    CHECK(w.points.size() == 2);
    CHECK(w.permutations == std::vector<std::vector<std::size_t>>{{1, 0}});
    CHECK(w.cost_before == 2 * integral(inst, bad));
    CHECK(w.cost_after == 2 * integral(inst, good));
    CHECK(w.cost_before == 2);
    CHECK(w.cost_after == 0);
  }
  SUBCASE("roles reversed is not improving") {
    try {
      extract_witness(good, bad, inst);
      FAIL("expected NotImproving");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotImproving);
    }
  }
  SUBCASE("degenerate identical point masses") {
    const Instance inst3 = quadratic_instance({uniform(2), uniform(2), uniform(2)});
    const Measure<Rational> atom{{{0, 0, 0}, R("1")}};
    try {
      extract_witness(atom, atom, inst3);
      FAIL("expected NotImproving");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotImproving);
    }
  }
  SUBCASE("marginal mismatch") {
    const Measure<Rational> other{{{0, 0}, R("1")}};
    try {
      extract_witness(bad, other, inst);
      FAIL("expected MarginalMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MarginalMismatch);
    }
  }
}

TEST_CASE("violated verdicts carry improving witnesses with exact footnote sums") {
  Rng rng(31);
  std::size_t violated = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto [inst, gamma] = random_case(rng, 2, 4, 3);
    const auto v = check_monotone_exact<Rational>(gamma, inst);
    if (v.result != MonotoneResult::Violated) continue;
    ++violated;
    check_witness_improves(inst, gamma, *v.witness);

    // Rebuild the pair and compare the witness sums against tau times the integrals.
    const auto sys = build_splitting_system<Rational>(gamma, inst);
    const auto f = lp::check_feasibility(sys.constraints, sys.bounds, sys.variables());
    REQUIRE_FALSE(f.feasible);
    const auto pair = improving_pair_from_certificate(f.certificate, gamma, inst);
    for (const auto& [cell, m] : pair.alpha) CHECK(gamma.contains(cell));
    CHECK(marginals_of_measure(inst, pair.alpha) == marginals_of_measure(inst, pair.alpha_prime));
    CHECK(integral(inst, pair.alpha_prime) < integral(inst, pair.alpha));
    const auto w = extract_witness(pair.alpha, pair.alpha_prime, inst);
    const Rational tau(denominator_product(pair.alpha, pair.alpha_prime));
    const auto [before, after] = oracle::witness_sums(inst, w);
    CHECK(before == tau * integral(inst, pair.alpha));
    CHECK(after == tau * integral(inst, pair.alpha_prime));
  }
  CHECK(violated >= 10);
}

TEST_CASE("brute force agrees with the exact checker on 2x2x2 instances") {
  Rng rng(17);
  std::size_t violated = 0, checked = 0;
  while (checked < 20) {
    const Instance inst = gen_instance(3, {2, 2, 2}, "random", rng);
    const SupportSet gamma = support_of(random_vertex_plan(inst, rng));
    ++checked;
    const auto exact = check_monotone_exact<Rational>(gamma, inst);
    if (exact.result == MonotoneResult::Violated) {
      ++violated;
      const std::size_t n = exact.witness->points.size();
      const auto brute = check_monotone_bruteforce<Rational>(gamma, inst, std::max<std::size_t>(n, 2));
      CHECK(brute.result == MonotoneResult::Violated);
      if (brute.witness) check_witness_improves(inst, gamma, *brute.witness);
    } else {
      CHECK(exact.result == MonotoneResult::Monotone);
      CHECK(check_monotone_bruteforce<Rational>(gamma, inst, 3).result == MonotoneResult::Inconclusive);
    }
  }
  CHECK(violated > 0);
}

TEST_CASE("monotone verdicts agree with definition (ii)") {
  Rng rng(123);
  std::size_t monotone = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const Instance inst = random_instance(rng, 2, 3, 3);
    const SupportSet gamma = support_of(solve_primal<Rational>(inst).optimal_plan);
    const auto v = check_monotone_exact<Rational>(gamma, inst);
    REQUIRE(v.result == MonotoneResult::Monotone);
    ++monotone;
    const std::vector<Index> pts(gamma.points.begin(), gamma.points.end());
    for (int draw = 0; draw < 50; ++draw) {
      Measure<Rational> alpha;
      Rational total = 0;
      for (const auto& p : pts) {
        const Rational m(static_cast<long>(rng.between(0, 5)));
        if (sgn(m) == 0) continue;
        alpha[p] = m;
        total += m;
      }
      if (alpha.empty()) alpha[pts[0]] = total = 1;
      for (auto& [cell, m] : alpha) m /= total;
      Instance sub = inst;
      sub.marginals = marginals_of_measure(inst, alpha);
      const auto best = solve_primal<Rational>(sub);
      CHECK(integral(inst, alpha) <= best.optimal_value);
    }
  }
  CHECK(monotone == 12);
}

TEST_CASE("verdict is invariant under adding separable functions to the cost") {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const auto [inst, gamma] = random_case(rng, 2, 3, 3);
    Instance shifted = inst;
    std::vector<std::vector<Rational>> g;
    for (std::size_t k = 0; k < inst.dims(); ++k) {
      g.emplace_back();
      for (std::size_t p = 0; p < inst.spaces[k].size(); ++p)
        g.back().push_back(Q(static_cast<long>(rng.between(0, 9)), static_cast<long>(rng.between(1, 4))));
    }
    auto& values = std::get<TensorCost>(shifted.cost).values;
    std::size_t off = 0;
    oracle::for_each_cell(inst.shape(), [&](const Index& cell) {
      for (std::size_t k = 0; k < cell.size(); ++k) values[off] += g[k][cell[k]];
      ++off;
    });
    CHECK(check_monotone_exact<Rational>(gamma, inst).result ==
          check_monotone_exact<Rational>(gamma, shifted).result);
  }
}

TEST_CASE("brute force budget") {
  Rng rng(3);
  const Instance inst = gen_instance(3, {4, 4, 4}, "pairwise_quadratic", rng);
  const SupportSet gamma = support_of(solve_primal<Rational>(inst).optimal_plan);
  MonotoneOptions opts;
  opts.evaluation_budget = 10;
  try {
    check_monotone_bruteforce<Rational>(gamma, inst, 4, opts);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
  }
}
