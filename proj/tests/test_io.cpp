#include "doctest.h"
#include "fixtures.hpp"
#include "mmot/certify.hpp"
#include "mmot/io.hpp"
#include "mmot/solver.hpp"

using namespace mmot;
using namespace mmot::test;

TEST_CASE("instance JSON") {
  SUBCASE("decimals are read exactly") {
    const Json j = Json::parse(R"({
      "spaces": [{"points": [{"label": "a", "coord": [0]}, {"label": "b", "coord": [0.1]}]},
                 {"points": [{"label": "c", "coord": [0]}, {"label": "d", "coord": [1]}]}],
      "marginals": [[0.3, 0.7], ["1/3", "2/3"]],
      "cost": {"builtin": "pairwise_quadratic"},
      "arithmetic": "rational"})");
    const Instance inst = instance_from_json(j);
    CHECK(inst.marginals[0][0] == R("3/10"));
    CHECK(inst.marginals[1][1] == R("2/3"));
    CHECK(cost_eval(inst, {1, 1}) == R("81/100"));
    CHECK(validate_instance(inst).empty());
  }
  SUBCASE("round trip is lossless") {
    Rng rng(2);
    for (const char* cost : {"random", "pairwise_quadratic", "coulomb", "product"}) {
      const Instance inst = gen_instance(3, {2, 3, 2}, cost, rng);
      const std::string text = to_json(inst).dump();
      const Instance back = instance_from_json(Json::parse(text));
      CHECK(to_json(back).dump() == text);
      CHECK(instance_hash(back) == instance_hash(inst));
    }
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"spaces": []})")), Error);
    const Json unknown = Json::parse(R"({"spaces":[{"points":[{"label":"a"}]},{"points":[{"label":"b"}]}],
      "marginals":[[1],[1]], "cost":{"builtin":"nope"}})");
    try {
      instance_from_json(unknown);
      FAIL("expected UnknownCost");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownCost);
    }
  }
}

TEST_CASE("hash depends on content") {
  const Instance a = quadratic_instance({uniform(2), uniform(2)});
  Instance b = a;
  b.marginals[0] = {R("1/3"), R("2/3")};
  CHECK(instance_hash(a).size() == 64);
  CHECK(instance_hash(a) != instance_hash(b));
  CHECK(instance_hash(a) == instance_hash(quadratic_instance({uniform(2), uniform(2)})));
}

TEST_CASE("plans, tuples, witnesses and solve results round trip") {
  Rng rng(4);
  const Instance inst = random_instance(rng, 2, 3, 3);
  const auto res = solve_primal<Rational>(inst);
  const Json pj = to_json(res.optimal_plan);
  CHECK(plan_from_json<Rational>(Json::parse(pj.dump())).entries == res.optimal_plan.entries);
  const Json tj = to_json(res.dual_tuple);
  CHECK(tuple_from_json<Rational>(Json::parse(tj.dump())).potentials == res.dual_tuple.potentials);

  const Json sj = to_json(res);
  CHECK(sj.contains("value"));
  CHECK(sj.contains("plan"));
  CHECK(sj.contains("potentials"));
  CHECK(sj.contains("gap"));

  SplittingTuple<Rational> holey{{{Rational(1, 3), std::nullopt}}, TupleDomain::OnProjections};
  const Json hj = to_json(holey);
  CHECK(hj["potentials"][0][1] == "-inf");
  CHECK(tuple_from_json<Rational>(hj).potentials == holey.potentials);

  RearrangementWitness<Rational> w{{{0, 1}, {1, 0}}, {{1, 0}}, 2, 0};
  const auto wb = witness_from_json<Rational>(Json::parse(to_json(w).dump()));
  CHECK(wb.points == w.points);
  CHECK(wb.permutations == w.permutations);
  CHECK(wb.cost_before == 2);

  const SupportSet s = support_from_json(Json::parse(R"({"points": [[0, 1], [1, 0]]})"), Arithmetic::Rational);
  CHECK(s.points == std::set<Index>{{0, 1}, {1, 0}});
  CHECK(support_from_json(pj, Arithmetic::Rational).points == support_of(res.optimal_plan).points);
}

TEST_CASE("gen_instance") {
  CHECK(to_json(gen_instance(2, {2, 2}, "random", 7)).dump() == to_json(gen_instance(2, {2, 2}, "random", 7)).dump());
  CHECK(to_json(gen_instance(2, {2, 2}, "random", 7)).dump() != to_json(gen_instance(2, {2, 2}, "random", 8)).dump());
  CHECK(validate_instance(gen_instance(3, {2, 2, 2}, "pairwise_quadratic", 1)).empty());
  try {
    gen_instance(2, {2, 2}, "unheard-of", 1);
    FAIL("expected UnknownCost");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownCost);
  }

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng);
    CHECK(validate_instance(inst).empty());
    const auto res = solve_primal<Rational>(inst);
    const auto cert = certify_plan(inst, res.optimal_plan);
    CHECK(cert.verdict == Verdict::Optimal);
    CHECK(audit_certificate(inst, res.optimal_plan, cert).ok());
  }
}

TEST_CASE("run_suite") {
  SUBCASE("ten random instances") {
    SuiteConfig cfg;
    cfg.seed = 42;
    const auto report = run_suite(10, cfg);
    CHECK(report.instances == 10);
    CHECK(report.certified == 10);
    CHECK(report.audited == 10);
    CHECK(report.failures.empty());
    CHECK(report.refuted + report.perturbation_skipped == 10);
    CHECK(report.to_json().dump() == run_suite(10, cfg).to_json().dump());
  }
  SUBCASE("point marginals give a single plan") {
    SuiteConfig cfg;
    cfg.point_marginals = true;
    const auto report = run_suite(1, cfg);
    CHECK(report.certified == 1);
    CHECK(report.refuted == 0);
    CHECK(report.perturbation_skipped == 1);
    CHECK(report.failures.empty());
  }
  SUBCASE("forced non-monotone plan is refuted") {
    SuiteConfig cfg;
    cfg.min_dims = cfg.max_dims = 2;
    cfg.costs = {"pairwise_quadratic"};
    cfg.max_size = 3;
    cfg.seed = 3;
    const auto report = run_suite(1, cfg);
    CHECK(report.refuted == 1);
    CHECK(report.failures.empty());
  }
  SUBCASE("float mode") {
    SuiteConfig cfg;
    cfg.mode = Arithmetic::Float;
    const auto report = run_suite(5, cfg);
    CHECK(report.certified == 5);
    CHECK(report.failures.empty());
  }
}

TEST_CASE("swap_perturbation strictly increases cost") {
  Rng rng(19);
  std::size_t found = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_instance(rng);
    const auto res = solve_primal<Rational>(inst);
    const auto worse = swap_perturbation(inst, res.optimal_plan);
    if (!worse) continue;
    ++found;
    CHECK(validate_plan(inst, *worse).empty());
    CHECK(plan_cost(inst, *worse) > res.optimal_value);
  }
  CHECK(found > 10);
}
