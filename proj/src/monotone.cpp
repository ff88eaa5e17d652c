#include "mmot/monotone.hpp"

#include <algorithm>
#include <numeric>

namespace mmot {

const char* to_string(MonotoneResult result) {
  switch (result) {
    case MonotoneResult::Monotone: return "monotone";
    case MonotoneResult::Violated: return "violated";
    case MonotoneResult::Inconclusive: return "inconclusive";
  }
  return "?";
}

template <class T>
std::size_t SplittingSystem<T>::variable(std::size_t k, std::size_t p) const {
  const auto& axis = projections[k];
  auto it = std::lower_bound(axis.begin(), axis.end(), p);
  if (it == axis.end() || *it != p) throw Error(Errc::IndexOutOfRange, "point outside the projection");
  return var_offset[k] + static_cast<std::size_t>(it - axis.begin());
}

template <class T>
SplittingSystem<T> build_splitting_system(const SupportSet& gamma, const Instance& instance, std::size_t grid_cap) {
  if (gamma.empty()) throw Error(Errc::InvalidPlan, "support set is empty");
  const std::size_t d = instance.dims();
  for (const auto& cell : gamma.points) (void)cost_eval(instance, cell);  // range check

  SplittingSystem<T> sys;
  sys.projections = gamma.projections(d);
  CellProduct cells(sys.projections);
  if (cells.size() > grid_cap)
    throw Error(Errc::GridTooLarge, "product of projections has " + std::to_string(cells.size()) + " cells, cap is " +
                                        std::to_string(grid_cap));
  sys.var_offset.assign(d + 1, 0);
  for (std::size_t k = 0; k < d; ++k) sys.var_offset[k + 1] = sys.var_offset[k] + sys.projections[k].size();
  const std::size_t vars = sys.var_offset[d];
  sys.bounds.assign(vars, lp::Bound::Free);
  sys.row_cells.reserve(cells.size());
  sys.constraints.reserve(cells.size());
  cells.for_each([&](const Index& cell) {
    lp::Constraint<T> row;
    row.coeffs.assign(vars, T(0));
    for (std::size_t k = 0; k < d; ++k) row.coeffs[sys.variable(k, cell[k])] += T(1);
    row.relation = gamma.contains(cell) ? lp::Relation::Equal : lp::Relation::LessEqual;
    row.rhs = from_rational<T>(cost_eval(instance, cell));
    sys.row_cells.push_back(cell);
    sys.constraints.push_back(std::move(row));
  });
  return sys;
}

namespace {

template <class T>
SplittingTuple<T> tuple_from_point(const SplittingSystem<T>& sys, const Instance& instance, const std::vector<T>& point) {
  SplittingTuple<T> tuple;
  tuple.domain = TupleDomain::OnProjections;
  const auto shape = instance.shape();
  tuple.potentials.resize(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    tuple.potentials[k].assign(shape[k], std::nullopt);
    for (std::size_t p : sys.projections[k]) tuple.potentials[k][p] = point[sys.variable(k, p)];
  }
  return tuple;
}

SplittingTuple<double> to_float(const SplittingTuple<Rational>& exact) {
  SplittingTuple<double> out;
  out.domain = exact.domain;
  for (const auto& axis : exact.potentials) {
    out.potentials.emplace_back();
    for (const auto& v : axis) out.potentials.back().push_back(v ? std::optional<double>(v->get_d()) : std::nullopt);
  }
  return out;
}

RearrangementWitness<double> to_float(const RearrangementWitness<Rational>& exact) {
  RearrangementWitness<double> out;
  out.points = exact.points;
  out.permutations = exact.permutations;
  out.cost_before = exact.cost_before.get_d();
  out.cost_after = exact.cost_after.get_d();
  return out;
}

std::vector<std::map<std::size_t, Rational>> axis_sums(const Measure<Rational>& m, std::size_t d) {
  std::vector<std::map<std::size_t, Rational>> sums(d);
  for (const auto& [cell, mass] : m)
    for (std::size_t k = 0; k < d; ++k) sums[k][cell[k]] += mass;
  for (auto& axis : sums)
    for (auto it = axis.begin(); it != axis.end();) it = sgn(it->second) == 0 ? axis.erase(it) : std::next(it);
  return sums;
}

}  // namespace

template <class T>
MonotonicityVerdict<T> check_monotone_exact(const SupportSet& gamma, const Instance& instance,
                                            const MonotoneOptions& options) {
  const auto sys = build_splitting_system<T>(gamma, instance, options.grid_cap);
  const auto feasibility = lp::check_feasibility(sys.constraints, sys.bounds, sys.variables(), options.lp);

  MonotonicityVerdict<T> verdict;
  verdict.method = CheckMethod::Exact;
  if (feasibility.feasible) {
    verdict.result = MonotoneResult::Monotone;
    verdict.tuple = tuple_from_point(sys, instance, feasibility.point);
    return verdict;
  }
  if constexpr (is_exact_v<T>) {
    const auto pair = improving_pair_from_certificate(feasibility.certificate, gamma, instance);
    verdict.result = MonotoneResult::Violated;
    verdict.witness = extract_witness(pair.alpha, pair.alpha_prime, instance, options.witness_cap);
    return verdict;
  } else {
    // The data is exact, so the rational system settles both the verdict and the witness.
    const auto exact = check_monotone_exact<Rational>(gamma, instance, options);
    verdict.result = exact.result;
    if (exact.tuple) verdict.tuple = to_float(*exact.tuple);
    if (exact.witness) verdict.witness = to_float(*exact.witness);
    return verdict;
  }
}

template <class T>
MonotonicityVerdict<T> check_monotone_bruteforce(const SupportSet& gamma, const Instance& instance, std::size_t n_max,
                                                 const MonotoneOptions& options) {
  if (n_max < 2) throw Error(Errc::InvalidInstance, "n_max must be >= 2");
  if (gamma.empty()) throw Error(Errc::InvalidPlan, "support set is empty");
  const std::size_t d = instance.dims();
  const std::vector<Index> points(gamma.points.begin(), gamma.points.end());
  for (const auto& cell : points) (void)cost_eval(instance, cell);

  // Cost table over the product of projections.
  const auto projections = gamma.projections(d);
  const CellProduct cells(projections);
  if (cells.size() > options.grid_cap)
    throw Error(Errc::GridTooLarge, "product of projections exceeds the grid cap");
  const auto table = cost_values<T>(instance, cells);
  std::vector<std::size_t> sizes = cells.sizes();
  std::vector<std::vector<std::size_t>> local(d);
  for (std::size_t k = 0; k < d; ++k) {
    local[k].assign(instance.spaces[k].size(), 0);
    for (std::size_t t = 0; t < projections[k].size(); ++t) local[k][projections[k][t]] = t;
  }
  auto cost_at = [&](auto&& coordinate) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < d; ++k) offset = offset * sizes[k] + local[k][coordinate(k)];
    return table[offset];
  };

  MonotonicityVerdict<T> verdict;
  verdict.method = CheckMethod::BruteForce;
  verdict.n_max = n_max;
  verdict.result = MonotoneResult::Inconclusive;
  if (d < 2) return verdict;

  std::size_t evaluations = 0;
  for (std::size_t n = 2; n <= n_max; ++n) {
    std::vector<std::size_t> choice(n, 0);  // nondecreasing indices into `points`
    while (true) {
      T before(0);
      for (std::size_t i = 0; i < n; ++i) before += cost_at([&](std::size_t k) { return points[choice[i]][k]; });

      std::vector<std::vector<std::size_t>> perms(d - 1, std::vector<std::size_t>(n));
      for (auto& p : perms) std::iota(p.begin(), p.end(), 0);
      auto advance = [&]() {
        for (std::size_t j = perms.size(); j > 0; --j)
          if (std::next_permutation(perms[j - 1].begin(), perms[j - 1].end())) return true;
        return false;
      };
      while (advance()) {
        if (++evaluations > options.evaluation_budget)
          throw Error(Errc::BudgetExceeded, "brute force exceeded " + std::to_string(options.evaluation_budget) +
                                                " evaluations");
        T after(0);
        for (std::size_t i = 0; i < n; ++i)
          after += cost_at([&](std::size_t k) {
            return k == 0 ? points[choice[i]][0] : points[choice[perms[k - 1][i]]][k];
          });
        if (strictly_less(after, before, Tolerance::kImprovement)) {
          RearrangementWitness<T> w;
          for (std::size_t i = 0; i < n; ++i) w.points.push_back(points[choice[i]]);
          w.permutations = perms;
          w.cost_before = before;
          w.cost_after = after;
          verdict.result = MonotoneResult::Violated;
          verdict.witness = std::move(w);
          return verdict;
        }
      }

      // Next nondecreasing sequence.
      std::size_t pos = n;
      while (pos > 0 && choice[pos - 1] + 1 == points.size()) --pos;
      if (pos == 0) break;
      ++choice[pos - 1];
      for (std::size_t i = pos; i < n; ++i) choice[i] = choice[pos - 1];
    }
  }
  return verdict;
}

template <class T>
ImprovingPair<T> improving_pair_from_certificate(const std::vector<T>& certificate, const SupportSet& gamma,
                                                 const Instance& instance) {
  const auto sys = build_splitting_system<T>(gamma, instance, cell_count(instance.shape()) + 1);
  if (!lp::verify_farkas(sys.constraints, sys.bounds, sys.variables(), certificate))
    throw Error(Errc::CertificateInvalid, "vector is not a Farkas certificate of the splitting system");

  ImprovingPair<T> pair;
  T mass(0);
  for (std::size_t r = 0; r < sys.row_cells.size(); ++r) {
    const T& y = certificate[r];
    if (strictly_less(T(0), y, Tolerance::kFeasibility)) {
      if (!gamma.contains(sys.row_cells[r]))
        throw Error(Errc::CertificateInvalid, "positive multiplier outside the support");
      pair.alpha.emplace(sys.row_cells[r], y);
      mass += y;
    } else if (strictly_less(y, T(0), Tolerance::kFeasibility)) {
      pair.alpha_prime.emplace(sys.row_cells[r], T(-y));
    }
  }
  if (!strictly_less(T(0), mass, Tolerance::kFeasibility))
    throw Error(Errc::CertificateInvalid, "certificate has no positive part");
  for (auto& [cell, m] : pair.alpha) m /= mass;
  for (auto& [cell, m] : pair.alpha_prime) m /= mass;

  const auto ma = marginals_of(TransportPlan<T>{pair.alpha}, instance);
  const auto mb = marginals_of(TransportPlan<T>{pair.alpha_prime}, instance);
  for (std::size_t k = 0; k < ma.size(); ++k)
    for (std::size_t p = 0; p < ma[k].size(); ++p)
      if (!near(ma[k][p], mb[k][p], Tolerance::kMarginalPoint))
        throw Error(Errc::CertificateInvalid, "derived measures have different marginals");
  if (!strictly_less(measure_cost(instance, pair.alpha_prime), measure_cost(instance, pair.alpha),
                     Tolerance::kImprovement))
    throw Error(Errc::CertificateInvalid, "derived measures do not improve cost");
  return pair;
}

mpz_class denominator_product(const Measure<Rational>& alpha, const Measure<Rational>& alpha_prime) {
  std::set<mpz_class> denominators;
  for (const auto* m : {&alpha, &alpha_prime})
    for (const auto& [cell, mass] : *m)
      if (sgn(mass) != 0) denominators.insert(mass.get_den());
  mpz_class tau = 1;
  for (const auto& q : denominators) tau *= q;
  return tau;
}

RearrangementWitness<Rational> extract_witness(const Measure<Rational>& alpha, const Measure<Rational>& alpha_prime,
                                               const Instance& instance, std::size_t witness_cap) {
  const std::size_t d = instance.dims();
  for (const auto* m : {&alpha, &alpha_prime})
    for (const auto& [cell, mass] : *m) {
      if (sgn(mass) < 0) throw Error(Errc::MarginalMismatch, "measures must be nonnegative");
      (void)cost_eval(instance, cell);
    }
  if (axis_sums(alpha, d) != axis_sums(alpha_prime, d))
    throw Error(Errc::MarginalMismatch, "alpha and alpha' have different marginals");
  const Rational before_integral = measure_cost(instance, alpha);
  const Rational after_integral = measure_cost(instance, alpha_prime);
  if (!(after_integral < before_integral))
    throw Error(Errc::NotImproving, "alpha' does not strictly lower the cost");

  const mpz_class tau = denominator_product(alpha, alpha_prime);
  auto expand = [&](const Measure<Rational>& m) {
    std::vector<Index> list;
    for (const auto& [cell, mass] : m) {
      if (sgn(mass) == 0) continue;
      Rational scaled = mass * Rational(tau);
      if (scaled.get_den() != 1) throw Error(Errc::NonRationalInput, "tau does not clear a denominator");
      const mpz_class& count = scaled.get_num();
      if (count > witness_cap || list.size() + count.get_ui() > witness_cap)
        throw Error(Errc::BudgetExceeded, "footnote expansion exceeds " + std::to_string(witness_cap) + " points");
      list.insert(list.end(), count.get_ui(), cell);
    }
    return list;
  };
  const std::vector<Index> before = expand(alpha);
  const std::vector<Index> after = expand(alpha_prime);
  const std::size_t n = before.size();
  if (after.size() != n) throw Error(Errc::MarginalMismatch, "expansions differ in length");

  // Pair each expanded alpha point with an alpha' point sharing its first coordinate.
  std::vector<std::size_t> partner(n);
  std::vector<bool> taken(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t q = 0;
    while (q < n && (taken[q] || after[q][0] != before[i][0])) ++q;
    if (q == n) throw Error(Errc::MarginalMismatch, "first coordinates cannot be matched");
    taken[q] = true;
    partner[i] = q;
  }

  RearrangementWitness<Rational> witness;
  witness.points = before;
  witness.permutations.assign(d > 0 ? d - 1 : 0, std::vector<std::size_t>(n));
  for (std::size_t j = 1; j < d; ++j) {
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t target = after[partner[i]][j];
      std::size_t l = 0;
      while (l < n && (used[l] || before[l][j] != target)) ++l;
      if (l == n) throw Error(Errc::MarginalMismatch, "axis " + std::to_string(j) + " coordinates cannot be matched");
      used[l] = true;
      witness.permutations[j - 1][i] = l;
    }
  }
  std::tie(witness.cost_before, witness.cost_after) = witness_costs(instance, witness);
  const Rational scale(tau);
  if (witness.cost_before != scale * before_integral || witness.cost_after != scale * after_integral)
    throw Error(Errc::MarginalMismatch, "expansion sums disagree with the scaled integrals");
  return witness;
}

#define MMOT_INSTANTIATE_MONOTONE(T)                                                                                 \
  template struct SplittingSystem<T>;                                                                                \
  template SplittingSystem<T> build_splitting_system<T>(const SupportSet&, const Instance&, std::size_t);            \
  template MonotonicityVerdict<T> check_monotone_exact<T>(const SupportSet&, const Instance&,                        \
                                                          const MonotoneOptions&);                                   \
  template MonotonicityVerdict<T> check_monotone_bruteforce<T>(const SupportSet&, const Instance&, std::size_t,      \
                                                               const MonotoneOptions&);                              \
  template ImprovingPair<T> improving_pair_from_certificate<T>(const std::vector<T>&, const SupportSet&,             \
                                                               const Instance&);

MMOT_INSTANTIATE_MONOTONE(Rational)
MMOT_INSTANTIATE_MONOTONE(double)

}  // namespace mmot
