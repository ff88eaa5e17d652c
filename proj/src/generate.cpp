#include "mmot/generate.hpp"

#include "mmot/certify.hpp"
#include "mmot/solver.hpp"

namespace mmot {

Instance gen_instance(std::size_t dims, const std::vector<std::size_t>& sizes, std::string_view cost_name, Rng& rng,
                      Arithmetic mode) {
  if (dims < 2) throw Error(Errc::InvalidInstance, "need at least two marginals");
  if (sizes.size() != dims) throw Error(Errc::InvalidInstance, "need one size per marginal");
  for (std::size_t s : sizes)
    if (s == 0) throw Error(Errc::InvalidInstance, "space sizes must be >= 1");
  const bool random_tensor = cost_name == "random";
  std::optional<BuiltinKind> builtin;
  if (!random_tensor) builtin = parse_builtin(cost_name);

  Instance inst;
  inst.arithmetic = mode;
  for (std::size_t k = 0; k < dims; ++k) {
    Space space;
    for (std::size_t p = 0; p < sizes[k]; ++p) {
      Point point;
      point.label = "x" + std::to_string(k + 1) + "_" + std::to_string(p);
      if (builtin) point.coord = {sizes[k] == 1 ? Rational(0) : canonical(Rational(p, sizes[k] - 1))};
      space.points.push_back(std::move(point));
    }
    inst.spaces.push_back(std::move(space));

    std::vector<Rational> weights;
    std::uint64_t total = 0;
    for (std::size_t p = 0; p < sizes[k]; ++p) {
      const auto w = rng.between(1, 8);
      total += w;
      weights.emplace_back(static_cast<unsigned long>(w));
    }
    for (auto& w : weights) {
      w /= static_cast<unsigned long>(total);
      w.canonicalize();
    }
    inst.marginals.push_back(std::move(weights));
  }

  if (random_tensor) {
    TensorCost tensor;
    const std::size_t cells = cell_count(sizes);
    tensor.values.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      Rational v(static_cast<unsigned long>(rng.between(0, 32)), static_cast<unsigned long>(rng.between(1, 16)));
      v.canonicalize();
      tensor.values.push_back(v);
    }
    inst.cost = std::move(tensor);
  } else {
    BuiltinCost spec;
    spec.kind = *builtin;
    if (spec.kind == BuiltinKind::Product) spec.weights = {Rational(1)};
    inst.cost = spec;
    resolve_cost_offset(inst);
  }
  return inst;
}

Instance gen_instance(std::size_t dims, const std::vector<std::size_t>& sizes, std::string_view cost_name,
                      std::uint64_t seed, Arithmetic mode) {
  Rng rng(seed);
  return gen_instance(dims, sizes, cost_name, rng, mode);
}

void make_point_marginals(Instance& instance, Rng& rng) {
  for (std::size_t k = 0; k < instance.dims(); ++k) {
    auto& w = instance.marginals[k];
    std::fill(w.begin(), w.end(), Rational(0));
    w[rng.below(w.size())] = 1;
  }
}

template <class T>
std::optional<TransportPlan<T>> swap_perturbation(const Instance& instance, const TransportPlan<T>& plan) {
  const std::vector<std::pair<Index, T>> atoms(plan.entries.begin(), plan.entries.end());
  for (std::size_t a = 0; a < atoms.size(); ++a)
    for (std::size_t b = a + 1; b < atoms.size(); ++b)
      for (std::size_t j = 1; j < instance.dims(); ++j) {
        const Index& x = atoms[a].first;
        const Index& y = atoms[b].first;
        if (x[j] == y[j]) continue;
        Index xs = x, ys = y;
        std::swap(xs[j], ys[j]);
        const Rational delta =
            cost_eval(instance, xs) + cost_eval(instance, ys) - cost_eval(instance, x) - cost_eval(instance, y);
        if (sgn(delta) <= 0) continue;
        const T moved = atoms[a].second < atoms[b].second ? atoms[a].second : atoms[b].second;
        if constexpr (!is_exact_v<T>) {
          if (moved * to_double(delta) <= Tolerance::kImprovement) continue;
        }
        TransportPlan<T> out = plan;
        auto take = [&](const Index& cell) {
          auto it = out.entries.find(cell);
          it->second -= moved;
          bool gone;
          if constexpr (is_exact_v<T>)
            gone = sgn(it->second) == 0;
          else
            gone = it->second <= Tolerance::kSupport;
          if (gone) out.entries.erase(it);
        };
        take(x);
        take(y);
        out.entries[xs] += moved;
        out.entries[ys] += moved;
        return out;
      }
  return std::nullopt;
}

template std::optional<TransportPlan<Rational>> swap_perturbation<Rational>(const Instance&,
                                                                             const TransportPlan<Rational>&);
template std::optional<TransportPlan<double>> swap_perturbation<double>(const Instance&, const TransportPlan<double>&);

namespace {

template <class T>
void run_one(std::size_t index, const Instance& inst, const SuiteConfig& config, SuiteReport& report) {
  const std::string tag = "instance " + std::to_string(index) + ": ";
  SolveOptions solve_options;
  solve_options.grid_cap = config.grid_cap;
  const auto solved = solve_primal<T>(inst, solve_options);

  const auto cert = certify_plan(inst, solved.optimal_plan);
  if (cert.verdict != Verdict::Optimal) {
    report.failures.push_back(tag + "optimal plan was not certified");
    return;
  }
  if (!near(cert.plan_cost, solved.optimal_value, Tolerance::kFeasibility))
    report.failures.push_back(tag + "certified value differs from the solver value");
  else
    ++report.certified;
  const auto audit = audit_certificate(inst, solved.optimal_plan, cert);
  if (audit.ok())
    ++report.audited;
  else
    report.failures.push_back(tag + "audit failed: " + audit.failures.front());

  const auto worse = swap_perturbation(inst, solved.optimal_plan);
  if (!worse) {
    ++report.perturbation_skipped;
    return;
  }
  const auto refutation = certify_plan(inst, *worse);
  if (refutation.verdict != Verdict::NotMonotone || !refutation.witness) {
    report.failures.push_back(tag + "perturbed plan was not refuted");
    return;
  }
  const auto [before, after] = witness_costs(inst, *refutation.witness);
  if (!strictly_less(after, before, Tolerance::kImprovement)) {
    report.failures.push_back(tag + "witness does not improve cost");
    return;
  }
  if (!audit_certificate(inst, *worse, refutation).ok()) {
    report.failures.push_back(tag + "refutation failed its audit");
    return;
  }
  ++report.refuted;
}

}  // namespace

SuiteReport run_suite(std::size_t count, const SuiteConfig& config) {
  if (count == 0) throw Error(Errc::InvalidInstance, "suite count must be >= 1");
  if (config.costs.empty()) throw Error(Errc::UnknownCost, "no cost names configured");
  Rng rng(config.seed);
  SuiteReport report;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t dims = rng.between(config.min_dims, config.max_dims);
    std::vector<std::size_t> sizes(dims);
    for (auto& s : sizes) s = rng.between(1, config.max_size);
    const std::string& cost = config.costs[rng.below(config.costs.size())];
    Instance inst = gen_instance(dims, sizes, cost, rng, config.mode);
    if (config.point_marginals) make_point_marginals(inst, rng);
    ++report.instances;
    try {
      if (config.mode == Arithmetic::Rational)
        run_one<Rational>(i, inst, config, report);
      else
        run_one<double>(i, inst, config, report);
    } catch (const std::exception& e) {
      report.failures.push_back("instance " + std::to_string(i) + ": " + e.what());
    }
  }
  return report;
}

Json SuiteReport::to_json() const {
  return {{"instances", instances},
          {"certified", certified},
          {"audited", audited},
          {"refuted", refuted},
          {"perturbation_skipped", perturbation_skipped},
          {"failures", failures}};
}

}  // namespace mmot
