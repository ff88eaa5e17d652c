// mmot: multi-marginal optimal transport solver, monotonicity checker and certifier.
//
// Exit codes: 0 success / positive verdict, 1 internal failure, 2 input error,
// 3 refuted, 4 inconclusive, 5 audit failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mmot/certify.hpp"
#include "mmot/generate.hpp"
#include "mmot/io.hpp"
#include "mmot/monotone.hpp"
#include "mmot/solver.hpp"
#include "mmot/splitting.hpp"

namespace {

using namespace mmot;

enum Exit : int { kOk = 0, kFailure = 1, kInputError = 2, kRefuted = 3, kInconclusive = 4, kAuditFailed = 5 };

struct Globals {
  std::string mode;
  std::uint64_t seed = 1;
  std::size_t grid_cap = kDefaultGridCap;
  bool json = false;
};

/// --mode beats MMOT_MODE, which beats the instance's own "arithmetic" field.
Arithmetic resolve_mode(const Globals& g, Arithmetic from_instance) {
  if (!g.mode.empty()) return parse_arithmetic(g.mode);
  if (const char* env = std::getenv("MMOT_MODE"); env != nullptr && *env != '\0') return parse_arithmetic(env);
  return from_instance;
}

Instance load_instance(const Globals& g, const std::string& path) {
  Instance inst = instance_from_json(read_json_file(path));
  inst.arithmetic = resolve_mode(g, inst.arithmetic);
  auto errors = validate_instance(inst);
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
    throw Error(Errc::InvalidInstance, joined);
  }
  return inst;
}

void emit(const Globals& g, const Json& j, const std::string& out_path = {}) {
  if (!out_path.empty()) {
    write_json_file(out_path, j);
    return;
  }
  std::cout << (g.json ? j.dump() : j.dump(2)) << '\n';
}

template <class F>
int dispatch(Arithmetic mode, F&& f) {
  if (mode == Arithmetic::Rational) return f.template operator()<Rational>();
  return f.template operator()<double>();
}

Index parse_base(const std::string& text) {
  Index base;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) base.push_back(std::stoul(item));
  return base;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(std::stoul(item));
  return sizes;
}

bool is_input_error(Errc code) {
  switch (code) {
    case Errc::Parse:
    case Errc::InvalidInstance:
    case Errc::InvalidPlan:
    case Errc::IndexOutOfRange:
    case Errc::DimensionMismatch:
    case Errc::GridTooLarge:
    case Errc::UnknownCost:
    case Errc::BasePointNotInG:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-marginal optimal transport: solve, check monotonicity, certify and audit plans"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--mode", g.mode, "Arithmetic: rational|float (default: MMOT_MODE, then the instance)")
      ->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--grid-cap", g.grid_cap, "Largest product grid accepted");
  app.add_flag("--json", g.json, "Compact machine-readable output");

  std::string instance_path, plan_path, cert_path, out_path, support_path, base_text, method = "exact";
  std::size_t n_max = 3;

  auto* solve = app.add_subcommand("solve", "Solve the transport LP; prints {value, plan, potentials, gap}");
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--out", out_path, "Write the result here instead of stdout");

  auto* check = app.add_subcommand("check", "Decide c-cyclical monotonicity of a plan's support");
  check->add_option("instance", instance_path)->required();
  check->add_option("plan", plan_path)->required();
  check->add_option("--method", method)->check(CLI::IsMember({"exact", "brute"}));
  check->add_option("--nmax", n_max, "Largest point multiset for brute force")->check(CLI::Range(2, 64));

  auto* tuple = app.add_subcommand("tuple", "Build a normalized splitting tuple for a support");
  tuple->add_option("instance", instance_path)->required();
  tuple->add_option("--support", support_path, "Plan or {\"points\": [...]} file")->required();
  tuple->add_option("--base", base_text, "Base cell i1,...,id (default: smallest support cell)");

  auto* certify = app.add_subcommand("certify", "Certify or refute optimality of a plan");
  certify->add_option("instance", instance_path)->required();
  certify->add_option("plan", plan_path)->required();
  certify->add_option("--out", out_path);

  auto* audit = app.add_subcommand("audit", "Re-check a certificate without solving");
  audit->add_option("instance", instance_path)->required();
  audit->add_option("plan", plan_path)->required();
  audit->add_option("cert", cert_path)->required();

  std::size_t dims = 3;
  std::string sizes_text, cost_name = "random";
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--dims,-d", dims)->check(CLI::Range(2, 16));
  gen->add_option("--sizes", sizes_text, "Comma-separated space sizes (default: 2 per axis)");
  gen->add_option("--cost", cost_name, "random|pairwise_quadratic|coulomb|product");
  gen->add_option("--out", out_path);

  std::size_t count = 10;
  SuiteConfig suite_config;
  std::vector<std::string> suite_costs;
  auto* suite = app.add_subcommand("suite", "Solve, certify, perturb and refute a batch of random instances");
  suite->add_option("--count", count)->check(CLI::PositiveNumber);
  suite->add_option("--cost", suite_costs, "Cost names to draw from");
  suite->add_option("--min-dims", suite_config.min_dims)->check(CLI::Range(2, 8));
  suite->add_option("--max-dims", suite_config.max_dims)->check(CLI::Range(2, 8));
  suite->add_option("--max-size", suite_config.max_size)->check(CLI::Range(1, 16));
  suite->add_flag("--point-marginals", suite_config.point_marginals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (solve->parsed()) {
      const Instance inst = load_instance(g, instance_path);
      return dispatch(inst.arithmetic, [&]<class T>() {
        SolveOptions options;
        options.grid_cap = g.grid_cap;
        emit(g, to_json(solve_primal<T>(inst, options)), out_path);
        return int(kOk);
      });
    }

    if (check->parsed()) {
      const Instance inst = load_instance(g, instance_path);
      return dispatch(inst.arithmetic, [&]<class T>() {
        const auto plan = plan_from_json<T>(read_json_file(plan_path));
        const auto plan_errors = validate_plan(inst, plan);
        if (!plan_errors.empty()) throw Error(Errc::InvalidPlan, plan_errors.front());
        MonotoneOptions options;
        options.grid_cap = g.grid_cap;
        const SupportSet gamma = support_of(plan);
        const auto verdict = method == "exact" ? check_monotone_exact<T>(gamma, inst, options)
                                               : check_monotone_bruteforce<T>(gamma, inst, n_max, options);
        emit(g, to_json(verdict));
        switch (verdict.result) {
          case MonotoneResult::Monotone: return int(kOk);
          case MonotoneResult::Violated: return int(kRefuted);
          case MonotoneResult::Inconclusive: return int(kInconclusive);
        }
        return int(kFailure);
      });
    }

    if (tuple->parsed()) {
      const Instance inst = load_instance(g, instance_path);
      const SupportSet gamma = support_from_json(read_json_file(support_path), inst.arithmetic);
      if (gamma.empty()) throw Error(Errc::InvalidPlan, "support is empty");
      const Index base = base_text.empty() ? *gamma.points.begin() : parse_base(base_text);
      return dispatch(inst.arithmetic, [&]<class T>() {
        MonotoneOptions options;
        options.grid_cap = g.grid_cap;
        try {
          auto phi = splitting_for_finite<T>(gamma, inst, options);
          phi = extend_by_infconvolution(phi, gamma, inst);
          phi = normalize_at_base(phi, base, gamma, inst);
          Json out = to_json(phi);
          out["base"] = base;
          emit(g, out);
          return int(kOk);
        } catch (const NotMonotoneError<T>& e) {
          emit(g, Json{{"error", "not_monotone"}, {"witness", to_json(e.witness())}});
          return int(kRefuted);
        }
      });
    }

    if (certify->parsed()) {
      const Instance inst = load_instance(g, instance_path);
      return dispatch(inst.arithmetic, [&]<class T>() {
        const auto plan = plan_from_json<T>(read_json_file(plan_path));
        CertifyOptions options;
        options.monotone.grid_cap = g.grid_cap;
        const auto cert = certify_plan(inst, plan, options);
        emit(g, to_json(cert), out_path);
        if (!out_path.empty() && !g.json) std::cerr << "verdict: " << to_string(cert.verdict) << '\n';
        return int(cert.verdict == Verdict::Optimal ? kOk : kRefuted);
      });
    }

    if (audit->parsed()) {
      const Instance inst = load_instance(g, instance_path);
      return dispatch(inst.arithmetic, [&]<class T>() {
        const auto plan = plan_from_json<T>(read_json_file(plan_path));
        const auto cert = certificate_from_json<T>(read_json_file(cert_path));
        const auto report = audit_certificate(inst, plan, cert);
        emit(g, Json{{"ok", report.ok()}, {"failures", report.failures}});
        return int(report.ok() ? kOk : kAuditFailed);
      });
    }

    if (gen->parsed()) {
      std::vector<std::size_t> sizes = sizes_text.empty() ? std::vector<std::size_t>(dims, 2) : parse_sizes(sizes_text);
      if (!sizes_text.empty()) dims = sizes.size();
      const Arithmetic mode = resolve_mode(g, Arithmetic::Rational);
      emit(g, to_json(gen_instance(dims, sizes, cost_name, g.seed, mode)), out_path);
      return kOk;
    }

    if (suite->parsed()) {
      suite_config.seed = g.seed;
      suite_config.mode = resolve_mode(g, Arithmetic::Rational);
      suite_config.grid_cap = g.grid_cap;
      if (!suite_costs.empty()) suite_config.costs = suite_costs;
      if (suite_config.max_dims < suite_config.min_dims) throw Error(Errc::InvalidInstance, "--max-dims < --min-dims");
      const auto report = run_suite(count, suite_config);
      emit(g, report.to_json());
      return report.failures.empty() ? kOk : kFailure;
    }
  } catch (const Error& e) {
    std::cerr << "mmot: " << e.what() << '\n';
    return is_input_error(e.code()) ? kInputError : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "mmot: " << e.what() << '\n';
    return kInputError;
  }
  return kFailure;
}
