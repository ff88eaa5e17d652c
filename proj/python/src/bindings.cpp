// JSON-in, JSON-out bindings. The Python package wraps these with json.loads/dumps.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "mmot/certify.hpp"
#include "mmot/generate.hpp"
#include "mmot/io.hpp"
#include "mmot/monotone.hpp"
#include "mmot/solver.hpp"
#include "mmot/splitting.hpp"

namespace py = pybind11;
using namespace mmot;

namespace {

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

Instance load(const std::string& text, const std::string& mode) {
  Instance inst = instance_from_json(parse(text));
  if (!mode.empty()) inst.arithmetic = parse_arithmetic(mode);
  require_valid(inst);
  return inst;
}

template <class F>
std::string dispatch(const Instance& inst, F&& f) {
  if (inst.arithmetic == Arithmetic::Rational) return f.template operator()<Rational>().dump();
  return f.template operator()<double>().dump();
}

std::string solve(const std::string& instance, const std::string& mode, std::size_t grid_cap) {
  const Instance inst = load(instance, mode);
  return dispatch(inst, [&]<class T>() {
    SolveOptions options;
    options.grid_cap = grid_cap;
    return to_json(solve_primal<T>(inst, options));
  });
}

std::string solve_dual_json(const std::string& instance, const std::string& mode, std::size_t grid_cap) {
  const Instance inst = load(instance, mode);
  return dispatch(inst, [&]<class T>() {
    SolveOptions options;
    options.grid_cap = grid_cap;
    const auto dual = solve_dual<T>(inst, options);
    return Json{{"value", scalar_to_json(dual.value)}, {"potentials", to_json(dual.tuple)["potentials"]}};
  });
}

std::string check(const std::string& instance, const std::string& plan, const std::string& method, std::size_t n_max,
                  const std::string& mode) {
  const Instance inst = load(instance, mode);
  return dispatch(inst, [&]<class T>() {
    const SupportSet gamma = support_of(plan_from_json<T>(parse(plan)));
    if (method == "exact") return to_json(check_monotone_exact<T>(gamma, inst));
    if (method == "brute") return to_json(check_monotone_bruteforce<T>(gamma, inst, n_max));
    throw Error(Errc::Parse, "method must be 'exact' or 'brute'");
  });
}

std::string tuple(const std::string& instance, const std::string& support, std::optional<Index> base,
                  const std::string& mode) {
  const Instance inst = load(instance, mode);
  const SupportSet gamma = support_from_json(parse(support), inst.arithmetic);
  if (gamma.empty()) throw Error(Errc::InvalidPlan, "support is empty");
  const Index x0 = base ? *base : *gamma.points.begin();
  return dispatch(inst, [&]<class T>() {
    auto phi = splitting_for_finite<T>(gamma, inst);
    phi = extend_by_infconvolution(phi, gamma, inst);
    Json out = to_json(normalize_at_base(phi, x0, gamma, inst));
    out["base"] = x0;
    return out;
  });
}

std::string certify(const std::string& instance, const std::string& plan, const std::string& mode) {
  const Instance inst = load(instance, mode);
  return dispatch(inst, [&]<class T>() { return to_json(certify_plan(inst, plan_from_json<T>(parse(plan)))); });
}

std::string audit(const std::string& instance, const std::string& plan, const std::string& cert,
                  const std::string& mode) {
  const Instance inst = load(instance, mode);
  return dispatch(inst, [&]<class T>() {
    const auto report = audit_certificate(inst, plan_from_json<T>(parse(plan)),
                                          certificate_from_json<T>(parse(cert)));
    return Json{{"ok", report.ok()}, {"failures", report.failures}};
  });
}

std::string gen(std::size_t dims, std::vector<std::size_t> sizes, const std::string& cost, std::uint64_t seed,
                const std::string& mode) {
  if (sizes.empty()) sizes.assign(dims, 2);
  return to_json(gen_instance(sizes.size(), sizes, cost, seed, mode.empty() ? Arithmetic::Rational : parse_arithmetic(mode)))
      .dump();
}

std::string suite(std::size_t count, std::uint64_t seed, const std::string& mode, std::size_t min_dims,
                  std::size_t max_dims, std::size_t max_size, std::vector<std::string> costs, bool point_marginals) {
  SuiteConfig config;
  config.seed = seed;
  config.mode = mode.empty() ? Arithmetic::Rational : parse_arithmetic(mode);
  config.min_dims = min_dims;
  config.max_dims = max_dims;
  config.max_size = max_size;
  if (!costs.empty()) config.costs = std::move(costs);
  config.point_marginals = point_marginals;
  return run_suite(count, config).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-marginal optimal transport: solving, monotonicity checks and optimality certificates";

  static py::handle mmot_error = py::register_exception<Error>(m, "MmotError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Json::exception& e) {
      PyErr_SetString(mmot_error.ptr(), (std::string("Parse: ") + e.what()).c_str());
    }
  });

  m.def("solve", &solve, py::arg("instance"), py::arg("mode") = "", py::arg("grid_cap") = kDefaultGridCap);
  m.def("solve_dual", &solve_dual_json, py::arg("instance"), py::arg("mode") = "",
        py::arg("grid_cap") = kDefaultGridCap);
  m.def("check", &check, py::arg("instance"), py::arg("plan"), py::arg("method") = "exact", py::arg("n_max") = 3,
        py::arg("mode") = "");
  m.def("tuple", &tuple, py::arg("instance"), py::arg("support"), py::arg("base") = std::nullopt,
        py::arg("mode") = "");
  m.def("certify", &certify, py::arg("instance"), py::arg("plan"), py::arg("mode") = "");
  m.def("audit", &audit, py::arg("instance"), py::arg("plan"), py::arg("certificate"), py::arg("mode") = "");
  m.def("gen", &gen, py::arg("dims") = 2, py::arg("sizes") = std::vector<std::size_t>{}, py::arg("cost") = "random",
        py::arg("seed") = 1, py::arg("mode") = "");
  m.def("suite", &suite, py::arg("count"), py::arg("seed") = 1, py::arg("mode") = "", py::arg("min_dims") = 2,
        py::arg("max_dims") = 4, py::arg("max_size") = 4, py::arg("costs") = std::vector<std::string>{},
        py::arg("point_marginals") = false);
  m.def("validate", [](const std::string& instance) { return validate_instance(instance_from_json(parse(instance))); },
        py::arg("instance"));
  m.def("instance_hash", [](const std::string& instance) { return instance_hash(instance_from_json(parse(instance))); },
        py::arg("instance"));
}
