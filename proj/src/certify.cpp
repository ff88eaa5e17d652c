#include "mmot/certify.hpp"

#include <algorithm>
#include <sstream>

#include "mmot/splitting.hpp"

namespace mmot {

const char* to_string(Verdict verdict) { return verdict == Verdict::Optimal ? "optimal" : "not_monotone"; }

template <class T>
Certificate<T> certify_plan(const Instance& instance, const TransportPlan<T>& plan, const CertifyOptions& options) {
  require_valid(instance);
  const SupportSet gamma = support_of(plan);
  if (gamma.empty()) throw Error(Errc::InvalidPlan, "plan has empty support");

  Certificate<T> cert;
  cert.instance_hash = instance_hash(instance);
  cert.plan_cost = plan_cost(instance, plan);
  cert.base_point = *gamma.points.begin();

  auto verdict = check_monotone_exact<T>(gamma, instance, options.monotone);
  if (verdict.result != MonotoneResult::Monotone) {
    cert.verdict = Verdict::NotMonotone;
    cert.witness = std::move(verdict.witness);
    return cert;
  }

  auto tuple = extend_by_infconvolution(*verdict.tuple, gamma, instance);
  tuple = normalize_at_base(tuple, cert.base_point, gamma, instance);
  if (!verify_tuple(tuple, gamma, instance, VerifyDomain::Ambient).ok())
    throw Error(Errc::CertificateInvalid, "extended tuple is not splitting on the grid");
  T paired(0);
  for (std::size_t k = 0; k < instance.dims(); ++k) {
    const auto mu = marginal<T>(instance, k);
    for (std::size_t p = 0; p < mu.size(); ++p) paired += *tuple.potentials[k][p] * mu[p];
  }
  if (!near(paired, cert.plan_cost, Tolerance::kFeasibility))
    throw Error(Errc::CertificateInvalid, "plan cost differs from the paired potentials");

  cert.tuple = std::move(tuple);
  cert.verdict = Verdict::Optimal;
  return cert;
}

namespace {

std::string cell_text(const Index& cell) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < cell.size(); ++k) os << (k ? "," : "") << cell[k];
  os << ')';
  return os.str();
}

template <class T>
void audit_optimal(const Instance& instance, const TransportPlan<T>& plan, const SupportSet& support,
                   const Certificate<T>& cert, std::vector<std::string>& failures) {
  const auto shape = instance.shape();
  const auto& phi = cert.tuple.potentials;
  if (phi.size() != shape.size()) {
    failures.push_back("certificate has " + std::to_string(phi.size()) + " potentials");
    return;
  }
  for (std::size_t k = 0; k < shape.size(); ++k)
    if (phi[k].size() != shape[k]) {
      failures.push_back("potential " + std::to_string(k) + " has the wrong length");
      return;
    }

  // (a) and (b): inequality on every cell, equality on the support.
  std::size_t inequality_failures = 0;
  std::size_t equality_failures = 0;
  CellProduct::full(shape).for_each([&](const Index& cell) {
    T sum(0);
    bool finite = true;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      if (!phi[k][cell[k]]) {
        finite = false;
        break;
      }
      sum += *phi[k][cell[k]];
    }
    const T cost = from_rational<T>(cost_eval(instance, cell));
    const bool on_support = support.contains(cell);
    if (finite && !leq(sum, cost, Tolerance::kFeasibility)) {
      if (inequality_failures++ == 0) failures.push_back("sum of potentials exceeds c at " + cell_text(cell));
    } else if (on_support && (!finite || !near(sum, cost, Tolerance::kFeasibility))) {
      if (equality_failures++ == 0) failures.push_back("sum of potentials differs from c on support cell " + cell_text(cell));
    }
  });

  // (c): plan cost = sum_i <phi_i, mu_i>.
  T paired(0);
  bool finite = true;
  for (std::size_t k = 0; k < shape.size(); ++k)
    for (std::size_t p = 0; p < shape[k]; ++p) {
      const Rational& w = instance.marginals[k][p];
      if (sgn(w) == 0) continue;
      if (!phi[k][p]) {
        finite = false;
        continue;
      }
      paired += *phi[k][p] * from_rational<T>(w);
    }
  const T cost = measure_cost(instance, plan.entries);
  if (!finite || !near(paired, cost, Tolerance::kFeasibility))
    failures.push_back("plan cost differs from the paired potentials");

  // Normalization at the base point.
  const Index& base = cert.base_point;
  if (base.size() != shape.size() || !support.contains(base)) {
    failures.push_back("base point is not in the support");
    return;
  }
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const auto& v = phi[k][base[k]];
    const T expected = k == 0 ? from_rational<T>(cost_eval(instance, base)) : T(0);
    if (!v || !near(*v, expected, Tolerance::kFeasibility)) {
      failures.push_back("potential " + std::to_string(k) + " is not normalized at the base point");
      break;
    }
  }
}

template <class T>
void audit_refutation(const Instance& instance, const SupportSet& support, const Certificate<T>& cert,
                      std::vector<std::string>& failures) {
  if (!cert.witness) {
    failures.push_back("refutation carries no witness");
    return;
  }
  const auto& w = *cert.witness;
  const std::size_t n = w.points.size();
  const std::size_t d = instance.dims();
  if (n == 0) {
    failures.push_back("witness has no points");
    return;
  }
  for (const auto& p : w.points)
    if (!support.contains(p)) {
      failures.push_back("witness point " + cell_text(p) + " is outside the support");
      return;
    }
  if (w.permutations.size() + 1 != d) {
    failures.push_back("witness needs " + std::to_string(d - 1) + " permutations");
    return;
  }
  for (const auto& perm : w.permutations) {
    std::vector<std::size_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    bool is_perm = sorted.size() == n;
    for (std::size_t i = 0; is_perm && i < n; ++i) is_perm = sorted[i] == i;
    if (!is_perm) {
      failures.push_back("witness permutation is not a permutation of 0..n-1");
      return;
    }
  }
  const auto [before, after] = witness_costs(instance, w);
  if (!strictly_less(after, before, Tolerance::kImprovement)) failures.push_back("witness does not lower the cost");
  if (!near(before, w.cost_before, Tolerance::kFeasibility) || !near(after, w.cost_after, Tolerance::kFeasibility))
    failures.push_back("witness cost fields do not match recomputed sums");
}

}  // namespace

template <class T>
AuditReport audit_certificate(const Instance& instance, const TransportPlan<T>& plan, const Certificate<T>& cert) {
  AuditReport report;
  auto& failures = report.failures;
  const auto instance_errors = validate_instance(instance);
  if (!instance_errors.empty()) {
    failures.push_back("instance invalid: " + instance_errors.front());
    return report;
  }
  if (cert.instance_hash != instance_hash(instance)) failures.push_back("instance hash mismatch");
  const auto plan_errors = validate_plan(instance, plan);
  if (!plan_errors.empty()) {
    failures.push_back("plan invalid: " + plan_errors.front());
    return report;
  }
  const SupportSet support = support_of(plan);
  if (!near(cert.plan_cost, measure_cost(instance, plan.entries), Tolerance::kFeasibility))
    failures.push_back("recorded plan cost is wrong");
  if (cert.verdict == Verdict::Optimal)
    audit_optimal(instance, plan, support, cert, failures);
  else
    audit_refutation(instance, support, cert, failures);
  return report;
}

template <class T>
Json to_json(const Certificate<T>& cert) {
  Json j;
  j["hash"] = cert.instance_hash;
  j["value"] = scalar_to_json<T>(cert.plan_cost);
  j["base"] = cert.base_point;
  j["verdict"] = to_string(cert.verdict);
  j["arithmetic"] = is_exact_v<T> ? "rational" : "float";
  j["potentials"] = to_json(cert.tuple).at("potentials");
  if (cert.witness) j["witness"] = to_json(*cert.witness);
  return j;
}

template <class T>
Certificate<T> certificate_from_json(const Json& j) {
  Certificate<T> cert;
  try {
    cert.instance_hash = j.at("hash").get<std::string>();
    cert.plan_cost = scalar_from_json<T>(j.at("value"));
    cert.base_point = index_from_json(j.at("base"));
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "optimal")
      cert.verdict = Verdict::Optimal;
    else if (verdict == "not_monotone")
      cert.verdict = Verdict::NotMonotone;
    else
      throw Error(Errc::Parse, "unknown verdict '" + verdict + "'");
    cert.tuple = tuple_from_json<T>(Json{{"potentials", j.at("potentials")}, {"domain", "ambient"}});
    if (j.contains("witness")) cert.witness = witness_from_json<T>(j.at("witness"));
  } catch (const Json::exception& e) {
    throw Error(Errc::Parse, std::string("certificate: ") + e.what());
  }
  return cert;
}

#define MMOT_INSTANTIATE_CERTIFY(T)                                                                  \
  template Certificate<T> certify_plan<T>(const Instance&, const TransportPlan<T>&, const CertifyOptions&); \
  template AuditReport audit_certificate<T>(const Instance&, const TransportPlan<T>&, const Certificate<T>&); \
  template Json to_json<T>(const Certificate<T>&);                                                   \
  template Certificate<T> certificate_from_json<T>(const Json&);

MMOT_INSTANTIATE_CERTIFY(Rational)
MMOT_INSTANTIATE_CERTIFY(double)

}  // namespace mmot
