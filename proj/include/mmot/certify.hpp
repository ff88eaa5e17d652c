#pragma once

#include <optional>
#include <string>

#include "mmot/core.hpp"
#include "mmot/io.hpp"
#include "mmot/monotone.hpp"

namespace mmot {

enum class Verdict { Optimal, NotMonotone };

const char* to_string(Verdict verdict);

/// Offline-checkable optimality proof for a plan, or its refutation.
template <class T>
struct Certificate {
  std::string instance_hash;
  T plan_cost{};
  SplittingTuple<T> tuple;  // OnAmbient; empty when NotMonotone
  Index base_point;         // lexicographically smallest support cell
  Verdict verdict = Verdict::Optimal;
  std::optional<RearrangementWitness<T>> witness;
};

struct CertifyOptions {
  MonotoneOptions monotone;
};

/// Support -> exact monotonicity -> inf-convolution extension -> normalization
/// at the smallest support cell -> value and feasibility checks.
template <class T>
Certificate<T> certify_plan(const Instance& instance, const TransportPlan<T>& plan, const CertifyOptions& options = {});

struct AuditReport {
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Re-checks a certificate from first principles without solving anything.
/// Optimal: hash, base point in the support and normalized, sum phi <= c on the
/// whole grid, equality on the support, plan cost = sum_i <phi_i, mu_i>.
/// NotMonotone: hash, witness points in the support, strict improvement.
template <class T>
AuditReport audit_certificate(const Instance& instance, const TransportPlan<T>& plan, const Certificate<T>& certificate);

// {"hash","value","base","potentials","verdict","witness"?,"arithmetic"}
template <class T>
Json to_json(const Certificate<T>& certificate);
template <class T>
Certificate<T> certificate_from_json(const Json& j);

}  // namespace mmot
