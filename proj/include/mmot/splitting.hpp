#pragma once

#include "mmot/core.hpp"
#include "mmot/monotone.hpp"

namespace mmot {

/// Thrown by splitting_for_finite when G admits no splitting tuple.
template <class T>
class NotMonotoneError : public Error {
 public:
  explicit NotMonotoneError(RearrangementWitness<T> witness)
      : Error(Errc::NotMonotone, "support is not c-cyclically monotone"), witness_(std::move(witness)) {}

  const RearrangementWitness<T>& witness() const { return witness_; }

 private:
  RearrangementWitness<T> witness_;
};

enum class VerifyDomain { Projections, Ambient };

template <class T>
struct TupleViolation {
  enum class Kind { Inequality, Equality };
  Kind kind;
  Index cell;
  Extended<T> sum;  // phi_1(x_1) + ... + phi_d(x_d)
  T cost{};
};

template <class T>
struct TupleReport {
  std::vector<TupleViolation<T>> violations;
  std::size_t cells_checked = 0;

  bool ok() const { return violations.empty(); }
};

/// A tuple on the product of G's projections with equality on G, from the
/// splitting feasibility system. Throws NotMonotoneError<T> with a witness.
template <class T>
SplittingTuple<T> splitting_for_finite(const SupportSet& g, const Instance& instance,
                                       const MonotoneOptions& options = {});

/// Replaces phi_1, then phi_2, ..., phi_d by the minimum over the full grid
/// fiber of c minus the other (current) potentials. The result is feasible on
/// the whole grid and keeps equality on G. Throws InputNotSplitting.
template <class T>
SplittingTuple<T> extend_by_infconvolution(const SplittingTuple<T>& tuple, const SupportSet& g,
                                           const Instance& instance);

/// Shifts constants so that phi_1(x0_1) = c(x0) and phi_i(x0_i) = 0 for i >= 2.
template <class T>
SplittingTuple<T> normalize_at_base(const SplittingTuple<T>& tuple, const Index& base, const SupportSet& g,
                                    const Instance& instance);

/// Checks sum phi <= c on the domain and sum phi = c on G, reporting every bad cell.
/// A -inf sum satisfies every inequality and violates every equality.
template <class T>
TupleReport<T> verify_tuple(const SplittingTuple<T>& tuple, const SupportSet& g, const Instance& instance,
                            VerifyDomain domain);

/// c(x0_1, ..., x0_{i-1}, x_i, x0_{i+1}, ..., x0_d) for every point x_i of axis i.
template <class T>
std::vector<std::vector<T>> base_fiber_costs(const Index& base, const Instance& instance);

}  // namespace mmot
