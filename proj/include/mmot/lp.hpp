#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mmot/numeric.hpp"

namespace mmot::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class Bound { NonNegative, Free };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status status);

template <class T>
struct Constraint {
  std::vector<T> coeffs;
  Relation relation = Relation::Equal;
  T rhs{};
};

template <class T>
struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<T> objective;
  std::vector<Constraint<T>> constraints;
  std::vector<Bound> bounds;  // empty means every variable is NonNegative

  std::size_t variables() const { return objective.size(); }
  Bound bound(std::size_t j) const { return bounds.empty() ? Bound::NonNegative : bounds[j]; }
};

/// Result of solve_lp.
///
/// Dual signs follow the Lagrangian convention of the stated sense. For Minimize:
/// multipliers are >= 0 on >= rows, <= 0 on <= rows, free on = rows, and
/// c_j - y^T A_j is >= 0 for nonnegative variables and 0 for free ones. For
/// Maximize every inequality flips. In both cases y^T b equals the objective.
///
/// The infeasibility certificate y (present iff Infeasible) satisfies
/// y_i <= 0 on <= rows, y_i >= 0 on >= rows, y^T A_j <= 0 for nonnegative
/// variables, y^T A_j = 0 for free variables, and y^T b > 0.
template <class T>
struct Outcome {
  Status status = Status::Infeasible;
  std::vector<T> primal;
  std::vector<T> dual;
  T objective_value{};
  std::vector<T> infeasibility_certificate;
  std::size_t pivots = 0;
};

struct Options {
  std::size_t iteration_limit = 1'000'000;  // enforced in float mode only
  double pivot_tolerance = Tolerance::kPivot;
  int verbosity = 0;          // > 0 dumps each tableau to `log`
  std::ostream* log = nullptr;
};

/// Two-phase primal simplex with Bland's rule.
/// Throws DimensionMismatch on malformed programs and IterationLimit (float mode).
template <class T>
Outcome<T> solve_lp(const LinearProgram<T>& program, const Options& options = {});

template <class T>
struct Feasibility {
  bool feasible = false;
  std::vector<T> point;        // when feasible
  std::vector<T> certificate;  // when infeasible, same form as Outcome::infeasibility_certificate
};

template <class T>
Feasibility<T> check_feasibility(const std::vector<Constraint<T>>& constraints, const std::vector<Bound>& bounds,
                                 std::size_t variables, const Options& options = {});

/// Checks the Farkas conditions above by direct multiplication.
template <class T>
bool verify_farkas(const std::vector<Constraint<T>>& constraints, const std::vector<Bound>& bounds,
                   std::size_t variables, const std::vector<T>& certificate, double tol = Tolerance::kFeasibility);

}  // namespace mmot::lp
