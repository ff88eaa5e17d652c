#pragma once

#include <optional>
#include <utility>

#include "mmot/core.hpp"
#include "mmot/lp.hpp"

namespace mmot {

struct MonotoneOptions {
  std::size_t grid_cap = kDefaultGridCap;       // cap on the product of projections
  std::size_t evaluation_budget = 10'000'000;   // brute force cost evaluations
  std::size_t witness_cap = 1'000'000;          // longest footnote expansion accepted
  lp::Options lp;
};

enum class CheckMethod { Exact, BruteForce };
enum class MonotoneResult { Monotone, Violated, Inconclusive };

const char* to_string(MonotoneResult result);

template <class T>
struct MonotonicityVerdict {
  MonotoneResult result = MonotoneResult::Inconclusive;
  CheckMethod method = CheckMethod::Exact;
  std::size_t n_max = 0;                         // BruteForce only
  std::optional<SplittingTuple<T>> tuple;        // Monotone: certified on the product of projections
  std::optional<RearrangementWitness<T>> witness;  // Violated
};

/// Splitting feasibility system over the product of Gamma's projections:
/// equality rows on Gamma, <= rows elsewhere, one free variable per projected point.
/// Rows follow the lexicographic order of the cells.
template <class T>
struct SplittingSystem {
  std::vector<std::vector<std::size_t>> projections;
  std::vector<std::size_t> var_offset;  // first variable of each axis
  std::vector<Index> row_cells;
  std::vector<lp::Constraint<T>> constraints;
  std::vector<lp::Bound> bounds;

  std::size_t variables() const { return bounds.size(); }
  /// Variable index of phi_k at grid point p (p must be in the k-th projection).
  std::size_t variable(std::size_t k, std::size_t p) const;
};

template <class T>
SplittingSystem<T> build_splitting_system(const SupportSet& gamma, const Instance& instance,
                                          std::size_t grid_cap = kDefaultGridCap);

/// Decides c-cyclical monotonicity of Gamma exactly through LP feasibility of the
/// splitting system. A Violated verdict carries a witness built from the Farkas
/// certificate. In float mode the witness is rebuilt from the exact system.
template <class T>
MonotonicityVerdict<T> check_monotone_exact(const SupportSet& gamma, const Instance& instance,
                                            const MonotoneOptions& options = {});

/// Searches multisets of n <= n_max points of Gamma (with repetition) and all
/// permutation tuples for a strict improvement. Refutation only: never returns Monotone.
template <class T>
MonotonicityVerdict<T> check_monotone_bruteforce(const SupportSet& gamma, const Instance& instance,
                                                 std::size_t n_max = 3, const MonotoneOptions& options = {});

/// Two measures with identical marginals, alpha concentrated on Gamma, and
/// the integral of c strictly lower under alpha_prime.
template <class T>
struct ImprovingPair {
  Measure<T> alpha;
  Measure<T> alpha_prime;
};

/// Reads an improving pair off a Farkas certificate y of the splitting system:
/// alpha is the positive part of y (which lives on Gamma), alpha_prime the negative
/// part, both scaled to unit mass.
template <class T>
ImprovingPair<T> improving_pair_from_certificate(const std::vector<T>& certificate, const SupportSet& gamma,
                                                 const Instance& instance);

/// Multiplies both measures by tau (the product of the distinct denominators of
/// their masses), expands them into n point lists, and matches coordinates axis
/// by axis to obtain sigma_2..sigma_d. The returned sums equal tau times the integrals.
RearrangementWitness<Rational> extract_witness(const Measure<Rational>& alpha, const Measure<Rational>& alpha_prime,
                                               const Instance& instance, std::size_t witness_cap = 1'000'000);

/// tau for a pair of rational measures.
mpz_class denominator_product(const Measure<Rational>& alpha, const Measure<Rational>& alpha_prime);

}  // namespace mmot
