#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "mmot/core.hpp"
#include "mmot/io.hpp"

namespace mmot {

/// Seeded source of integers. Draws go through the raw engine so that output is
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  /// Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Random instance. cost_name is "random" (rational tensor, numerators 0..32,
/// denominators 1..16) or a builtin name (points equispaced on [0,1]).
/// Marginals are random positive rational simplex points.
Instance gen_instance(std::size_t dims, const std::vector<std::size_t>& sizes, std::string_view cost_name,
                      std::uint64_t seed, Arithmetic mode = Arithmetic::Rational);

/// Same as gen_instance, drawing from an existing generator.
Instance gen_instance(std::size_t dims, const std::vector<std::size_t>& sizes, std::string_view cost_name, Rng& rng,
                      Arithmetic mode = Arithmetic::Rational);

/// Replaces every marginal with a point mass at a random point.
void make_point_marginals(Instance& instance, Rng& rng);

struct SuiteConfig {
  std::uint64_t seed = 1;
  Arithmetic mode = Arithmetic::Rational;
  std::size_t min_dims = 2;
  std::size_t max_dims = 4;
  std::size_t max_size = 4;
  std::vector<std::string> costs = {"random"};
  bool point_marginals = false;
  std::size_t grid_cap = kDefaultGridCap;
};

struct SuiteReport {
  std::size_t instances = 0;
  std::size_t certified = 0;
  std::size_t audited = 0;
  std::size_t refuted = 0;
  std::size_t perturbation_skipped = 0;
  std::vector<std::string> failures;

  Json to_json() const;
};

/// Per instance: solve, certify and audit the optimal plan, swap two support
/// atoms' partners to get a strictly worse plan, and confirm its refutation.
SuiteReport run_suite(std::size_t count, const SuiteConfig& config);

/// First strictly cost-increasing exchange of axis-j coordinates between two
/// support atoms (moving the smaller of their masses), if any exists.
template <class T>
std::optional<TransportPlan<T>> swap_perturbation(const Instance& instance, const TransportPlan<T>& plan);

}  // namespace mmot
