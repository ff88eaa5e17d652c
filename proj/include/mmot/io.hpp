#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mmot/core.hpp"
#include "mmot/monotone.hpp"
#include "mmot/solver.hpp"

namespace mmot {

using Json = nlohmann::json;

// Instance format:
//   {"spaces":[{"points":[{"label":str,"coord":[num,...]?},...]},...],
//    "marginals":[[num|"p/q",...],...],
//    "cost":{"tensor":[...nested...]} | {"builtin":str,"params":{...}},
//    "arithmetic":"rational"|"float"}
// Rationals are written as "p/q" strings; decimal numbers are read exactly (0.1 -> 1/10).

Instance instance_from_json(const Json& j);
Json to_json(const Instance& instance);

/// Hex SHA-256 of the canonical instance serialization.
std::string instance_hash(const Instance& instance);

template <class T>
Json scalar_to_json(const T& value);
template <class T>
T scalar_from_json(const Json& j);

template <class T>
Json extended_to_json(const Extended<T>& value);  // -inf is written as "-inf"
template <class T>
Extended<T> extended_from_json(const Json& j);

// Plan format: {"entries":[{"idx":[int,...],"mass":num|"p/q"},...]}
template <class T>
TransportPlan<T> plan_from_json(const Json& j);
template <class T>
Json to_json(const TransportPlan<T>& plan);

/// Accepts a plan ({"entries":...}, support = positive masses) or {"points":[[int,...],...]}.
SupportSet support_from_json(const Json& j, Arithmetic mode);
Json to_json(const SupportSet& support);

Index index_from_json(const Json& j);

template <class T>
Json to_json(const SplittingTuple<T>& tuple);
template <class T>
SplittingTuple<T> tuple_from_json(const Json& j);

template <class T>
Json to_json(const RearrangementWitness<T>& witness);
template <class T>
RearrangementWitness<T> witness_from_json(const Json& j);

template <class T>
Json to_json(const MonotonicityVerdict<T>& verdict);

/// {"value","plan","potentials","gap"}
template <class T>
Json to_json(const SolveResult<T>& result);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace mmot
