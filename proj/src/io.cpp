#include "mmot/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mmot {

namespace {

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<unsigned long long>()), 10));
  if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>()), 10));
  if (j.is_number_float()) return decimal_rational(j.get<double>());
  throw Error(Errc::Parse, "expected a number or \"p/q\" string, got " + j.dump());
}

std::size_t size_from_json(const Json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw Error(Errc::Parse, "expected a nonnegative integer, got " + j.dump());
  return j.get<std::size_t>();
}

void flatten_tensor(const Json& j, const std::vector<std::size_t>& shape, std::size_t depth,
                    std::vector<Rational>& out) {
  if (depth == shape.size()) {
    out.push_back(rational_from_json(j));
    return;
  }
  if (!j.is_array() || j.size() != shape[depth])
    throw Error(Errc::Parse, "cost tensor axis " + std::to_string(depth) + " must have " +
                                 std::to_string(shape[depth]) + " entries");
  for (const auto& sub : j) flatten_tensor(sub, shape, depth + 1, out);
}

Json nest_tensor(const std::vector<Rational>& values, const std::vector<std::size_t>& shape, std::size_t depth,
                 std::size_t& cursor) {
  if (depth == shape.size()) return format_rational(values.at(cursor++));
  Json arr = Json::array();
  for (std::size_t p = 0; p < shape[depth]; ++p) arr.push_back(nest_tensor(values, shape, depth + 1, cursor));
  return arr;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Instance instance_from_json(const Json& j) {
  Instance inst;
  if (j.contains("arithmetic")) inst.arithmetic = parse_arithmetic(j.at("arithmetic").get<std::string>());

  const Json& spaces = require(j, "spaces");
  if (!spaces.is_array()) throw Error(Errc::Parse, "'spaces' must be an array");
  for (const auto& sj : spaces) {
    Space space;
    const Json& pts = sj.is_array() ? sj : require(sj, "points");
    std::size_t p = 0;
    for (const auto& pj : pts) {
      Point point;
      if (pj.is_object()) {
        point.label = pj.contains("label") ? pj.at("label").get<std::string>() : std::to_string(p);
        if (pj.contains("coord") && !pj.at("coord").is_null())
          for (const auto& x : pj.at("coord")) point.coord.push_back(rational_from_json(x));
      } else if (pj.is_string()) {
        point.label = pj.get<std::string>();
      } else {
        throw Error(Errc::Parse, "point must be an object or a label");
      }
      space.points.push_back(std::move(point));
      ++p;
    }
    inst.spaces.push_back(std::move(space));
  }

  for (const auto& mj : require(j, "marginals")) {
    std::vector<Rational> weights;
    for (const auto& w : mj) weights.push_back(rational_from_json(w));
    inst.marginals.push_back(std::move(weights));
  }

  const Json& cost = require(j, "cost");
  if (cost.contains("tensor")) {
    TensorCost tensor;
    flatten_tensor(cost.at("tensor"), inst.shape(), 0, tensor.values);
    inst.cost = std::move(tensor);
  } else if (cost.contains("builtin")) {
    BuiltinCost spec;
    spec.kind = parse_builtin(cost.at("builtin").get<std::string>());
    if (cost.contains("params")) {
      const Json& params = cost.at("params");
      if (params.contains("floor")) spec.floor = params.at("floor").get<double>();
      if (params.contains("delta")) spec.floor = params.at("delta").get<double>();
      if (params.contains("weights"))
        for (const auto& w : params.at("weights")) spec.weights.push_back(rational_from_json(w));
      if (params.contains("offset")) spec.offset = rational_from_json(params.at("offset"));
    }
    if (spec.kind == BuiltinKind::Product && spec.weights.empty()) {
      // Default weight vector: all ones in the coordinate dimension.
      std::size_t dim = 0;
      if (!inst.spaces.empty() && !inst.spaces[0].points.empty()) dim = inst.spaces[0].points[0].coord.size();
      spec.weights.assign(dim, Rational(1));
    }
    inst.cost = std::move(spec);
    resolve_cost_offset(inst);
  } else {
    throw Error(Errc::Parse, "cost must contain 'tensor' or 'builtin'");
  }
  return inst;
}

Json to_json(const Instance& instance) {
  Json j;
  j["arithmetic"] = std::string(to_string(instance.arithmetic));
  Json spaces = Json::array();
  for (const auto& space : instance.spaces) {
    Json pts = Json::array();
    for (const auto& p : space.points) {
      Json pj;
      pj["label"] = p.label;
      if (!p.coord.empty()) {
        Json coord = Json::array();
        for (const auto& x : p.coord) coord.push_back(format_rational(x));
        pj["coord"] = coord;
      }
      pts.push_back(pj);
    }
    spaces.push_back({{"points", pts}});
  }
  j["spaces"] = spaces;
  Json marginals = Json::array();
  for (const auto& m : instance.marginals) {
    Json arr = Json::array();
    for (const auto& w : m) arr.push_back(format_rational(w));
    marginals.push_back(arr);
  }
  j["marginals"] = marginals;
  if (const auto* tensor = std::get_if<TensorCost>(&instance.cost)) {
    std::size_t cursor = 0;
    j["cost"] = {{"tensor", nest_tensor(tensor->values, instance.shape(), 0, cursor)}};
  } else {
    const auto& spec = std::get<BuiltinCost>(instance.cost);
    Json params = Json::object();
    if (spec.kind == BuiltinKind::Coulomb) params["floor"] = spec.floor;
    if (spec.kind == BuiltinKind::Product) {
      Json w = Json::array();
      for (const auto& x : spec.weights) w.push_back(format_rational(x));
      params["weights"] = w;
      if (spec.offset) params["offset"] = format_rational(*spec.offset);
    }
    j["cost"] = {{"builtin", std::string(to_string(spec.kind))}, {"params", params}};
  }
  return j;
}

std::string instance_hash(const Instance& instance) {
  const std::string text = to_json(instance).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::Parse, "SHA-256 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

template <>
Json scalar_to_json<Rational>(const Rational& value) {
  return format_rational(value);
}
template <>
Json scalar_to_json<double>(const double& value) {
  return value;
}
template <>
Rational scalar_from_json<Rational>(const Json& j) {
  return rational_from_json(j);
}
template <>
double scalar_from_json<double>(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return parse_rational(s).get_d();
  }
  throw Error(Errc::Parse, "expected a number, got " + j.dump());
}

template <class T>
Json extended_to_json(const Extended<T>& value) {
  return value ? scalar_to_json<T>(*value) : Json("-inf");
}

template <class T>
Extended<T> extended_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "-inf") return std::nullopt;
  return scalar_from_json<T>(j);
}

Index index_from_json(const Json& j) {
  if (!j.is_array()) throw Error(Errc::Parse, "index must be an array, got " + j.dump());
  Index cell;
  for (const auto& x : j) cell.push_back(size_from_json(x));
  return cell;
}

template <class T>
TransportPlan<T> plan_from_json(const Json& j) {
  TransportPlan<T> plan;
  for (const auto& e : require(j, "entries")) {
    Index cell = index_from_json(require(e, "idx"));
    T mass = scalar_from_json<T>(require(e, "mass"));
    auto [it, inserted] = plan.entries.emplace(cell, mass);
    if (!inserted) it->second += mass;
  }
  return plan;
}

template <class T>
Json to_json(const TransportPlan<T>& plan) {
  Json entries = Json::array();
  for (const auto& [cell, mass] : plan.entries) entries.push_back({{"idx", cell}, {"mass", scalar_to_json<T>(mass)}});
  return {{"entries", entries}};
}

SupportSet support_from_json(const Json& j, Arithmetic mode) {
  if (j.contains("entries")) {
    if (mode == Arithmetic::Rational) return support_of(plan_from_json<Rational>(j));
    return support_of(plan_from_json<double>(j));
  }
  SupportSet support;
  for (const auto& p : require(j, "points")) support.points.insert(index_from_json(p));
  return support;
}

Json to_json(const SupportSet& support) {
  Json pts = Json::array();
  for (const auto& cell : support.points) pts.push_back(cell);
  return {{"points", pts}};
}

template <class T>
Json to_json(const SplittingTuple<T>& tuple) {
  Json pots = Json::array();
  for (const auto& axis : tuple.potentials) {
    Json arr = Json::array();
    for (const auto& v : axis) arr.push_back(extended_to_json<T>(v));
    pots.push_back(arr);
  }
  return {{"potentials", pots}, {"domain", tuple.domain == TupleDomain::OnAmbient ? "ambient" : "projections"}};
}

template <class T>
SplittingTuple<T> tuple_from_json(const Json& j) {
  SplittingTuple<T> tuple;
  for (const auto& axis : require(j, "potentials")) {
    tuple.potentials.emplace_back();
    for (const auto& v : axis) tuple.potentials.back().push_back(extended_from_json<T>(v));
  }
  tuple.domain = j.value("domain", std::string("ambient")) == "ambient" ? TupleDomain::OnAmbient
                                                                        : TupleDomain::OnProjections;
  return tuple;
}

template <class T>
Json to_json(const RearrangementWitness<T>& witness) {
  Json pts = Json::array();
  for (const auto& p : witness.points) pts.push_back(p);
  return {{"n", witness.points.size()},
          {"points", pts},
          {"permutations", witness.permutations},
          {"cost_before", scalar_to_json<T>(witness.cost_before)},
          {"cost_after", scalar_to_json<T>(witness.cost_after)}};
}

template <class T>
RearrangementWitness<T> witness_from_json(const Json& j) {
  RearrangementWitness<T> w;
  for (const auto& p : require(j, "points")) w.points.push_back(index_from_json(p));
  for (const auto& perm : require(j, "permutations")) {
    w.permutations.emplace_back();
    for (const auto& x : perm) w.permutations.back().push_back(size_from_json(x));
  }
  w.cost_before = scalar_from_json<T>(require(j, "cost_before"));
  w.cost_after = scalar_from_json<T>(require(j, "cost_after"));
  return w;
}

template <class T>
Json to_json(const MonotonicityVerdict<T>& verdict) {
  Json j;
  j["result"] = to_string(verdict.result);
  j["method"] = verdict.method == CheckMethod::Exact ? "exact" : "brute";
  if (verdict.method == CheckMethod::BruteForce) j["n_max"] = verdict.n_max;
  if (verdict.tuple) j["tuple"] = to_json(*verdict.tuple);
  if (verdict.witness) j["witness"] = to_json(*verdict.witness);
  return j;
}

template <class T>
Json to_json(const SolveResult<T>& result) {
  Json pots = to_json(result.dual_tuple).at("potentials");
  return {{"value", scalar_to_json<T>(result.optimal_value)},
          {"plan", to_json(result.optimal_plan)},
          {"potentials", pots},
          {"gap", scalar_to_json<T>(result.gap)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Parse, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(Errc::Parse, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Parse, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

#define MMOT_INSTANTIATE_IO(T)                                                 \
  template Json extended_to_json<T>(const Extended<T>&);                       \
  template Extended<T> extended_from_json<T>(const Json&);                     \
  template TransportPlan<T> plan_from_json<T>(const Json&);                    \
  template Json to_json<T>(const TransportPlan<T>&);                           \
  template Json to_json<T>(const SplittingTuple<T>&);                          \
  template SplittingTuple<T> tuple_from_json<T>(const Json&);                  \
  template Json to_json<T>(const RearrangementWitness<T>&);                    \
  template RearrangementWitness<T> witness_from_json<T>(const Json&);          \
  template Json to_json<T>(const MonotonicityVerdict<T>&);                     \
  template Json to_json<T>(const SolveResult<T>&);

MMOT_INSTANTIATE_IO(Rational)
MMOT_INSTANTIATE_IO(double)

}  // namespace mmot
