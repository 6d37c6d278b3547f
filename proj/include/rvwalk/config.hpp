#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rvwalk/errors.hpp"
#include "rvwalk/model.hpp"
#include "rvwalk/sets.hpp"

namespace rvwalk {

using Json = nlohmann::json;

namespace cfg {

inline const Json& need(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  require(it != j.end(), Errc::config_error, "missing key '" + key + "' in " + where);
  return *it;
}

inline double number(const Json& j, const std::string& where) {
  require(j.is_number(), Errc::config_error, where + " must be a number");
  return j.get<double>();
}

// A bound may be a number, null (unbounded on that side), or "inf"/"-inf".
inline double bound(const Json& j, const std::string& where, double null_means) {
  if (j.is_null()) return null_means;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
    fail(Errc::config_error, where + ": unrecognized bound '" + s + "'");
  }
  return number(j, where);
}

inline Vec vector(const Json& j, const std::string& where) {
  require(j.is_array() && !j.empty(), Errc::config_error, where + " must be a nonempty array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(number(e, where + " entry"));
  return v;
}

inline Vec bounds_vector(const Json& j, const std::string& where, double null_means) {
  require(j.is_array() && !j.empty(), Errc::config_error, where + " must be a nonempty array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(bound(e, where + " entry", null_means));
  return v;
}

}  // namespace cfg

inline RegVarModel parse_model(const Json& j) {
  require(j.is_object(), Errc::config_error, "model block must be an object");
  const double alpha = cfg::number(cfg::need(j, "alpha", "model"), "model.alpha");

  const Json& atoms_json = cfg::need(j, "atoms", "model");
  require(atoms_json.is_array() && !atoms_json.empty(), Errc::config_error,
          "model.atoms must be a nonempty array of [direction, weight] pairs");
  std::vector<std::pair<Vec, double>> atoms;
  double weight_sum = 0.0;
  for (const auto& entry : atoms_json) {
    require(entry.is_array() && entry.size() == 2, Errc::config_error,
            "each atom must be a [direction, weight] pair");
    Vec dir = cfg::vector(entry[0], "atom direction");
    const double w = cfg::number(entry[1], "atom weight");
    weight_sum += w;
    atoms.emplace_back(std::move(dir), w);
  }
  require(std::abs(weight_sum - 1.0) <= 1e-9, Errc::config_error,
          "atom weights must sum to 1 (got " + std::to_string(weight_sum) + ")");

  Centering mode = alpha > 1.0 ? Centering::mean_zero : Centering::none;
  if (j.contains("centering")) {
    const std::string c = j.at("centering").get<std::string>();
    if (c == "mean-zero")
      mode = Centering::mean_zero;
    else if (c == "none")
      mode = Centering::none;
    else
      fail(Errc::config_error, "model.centering must be 'mean-zero' or 'none'");
  }
  const double noise = j.contains("noise_radius")
                           ? cfg::number(j.at("noise_radius"), "model.noise_radius")
                           : 0.0;
  return make_model(alpha, atoms, mode, noise);
}

inline StarSet parse_set(const Json& j, const RegVarModel& model) {
  require(j.is_object(), Errc::config_error, "set block must be an object");
  const std::string shape = cfg::need(j, "shape", "set").get<std::string>();
  if (shape == "half-space") {
    return StarSet::half_space(cfg::vector(cfg::need(j, "d", "half-space"), "half-space.d"),
                               cfg::number(cfg::need(j, "a", "half-space"), "half-space.a"));
  }
  if (shape == "box") {
    return StarSet::box(
        cfg::bounds_vector(cfg::need(j, "lower", "box"), "box.lower", -kInf),
        cfg::bounds_vector(cfg::need(j, "upper", "box"), "box.upper", kInf));
  }
  if (shape == "ball-complement") {
    const auto dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : model.dimension();
    return StarSet::ball_complement(
        dim, cfg::number(cfg::need(j, "radius", "ball-complement"), "ball-complement.radius"));
  }
  if (shape == "cone-complement") {
    Vec c = cfg::vector(cfg::need(j, "c", "cone-complement"), "cone-complement.c");
    const double delta = j.contains("delta")
                             ? cfg::number(j.at("delta"), "cone-complement.delta")
                             : default_cone_delta(model, c);
    return StarSet::cone_complement(std::move(c), delta);
  }
  if (shape == "box-complement") {
    return StarSet::box_complement(
        cfg::vector(cfg::need(j, "upper", "box-complement"), "box-complement.upper"));
  }
  if (shape == "full-space") {
    const auto dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : model.dimension();
    return StarSet::full_space(dim);
  }
  fail(Errc::config_error, "unknown set shape '" + shape + "'");
}

inline ScalingSchedule parse_schedule(const Json& root) {
  ScalingSchedule s = ScalingSchedule::linear(1.0);
  if (!root.contains("schedule")) return s;
  const Json& j = root.at("schedule");
  require(j.is_object(), Errc::config_error, "schedule block must be an object");
  if (j.contains("lambda")) {
    const std::string rule = j.at("lambda").get<std::string>();
    if (rule == "linear")
      s = ScalingSchedule::linear(j.contains("c") ? cfg::number(j.at("c"), "schedule.c") : 1.0);
    else if (rule == "sqrt-nlogn")
      s = ScalingSchedule::sqrt_nlogn(cfg::number(cfg::need(j, "a", "schedule"), "schedule.a"));
    else if (rule == "table") {
      std::vector<std::pair<long long, double>> rows;
      for (const auto& e : cfg::need(j, "entries", "schedule"))
        rows.emplace_back(e.at(0).get<long long>(), cfg::number(e.at(1), "schedule entry"));
      s = ScalingSchedule::from_table(std::move(rows));
    } else {
      fail(Errc::config_error, "schedule.lambda must be 'linear', 'sqrt-nlogn' or 'table'");
    }
  }
  if (j.contains("a_rule")) {
    const Json& a = j.at("a_rule");
    if (a.is_string()) {
      require(a.get<std::string>() == "analytic", Errc::config_error,
              "schedule.a_rule must be 'analytic' or {\"pilot\": N}");
    } else {
      s.with_empirical_a(cfg::need(a, "pilot", "schedule.a_rule").get<std::size_t>());
    }
  }
  return s;
}

}  // namespace rvwalk
