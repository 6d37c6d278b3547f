#pragma once

#include <stdexcept>
#include <string>

namespace rvwalk {

enum class Errc {
  invalid_atom,
  unsupported_centering,
  insufficient_pilot,
  schedule_out_of_range,
  missing_bound,
  cone_violation,
  invalid_epsilon,
  unsupported_shape,
  unbounded_near_origin,
  divergent_integral,
  infinite_measure,
  mixed_set,
  horizon_too_small,
  invalid_argument,
  config_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_atom:          return "invalid-atom";
    case Errc::unsupported_centering: return "unsupported-centering";
    case Errc::insufficient_pilot:    return "insufficient-pilot";
    case Errc::schedule_out_of_range: return "schedule-out-of-range";
    case Errc::missing_bound:         return "missing-bound";
    case Errc::cone_violation:        return "cone-violation";
    case Errc::invalid_epsilon:       return "invalid-epsilon";
    case Errc::unsupported_shape:     return "unsupported-shape";
    case Errc::unbounded_near_origin: return "unbounded-near-origin";
    case Errc::divergent_integral:    return "divergent-integral";
    case Errc::infinite_measure:      return "infinite-measure";
    case Errc::mixed_set:             return "mixed-set";
    case Errc::horizon_too_small:     return "horizon-too-small";
    case Errc::invalid_argument:      return "invalid-argument";
    case Errc::config_error:          return "config-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace rvwalk
