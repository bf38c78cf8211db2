#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace icf {

enum class ErrorKind {
  invalid_argument,
  grid_mismatch,
  non_finite,
  not_star_shaped,
  mean_convexity_lost,
  blowup_detected,
  initial_not_mean_convex,
  eps_too_large,
  config_syntax,
  config_value,
  io,
  nothing_verified,
};

std::string_view to_string(ErrorKind kind);

inline constexpr std::size_t no_node = std::numeric_limits<std::size_t>::max();

/// Structured failure raised by every module. `node` and `value` locate the
/// offending grid node and quantity when the failure is node-local.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t node = no_node,
        double value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), kind_(kind), node_(node), value_(value) {}

  ErrorKind kind() const { return kind_; }
  std::size_t node() const { return node_; }
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  std::size_t node_;
  double value_;
};

}  // namespace icf
