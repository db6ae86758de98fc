#ifndef HEATGUIDE_ERRORS_HPP
#define HEATGUIDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heatguide {

/// Unmet operation precondition; the message names the violated bound.
class precondition_error : public std::logic_error {
 public:
  explicit precondition_error(const std::string& what) : std::logic_error(what) {}
};

/// Raised instead of silently producing Inf when a requested exponential
/// amplification exceeds the double range (exponent threshold 700).
class overflow_guard_error : public std::runtime_error {
 public:
  explicit overflow_guard_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace heatguide

#endif
