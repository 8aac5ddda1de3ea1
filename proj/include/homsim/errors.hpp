#pragma once

#include <stdexcept>
#include <string>

namespace homsim {

// Raised when a kernel is evaluated outside its resolvable tau window, or
// when a time integral would run past it.
class window_error : public std::runtime_error {
 public:
  explicit window_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for kernels that do not decay (e.g. a monochromatic source), for
// which time-integrated figures of merit diverge with the window.
class decay_error : public window_error {
 public:
  explicit decay_error(const std::string& msg) : window_error(msg) {}
};

// Raised by the config parser; carries file/line context in the message.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace homsim
