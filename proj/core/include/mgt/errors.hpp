#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

/// Bad configuration: unknown or malformed keys, incompatible kernel/path
/// pairs, malformed ranges. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mgt
