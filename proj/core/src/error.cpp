#include "teleop/error.hpp"

#include <utility>

namespace teleop {

ParseError::ParseError(const std::string& what, int line, std::string section)
    : Error("line " + std::to_string(line) +
            (section.empty() ? std::string{} : " [" + section + "]") + ": " +
            what),
      line_(line),
      section_(std::move(section)) {}

}  // namespace teleop
