#pragma once

#include <stdexcept>
#include <string>

namespace cpsarch {

/// Input text is not syntactically valid (JSON, XML, STL, CSV).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Input parsed but does not match the expected document shape or version.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cpsarch
