#pragma once

#include <stdexcept>
#include <string>

namespace embr {

// Exit-code contract used by the CLI: 1 usage, 2 data/format, 3 numeric.
enum class ErrorKind {
  Usage,
  BadMagic,
  BadVersion,
  TruncatedPayload,
  NonFiniteValue,
  BadFormat,
  Io,
  Numeric,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace embr
