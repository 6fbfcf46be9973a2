#pragma once

#include <stdexcept>
#include <string>

namespace lagdelta {

enum class ErrorCode {
  invalid_argument = 1,
  domain_error = 2,
  not_lagrangian = 3,
  plugin_rejected = 4,
  parse_error = 5,
  nonconvergence = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace lagdelta
