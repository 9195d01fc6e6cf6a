#ifndef ESS_ERROR_HPP
#define ESS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ess {

enum class ErrorCode {
  ShapeMismatch,
  AsymmetricTensor,
  NonFiniteEntry,
  DimensionMismatch,
  IndexOutOfRange,
  NonPositiveScale,
  InvalidStrategy,
  InvalidConfig,
  ParseError,
  EmptyGrid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ess

#endif  // ESS_ERROR_HPP
