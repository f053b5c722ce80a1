#pragma once

#include <stdexcept>
#include <string>

namespace hms {

// Error codes surfaced by the library and mirrored verbatim in CLI error documents.
namespace errc {
inline constexpr const char* kInvalidArgument = "INVALID_ARGUMENT";
inline constexpr const char* kNotNilpotent = "NOT_NILPOTENT";
inline constexpr const char* kNonTransversal = "NON_TRANSVERSAL";
inline constexpr const char* kEndpointMismatch = "ENDPOINT_MISMATCH";
inline constexpr const char* kLevelMismatch = "LEVEL_MISMATCH";
inline constexpr const char* kDegreeMismatch = "DEGREE_MISMATCH";
inline constexpr const char* kIllConditioned = "ILL_CONDITIONED";
inline constexpr const char* kNotConverged = "NOT_CONVERGED";
inline constexpr const char* kNotInBasis = "NOT_IN_BASIS";
inline constexpr const char* kSchema = "SCHEMA";
}  // namespace errc

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const char* code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const char* code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace hms
