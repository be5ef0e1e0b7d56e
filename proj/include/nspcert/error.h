#ifndef NSPCERT_ERROR_H_
#define NSPCERT_ERROR_H_

#include <stdexcept>
#include <string>

namespace nspcert {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMalformedFile,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kBudgetExceeded,
  kNumerical,
};

const char* ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nspcert

#endif  // NSPCERT_ERROR_H_
