#include "ipd/error.hpp"

namespace ipd {

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kUsage:
      return 2;
    case ErrorCategory::kData:
      return 3;
    case ErrorCategory::kNumerical:
      return 4;
  }
  return 1;
}

}  // namespace ipd
