#include "alab/error.hpp"

namespace alab {

Error::Error(const std::string& reason, const std::string& detail)
    : std::runtime_error(detail.empty() ? reason : reason + ": " + detail), reason_(reason) {}

}  // namespace alab
