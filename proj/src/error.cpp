#include "fmridesign/error.hpp"

namespace fmridesign {

void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace fmridesign
