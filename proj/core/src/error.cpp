#include "alcnn/error.hpp"

namespace alcnn {

void throw_invalid(const std::string& what) { throw InvalidInput(what); }

}  // namespace alcnn
