#pragma once

#include <ostream>

namespace gale {

// Runs compact versions of every module's property suite, printing one line
// per check. Returns true iff everything passed.
bool run_selftests(std::ostream& out);

}  // namespace gale
