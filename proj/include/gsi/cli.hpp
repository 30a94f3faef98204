#pragma once

#include <iosfwd>

namespace gsi {

// Entry point of the `gsi` tool. Returns 0 on success, 1 on usage errors and
// 2 on data or computation errors (with a diagnostic naming the stage).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gsi
