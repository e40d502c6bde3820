#pragma once

#include <ostream>

namespace ragattr::cli {

// Exit codes: 0 success, 1 oracle or runtime failure, 2 usage or config error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ragattr::cli
