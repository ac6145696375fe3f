#pragma once

namespace rstlab {

// Full command-line surface. Returns 0 on success, 1 on a domain error,
// 2 on a usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace rstlab
