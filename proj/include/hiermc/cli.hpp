#pragma once

namespace hiermc {

// Exit codes: 0 success, 1 usage, 2 data error, 3 sampler fault,
// 4 convergence failure under --require-converged.
int cli_main(int argc, const char* const* argv);

}  // namespace hiermc
