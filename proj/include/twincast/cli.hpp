#pragma once

namespace twincast::cli {

// Entry point behind the binary. Exit codes: 0 success, 1 usage/input
// error, 2 infeasibility or verification failure.
int execute(int argc, const char* const* argv);

}  // namespace twincast::cli
