#pragma once

namespace warped {

// Exit codes: 0 success, 1 configuration error, 2 blow-up detected,
// 3 acceptance check failed.
int run_cli(int argc, const char* const* argv);

} // namespace warped
