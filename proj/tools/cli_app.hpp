#pragma once

namespace reprrec::cli {

// Full command-line surface; returns the process exit code (0 only when every
// requested artifact was fully written).
int run(int argc, const char* const* argv);

}  // namespace reprrec::cli
