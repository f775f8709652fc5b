#pragma once

#include <iosfwd>

namespace karlin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedVerification = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `karlin` binary; stdout/stderr are injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace karlin::cli
