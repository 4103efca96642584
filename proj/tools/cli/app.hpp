#pragma once

namespace geophase::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `geophase` binary; returns the process exit code.
int run(int argc, char** argv);

}  // namespace geophase::cli
