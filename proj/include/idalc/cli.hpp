#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace idalc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;

// Entry point of the `idalc` tool. `args` excludes the program name.
//   inspect --config PATH [--set k=v]...
//   run     --config PATH --out DIR [--set k=v]...
//   sweep   --config PATH --out DIR --axis detector|strategy|quorum [--set k=v]...
//   render  REPORT.json [--out DIR] [--format markdown|json]
int cli_run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// Applies IDALC_LOG (error, warn, info, debug; default warn) to the logger.
void configure_logging();

}  // namespace idalc
