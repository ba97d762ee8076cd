#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "dexp/extlibs/bundle.h"
#include "dexp/harness.h"

namespace dexp {

/// Exit codes shared by the verbs.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitMissing = 2;

/// Evaluates a script and prints one preview per command. Exit 1 when a
/// preview is an error or the script has parse errors, 2 when the file
/// cannot be read.
int cli_run(const std::filesystem::path& script, const LibraryConfig& libs,
            std::ostream& out, std::ostream& err);

/// Prints parse and type diagnostics as `file:line:col: severity: message`.
/// Exit 1 when there are any.
int cli_check(const std::filesystem::path& script, const LibraryConfig& libs,
              std::ostream& out, std::ostream& err);

/// Replays an edit script and writes the CSV table; a histogram summary
/// goes to `out`.
int cli_bench(const std::filesystem::path& script, Strategy strategy,
              const LibraryConfig& libs, const std::filesystem::path& csv,
              std::ostream& out, std::ostream& err);

/// Serves the wire protocol until SIGINT or SIGTERM.
int cli_serve(std::uint16_t port, const LibraryConfig& libs, std::ostream& out,
              std::ostream& err);

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(std::string_view text,
                                             std::size_t offset);

}  // namespace dexp
