// subprocess.hpp - bounded-time command execution for the render bridge
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tabscore {

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    bool spawn_failed = false; // binary missing or not executable
    std::string output;        // combined stdout+stderr, capped
    double seconds = 0.0;
};

// Runs argv with the given working directory. Kills the whole process group
// on timeout. Output is capped at 256 KiB.
CommandResult run_command(const std::vector<std::string>& argv,
                          const std::string& workdir,
                          double timeout_sec);

// Splits a command line on whitespace, honoring single and double quotes.
std::vector<std::string> split_command(std::string_view command);

// Replaces "{name}" placeholders; unknown placeholders are left intact.
std::string substitute_placeholders(std::string_view templ,
                                    const std::map<std::string, std::string>& vars);

} // namespace tabscore
