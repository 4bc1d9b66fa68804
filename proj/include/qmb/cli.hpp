#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmb::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kUsage = 1, kConfigError = 2, kNonConvergence = 3 };

// Full command line, argv[0] included.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Violations of a TOML or JSON run config, one message each. The config must
// name its subcommand. Throws std::runtime_error if the file cannot be read.
std::vector<std::string> validate_config_file(const std::string& path);
std::vector<std::string> validate_config_text(const std::string& text, bool json);

}  // namespace qmb::cli
