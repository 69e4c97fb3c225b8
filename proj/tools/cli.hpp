#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intent::cli {

/// Exit codes: 0 success, 2 config, 3 data, 4 infeasible sampling, 5 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a flat `key = value` file into `--key=value` tokens. Blank lines and
/// lines starting with '#' are ignored.
std::vector<std::string> config_file_args(const std::string& path);

/// Moves config-file entries in front of the explicit arguments so that flags
/// given on the command line take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace intent::cli
