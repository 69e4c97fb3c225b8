#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace intent::text {

/// Reads a whole file; throws Error(Data) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` atomically enough for our purposes (truncate + write).
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view s, char delim);
std::string_view trim(std::string_view s);

/// Strict full-string numeric parses. Return false on any trailing garbage.
bool parse_double(std::string_view s, double& out);
bool parse_int64(std::string_view s, long long& out);

/// Parses `# key=value key=value ...` into a map. Returns false if the line
/// is not a header or a token is not key=value.
bool parse_header(std::string_view line, std::map<std::string, std::string>& out);

/// Shortest representation that round-trips through parse_double.
std::string format_double(double v);

}  // namespace intent::text
