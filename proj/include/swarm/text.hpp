#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace swarm::text {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Whole-string parses; return false on any trailing garbage.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);
bool parse_u64(std::string_view s, std::uint64_t& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

// Parses `key=value` lines. Blank lines and lines starting with '#' are
// skipped. Throws ConfigError on malformed lines or duplicate keys; `source`
// names the input in messages.
std::vector<KeyValue> parse_key_values(std::string_view content, const std::string& source);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace swarm::text
