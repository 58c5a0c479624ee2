#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hbubble {

// 64-bit FNV-1a; stable across platforms, used for config and field hashes.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// %.17g: every report and dump float goes through here.
std::string format17(double v);
// %g, for identifiers built from parameters.
std::string format_short(double v);

struct KeyValue {
    std::string key;
    std::string value;  // surrounding quotes removed
    int line = 0;
};

// `key = value` lines; `#` starts a comment outside quotes; blank lines skipped.
std::vector<KeyValue> parse_key_values(std::string_view text);

double parse_double(const std::string& text, int line);
long parse_long(const std::string& text, int line);

std::string trim(std::string_view s);

}  // namespace hbubble
